#include "fusionchain/linalg.hpp"

#include <algorithm>

namespace fc {

template <class T>
static Eigen::BDCSVD<mat<T>> full_svd(const mat<T>& a) {
    return Eigen::BDCSVD<mat<T>>(a, Eigen::ComputeFullV | Eigen::ComputeThinU);
}

template <class T>
mat<T> null_space(const mat<T>& a, double rtol) {
    const Eigen::Index n = a.cols();
    if (n == 0) return mat<T>(0, 0);
    if (a.rows() == 0) return mat<T>::Identity(n, n);
    // Square up tall systems first: QR keeps the singular values of a.
    mat<T> work = a;
    if (a.rows() > 2 * n) {
        Eigen::HouseholderQR<mat<T>> qr(a);
        work = qr.matrixQR().topRows(n).template triangularView<Eigen::Upper>();
    }
    auto svd = full_svd(work);
    const auto& s = svd.singularValues();
    double smax = s.size() ? s(0) : 0.0;
    double thr = rtol * std::max(1.0, smax);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > thr) ++r;
    return svd.matrixV().rightCols(n - r);
}

template <class T>
int numerical_rank(const mat<T>& a, double rtol) {
    if (a.size() == 0) return 0;
    mat<T> work = a;
    if (a.rows() > 2 * a.cols()) {
        Eigen::HouseholderQR<mat<T>> qr(a);
        work = qr.matrixQR().topRows(a.cols()).template triangularView<Eigen::Upper>();
    } else if (a.cols() > 2 * a.rows()) {
        mat<T> at = a.adjoint();
        Eigen::HouseholderQR<mat<T>> qr(at);
        work = qr.matrixQR().topRows(a.rows()).template triangularView<Eigen::Upper>();
    }
    Eigen::BDCSVD<mat<T>> svd(work);
    const auto& s = svd.singularValues();
    double thr = rtol * std::max(1.0, s.size() ? s(0) : 0.0);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > thr) ++r;
    return r;
}

template <class T>
mat<T> orthonormal_columns(const mat<T>& a, double tol) {
    std::vector<vec<T>> kept;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        vec<T> v = a.col(j);
        double n0 = v.norm();
        if (n0 <= tol) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : kept) v -= q * q.dot(v);
        double n1 = v.norm();
        if (n1 <= tol * std::max(1.0, n0)) continue;
        kept.push_back(v / n1);
    }
    mat<T> out(a.rows(), static_cast<Eigen::Index>(kept.size()));
    for (size_t j = 0; j < kept.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = kept[j];
    return out;
}

template <class T>
double spectral_norm(const mat<T>& a) {
    if (a.size() == 0) return 0.0;
    Eigen::BDCSVD<mat<T>> svd(a);
    return svd.singularValues()(0);
}

template cmat null_space<cplx>(const cmat&, double);
template rmat null_space<double>(const rmat&, double);
template int numerical_rank<cplx>(const cmat&, double);
template int numerical_rank<double>(const rmat&, double);
template cmat orthonormal_columns<cplx>(const cmat&, double);
template rmat orthonormal_columns<double>(const rmat&, double);
template double spectral_norm<cplx>(const cmat&);
template double spectral_norm<double>(const rmat&);

cmat random_cmat(Eigen::Index rows, Eigen::Index cols, rng_t& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    cmat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            double re = g(rng);
            double im = g(rng);
            m(i, j) = cplx(re, im);
        }
    return m;
}

cmat random_hermitian(Eigen::Index n, rng_t& rng) {
    cmat m = random_cmat(n, n, rng);
    return (m + m.adjoint()) * 0.5;
}

cmat psd_pinv(const cmat& a, double cutoff) {
    if (a.size() == 0) return a;
    Eigen::SelfAdjointEigenSolver<cmat> es(a);
    const rvec& ev = es.eigenvalues();
    double top = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
    rvec inv(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) inv(i) = ev(i) > cutoff * top ? 1.0 / ev(i) : 0.0;
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<eigen_cluster> hermitian_clusters(const cmat& h, double gap) {
    std::vector<eigen_cluster> out;
    if (h.size() == 0) return out;
    Eigen::SelfAdjointEigenSolver<cmat> es(h);
    const rvec& ev = es.eigenvalues();
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= ev.size(); ++i) {
        if (i == ev.size() || ev(i) - ev(i - 1) > gap) {
            eigen_cluster c;
            c.value = ev.segment(start, i - start).mean();
            c.vectors = es.eigenvectors().middleCols(start, i - start);
            out.push_back(std::move(c));
            start = i;
        }
    }
    return out;
}

}  // namespace fc
