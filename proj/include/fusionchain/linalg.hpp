#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace fc {

using cplx = std::complex<double>;

template <class T>
using mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using cmat = mat<cplx>;
using cvec = vec<cplx>;
using rmat = mat<double>;
using rvec = vec<double>;

using rng_t = std::mt19937_64;

// Orthonormal basis of the kernel of a, singular values below rtol * max(1, s_max) count as zero.
template <class T>
mat<T> null_space(const mat<T>& a, double rtol = 1e-9);

template <class T>
int numerical_rank(const mat<T>& a, double rtol = 1e-9);

// Orthonormal basis of the column span, ordered Gram-Schmidt with reorthogonalization.
template <class T>
mat<T> orthonormal_columns(const mat<T>& a, double tol = 1e-10);

template <class T>
double spectral_norm(const mat<T>& a);

template <class T>
double max_abs(const mat<T>& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

cmat random_cmat(Eigen::Index rows, Eigen::Index cols, rng_t& rng);
cmat random_hermitian(Eigen::Index n, rng_t& rng);

// Moore-Penrose inverse of a Hermitian positive semidefinite matrix.
cmat psd_pinv(const cmat& a, double cutoff = 1e-12);

struct eigen_cluster {
    double value;
    cmat vectors;  // orthonormal columns
};

// Spectral projections of a Hermitian matrix, eigenvalues merged within gap.
std::vector<eigen_cluster> hermitian_clusters(const cmat& h, double gap);

}  // namespace fc
