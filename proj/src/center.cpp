#include "fusionchain/center.hpp"

#include "fusionchain/duality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace fc {

namespace {

word one(int a) { return word{object{a}}; }
word site_word(const object& x) { return word{x}; }

// [sub] -> [full], summand s of sub goes to summand offset + s of full.
morphism summand_inclusion(const category& cat, const object& sub, const object& full, int offset) {
    morphism m = morphism::zero(cat, site_word(sub), site_word(full));
    auto bs = basis_of(cat, m.src);
    auto bf = basis_of(cat, m.tgt);
    for (size_t s = 0; s < sub.size(); ++s) {
        int Y = sub[s];
        int r = bf->find(Y, fusion_tree{{offset + static_cast<int>(s)}, {Y}, {0}});
        int c = bs->find(Y, fusion_tree{{static_cast<int>(s)}, {Y}, {0}});
        m.blk[Y](r, c) = 1.0;
    }
    return m;
}

// Underlying simples of the word w, one per tree, and the unitary J : [z] -> w.
std::pair<object, morphism> flatten_word(const category& cat, const word& w) {
    auto B = basis_of(cat, w);
    object z;
    for (int Y = 0; Y < cat.rank(); ++Y)
        for (int t = 0; t < B->dim(Y); ++t) z.push_back(Y);
    morphism J = morphism::zero(cat, site_word(z), w);
    auto bz = basis_of(cat, J.src);
    int s = 0;
    for (int Y = 0; Y < cat.rank(); ++Y)
        for (int t = 0; t < B->dim(Y); ++t, ++s) J.blk[Y](t, bz->find(Y, fusion_tree{{s}, {Y}, {0}})) = 1.0;
    return {z, J};
}

// Transpose of f : [j] -> [i, x] as a map [x*, i*] -> [j*].
morphism transpose(const category& cat, const morphism& f) {
    auto dA = duality_morphisms(cat, f.src);
    auto dB = duality_morphisms(cat, f.tgt);
    morphism a = tensor_id(dA.R, dB.wdual);
    morphism b = id_tensor(dA.wdual, tensor_id(f, dB.wdual));
    morphism c = id_tensor(dA.wdual, dB.Rbar.adjoint());
    return c * b * a;
}

// Induction formula: c_{x, ij} : [i*] m [i, x] -> [x, j*] m [j].
morphism induction_block(const category& cat, const word& mid, int x, int i, int j) {
    word iw = one(i), jw = one(j), xw = one(x);
    word src = concat(concat(one(cat.dual(i)), mid), concat(iw, xw));
    word tgt = concat(concat(xw, one(cat.dual(j))), concat(mid, jw));
    morphism out = morphism::zero(cat, src, tgt);
    int nmult = cat.N(i, x, j);
    if (nmult == 0) return out;
    auto dx = duality_morphisms(cat, xw);
    morphism lift = tensor(dx.Rbar, morphism::identity(cat, src));
    word ix = concat(iw, xw);
    for (int al = 0; al < nmult; ++al) {
        morphism w = tree_vector(cat, ix, j, al);
        morphism v = w.adjoint();
        morphism vd = transpose(cat, w);
        morphism mid_map = tensor(morphism::identity(cat, xw), tensor(vd, tensor(morphism::identity(cat, mid), v)));
        out += mid_map * lift;
    }
    out *= std::sqrt(cat.dim(i) / cat.dim(j));
    return out;
}

center_object induced_like(const category& cat, const word& mid) {
    const int n = cat.rank();
    center_object Z;
    Z.cat = &cat;
    std::vector<morphism> K;
    std::vector<object> parts;
    std::vector<morphism> Js;
    for (int i = 0; i < n; ++i) {
        word w = concat(concat(one(cat.dual(i)), mid), one(i));
        auto [zi, J] = flatten_word(cat, w);
        parts.push_back(zi);
        Js.push_back(J);
        Z.z.insert(Z.z.end(), zi.begin(), zi.end());
    }
    int off = 0;
    for (int i = 0; i < n; ++i) {
        morphism iota = summand_inclusion(cat, parts[i], Z.z, off);
        K.push_back(Js[i] * iota.adjoint());  // [z] -> [i*] m [i]
        off += static_cast<int>(parts[i].size());
    }
    for (int x = 0; x < n; ++x) {
        morphism cx = morphism::zero(cat, word{Z.z, object{x}}, word{object{x}, Z.z});
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (!cat.N(i, x, j)) continue;
                morphism blk = induction_block(cat, mid, x, i, j);
                cx += id_tensor(one(x), K[j].adjoint()) * blk * tensor_id(K[i], one(x));
            }
        Z.c.push_back(cx);
    }
    return Z;
}

}  // namespace

std::vector<int> center_object::multiplicities() const {
    std::vector<int> m(cat->rank(), 0);
    for (int a : z) ++m[a];
    return m;
}

center_object unit_center_object(const category& cat) {
    center_object Z;
    Z.cat = &cat;
    Z.z = {0};
    Z.name = "1";
    for (int x = 0; x < cat.rank(); ++x) {
        morphism c = morphism::zero(cat, word{object{0}, object{x}}, word{object{x}, object{0}});
        c.blk[x](0, 0) = 1.0;
        Z.c.push_back(c);
    }
    return Z;
}

center_object regular_center_object(const category& cat) {
    center_object Z = induced_like(cat, {});
    Z.name = "Zreg";
    return Z;
}

center_object induced_object(const category& cat, int a) {
    center_object Z = induced_like(cat, one(a));
    Z.name = "I(" + cat.labels[a].name + ")";
    return Z;
}

center_object direct_sum(const std::vector<center_object>& parts) {
    if (parts.empty()) throw std::invalid_argument("empty direct sum");
    const category& cat = *parts[0].cat;
    center_object Z;
    Z.cat = &cat;
    for (const auto& p : parts) Z.z.insert(Z.z.end(), p.z.begin(), p.z.end());
    std::vector<morphism> iota;
    int off = 0;
    for (const auto& p : parts) {
        iota.push_back(summand_inclusion(cat, p.z, Z.z, off));
        off += static_cast<int>(p.z.size());
    }
    for (int x = 0; x < cat.rank(); ++x) {
        morphism cx = morphism::zero(cat, word{Z.z, object{x}}, word{object{x}, Z.z});
        for (size_t k = 0; k < parts.size(); ++k)
            cx += id_tensor(one(x), iota[k]) * parts[k].c[x] * tensor_id(iota[k].adjoint(), one(x));
        Z.c.push_back(cx);
    }
    return Z;
}

center_object restrict_to(const center_object& Z, const morphism& u, const object& znew) {
    const category& cat = *Z.cat;
    center_object r;
    r.cat = &cat;
    r.z = znew;
    r.name = Z.name;
    for (int x = 0; x < cat.rank(); ++x) r.c.push_back(id_tensor(one(x), u.adjoint()) * Z.c[x] * tensor_id(u, one(x)));
    return r;
}

morphism half_braiding_site(const center_object& Z, const object& x) {
    const category& cat = *Z.cat;
    morphism out = morphism::zero(cat, word{Z.z, x}, word{x, Z.z});
    for (size_t s = 0; s < x.size(); ++s) {
        morphism iota = summand_inclusion(cat, object{x[s]}, x, static_cast<int>(s));
        out += tensor_id(iota, site_word(Z.z)) * Z.c[x[s]] * id_tensor(site_word(Z.z), iota.adjoint());
    }
    return out;
}

morphism half_braiding(const center_object& Z, const word& w) {
    const category& cat = *Z.cat;
    if (w.empty()) return morphism::identity(cat, site_word(Z.z));
    morphism acc = half_braiding_site(Z, w[0]);
    for (size_t i = 1; i < w.size(); ++i) {
        word prefix = slice(w, 0, i);
        acc = id_tensor(prefix, half_braiding_site(Z, w[i])) * tensor_id(acc, site_word(w[i]));
    }
    return acc;
}

morphism monodromy(const center_object& A, const center_object& B) {
    return half_braiding_site(B, A.z) * half_braiding_site(A, B.z);
}

half_braiding_report verify_half_braiding(const center_object& Z, rng_t& rng, double tol) {
    const category& cat = *Z.cat;
    const int n = cat.rank();
    half_braiding_report r;
    word zw = site_word(Z.z);
    for (int x = 0; x < n; ++x) {
        const morphism& c = Z.c[x];
        r.unitarity = std::max(r.unitarity, distance(c.adjoint() * c, morphism::identity(cat, c.src)));
        r.unitarity = std::max(r.unitarity, distance(c * c.adjoint(), morphism::identity(cat, c.tgt)));
    }
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            word xy = simple_word({x, y});
            morphism cxy = half_braiding(Z, xy);
            for (int u = 0; u < n; ++u)
                for (int mu = 0; mu < cat.N(x, y, u); ++mu) {
                    morphism v = tree_vector(cat, xy, u, mu);
                    morphism lhs = tensor_id(v, zw) * Z.c[u];
                    morphism rhs = cxy * id_tensor(zw, v);
                    r.hexagon = std::max(r.hexagon, distance(lhs, rhs));
                }
        }
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::uniform_int_distribution<int> len(2, 3);
    for (int t = 0; t < 6; ++t) {
        std::vector<int> a(len(rng)), b(len(rng));
        for (int& v : a) v = pick(rng);
        for (int& v : b) v = pick(rng);
        word wa = simple_word(a), wb = simple_word(b);
        morphism f = morphism::zero(cat, wa, wb);
        for (auto& blk : f.blk) blk = random_cmat(blk.rows(), blk.cols(), rng);
        if (f.size() == 0) continue;
        morphism lhs = tensor_id(f, zw) * half_braiding(Z, wa);
        morphism rhs = half_braiding(Z, wb) * id_tensor(zw, f);
        r.naturality = std::max(r.naturality, distance(lhs, rhs) / std::max(1.0, f.max_abs()));
    }
    r.pass = r.unitarity <= tol && r.hexagon <= tol && r.naturality <= tol;
    return r;
}

std::vector<morphism> center_homs(const center_object& A, const center_object& B, double tol) {
    const category& cat = *A.cat;
    morphism shape = morphism::zero(cat, site_word(A.z), site_word(B.z));
    const Eigen::Index D = shape.size();
    if (D == 0) return {};
    std::vector<cmat> parts;
    Eigen::Index rows = 0;
    for (int x = 0; x < cat.rank(); ++x) {
        cmat M;
        for (Eigen::Index j = 0; j < D; ++j) {
            cvec u = cvec::Zero(D);
            u(j) = 1.0;
            morphism T = unflatten(shape, u);
            cvec col = flatten(id_tensor(one(x), T) * A.c[x] - B.c[x] * tensor_id(T, one(x)));
            if (j == 0) M = cmat::Zero(col.size(), D);
            M.col(j) = col;
        }
        rows += M.rows();
        parts.push_back(M);
    }
    cmat all(rows, D);
    Eigen::Index o = 0;
    for (const auto& p : parts) {
        all.middleRows(o, p.rows()) = p;
        o += p.rows();
    }
    cmat ns = null_space(all, tol);
    std::vector<morphism> out;
    for (Eigen::Index j = 0; j < ns.cols(); ++j) out.push_back(unflatten(shape, ns.col(j)));
    return out;
}

tube_algebra make_tube_algebra(const category& cat, rng_t& rng) {
    const int n = cat.rank();
    tube_algebra t;
    std::vector<center_object> parts;
    for (int a = 0; a < n; ++a) parts.push_back(induced_object(cat, a));
    t.I = direct_sum(parts);
    t.I.name = "tube";
    t.alg = subalgebra{site_word(t.I.z), center_homs(t.I, t.I)};
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int x = 0; x < n; ++x)
                for (int u = 0; u < n; ++u) t.dim_count += static_cast<long>(cat.N(x, a, u)) * cat.N(b, x, u);
    const auto& B = t.alg.basis;
    if (B.empty()) return t;
    cmat Q(B[0].size(), static_cast<Eigen::Index>(B.size()));
    for (size_t i = 0; i < B.size(); ++i) Q.col(i) = flatten(B[i]);
    std::uniform_int_distribution<size_t> pick(0, B.size() - 1);
    bool comm = true;
    for (int s = 0; s < 40; ++s) {
        const morphism& x = B[pick(rng)];
        const morphism& y = B[pick(rng)];
        cvec v = flatten(x * y);
        t.closure_residual = std::max(t.closure_residual, (v - Q * (Q.adjoint() * v)).norm());
        cvec a = flatten(x.adjoint());
        t.adjoint_residual = std::max(t.adjoint_residual, (a - Q * (Q.adjoint() * a)).norm());
        if (distance(x * y, y * x) > 1e-9) comm = false;
    }
    t.commutative = comm;
    if (B.size() <= 16) {
        for (const auto& x : B)
            for (const auto& y : B)
                if (distance(x * y, y * x) > 1e-9) comm = false;
        t.commutative = comm;
    }
    return t;
}

cplx twist(const center_object& Z) {
    morphism c = half_braiding_site(Z, Z.z);
    return unnormalized_trace(c) / Z.qdim();
}

namespace {

struct simple_key {
    bool nonunit;
    double qdim;
    std::vector<int> negmult;
    double arg;
    std::vector<double> traces;
    bool operator<(const simple_key& o) const {
        return std::tie(nonunit, qdim, negmult, arg, traces) < std::tie(o.nonunit, o.qdim, o.negmult, o.arg, o.traces);
    }
};

double round6(double v) { return std::round(v * 1e6) / 1e6; }

simple_key key_of(const center_simple& s) {
    const category& cat = *s.obj.cat;
    simple_key k;
    bool unit_like = s.mult[0] == 1 && s.obj.z.size() == 1;
    if (unit_like)
        for (int x = 0; x < cat.rank(); ++x)
            if (std::abs(s.obj.c[x].blk[x].trace() - 1.0) > 1e-8) unit_like = false;
    k.nonunit = !unit_like;
    k.qdim = round6(s.qdim);
    for (int m : s.mult) k.negmult.push_back(-m);
    double a = std::arg(s.twist);
    if (a < -1e-9) a += 2 * M_PI;
    k.arg = round6(std::max(0.0, a));
    for (int x = 0; x < cat.rank(); ++x) {
        cplx t2 = 0;
        for (const auto& b : s.obj.c[x].blk)
            if (b.rows() == b.cols()) t2 += b.trace();
        k.traces.push_back(round6(t2.real()));
        k.traces.push_back(round6(t2.imag()));
    }
    return k;
}

}  // namespace

std::vector<center_simple> center_simples(const tube_algebra& t, rng_t& rng) {
    const category& cat = *t.I.cat;
    const int n = cat.rank();
    auto zc = algebra_center(cat, t.alg, rng);
    std::normal_distribution<double> nd;
    std::vector<center_simple> out;
    for (const morphism& p : zc.projections) {
        morphism h = morphism::zero(cat, t.alg.w, t.alg.w);
        for (const auto& b : t.alg.basis) h += cplx(nd(rng), nd(rng)) * b;
        h = p * (h + h.adjoint()) * p;
        // lowest eigenvalue of h on the range of p
        double lo = 1e300;
        std::vector<Eigen::SelfAdjointEigenSolver<cmat>> es(n);
        std::vector<cmat> range(n);
        for (int Y = 0; Y < n; ++Y) {
            if (p.blk[Y].size() == 0) continue;
            Eigen::SelfAdjointEigenSolver<cmat> ep(p.blk[Y]);
            std::vector<Eigen::Index> cols;
            for (Eigen::Index i = 0; i < ep.eigenvalues().size(); ++i)
                if (ep.eigenvalues()(i) > 0.5) cols.push_back(i);
            range[Y] = cmat(p.blk[Y].rows(), static_cast<Eigen::Index>(cols.size()));
            for (size_t i = 0; i < cols.size(); ++i) range[Y].col(i) = ep.eigenvectors().col(cols[i]);
            if (range[Y].cols() == 0) continue;
            es[Y].compute(range[Y].adjoint() * h.blk[Y] * range[Y]);
            lo = std::min(lo, es[Y].eigenvalues()(0));
        }
        double scale = std::max(1.0, std::abs(lo));
        center_simple s;
        s.mult.assign(n, 0);
        std::vector<cmat> iso(n);
        for (int Y = 0; Y < n; ++Y) {
            if (range[Y].cols() == 0) continue;
            std::vector<Eigen::Index> pick;
            for (Eigen::Index i = 0; i < es[Y].eigenvalues().size(); ++i)
                if (es[Y].eigenvalues()(i) - lo < 1e-7 * scale) pick.push_back(i);
            cmat v(range[Y].rows(), static_cast<Eigen::Index>(pick.size()));
            for (size_t i = 0; i < pick.size(); ++i) v.col(i) = range[Y] * es[Y].eigenvectors().col(pick[i]);
            cmat q = v * v.adjoint();
            iso[Y] = orthonormal_columns(q, 1e-8);
            s.mult[Y] = static_cast<int>(iso[Y].cols());
        }
        object znew;
        for (int Y = 0; Y < n; ++Y)
            for (int m = 0; m < s.mult[Y]; ++m) znew.push_back(Y);
        morphism u = morphism::zero(cat, site_word(znew), t.alg.w);
        for (int Y = 0; Y < n; ++Y)
            if (s.mult[Y]) u.blk[Y] = iso[Y];
        s.obj = restrict_to(t.I, u, znew);
        s.qdim = s.obj.qdim();
        s.twist = twist(s.obj);
        out.push_back(std::move(s));
    }
    std::vector<std::pair<simple_key, size_t>> keys;
    for (size_t i = 0; i < out.size(); ++i) keys.push_back({key_of(out[i]), i});
    std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<center_simple> sorted;
    for (const auto& [k, i] : keys) sorted.push_back(out[i]);
    for (size_t i = 0; i < sorted.size(); ++i) {
        sorted[i].id = static_cast<int>(i);
        auto& o = sorted[i].obj;
        if (cat.name == "vec_z2") {
            bool g = sorted[i].mult[1] > 0;
            double tr = 0;
            for (const auto& b : sorted[i].obj.c[1].blk) tr += b.trace().real();
            bool minus = tr < 0;
            o.name = !g ? (minus ? "m" : "1") : (minus ? "f" : "e");
        } else {
            o.name = i == 0 ? "1" : "Z" + std::to_string(i);
        }
    }
    return sorted;
}

std::vector<int> decompose(const center_object& Z, const std::vector<center_simple>& simples) {
    std::vector<int> r;
    for (const auto& s : simples) r.push_back(static_cast<int>(center_homs(s.obj, Z).size()));
    return r;
}

cmat tube_s_matrix(const std::vector<center_simple>& s) {
    const Eigen::Index m = static_cast<Eigen::Index>(s.size());
    cmat S(m, m);
    if (m == 0) return S;
    double D = s[0].obj.cat->total_dim_sq();
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b) S(a, b) = unnormalized_trace(monodromy(s[a].obj, s[b].obj)) / D;
    return S;
}

cmat tube_t_matrix(const std::vector<center_simple>& s) {
    const Eigen::Index m = static_cast<Eigen::Index>(s.size());
    cmat T = cmat::Zero(m, m);
    for (Eigen::Index a = 0; a < m; ++a) T(a, a) = s[a].twist;
    return T;
}

modular_check check_modular(const cmat& S, const cmat& T, double tol) {
    modular_check r;
    const Eigen::Index m = S.rows();
    r.s_unitarity = max_abs<cplx>(S * S.adjoint() - cmat::Identity(m, m));
    r.s_symmetry = max_abs<cplx>(S - S.transpose());
    double best = 1e300;
    for (int conj = 0; conj < 2; ++conj) {
        cmat Tt = conj ? cmat(T.conjugate()) : T;
        cmat st = S * Tt;
        cmat X = st * st * st;
        cmat Y = S * S;
        cplx p = (Y.adjoint() * X).trace() / (Y.adjoint() * Y).trace();
        double d = max_abs<cplx>(X - p * Y) + std::abs(std::abs(p) - 1.0);
        if (d < best) {
            best = d;
            r.st_phase = p;
        }
    }
    r.st_relation = best;
    r.modular = r.s_unitarity <= tol;
    return r;
}

}  // namespace fc
