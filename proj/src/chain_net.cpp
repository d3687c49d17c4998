#include "fusionchain/chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fc {

namespace {

cmat kron(const cmat& a, const cmat& b) {
    cmat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    size_t b = s.find_last_not_of(" \t");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

object chain_spec::site(int n) const {
    const int L = static_cast<int>(pattern.size());
    return pattern[((n % L) + L) % L];
}

word chain_spec::interval(int a, int b) const {
    word w;
    for (int n = a; n <= b; ++n) w.push_back(site(n));
    return w;
}

object default_site_object(const category& cat) {
    if (cat.name == "trivial") return {0};
    if (cat.name == "fibonacci" || cat.name == "ising") return {1};
    if (cat.name == "vec_z2" || cat.name == "vec_z3") return {0, 1};
    object x;
    for (int a = 0; a < cat.rank(); ++a) x.push_back(a);
    return x;
}

object parse_object(const category& cat, const std::string& s) {
    object x;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, '+')) {
        part = trim(part);
        int a = cat.label_of(part);
        if (a < 0) throw input_error("unknown simple '" + part + "'");
        x.push_back(a);
    }
    if (x.empty()) throw input_error("empty site object");
    return x;
}

std::vector<object> parse_objects(const category& cat, const std::string& s) {
    std::vector<object> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(parse_object(cat, part));
    if (out.empty()) throw input_error("empty object list");
    return out;
}

std::string object_name(const category& cat, const object& x) {
    std::string s;
    for (size_t i = 0; i < x.size(); ++i) s += (i ? "+" : "") + cat.labels[x[i]].name;
    return s;
}

chain_spec make_chain(const category& cat, int k, std::vector<object> pattern) {
    if (k < 1) throw input_error("window must be >= 1");
    if (pattern.empty()) pattern.push_back(default_site_object(cat));
    for (const auto& x : pattern)
        for (int a : x)
            if (a < 0 || a >= cat.rank()) throw input_error("site object outside category");
    return chain_spec{&cat, k, std::move(pattern)};
}

std::vector<long> multiplicities(const category& cat, const word& w) {
    const int n = cat.rank();
    std::vector<long> v(n, 0);
    v[0] = 1;
    for (const auto& site : w) {
        std::vector<long> u(n, 0);
        for (int e = 0; e < n; ++e) {
            if (!v[e]) continue;
            for (int a : site)
                for (int y = 0; y < n; ++y) u[y] += v[e] * cat.N(e, a, y);
        }
        v = std::move(u);
    }
    return v;
}

std::vector<int> support(const category& cat, const word& w) {
    auto m = multiplicities(cat, w);
    std::vector<int> s;
    for (int a = 0; a < cat.rank(); ++a)
        if (m[a]) s.push_back(a);
    return s;
}

interval_algebra make_interval_algebra(const chain_spec& ch, int a, int b) {
    if (a < ch.lo() || b > ch.hi() || a > b) throw std::out_of_range("interval outside window");
    interval_algebra r;
    r.a = a;
    r.b = b;
    r.w = ch.interval(a, b);
    r.m = multiplicities(*ch.cat, r.w);
    for (long x : r.m) r.dim += x * x;
    return r;
}

morphism include_element(const chain_spec& ch, const morphism& x, int a, int b, int c, int d) {
    if (c > a || d < b) throw std::invalid_argument("intervals not nested");
    morphism r = x;
    if (d > b) r = tensor_id(r, ch.interval(b + 1, d));
    if (c < a) r = id_tensor(ch.interval(c, a - 1), r);
    return r;
}

morphism matrix_unit(const category& cat, const word& w, int Y, int r, int c) {
    morphism m = morphism::zero(cat, w, w);
    m.blk[Y](r, c) = 1.0;
    return m;
}

half_lines half_line_algebras(const chain_spec& ch) {
    half_lines h;
    h.minus = make_interval_algebra(ch, -ch.k, -1);
    h.plus = make_interval_algebra(ch, 0, ch.k);
    h.window = make_interval_algebra(ch, -ch.k, ch.k);
    h.b0_dim = h.minus.dim * h.plus.dim;
    return h;
}

subalgebra full_algebra(const category& cat, const word& w) {
    subalgebra s{w, {}};
    auto B = basis_of(cat, w);
    for (int Y = 0; Y < cat.rank(); ++Y)
        for (int i = 0; i < B->dim(Y); ++i)
            for (int j = 0; j < B->dim(Y); ++j) s.basis.push_back(matrix_unit(cat, w, Y, i, j));
    return s;
}

std::vector<morphism> orthonormalize(const std::vector<morphism>& v, double tol) {
    if (v.empty()) return {};
    cmat a(v[0].size(), static_cast<Eigen::Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) a.col(i) = flatten(v[i]);
    cmat q = orthonormal_columns(a, tol);
    std::vector<morphism> out;
    for (Eigen::Index j = 0; j < q.cols(); ++j) out.push_back(unflatten(v[0], q.col(j)));
    return out;
}

subalgebra commutant(const category& cat, const std::vector<morphism>& gens, const word& w, double tol) {
    if (gens.empty()) return full_algebra(cat, w);
    subalgebra s{w, {}};
    auto B = basis_of(cat, w);
    for (int Y = 0; Y < cat.rank(); ++Y) {
        const Eigen::Index m = B->dim(Y);
        if (m == 0) continue;
        cmat I = cmat::Identity(m, m);
        cmat rows(static_cast<Eigen::Index>(gens.size()) * m * m, m * m);
        for (size_t i = 0; i < gens.size(); ++i) {
            const cmat& g = gens[i].blk[Y];
            rows.middleRows(static_cast<Eigen::Index>(i) * m * m, m * m) = kron(I, g) - kron(g.transpose(), I);
        }
        cmat ns = null_space(rows, tol);
        for (Eigen::Index j = 0; j < ns.cols(); ++j) {
            morphism x = morphism::zero(cat, w, w);
            x.blk[Y] = Eigen::Map<const cmat>(ns.col(j).data(), m, m);
            s.basis.push_back(x);
        }
    }
    return s;
}

subalgebra generated_algebra(const category& cat, const std::vector<morphism>& gens, const word& w, double tol) {
    std::vector<morphism> g;
    for (const auto& x : gens) {
        g.push_back(x);
        g.push_back(x.adjoint());
    }
    morphism id = morphism::identity(cat, w);
    const Eigen::Index n = id.size();
    cmat Q(n, 0);
    std::vector<morphism> basis, pending;
    auto add = [&](const morphism& x) {
        cvec v = flatten(x);
        for (int pass = 0; pass < 2; ++pass) v -= Q * (Q.adjoint() * v);
        double nv = v.norm();
        if (nv <= tol * std::max(1.0, flatten(x).norm())) return;
        v /= nv;
        Q.conservativeResize(n, Q.cols() + 1);
        Q.col(Q.cols() - 1) = v;
        morphism b = unflatten(id, v);
        basis.push_back(b);
        pending.push_back(b);
    };
    add(id);
    for (const auto& x : g) add(x);
    while (!pending.empty()) {
        morphism b = pending.back();
        pending.pop_back();
        for (const auto& x : g) {
            add(b * x);
            if (Q.cols() == n) break;
        }
        if (Q.cols() == n) break;
    }
    return subalgebra{w, basis};
}

center_info algebra_center(const category& cat, const subalgebra& m, rng_t& rng, double tol) {
    center_info out;
    if (m.basis.empty()) return out;
    const Eigen::Index D = static_cast<Eigen::Index>(m.dim());
    const Eigen::Index n = m.basis[0].size();
    std::normal_distribution<double> nd;
    std::vector<morphism> probes;
    for (int r = 0; r < 3; ++r) {
        morphism p = morphism::zero(cat, m.w, m.w);
        for (const auto& b : m.basis) p += cplx(nd(rng), nd(rng)) * b;
        probes.push_back(p);
    }
    cmat rows(3 * n, D);
    for (Eigen::Index i = 0; i < D; ++i)
        for (int r = 0; r < 3; ++r)
            rows.block(r * n, i, n, 1) = flatten(m.basis[i] * probes[r] - probes[r] * m.basis[i]);
    cmat ns = null_space(rows, tol);
    out.dim = static_cast<int>(ns.cols());
    morphism h = morphism::zero(cat, m.w, m.w);
    for (Eigen::Index j = 0; j < ns.cols(); ++j) {
        cplx c(nd(rng), nd(rng));
        for (Eigen::Index i = 0; i < D; ++i) h += (c * ns(i, j)) * m.basis[i];
    }
    h = 0.5 * (h + h.adjoint());
    std::vector<std::pair<double, std::pair<int, cvec>>> eig;
    for (int Y = 0; Y < cat.rank(); ++Y) {
        if (h.blk[Y].size() == 0) continue;
        Eigen::SelfAdjointEigenSolver<cmat> es(h.blk[Y]);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            eig.push_back({es.eigenvalues()(i), {Y, es.eigenvectors().col(i)}});
    }
    std::sort(eig.begin(), eig.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    double scale = 1.0;
    for (const auto& e : eig) scale = std::max(scale, std::abs(e.first));
    for (size_t i = 0; i < eig.size();) {
        size_t j = i;
        morphism p = morphism::zero(cat, m.w, m.w);
        while (j < eig.size() && eig[j].first - eig[i].first < 1e-6 * scale) {
            const auto& [Y, v] = eig[j].second;
            p.blk[Y] += v * v.adjoint();
            ++j;
        }
        out.projections.push_back(p);
        i = j;
    }
    return out;
}

cut_frame::cut_frame(const category& cat, const word& w, size_t p) : cat_(&cat), w_(w), p_(p) {
    const int n = cat.rank();
    const int M = cat.max_mult();
    n_ = n;
    word w1 = slice(w, 0, p), w2 = slice(w, p, w.size());
    auto B = basis_of(cat, w);
    auto B1 = basis_of(cat, w1);
    auto B2 = basis_of(cat, w2);
    m1_.resize(n);
    m2_.resize(n);
    for (int a = 0; a < n; ++a) {
        m1_[a] = B1->dim(a);
        m2_[a] = B2->dim(a);
    }
    auto sp = split_of(cat, w, p);
    ch_.resize(n);
    Q_.resize(n);
    for (int Y = 0; Y < n; ++Y) {
        const int mY = B->dim(Y);
        Q_[Y] = cmat::Zero(mY, mY);
        if (mY == 0) continue;
        int off = 0;
        for (int e = 0; e < n; ++e) {
            const auto& ent = sp->by_root[Y][e];
            if (ent.empty()) continue;
            auto V = ext_unitary(cat, e, w2, Y);
            for (int h = 0; h < n; ++h)
                for (int mu = 0; mu < cat.N(e, h, Y); ++mu) {
                    if (m2_[h] == 0) continue;
                    channel c{e, h, mu, off, m1_[e], m2_[h]};
                    int st = V->range_start[h * M + mu];
                    for (const auto& en : ent)
                        for (int t2 = 0; t2 < c.n2; ++t2) Q_[Y](en.T, off + en.t1 * c.n2 + t2) = V->V(en.s, st + t2);
                    ch_[Y].push_back(c);
                    off += c.n1 * c.n2;
                }
        }
        if (off != mY) throw std::logic_error("cut frame channel count mismatch");
    }
}

std::vector<cmat> cut_frame::to_product(const morphism& a) const {
    std::vector<cmat> r(n_);
    for (int Y = 0; Y < n_; ++Y) r[Y] = Q_[Y].adjoint() * a.blk[Y] * Q_[Y];
    return r;
}

morphism cut_frame::from_product(const std::vector<cmat>& blocks) const {
    morphism m = morphism::zero(*cat_, w_, w_);
    for (int Y = 0; Y < n_; ++Y) m.blk[Y] = Q_[Y] * blocks[Y] * Q_[Y].adjoint();
    return m;
}

std::vector<cmat> cut_frame::b0_zero() const {
    std::vector<cmat> b(static_cast<size_t>(n_) * n_);
    for (int e = 0; e < n_; ++e)
        for (int h = 0; h < n_; ++h) {
            int s = m1_[e] * m2_[h];
            b[e * n_ + h] = cmat::Zero(s, s);
        }
    return b;
}

std::vector<cmat> cut_frame::b0_product(const std::vector<cmat>& a, const std::vector<cmat>& b) const {
    std::vector<cmat> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * b[i];
    return r;
}

std::vector<cmat> cut_frame::random_b0(rng_t& rng) const {
    auto b = b0_zero();
    for (auto& x : b) x = random_cmat(x.rows(), x.cols(), rng);
    return b;
}

std::vector<cmat> cut_frame::expectation(const std::vector<cmat>& prod) const {
    auto b = b0_zero();
    for (int Y = 0; Y < n_; ++Y)
        for (const auto& c : ch_[Y]) {
            int s = c.n1 * c.n2;
            double wgt = cat_->dim(Y) / (cat_->dim(c.e) * cat_->dim(c.h));
            b[c.e * n_ + c.h] += wgt * prod[Y].block(c.off, c.off, s, s);
        }
    return b;
}

std::vector<cmat> cut_frame::rank_one_expectation(int Y, const cvec& x, const cvec& y) const {
    auto b = b0_zero();
    for (const auto& c : ch_[Y]) {
        int s = c.n1 * c.n2;
        double wgt = cat_->dim(Y) / (cat_->dim(c.e) * cat_->dim(c.h));
        b[c.e * n_ + c.h] += wgt * x.segment(c.off, s) * y.segment(c.off, s).adjoint();
    }
    return b;
}

std::vector<cmat> cut_frame::embed_b0_product(const std::vector<cmat>& b) const {
    std::vector<cmat> r(n_);
    for (int Y = 0; Y < n_; ++Y) {
        r[Y] = cmat::Zero(Q_[Y].rows(), Q_[Y].cols());
        for (const auto& c : ch_[Y]) {
            int s = c.n1 * c.n2;
            r[Y].block(c.off, c.off, s, s) = b[c.e * n_ + c.h];
        }
    }
    return r;
}

morphism cut_frame::embed_b0(const std::vector<cmat>& b) const { return from_product(embed_b0_product(b)); }

cut_frame window_frame(const chain_spec& ch) { return cut_frame(*ch.cat, ch.window(), static_cast<size_t>(ch.k)); }

expectation_map::expectation_map(expectation_kind kind, const chain_spec& ch, int param)
    : kind_(kind), param_(param), ch_(ch) {
    switch (kind) {
        case expectation_kind::right_cut:
            frame_ = std::make_shared<cut_frame>(window_frame(ch));
            break;
        case expectation_kind::tail:
        case expectation_kind::head:
            if (param < 0 || param > ch.k) throw std::invalid_argument("expectation parameter outside window");
            break;
        case expectation_kind::dual:
            frame_ = std::make_shared<cut_frame>(window_frame(ch));
            break;
    }
}

morphism expectation_map::apply(const morphism& a) const {
    const category& cat = *ch_.cat;
    const int k = ch_.k;
    switch (kind_) {
        case expectation_kind::right_cut:
            return frame_->E(a);
        case expectation_kind::tail: {
            size_t cnt = static_cast<size_t>(k - param_);
            if (cnt == 0) return a;
            return id_tensor(ch_.interval(-k, -param_ - 1), partial_trace(a, side::left, cnt));
        }
        case expectation_kind::head: {
            size_t cnt = static_cast<size_t>(k - param_);
            if (cnt == 0) return a;
            return tensor_id(partial_trace(a, side::right, cnt), ch_.interval(param_ + 1, k));
        }
        case expectation_kind::dual:
            break;
    }
    (void)cat;
    throw std::invalid_argument("the dual expectation acts on the basic extension; use dual_expectation_of_jones");
}

quasi_basis make_quasi_basis(const cut_frame& f, bool random_refs, rng_t& rng) {
    const category& cat = f.cat();
    quasi_basis q;
    for (int Y = 0; Y < cat.rank(); ++Y) {
        const Eigen::Index mY = f.Q(Y).rows();
        for (const auto& c : f.channels(Y)) {
            const int s = c.n1 * c.n2;
            cvec ref = cvec::Zero(mY);
            if (random_refs) {
                cvec loc = random_cmat(s, 1, rng).col(0);
                ref.segment(c.off, s) = loc / loc.norm();
            } else {
                ref(c.off) = 1.0;
            }
            double coeff = std::sqrt(cat.dim(c.e) * cat.dim(c.h) / cat.dim(Y));
            for (Eigen::Index a = 0; a < mY; ++a) q.u.push_back({Y, static_cast<int>(a), coeff, ref});
        }
    }
    return q;
}

std::vector<cmat> quasi_index(const cut_frame& f, const quasi_basis& q) {
    std::vector<cmat> r(f.cat().rank());
    for (int Y = 0; Y < f.cat().rank(); ++Y) r[Y] = cmat::Zero(f.Q(Y).rows(), f.Q(Y).rows());
    for (const auto& u : q.u) r[u.Y](u.row, u.row) += u.coeff * u.coeff * u.ref.squaredNorm();
    return r;
}

std::vector<cmat> quasi_expand(const cut_frame& f, const quasi_basis& q, const std::vector<cmat>& x) {
    const int n = f.cat().rank();
    std::vector<cmat> r(n);
    for (int Y = 0; Y < n; ++Y) r[Y] = cmat::Zero(f.Q(Y).rows(), f.Q(Y).rows());
    for (const auto& u : q.u) {
        // u* x = coeff |ref><row of x^*|, u E(.) = coeff |row> <ref| E(.)
        cvec xr = x[u.Y].row(u.row).adjoint();
        auto b = f.rank_one_expectation(u.Y, u.ref, xr);
        auto eb = f.embed_b0_product(b);
        for (int Y = 0; Y < n; ++Y) {
            if (Y != u.Y || eb[Y].size() == 0) continue;
            r[Y].row(u.row) += (u.coeff * u.coeff) * (u.ref.adjoint() * eb[Y]);
        }
    }
    return r;
}

std::vector<cmat> dual_expectation_of_jones(const cut_frame& f, const quasi_basis& q, double ind) {
    const int n = f.cat().rank();
    std::vector<cmat> r(n);
    for (int Y = 0; Y < n; ++Y) r[Y] = cmat::Zero(f.Q(Y).rows(), f.Q(Y).rows());
    for (const auto& u : q.u) {
        // E(u) = coeff E(|row><ref|); E(u) u* = coeff^2 embed(E(|row><ref|)) |ref><row|
        cvec er = cvec::Zero(f.Q(u.Y).rows());
        er(u.row) = 1.0;
        auto eb = f.embed_b0_product(f.rank_one_expectation(u.Y, er, u.ref));
        r[u.Y].col(u.row) += (u.coeff * u.coeff / ind) * (eb[u.Y] * u.ref);
    }
    return r;
}

index_report watatani_index(const cut_frame& f, rng_t& rng) {
    const category& cat = f.cat();
    const int n = cat.rank();
    index_report rep;
    for (int a = 0; a < n; ++a) rep.sum_dim_sq += cat.dim(a) * cat.dim(a);
    quasi_basis q = make_quasi_basis(f, false, rng);
    auto ind = quasi_index(f, q);
    double lo = 1e300, hi = 0;
    for (int Y = 0; Y < n; ++Y)
        for (Eigen::Index i = 0; i < ind[Y].rows(); ++i) {
            lo = std::min(lo, ind[Y](i, i).real());
            hi = std::max(hi, ind[Y](i, i).real());
        }
    rep.index = hi;
    double off = 0;
    for (int Y = 0; Y < n; ++Y) {
        cmat d = ind[Y] - hi * cmat::Identity(ind[Y].rows(), ind[Y].cols());
        off = std::max(off, max_abs(d));
    }
    rep.scalar_defect = off;
    std::vector<cmat> x(n);
    for (int Y = 0; Y < n; ++Y) x[Y] = random_cmat(f.Q(Y).rows(), f.Q(Y).rows(), rng);
    auto rx = quasi_expand(f, q, x);
    for (int Y = 0; Y < n; ++Y) rep.reconstruction = std::max(rep.reconstruction, max_abs<cplx>(rx[Y] - x[Y]));
    rep.pp_constant = 1.0 / hi;
    double worst = 0;
    for (int t = 0; t < 3; ++t) {
        std::vector<cmat> a(n);
        double na = 0;
        for (int Y = 0; Y < n; ++Y) {
            cmat g = random_cmat(f.Q(Y).rows(), f.Q(Y).rows(), rng);
            a[Y] = g * g.adjoint();
            if (a[Y].size()) na = std::max(na, spectral_norm(a[Y]));
        }
        auto ea = f.embed_b0_product(f.expectation(a));
        for (int Y = 0; Y < n; ++Y) {
            if (a[Y].size() == 0) continue;
            cmat d = ea[Y] - rep.pp_constant * a[Y];
            Eigen::SelfAdjointEigenSolver<cmat> es(0.5 * (d + d.adjoint()));
            worst = std::max(worst, -es.eigenvalues().minCoeff() / na);
        }
    }
    rep.pp_defect = worst;
    (void)lo;
    return rep;
}

long b1_dimension(const cut_frame& f) {
    const category& cat = f.cat();
    const int n = cat.rank();
    long total = 0;
    for (int e = 0; e < n; ++e)
        for (int g = 0; g < n; ++g) {
            if (!f.m1(e) || !f.m2(g)) continue;
            long s = 0;
            for (int Y = 0; Y < n; ++Y) s += static_cast<long>(cat.N(e, g, Y)) * f.Q(Y).rows();
            total += s * s;
        }
    return total;
}

long b1_dimension_numeric(const cut_frame& f) {
    const category& cat = f.cat();
    const int n = cat.rank();
    word w1 = slice(f.w(), 0, f.cut()), w2 = slice(f.w(), f.cut(), f.w().size());
    long total = 0;
    for (int e = 0; e < n; ++e)
        for (int g = 0; g < n; ++g) {
            if (!f.m1(e) || !f.m2(g)) continue;
            morphism pe = morphism::zero(cat, w1, w1), pg = morphism::zero(cat, w2, w2);
            pe.blk[e].setIdentity();
            pg.blk[g].setIdentity();
            morphism z = tensor(pe, pg);
            long s = 0;
            for (int Y = 0; Y < n; ++Y) {
                if (z.blk[Y].size() == 0) continue;
                long r = numerical_rank(z.blk[Y]);
                s += r / (static_cast<long>(f.m1(e)) * f.m2(g)) * z.blk[Y].rows();
            }
            total += s * s;
        }
    return total;
}

jones_report jones_basic_construction(const cut_frame& f, rng_t& rng, long max_units) {
    const category& cat = f.cat();
    const int n = cat.rank();
    jones_report rep;
    std::vector<cmat> x(n), y(n);
    for (int Y = 0; Y < n; ++Y) {
        x[Y] = random_cmat(f.Q(Y).rows(), f.Q(Y).rows(), rng);
        y[Y] = random_cmat(f.Q(Y).rows(), f.Q(Y).rows(), rng);
    }
    // e is E on L^2(A, tr): idempotent and self-adjoint for the trace inner product.
    auto ex = f.embed_b0_product(f.expectation(x));
    auto eex = f.embed_b0_product(f.expectation(ex));
    auto ey = f.embed_b0_product(f.expectation(y));
    cplx l = 0, r = 0;
    double wsum = word_dim(cat, f.w());
    for (int Y = 0; Y < n; ++Y) {
        rep.projection_defect = std::max(rep.projection_defect, max_abs<cplx>(eex[Y] - ex[Y]));
        l += cat.dim(Y) / wsum * (y[Y].adjoint() * ex[Y]).trace();
        r += cat.dim(Y) / wsum * (ey[Y].adjoint() * x[Y]).trace();
    }
    rep.projection_defect = std::max(rep.projection_defect, std::abs(l - r));

    // e a e = E(a) e on L^2(A): E(a b) = E(a) b for b in B0, every matrix unit a of A.
    std::vector<std::vector<cmat>> bs;
    long b0units = 0;
    for (int e = 0; e < n; ++e)
        for (int h = 0; h < n; ++h) b0units += static_cast<long>(f.m1(e)) * f.m2(h) * f.m1(e) * f.m2(h);
    long aunits = 0;
    for (int Y = 0; Y < n; ++Y) aunits += f.Q(Y).rows() * f.Q(Y).rows();
    if (aunits * b0units <= max_units * 50) {
        for (int e = 0; e < n; ++e)
            for (int h = 0; h < n; ++h) {
                int s = f.m1(e) * f.m2(h);
                for (int i = 0; i < s; ++i)
                    for (int j = 0; j < s; ++j) {
                        auto b = f.b0_zero();
                        b[e * n + h](i, j) = 1.0;
                        bs.push_back(b);
                    }
            }
    } else {
        for (int t = 0; t < 2; ++t) bs.push_back(f.random_b0(rng));
    }
    std::vector<std::vector<cmat>> ebs;
    for (const auto& b : bs) ebs.push_back(f.embed_b0_product(b));
    // |x><y| b = |x><b* y|; matrix units when affordable, random rank-one elements otherwise.
    auto check = [&](int Y, const cvec& xv, const cvec& yv) {
        auto Ea = f.rank_one_expectation(Y, xv, yv);
        for (size_t t = 0; t < bs.size(); ++t) {
            cvec by = ebs[t][Y].adjoint() * yv;
            auto Eab = f.rank_one_expectation(Y, xv, by);
            auto Eab2 = f.b0_product(Ea, bs[t]);
            for (size_t q = 0; q < Eab.size(); ++q)
                if (Eab[q].size()) rep.relation_defect = std::max(rep.relation_defect, max_abs<cplx>(Eab[q] - Eab2[q]));
            ++rep.spanning_checked;
        }
    };
    rep.spanning = aunits <= max_units;
    for (int Y = 0; Y < n; ++Y) {
        const Eigen::Index mY = f.Q(Y).rows();
        if (mY == 0) continue;
        if (rep.spanning) {
            for (Eigen::Index i = 0; i < mY; ++i)
                for (Eigen::Index j = 0; j < mY; ++j) {
                    cvec ei = cvec::Zero(mY), ej = cvec::Zero(mY);
                    ei(i) = 1.0;
                    ej(j) = 1.0;
                    check(Y, ei, ej);
                }
        } else {
            for (int t = 0; t < 8; ++t) check(Y, random_cmat(mY, 1, rng), random_cmat(mY, 1, rng));
        }
    }

    quasi_basis q1 = make_quasi_basis(f, false, rng);
    auto ind = quasi_index(f, q1);
    double iv = 0;
    for (int Y = 0; Y < n; ++Y)
        for (Eigen::Index i = 0; i < ind[Y].rows(); ++i) iv = std::max(iv, ind[Y](i, i).real());
    rep.index = iv;
    quasi_basis q2 = make_quasi_basis(f, true, rng);
    auto de = dual_expectation_of_jones(f, q2, iv);
    for (int Y = 0; Y < n; ++Y) {
        cmat d = de[Y] - cmat::Identity(de[Y].rows(), de[Y].cols()) / iv;
        rep.dual_defect = std::max(rep.dual_defect, max_abs(d));
    }
    rep.b1_dim = b1_dimension(f);
    rep.b1_dim_check = b1_dimension_numeric(f);
    return rep;
}

// Buffered problems.

namespace {

struct block_space {
    int c, g;
    word w;  // [c] M [g]
    morphism shape;
    Eigen::Index off;
};

word one(int a) { return word{object{a}}; }

morphism idw(const word& left, const morphism& m) { return left.empty() ? m : id_tensor(left, m); }
morphism tid(const morphism& m, const word& right) { return right.empty() ? m : tensor_id(m, right); }

}  // namespace

buffered_solution solve_buffered(const buffered_problem& pb, double tol) {
    const category& cat = *pb.cat;
    const int n = cat.rank();
    const bool zed = !pb.z1.empty();
    std::vector<int> Ls = pb.has_left ? pb.left_labels : std::vector<int>{-1};
    std::vector<int> Rs = pb.has_right ? pb.right_labels : std::vector<int>{-1};
    std::vector<block_space> blocks;
    std::vector<int> where(static_cast<size_t>(n + 1) * (n + 1), -1);
    auto key = [&](int c, int g) { return (c + 1) * (n + 1) + (g + 1); };
    Eigen::Index total = 0;
    for (int c : Ls)
        for (int g : Rs) {
            word w;
            if (c >= 0) w.push_back(object{c});
            w.insert(w.end(), pb.middle.begin(), pb.middle.end());
            if (g >= 0) w.push_back(object{g});
            morphism sh = morphism::zero(cat, concat(w, pb.z1), concat(w, pb.z2));
            where[key(c, g)] = static_cast<int>(blocks.size());
            blocks.push_back({c, g, w, sh, total});
            total += sh.size();
        }
    buffered_solution sol;
    for (const auto& b : blocks) sol.index.push_back({b.c, b.g});
    if (total == 0) return sol;

    // Accumulated constraint rows, compressed by QR as they arrive.
    cmat R(0, total);
    std::vector<cvec> pending;
    auto flush = [&]() {
        if (pending.empty()) return;
        cmat stack(R.rows() + static_cast<Eigen::Index>(pending.size()), total);
        stack.topRows(R.rows()) = R;
        for (size_t i = 0; i < pending.size(); ++i) stack.row(R.rows() + i) = pending[i].transpose();
        pending.clear();
        if (stack.rows() > total) {
            Eigen::HouseholderQR<cmat> qr(stack);
            R = qr.matrixQR().topRows(total).triangularView<Eigen::Upper>();
        } else {
            R = stack;
        }
    };
    auto add_rows = [&](const cmat& A, Eigen::Index off1, const cmat& Bm, Eigen::Index off2) {
        for (Eigen::Index r = 0; r < A.rows(); ++r) {
            cvec row = cvec::Zero(total);
            row.segment(off1, A.cols()) += A.row(r).transpose();
            row.segment(off2, Bm.cols()) -= Bm.row(r).transpose();
            if (row.cwiseAbs().maxCoeff() > 1e-14) pending.push_back(row);
        }
        if (static_cast<Eigen::Index>(pending.size()) > 2 * total + 64) flush();
    };
    // Linear map of a block: columns are images of unit vectors.
    auto linear_map = [&](const block_space& b, Eigen::Index rows, auto&& fn) {
        Eigen::Index cols = b.shape.size();
        cmat out = cmat::Zero(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j) {
            cvec u = cvec::Zero(cols);
            u(j) = 1.0;
            out.col(j) = flatten(fn(unflatten(b.shape, u)));
        }
        return out;
    };

    if (pb.has_left && !pb.left_buffer.empty()) {
        for (const auto& b1 : blocks)
            for (int a : pb.left_buffer) {
                word rest = slice(b1.w, 1, b1.w.size());
                std::vector<morphism> lifted;
                for (Eigen::Index j = 0; j < b1.shape.size(); ++j) {
                    cvec u = cvec::Zero(b1.shape.size());
                    u(j) = 1.0;
                    lifted.push_back(idw(one(a), unflatten(b1.shape, u)));
                }
                for (int a2 : pb.left_buffer)
                    for (int c2 : Ls) {
                        const block_space& b2 = blocks[where[key(c2, b1.g)]];
                        for (int u = 0; u < n; ++u) {
                            int nin = cat.N(a, b1.c, u), nout = cat.N(a2, c2, u);
                            for (int mi = 0; mi < nin; ++mi)
                                for (int mo = 0; mo < nout; ++mo) {
                                    morphism S = morphism::zero(cat, word{object{a}, object{b1.c}}, word{object{a2}, object{c2}});
                                    S.blk[u](mo, mi) = 1.0;
                                    morphism Sl = tid(S, concat(rest, pb.z2));
                                    morphism Sr = tid(S, concat(rest, pb.z1));
                                    Eigen::Index rows = morphism::zero(cat, Sr.src, Sl.tgt).size();
                                    if (rows == 0) continue;
                                    cmat A(rows, b1.shape.size());
                                    for (Eigen::Index j = 0; j < b1.shape.size(); ++j) A.col(j) = flatten(Sl * lifted[j]);
                                    cmat Bm = linear_map(b2, rows, [&](const morphism& T) { return idw(one(a2), T) * Sr; });
                                    add_rows(A, b1.off, Bm, b2.off);
                                }
                        }
                    }
            }
    }

    const bool right_on_g = pb.has_right;
    const bool right_on_c = !pb.has_right && pb.has_left && pb.middle.empty();
    if (!pb.right_buffer.empty() && (right_on_g || right_on_c)) {
        auto extend = [&](const block_space& b, int x, const morphism& T) {
            morphism t = tensor_id(T, one(x));
            if (!zed) return t;
            return idw(b.w, pb.c2[x]) * t * idw(b.w, pb.c1[x].adjoint());
        };
        for (const auto& b1 : blocks)
            for (int x : pb.right_buffer) {
                int r1 = right_on_g ? b1.g : b1.c;
                word prefix = slice(b1.w, 0, b1.w.size() - 1);
                std::vector<morphism> lifted;
                for (Eigen::Index j = 0; j < b1.shape.size(); ++j) {
                    cvec u = cvec::Zero(b1.shape.size());
                    u(j) = 1.0;
                    lifted.push_back(extend(b1, x, unflatten(b1.shape, u)));
                }
                for (int x2 : pb.right_buffer)
                    for (int r2 : (right_on_g ? Rs : Ls)) {
                        const block_space& b2 = right_on_g ? blocks[where[key(b1.c, r2)]] : blocks[where[key(r2, -1)]];
                        for (int u = 0; u < n; ++u) {
                            int nin = cat.N(r1, x, u), nout = cat.N(r2, x2, u);
                            for (int mi = 0; mi < nin; ++mi)
                                for (int mo = 0; mo < nout; ++mo) {
                                    morphism S = morphism::zero(cat, word{object{r1}, object{x}}, word{object{r2}, object{x2}});
                                    S.blk[u](mo, mi) = 1.0;
                                    morphism Sl = idw(prefix, tid(S, pb.z2));
                                    morphism Sr = idw(prefix, tid(S, pb.z1));
                                    Eigen::Index rows = morphism::zero(cat, Sr.src, Sl.tgt).size();
                                    if (rows == 0) continue;
                                    cmat A(rows, b1.shape.size());
                                    for (Eigen::Index j = 0; j < b1.shape.size(); ++j) A.col(j) = flatten(Sl * lifted[j]);
                                    cmat Bm = linear_map(b2, rows, [&](const morphism& T) { return extend(b2, x2, T) * Sr; });
                                    add_rows(A, b1.off, Bm, b2.off);
                                }
                        }
                    }
            }
    }
    flush();
    cmat ns = R.rows() ? null_space(R, tol) : cmat(cmat::Identity(total, total));
    sol.dim = static_cast<int>(ns.cols());
    for (Eigen::Index j = 0; j < ns.cols(); ++j) {
        std::vector<morphism> v;
        for (const auto& b : blocks) v.push_back(unflatten(b.shape, ns.col(j).segment(b.off, b.shape.size())));
        sol.basis.push_back(std::move(v));
    }
    if (R.rows() && ns.cols()) sol.residual = max_abs<cplx>(R * ns);
    return sol;
}

}  // namespace fc
