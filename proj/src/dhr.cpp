#include "fusionchain/dhr.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fc {

namespace {

morphism random_element(const category& cat, const word& src, const word& tgt, rng_t& rng) {
    morphism m = morphism::zero(cat, src, tgt);
    for (auto& b : m.blk) b = random_cmat(b.rows(), b.cols(), rng);
    return m;
}

morphism idw(const word& left, const morphism& m) { return left.empty() ? m : id_tensor(left, m); }

double mdist(const morphism& a, const morphism& b) { return a.blk.empty() ? 0.0 : distance(a, b); }

// Random elements of A_[a,b] included into the window, for locality tests.
std::vector<morphism> outside_elements(const chain_spec& ch, int a, int b, rng_t& rng) {
    std::vector<morphism> out;
    auto add = [&](int lo, int hi) {
        if (hi < lo) return;
        word w = ch.interval(lo, hi);
        for (int r = 0; r < 2; ++r) out.push_back(include_element(ch, random_element(*ch.cat, w, w, rng), lo, hi, ch.lo(), ch.hi()));
    };
    add(ch.lo(), a - 1);
    add(b + 1, ch.hi());
    return out;
}

size_t leaf_count(const word& w) { return w.size(); }

// Rows of Hom(X_W, X_W z) as (e, t_e, column offset) with the z leaf and vertex folded into the offset.
struct left_layout {
    std::vector<std::vector<std::array<int, 3>>> rows;  // [Y][r]
    std::vector<int> K;
};

left_layout make_layout(const category& cat, const word& W, const object& z) {
    const int n = cat.rank();
    auto BW = basis_of(cat, W);
    auto BZ = basis_of(cat, concat(W, word{z}));
    const size_t len = leaf_count(W);
    left_layout L;
    L.rows.resize(n);
    L.K.assign(n, 0);
    std::vector<std::map<std::tuple<int, int, int>, int>> key(n);  // per e: (Y, s, mu) -> offset
    for (int Y = 0; Y < n; ++Y) {
        for (const auto& T : BZ->trees[Y]) {
            int e = len == 0 ? 0 : T.lab[len - 1];
            std::tuple<int, int, int> k{Y, T.leaf[len], T.mu[len]};
            auto it = key[e].find(k);
            if (it == key[e].end()) {
                it = key[e].emplace(k, L.K[e]).first;
                L.K[e] += BW->dim(Y);
            }
            fusion_tree sub;
            sub.leaf.assign(T.leaf.begin(), T.leaf.begin() + static_cast<long>(len));
            sub.lab.assign(T.lab.begin(), T.lab.begin() + static_cast<long>(len));
            sub.mu.assign(T.mu.begin(), T.mu.begin() + static_cast<long>(len));
            int te = len == 0 ? 0 : BW->find(e, sub);
            L.rows[Y].push_back({e, te, it->second});
        }
    }
    return L;
}

}  // namespace

long fz_dimension(const category& cat, const word& w, const object& z) {
    auto m1 = multiplicities(cat, w);
    auto m2 = multiplicities(cat, concat(w, word{z}));
    long d = 0;
    for (int Y = 0; Y < cat.rank(); ++Y) d += m1[Y] * m2[Y];
    return d;
}

dhr_module::dhr_module(const center_object& Z, const chain_spec& ch) : Z_(Z), ch_(ch), W_(ch.window()) {
    if (Z.cat != ch.cat && Z.cat->uid() != ch.cat->uid()) throw std::invalid_argument("center object and chain use different categories");
    if (static_cast<int>(Z.c.size()) != ch.cat->rank()) throw std::invalid_argument("center object has the wrong number of half-braiding components");
}

dhr_module dhr_bimodule(const center_object& Z, const chain_spec& ch) { return dhr_module(Z, ch); }

long dhr_module::dim() const { return fz_dimension(cat(), W_, Z_.z); }

morphism dhr_module::zero() const { return morphism::zero(cat(), W_, concat(W_, zword())); }

morphism dhr_module::random(rng_t& rng) const { return random_element(cat(), W_, concat(W_, zword()), rng); }

morphism dhr_module::left(const morphism& a, const morphism& x) const { return tensor_id(a, zword()) * x; }

morphism dhr_module::left_inner(const morphism& x, const morphism& y) const {
    return qdim() * partial_trace(x * y.adjoint(), side::right, 1);
}

morphism dhr_module::eta(const morphism& f, int a, int b, int c, int d) const {
    if (c > a || d < b) throw std::invalid_argument("eta needs nested intervals");
    word XI = ch_.interval(a, b);
    word L = ch_.interval(c, a - 1), R = ch_.interval(b + 1, d);
    morphism g = f;
    if (!R.empty()) g = idw(XI, half_braiding(Z_, R)) * tensor_id(f, R);
    return idw(L, g);
}

std::vector<cmat> dhr_module::left_coordinates(const morphism& x) const {
    auto L = make_layout(cat(), W_, Z_.z);
    auto m = multiplicities(cat(), W_);
    std::vector<cmat> out(cat().rank());
    for (int e = 0; e < cat().rank(); ++e) out[e] = cmat::Zero(m[e], L.K[e]);
    for (int Y = 0; Y < cat().rank(); ++Y)
        for (Eigen::Index r = 0; r < x.blk[Y].rows(); ++r) {
            auto [e, te, off] = L.rows[Y][r];
            out[e].row(te).segment(off, x.blk[Y].cols()) = x.blk[Y].row(r);
        }
    return out;
}

morphism dhr_module::from_left_coordinates(const std::vector<cmat>& c) const {
    auto L = make_layout(cat(), W_, Z_.z);
    morphism x = zero();
    for (int Y = 0; Y < cat().rank(); ++Y)
        for (Eigen::Index r = 0; r < x.blk[Y].rows(); ++r) {
            auto [e, te, off] = L.rows[Y][r];
            x.blk[Y].row(r) = c[e].row(te).segment(off, x.blk[Y].cols());
        }
    return x;
}

projective_basis localized_basis(const dhr_module& M, int a, int b) {
    const category& cat = M.cat();
    const auto& ch = M.chain();
    if (a < ch.lo() || b > ch.hi() || b < a) throw std::out_of_range("localization interval outside the window");
    word XI = ch.interval(a, b);
    word XIZ = concat(XI, M.zword());
    auto have = support(cat, XI);
    auto need = support(cat, XIZ);
    std::vector<int> missing;
    for (int Y : need)
        if (std::find(have.begin(), have.end(), Y) == have.end()) missing.push_back(Y);
    if (!missing.empty() && M.dim() > 0) {
        std::ostringstream os;
        os << "interval [" << a << "," << b << "] misses simple " << cat.labels[missing[0]].name
           << "; minimal localization length " << minimal_localization_length(M);
        throw std::out_of_range(os.str());
    }
    projective_basis B;
    B.a = a;
    B.b = b;
    auto BI = basis_of(cat, XIZ);
    std::vector<morphism> local;
    for (int Y : have)
        for (int k = 0; k < BI->dim(Y); ++k) {
            morphism w = morphism::zero(cat, XI, XIZ);
            w.blk[Y](k, 0) = 1.0;
            local.push_back(w);
        }
    if (!local.empty()) {
        word L = ch.interval(ch.lo(), a - 1), R = ch.interval(b + 1, ch.hi());
        morphism cR = R.empty() ? morphism() : idw(XI, half_braiding(M.Z(), R));
        for (const auto& w : local) {
            morphism g = R.empty() ? w : cR * tensor_id(w, R);
            B.xi.push_back(idw(L, g));
        }
    }
    B.gram.assign(B.size(), std::vector<morphism>(B.size()));
    for (size_t i = 0; i < B.size(); ++i)
        for (size_t j = 0; j < B.size(); ++j) B.gram[i][j] = M.inner(B.xi[i], B.xi[j]);
    return B;
}

basis_report check_basis(const dhr_module& M, const projective_basis& B, rng_t& rng) {
    basis_report r;
    const category& cat = M.cat();
    for (int t = 0; t < 2; ++t) {
        morphism x = M.random(rng);
        morphism acc = M.zero();
        for (const auto& xi : B.xi) acc += xi * M.inner(xi, x);
        r.reconstruction = std::max(r.reconstruction, mdist(acc, x));
    }
    word WZ = concat(M.window(), M.zword());
    morphism S = morphism::zero(cat, WZ, WZ);
    for (const auto& xi : B.xi) S += xi * xi.adjoint();
    auto m = multiplicities(cat, M.window());
    morphism P = morphism::identity(cat, WZ);
    for (int Y = 0; Y < cat.rank(); ++Y)
        if (m[Y] == 0) P.blk[Y].setZero();
    r.completeness = mdist(S, P);
    for (const auto& a : outside_elements(M.chain(), B.a, B.b, rng))
        for (const auto& xi : B.xi) r.locality = std::max(r.locality, mdist(M.left(a, xi), xi * a) / std::max(1.0, a.max_abs()));
    return r;
}

int minimal_localization_length(const dhr_module& M) {
    const auto& ch = M.chain();
    const category& cat = M.cat();
    if (M.dim() == 0) return 1;
    for (int n = 1; n <= 2 * ch.k + 1; ++n) {
        bool ok = true;
        for (int a = ch.lo(); a + n - 1 <= ch.hi() && ok; ++a) {
            word XI = ch.interval(a, a + n - 1);
            auto have = support(cat, XI);
            for (int Y : support(cat, concat(XI, M.zword())))
                if (std::find(have.begin(), have.end(), Y) == have.end()) ok = false;
        }
        if (ok) return n;
    }
    return -1;
}

double transporter_matrix::max_defect() const {
    return std::max({tt_star, p1t, t_star_t, tp2, base_change, adjoint_change});
}

transporter_matrix charge_transporters(const dhr_module& M, const projective_basis& b1, const projective_basis& b2) {
    (void)M;
    transporter_matrix T;
    const size_t n1 = b1.size(), n2 = b2.size();
    if ((n1 == 0) != (n2 == 0)) throw std::invalid_argument("bases of different modules");
    T.t.assign(n1, std::vector<morphism>(n2));
    for (size_t i = 0; i < n1; ++i)
        for (size_t j = 0; j < n2; ++j) T.t[i][j] = b1.xi[i].adjoint() * b2.xi[j];
    for (size_t i = 0; i < n1; ++i)
        for (size_t l = 0; l < n1; ++l) {
            morphism s = morphism::zero(*T.t[i][0].cat, T.t[i][0].src, T.t[i][0].tgt);
            for (size_t j = 0; j < n2; ++j) s += T.t[i][j] * T.t[l][j].adjoint();
            T.tt_star = std::max(T.tt_star, mdist(s, b1.gram[i][l]));
        }
    for (size_t i = 0; i < n1; ++i)
        for (size_t j = 0; j < n2; ++j) {
            morphism s = morphism::zero(*T.t[i][j].cat, T.t[i][j].src, T.t[i][j].tgt);
            for (size_t l = 0; l < n1; ++l) s += b1.gram[i][l] * T.t[l][j];
            T.p1t = std::max(T.p1t, mdist(s, T.t[i][j]));
            morphism u = morphism::zero(*T.t[i][j].cat, T.t[i][j].src, T.t[i][j].tgt);
            for (size_t l = 0; l < n2; ++l) u += T.t[i][l] * b2.gram[l][j];
            T.tp2 = std::max(T.tp2, mdist(u, T.t[i][j]));
        }
    for (size_t j = 0; j < n2; ++j)
        for (size_t l = 0; l < n2; ++l) {
            morphism s = morphism::zero(*T.t[0][j].cat, T.t[0][j].src, T.t[0][j].tgt);
            for (size_t i = 0; i < n1; ++i) s += T.t[i][j].adjoint() * T.t[i][l];
            T.t_star_t = std::max(T.t_star_t, mdist(s, b2.gram[j][l]));
        }
    for (size_t j = 0; j < n2; ++j) {
        morphism s = morphism::zero(*b2.xi[j].cat, b2.xi[j].src, b2.xi[j].tgt);
        for (size_t i = 0; i < n1; ++i) s += b1.xi[i] * T.t[i][j];
        T.base_change = std::max(T.base_change, mdist(s, b2.xi[j]));
    }
    for (size_t i = 0; i < n1; ++i) {
        morphism s = morphism::zero(*b1.xi[i].cat, b1.xi[i].src, b1.xi[i].tgt);
        for (size_t j = 0; j < n2; ++j) s += b2.xi[j] * T.t[i][j].adjoint();
        T.adjoint_change = std::max(T.adjoint_change, mdist(s, b1.xi[i]));
    }
    return T;
}

double b0_distance(const chain_spec& ch, const transporter_matrix& T) {
    auto f = window_frame(ch);
    double num = 0, den = 0;
    for (const auto& row : T.t)
        for (const auto& t : row) {
            num = std::max(num, (t - f.E(t)).frob());
            den = std::max(den, t.frob());
        }
    return den > 0 ? num / den : 0.0;
}

morphism box(const morphism& xi, const morphism& nu, const word& znu) { return tensor_id(xi, znu) * nu; }

morphism braiding(const dhr_module& MX, const dhr_module& MY, const projective_basis& bx, const projective_basis& by) {
    if (!(bx.b + 1 < by.a)) throw std::invalid_argument("braiding needs the first basis strictly left of the second, separated by a site");
    const category& cat = MX.cat();
    word W = MX.window();
    word zx = MX.zword(), zy = MY.zword();
    morphism B = morphism::zero(cat, concat(concat(W, zx), zy), concat(concat(W, zy), zx));
    for (const auto& xi : bx.xi)
        for (const auto& nu : by.xi) B += box(nu, xi, zx) * box(xi, nu, zy).adjoint();
    return B;
}

monodromy_result dhr_monodromy(const dhr_module& MX, const dhr_module& MY, const projective_basis& bx1,
                               const projective_basis& by, const projective_basis& bx2) {
    monodromy_result r;
    r.composed = braiding(MY, MX, by, bx2) * braiding(MX, MY, bx1, by);
    const category& cat = MX.cat();
    word W = MX.window();
    word zx = MX.zword(), zy = MY.zword();
    word WXY = concat(concat(W, zx), zy);
    r.transported = morphism::zero(cat, WXY, WXY);
    auto T = charge_transporters(MX, bx1, bx2);
    const size_t n1 = bx1.size(), n2 = bx2.size();
    for (size_t i = 0; i < n1; ++i)
        for (size_t k = 0; k < by.size(); ++k) {
            morphism img = morphism::zero(cat, W, WXY);
            for (size_t l = 0; l < n1; ++l) {
                morphism inner = MY.zero();
                for (size_t j = 0; j < n2; ++j) inner += MY.left(T.t[l][j], by.xi[k]) * T.t[i][j].adjoint();
                img += box(bx1.xi[l], inner, zy);
            }
            r.transported += img * box(bx1.xi[i], by.xi[k], zy).adjoint();
        }
    r.agreement = mdist(r.composed, r.transported);
    return r;
}

std::vector<dhr_sector> dhr_sectors(const std::vector<center_simple>& simples, const chain_spec& ch, int length) {
    std::vector<dhr_module> mods;
    for (const auto& s : simples) mods.emplace_back(s.obj, ch);
    int L = length;
    if (L <= 0) {
        L = 1;
        for (const auto& M : mods) {
            int m = minimal_localization_length(M);
            if (m < 0) throw std::out_of_range("no localization length fits the window");
            L = std::max(L, m);
        }
    }
    if (3 * L + 2 > 2 * ch.k + 1) throw std::out_of_range("window too small for three separated localization regions");
    int mid = -(L / 2);
    std::vector<dhr_sector> out;
    for (auto& M : mods) {
        dhr_sector s{M, localized_basis(M, ch.lo(), ch.lo() + L - 1), localized_basis(M, mid, mid + L - 1),
                     localized_basis(M, ch.hi() - L + 1, ch.hi())};
        out.push_back(std::move(s));
    }
    return out;
}

modular_data dhr_modular_data(const std::vector<dhr_sector>& sectors, const std::vector<center_simple>& simples) {
    if (sectors.size() != simples.size()) throw std::invalid_argument("one sector per center simple required");
    const size_t m = sectors.size();
    modular_data md;
    md.S = cmat::Zero(m, m);
    md.T = cmat::Zero(m, m);
    double D2 = 0;
    for (const auto& s : sectors) D2 += s.M.qdim() * s.M.qdim();
    const double D = std::sqrt(D2);
    for (const auto& s : sectors)
        if (s.M.dim() == 0) md.visible = false;
    for (size_t a = 0; a < m; ++a) {
        const auto& A = sectors[a];
        for (size_t b = 0; b < m; ++b) {
            const auto& B = sectors[b];
            auto mon = dhr_monodromy(A.M, B.M, A.left, B.mid, A.right);
            md.monodromy_agreement = std::max(md.monodromy_agreement, mon.agreement);
            md.S(a, b) = A.M.qdim() * B.M.qdim() * categorical_trace(mon.composed) / D;
        }
        morphism br = braiding(A.M, A.M, A.left, A.mid);
        md.T(a, a) = A.M.qdim() * categorical_trace(br);
    }
    auto mc = check_modular(md.S, md.T);
    md.s_unitarity = mc.s_unitarity;
    md.s_symmetry = mc.s_symmetry;
    md.st_relation = mc.st_relation;
    md.modular = md.visible && md.s_unitarity <= 1e-6;
    md.tube_distance = max_abs<cplx>(md.S - tube_s_matrix(simples));
    return md;
}

half_line_module restrict_half_line(const dhr_module& M, int sign) {
    const auto& ch = M.chain();
    half_line_module h;
    h.sign = sign;
    h.a = sign < 0 ? ch.lo() : 0;
    h.b = sign < 0 ? -1 : ch.hi();
    word XI = ch.interval(h.a, h.b);
    morphism shape = morphism::zero(M.cat(), XI, concat(XI, M.zword()));
    std::vector<morphism> v;
    for (Eigen::Index j = 0; j < shape.size(); ++j) {
        cvec u = cvec::Zero(shape.size());
        u(j) = 1.0;
        v.push_back(M.eta(unflatten(shape, u), h.a, h.b, ch.lo(), ch.hi()));
    }
    h.span = orthonormalize(v);
    return h;
}

double span_defect(const dhr_module& M, const projective_basis& b1, const projective_basis& b2, int sign) {
    const auto& ch = M.chain();
    double d = 0;
    const word XM = ch.interval(ch.lo(), -1), XP = ch.interval(0, ch.hi());
    for (size_t i = 0; i < b2.size(); ++i) {
        morphism s = M.zero();
        for (size_t j = 0; j < b1.size(); ++j) {
            morphism t = M.inner(b1.xi[j], b2.xi[i]);
            morphism proj = sign < 0 ? tensor_id(partial_trace(t, side::right, XP.size()), XP)
                                     : id_tensor(XM, partial_trace(t, side::left, XM.size()));
            d = std::max(d, mdist(t, proj));
            s += b1.xi[j] * t;
        }
        d = std::max(d, mdist(s, b2.xi[i]));
    }
    return d;
}

morphism tilde_extension(const projective_basis& B, const std::vector<morphism>& values) {
    if (values.size() != B.size() || values.empty()) throw std::invalid_argument("tilde extension needs one value per basis vector");
    morphism F = values[0] * B.xi[0].adjoint();
    for (size_t j = 1; j < B.size(); ++j) F += values[j] * B.xi[j].adjoint();
    return F;
}

namespace {

buffered_problem base_problem(const dhr_module& M, int buffer) {
    const auto& ch = M.chain();
    int B = buffer < 0 ? ch.k : buffer;
    buffered_problem pb;
    pb.cat = ch.cat;
    if (B > 0) {
        pb.left_buffer = support(*ch.cat, ch.interval(ch.lo() - B, ch.lo() - 1));
        pb.right_buffer = support(*ch.cat, ch.interval(ch.hi() + 1, ch.hi() + B));
    }
    return pb;
}

void merged(buffered_problem& pb, const chain_spec& ch, const word& w) {
    pb.left_labels = support(*ch.cat, w);
    pb.has_right = false;
}

void two_sided(buffered_problem& pb, const chain_spec& ch) {
    pb.left_labels = support(*ch.cat, ch.interval(ch.lo(), -1));
    pb.right_labels = support(*ch.cat, ch.interval(0, ch.hi()));
}

void objects(buffered_problem& pb, const center_object& A, const center_object& B) {
    pb.z1 = word{A.z};
    pb.z2 = word{B.z};
    pb.c1 = A.c;
    pb.c2 = B.c;
}

}  // namespace

buffered_solution central_vectors(const dhr_module& M, central_kind kind, int buffer) {
    auto pb = base_problem(M, buffer);
    if (kind == central_kind::a)
        merged(pb, M.chain(), M.window());
    else
        two_sided(pb, M.chain());
    objects(pb, unit_center_object(M.cat()), M.Z());
    return solve_buffered(pb);
}

buffered_solution intertwiner_space(const dhr_module& MX, const dhr_module& MY, int buffer) {
    auto pb = base_problem(MX, buffer);
    merged(pb, MX.chain(), MX.window());
    objects(pb, MX.Z(), MY.Z());
    return solve_buffered(pb);
}

buffered_solution half_line_intertwiners(const dhr_module& MX, const dhr_module& MY, int buffer) {
    auto pb = base_problem(MX, buffer);
    const auto& ch = MX.chain();
    merged(pb, ch, ch.interval(ch.lo(), -1));
    pb.right_buffer.clear();
    objects(pb, MX.Z(), MY.Z());
    return solve_buffered(pb);
}

buffered_solution b0_a_intertwiners(const dhr_module& MX, const dhr_module& MY, int buffer) {
    auto pb = base_problem(MX, buffer);
    two_sided(pb, MX.chain());
    objects(pb, MX.Z(), MY.Z());
    return solve_buffered(pb);
}

left_basis_report left_localized_basis(const dhr_module& M, int a, int b, rng_t& rng) {
    const auto& ch = M.chain();
    const category& cat = M.cat();
    left_basis_report r;
    word XI = ch.interval(a, b);
    morphism shape = morphism::zero(cat, XI, concat(XI, M.zword()));
    std::vector<morphism> fam;
    for (Eigen::Index j = 0; j < shape.size(); ++j) {
        cvec u = cvec::Zero(shape.size());
        u(j) = 1.0;
        fam.push_back(M.eta(unflatten(shape, u), a, b, ch.lo(), ch.hi()));
    }
    const int n = cat.rank();
    std::vector<std::vector<cmat>> coords;
    for (const auto& z : fam) coords.push_back(M.left_coordinates(z));
    auto m = multiplicities(cat, M.window());
    std::vector<cmat> N(n);
    bool saturated = true;
    for (int e = 0; e < n; ++e) {
        if (m[e] == 0) continue;
        Eigen::Index K = 0, rows = 0;
        for (const auto& c : coords) {
            K = c[e].cols();
            rows += c[e].rows();
        }
        if (K == 0) continue;
        cmat stack(rows, K);
        Eigen::Index o = 0;
        for (const auto& c : coords) {
            stack.middleRows(o, c[e].rows()) = c[e];
            o += c[e].rows();
        }
        cmat Q = orthonormal_columns<cplx>(stack.adjoint());
        cmat P = Q * Q.adjoint();
        r.saturation = std::max(r.saturation, max_abs<cplx>(P - cmat::Identity(K, K)));
        r.deficit += m[e] * (K - Q.cols());
        if (Q.cols() < K) {
            saturated = false;
            continue;
        }
        // Left inner product weights: d_Y / d_e on the (Y, s, mu, column) coordinates.
        rvec dw(K);
        {
            auto L = make_layout(cat, M.window(), M.Z().z);
            for (int Y = 0; Y < n; ++Y)
                for (const auto& row : L.rows[Y])
                    if (row[0] == e)
                        for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(m[Y]); ++c) dw(row[2] + c) = cat.dim(Y) / cat.dim(e);
        }
        cmat G = cmat::Zero(K, K);
        for (const auto& c : coords) G += c[e].adjoint() * c[e];
        cmat Dh = dw.cwiseSqrt().cast<cplx>().asDiagonal();
        cmat Dhi = dw.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal();
        cmat H = Dh * G * Dh;
        Eigen::SelfAdjointEigenSolver<cmat> es((H + H.adjoint()) * 0.5);
        cmat Hinv = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
        N[e] = Dh * Hinv * Dhi;
    }
    if (!saturated) {
        for (int len = b - a + 2; len <= 2 * ch.k + 1 && r.smallest_saturating < 0; ++len) {
            int lo = std::max(ch.lo(), b - len + 1);
            int hi = lo + len - 1;
            if (hi > ch.hi()) break;
            rng_t sub(rng());
            auto rr = left_localized_basis(M, lo, hi, sub);
            if (rr.deficit == 0) r.smallest_saturating = len;
        }
        return r;
    }
    r.smallest_saturating = b - a + 1;
    for (const auto& c : coords) {
        std::vector<cmat> nc(n);
        for (int e = 0; e < n; ++e) nc[e] = (m[e] && c[e].cols()) ? cmat(c[e] * N[e]) : c[e];
        r.zeta.push_back(M.from_left_coordinates(nc));
    }
    for (int t = 0; t < 2; ++t) {
        morphism x = M.random(rng);
        morphism acc = M.zero();
        for (const auto& z : r.zeta) acc += M.left(M.left_inner(x, z), z);
        r.reconstruction = std::max(r.reconstruction, mdist(acc, x));
    }
    for (const auto& el : outside_elements(ch, a, b, rng))
        for (const auto& z : r.zeta) r.locality = std::max(r.locality, mdist(M.left(el, z), z * el) / std::max(1.0, el.max_abs()));
    return r;
}

rind_report right_index(const dhr_module& M, const projective_basis& B) {
    rind_report r;
    if (B.size() == 0) return r;
    morphism s = M.left_inner(B.xi[0], B.xi[0]);
    for (size_t i = 1; i < B.size(); ++i) s += M.left_inner(B.xi[i], B.xi[i]);
    r.value = categorical_trace(s).real();
    r.scalar_defect = mdist(s, r.value * morphism::identity(M.cat(), M.window()));
    return r;
}

}  // namespace fc
