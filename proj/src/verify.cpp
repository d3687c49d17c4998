#include "fusionchain/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace fc {

namespace {

long end_dim(const category& cat, const word& w) {
    long d = 0;
    for (long m : multiplicities(cat, w)) d += m * m;
    return d;
}

int buffer_size(const chain_spec& ch, int buffer) { return buffer < 0 ? ch.k : buffer; }

std::vector<int> left_buffer(const chain_spec& ch, int B) { return support(*ch.cat, ch.interval(ch.lo() - B, ch.lo() - 1)); }
std::vector<int> right_buffer(const chain_spec& ch, int B) { return support(*ch.cat, ch.interval(ch.hi() + 1, ch.hi() + B)); }

morphism gaussian_element(const category& cat, const word& w, rng_t& rng) {
    morphism x = morphism::zero(cat, w, w);
    for (auto& b : x.blk) b = random_cmat(b.rows(), b.cols(), rng);
    return x;
}

double rel(double num, double den) { return num / std::max(1.0, den); }

// Rank of the span of the rows of the generators' multiplicity matrices, per pair of B0 channel types.
struct type_pair_span {
    const cut_frame* f;
    // key (e, h, e2, h2) -> list of (Y, ch1, ch2)
    std::map<std::tuple<int, int, int, int>, std::vector<std::tuple<int, int, int>>> rows;
    std::map<std::tuple<int, int, int, int>, std::vector<cmat>> cols;

    explicit type_pair_span(const cut_frame& fr) : f(&fr) {
        const int n = fr.cat().rank();
        for (int Y = 0; Y < n; ++Y) {
            const auto& chs = fr.channels(Y);
            for (int i = 0; i < static_cast<int>(chs.size()); ++i)
                for (int j = 0; j < static_cast<int>(chs.size()); ++j)
                    rows[{chs[i].e, chs[i].h, chs[j].e, chs[j].h}].push_back({Y, i, j});
        }
    }

    void add(const morphism& x) {
        auto prod = f->to_product(x);
        for (const auto& [key, rs] : rows) {
            const auto& [Y0, i0, j0] = rs[0];
            const auto& c1 = f->channels(Y0)[i0];
            const auto& c2 = f->channels(Y0)[j0];
            const Eigen::Index s1 = static_cast<Eigen::Index>(c1.n1) * c1.n2, s2 = static_cast<Eigen::Index>(c2.n1) * c2.n2;
            cmat m(static_cast<Eigen::Index>(rs.size()), s1 * s2);
            for (size_t r = 0; r < rs.size(); ++r) {
                const auto& [Y, i, j] = rs[r];
                const auto& a = f->channels(Y)[i];
                const auto& b = f->channels(Y)[j];
                cmat blk = prod[Y].block(a.off, b.off, s1, s2);
                m.row(static_cast<Eigen::Index>(r)) = Eigen::Map<const cvec>(blk.data(), blk.size()).transpose();
            }
            cols[key].push_back(m);
        }
    }

    // (span dimension, full dimension)
    std::pair<long, long> dims() const {
        long span = 0, full = 0;
        for (const auto& [key, rs] : rows) {
            const auto& [Y0, i0, j0] = rs[0];
            const auto& c1 = f->channels(Y0)[i0];
            const auto& c2 = f->channels(Y0)[j0];
            const long block = static_cast<long>(c1.n1) * c1.n2 * c2.n1 * c2.n2;
            full += static_cast<long>(rs.size()) * block;
            auto it = cols.find(key);
            if (it == cols.end()) continue;
            const Eigen::Index r = static_cast<Eigen::Index>(rs.size());
            cmat G = cmat::Zero(r, r);
            for (const auto& m : it->second) G += m * m.adjoint();
            Eigen::SelfAdjointEigenSolver<cmat> es((G + G.adjoint()) * 0.5);
            const double top = std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
            long rank = 0;
            for (Eigen::Index q = 0; q < r; ++q)
                if (es.eigenvalues()(q) > 1e-18 * top && es.eigenvalues()(q) > 1e-24) ++rank;
            span += rank * block;
        }
        return {span, full};
    }
};

std::vector<center_simple> seeded_simples(const category& cat, std::uint64_t seed) {
    rng_t rng(seed);
    auto tube = make_tube_algebra(cat, rng);
    return center_simples(tube, rng);
}

std::string sector_key(const center_simple& s) {
    return s.obj.name.empty() ? std::to_string(s.id) : s.obj.name;
}

}  // namespace

std::string verdict_name(verdict v) {
    switch (v) {
        case verdict::pass: return "pass";
        case verdict::fail: return "fail";
        case verdict::unstable: return "unstable";
        case verdict::evidence: return "evidence";
    }
    return "fail";
}

bool condition_report::all_pass() const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [](const condition_entry& e) { return e.result == verdict::pass || e.result == verdict::evidence; });
}

haag_result haag_duality(const chain_spec& ch, int max_length, int buffer) {
    const category& cat = *ch.cat;
    const int B = buffer_size(ch, buffer);
    haag_result r;
    std::vector<bool> eq;
    for (int len = 0; len <= max_length; ++len) {
        int a = -(len / 2), b = a + len - 1;
        if (a - 1 < ch.lo() || b + 1 > ch.hi()) break;
        buffered_problem pb;
        pb.cat = &cat;
        pb.left_labels = support(cat, ch.interval(ch.lo(), a - 1));
        pb.right_labels = support(cat, ch.interval(b + 1, ch.hi()));
        pb.middle = ch.interval(a, b);
        if (B > 0) {
            pb.left_buffer = left_buffer(ch, B);
            pb.right_buffer = right_buffer(ch, B);
        }
        auto sol = solve_buffered(pb);
        haag_point p{a, b, sol.dim, end_dim(cat, pb.middle)};
        r.points.push_back(p);
        eq.push_back(p.commutant_dim == p.local_dim);
    }
    for (int len = static_cast<int>(eq.size()) - 1; len >= 0 && eq[len]; --len) r.K = len;
    if (r.K >= 0) r.R = 0;
    return r;
}

covering_result covering_property(const chain_spec& ch, int max_overlap) {
    const category& cat = *ch.cat;
    covering_result r;
    auto generated = [&](int a1, int b1, int a2, int b2) {
        int lo = std::min(a1, a2), hi = std::max(b1, b2);
        word w = ch.interval(lo, hi);
        std::vector<morphism> gens;
        for (auto [a, b] : {std::pair{a1, b1}, std::pair{a2, b2}}) {
            word wi = ch.interval(a, b);
            auto m = multiplicities(cat, wi);
            for (int Y = 0; Y < cat.rank(); ++Y)
                for (long i = 0; i < m[Y]; ++i)
                    for (long j = 0; j < m[Y]; ++j)
                        gens.push_back(include_element(ch, matrix_unit(cat, wi, Y, static_cast<int>(i), static_cast<int>(j)), a, b, lo, hi));
        }
        long g = static_cast<long>(generated_algebra(cat, gens, w).dim());
        return std::pair<long, long>{g, end_dim(cat, w)};
    };
    for (int L = 1; L <= max_overlap; ++L) {
        auto c1 = generated(0, L, 1, L + 1);
        auto c2 = generated(0, L, 1, L + 2);
        r.tested.push_back(c1);
        r.tested.push_back(c2);
        if (c1.first == c1.second && c2.first == c2.second) {
            r.L = L;
            break;
        }
    }
    return r;
}

half_line_centers half_line_center_dims(const chain_spec& ch, int buffer) {
    const category& cat = *ch.cat;
    const int B = buffer_size(ch, buffer);
    half_line_centers c;
    word XM = ch.interval(ch.lo(), -1), XP = ch.interval(0, ch.hi());
    c.minus_raw = static_cast<long>(support(cat, XM).size());
    c.plus_raw = static_cast<long>(support(cat, XP).size());
    buffered_problem pm;
    pm.cat = &cat;
    pm.left_labels = support(cat, XM);
    pm.has_right = false;
    if (B > 0) pm.left_buffer = left_buffer(ch, B);
    c.minus = solve_buffered(pm).dim;
    buffered_problem pp;
    pp.cat = &cat;
    pp.left_labels = support(cat, XP);
    pp.has_right = false;
    if (B > 0) pp.right_buffer = right_buffer(ch, B);
    c.plus = solve_buffered(pp).dim;
    return c;
}

int strong_generation_length(const chain_spec& ch) {
    const category& cat = *ch.cat;
    const int n = cat.rank(), len_max = 2 * ch.k + 1;
    auto covers = [&](int len) {
        for (int a = ch.lo(); a + len - 1 <= ch.hi(); ++a)
            if (static_cast<int>(support(cat, ch.interval(a, a + len - 1)).size()) != n) return false;
        return true;
    };
    int r = -1;
    for (int len = len_max; len >= 1 && covers(len); --len) r = len;
    return r;
}

bool unique_trace(const chain_spec& ch) {
    const category& cat = *ch.cat;
    const int n = cat.rank();
    const int P = static_cast<int>(ch.pattern.size());
    auto site_matrix = [&](const object& x, bool left) {
        rmat m = rmat::Zero(n, n);
        for (int Y = 0; Y < n; ++Y)
            for (int s : x)
                for (int U = 0; U < n; ++U) m(Y, U) += left ? cat.N(s, Y, U) : cat.N(Y, s, U);
        return m;
    };
    rmat M = rmat::Identity(n, n);
    for (int j = 0; j < P; ++j) {
        int kk = ch.k + j;
        M = M * site_matrix(ch.site(-kk - 1), true) * site_matrix(ch.site(kk + 1), false);
    }
    auto S = support(cat, ch.window());
    const int s = static_cast<int>(S.size());
    rmat MS(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) MS(i, j) = M(S[i], S[j]) > 0 ? 1.0 : 0.0;
    rmat pw = MS;
    for (int p = 1; p <= (s - 1) * (s - 1) + 1; ++p) {
        if (pw.minCoeff() > 0) return true;
        pw = (pw * MS).unaryExpr([](double v) { return v > 0 ? 1.0 : 0.0; });
    }
    return false;
}

lr_result lr_recognition(const chain_spec& ch, const word& Y, int buffer) {
    const category& cat = *ch.cat;
    const int B = buffer_size(ch, buffer);
    buffered_problem pb;
    pb.cat = &cat;
    pb.left_labels = support(cat, ch.interval(ch.lo(), -1));
    pb.has_right = false;
    pb.middle = Y;
    if (B > 0) pb.left_buffer = left_buffer(ch, B);
    return {solve_buffered(pb).dim, end_dim(cat, Y)};
}

generation_result charge_transporter_generation(const chain_spec& ch, const std::vector<center_simple>& sectors) {
    const category& cat = *ch.cat;
    cut_frame f = window_frame(ch);
    type_pair_span span(f);
    span.add(morphism::identity(cat, ch.window()));
    generation_result r;
    for (const auto& s : sectors) {
        dhr_module M(s.obj, ch);
        if (M.dim() == 0) continue;
        int L = minimal_localization_length(M);
        if (L < 0 || L > ch.k) continue;
        auto b1 = localized_basis(M, ch.lo(), ch.lo() + L - 1);
        auto b2 = localized_basis(M, ch.hi() - L + 1, ch.hi());
        for (const auto& x : b1.xi)
            for (const auto& y : b2.xi) span.add(M.inner(x, y));
        ++r.sectors_used;
    }
    auto [sd, fd] = span.dims();
    r.span_dim = sd;
    r.full_dim = fd;
    r.b0_dim = half_line_algebras(ch).b0_dim;
    return r;
}

morphism alignment_vector(const chain_spec& ch, const center_object& Zreg) {
    const category& cat = *ch.cat;
    word XM = ch.interval(ch.lo(), -1), XP = ch.interval(0, ch.hi());
    morphism io = morphism::zero(cat, word{}, word{Zreg.z});
    auto tb = basis_of(cat, word{Zreg.z});
    for (int t = 0; t < tb->dim(0); ++t)
        if (tb->trees[0][t].leaf[0] == 0) io.blk[0](t, 0) = 1.0;
    morphism up = tensor_id(io, XP);
    morphism br = half_braiding(Zreg, XP);
    if (XM.empty()) return br * up;
    return id_tensor(XM, br) * id_tensor(XM, up);
}

alignment_result local_alignment(const chain_spec& ch, rng_t& rng) {
    const category& cat = *ch.cat;
    const int n = cat.rank();
    alignment_result r;
    center_object Z = regular_center_object(cat);
    dhr_module M(Z, ch);
    cut_frame f = window_frame(ch);
    r.f_dim = M.dim();
    r.b1_dim = b1_dimension(f);
    morphism Psi = alignment_vector(ch, Z);

    const word W = ch.window();
    const word Wz = concat(W, M.zword());
    auto sp = split_of(cat, Wz, W.size());
    auto m = multiplicities(cat, W);
    for (int Y = 0; Y < n; ++Y) {
        if (m[Y] == 0) continue;
        for (int e = 0; e < n; ++e) {
            const auto& ent = sp->by_root[Y][e];
            if (ent.empty() || m[e] == 0) continue;
            int ns = 0;
            for (const auto& q : ent) ns = std::max(ns, q.s + 1);
            cmat R = cmat::Zero(ns, m[e] * m[Y]);
            for (const auto& q : ent) R.row(q.s).segment(static_cast<Eigen::Index>(q.t1) * m[Y], m[Y]) = Psi.blk[Y].row(q.T);
            r.image_dim += static_cast<long>(numerical_rank<cplx>(R)) * m[e] * m[Y];
        }
    }

    for (int t = 0; t < 3; ++t) {
        morphism b0 = f.embed_b0(f.random_b0(rng));
        r.centrality = std::max(r.centrality, rel(distance(M.left(b0, Psi), Psi * b0), b0.max_abs()));
        morphism a = gaussian_element(cat, W, rng);
        morphism lhs = Psi.adjoint() * M.left(a, Psi);
        r.isometry = std::max(r.isometry, rel(distance(lhs, f.E(a)), a.max_abs()));
    }

    // A as a B0-bimodule: channel counts against sum_Y N^e_{e' Y} N^{h'}_{Y h}.
    std::map<std::pair<int, int>, std::vector<int>> count;  // (e, h) -> per root
    for (int Y = 0; Y < n; ++Y)
        for (const auto& c : f.channels(Y)) {
            auto& v = count[{c.e, c.h}];
            v.resize(n, 0);
            ++v[Y];
        }
    r.table_match = true;
    for (const auto& [p1, v1] : count)
        for (const auto& [p2, v2] : count) {
            long lhs = 0, rhs = 0;
            for (int Y = 0; Y < n; ++Y) {
                lhs += static_cast<long>(v1[Y]) * v2[Y];
                rhs += static_cast<long>(cat.N(p2.first, Y, p1.first)) * cat.N(Y, p1.second, p2.second);
            }
            ++r.table_entries;
            if (lhs != rhs) r.table_match = false;
        }
    return r;
}

std::vector<condition> all_conditions() {
    return {condition::haag,          condition::covering,       condition::b0_simple,       condition::strong_generation,
            condition::strong_simplicity, condition::lr_recognition, condition::ct_generation,
            condition::local_alignment, condition::right_index,    condition::jones};
}

std::string condition_name(condition c) {
    switch (c) {
        case condition::haag: return "haag_duality";
        case condition::covering: return "covering";
        case condition::b0_simple: return "half_line_centers";
        case condition::strong_generation: return "strong_generation";
        case condition::strong_simplicity: return "strong_simplicity";
        case condition::lr_recognition: return "lr_recognition";
        case condition::ct_generation: return "charge_transporter_generation";
        case condition::local_alignment: return "local_alignment";
        case condition::right_index: return "right_index";
        case condition::jones: return "jones_relation";
    }
    return "";
}

condition parse_condition(const std::string& s) {
    for (auto c : all_conditions())
        if (condition_name(c) == s) return c;
    if (s == "haag") return condition::haag;
    if (s == "b0") return condition::b0_simple;
    if (s == "ct") return condition::ct_generation;
    if (s == "alignment") return condition::local_alignment;
    if (s == "rind") return condition::right_index;
    if (s == "jones") return condition::jones;
    throw input_error("unknown condition: " + s);
}

measurement measure(condition c, const chain_spec& ch, std::uint64_t seed, double tol) {
    const category& cat = *ch.cat;
    measurement m;
    switch (c) {
        case condition::haag: {
            auto h = haag_duality(ch);
            m.constants["K"] = h.K;
            m.constants["R"] = h.R;
            for (const auto& p : h.points) {
                std::string key = "[" + std::to_string(p.a) + "," + std::to_string(p.b) + "]";
                m.data["commutant" + key] = static_cast<double>(p.commutant_dim);
                m.data["local" + key] = static_cast<double>(p.local_dim);
            }
            m.ok = h.R == 0;
            if (!m.ok) m.note = "commutant larger than the local algebra; containment in a larger interval not certified";
            break;
        }
        case condition::covering: {
            auto cv = covering_property(ch);
            m.constants["L"] = cv.L;
            m.ok = cv.L > 0;
            break;
        }
        case condition::b0_simple: {
            auto hc = half_line_center_dims(ch);
            m.constants["center_minus"] = static_cast<double>(hc.minus);
            m.constants["center_plus"] = static_cast<double>(hc.plus);
            m.data["blocks_minus"] = static_cast<double>(hc.minus_raw);
            m.data["blocks_plus"] = static_cast<double>(hc.plus_raw);
            m.ok = hc.minus == 1 && hc.plus == 1;
            break;
        }
        case condition::strong_generation: {
            int r = strong_generation_length(ch);
            m.constants["r"] = r;
            m.ok = r > 0;
            if (!m.ok) m.note = "some simple is missing from intervals of every length";
            break;
        }
        case condition::strong_simplicity: {
            buffered_problem pb;
            pb.cat = &cat;
            pb.left_labels = support(cat, ch.window());
            pb.has_right = false;
            pb.left_buffer = left_buffer(ch, ch.k);
            pb.right_buffer = right_buffer(ch, ch.k);
            long center = solve_buffered(pb).dim;
            bool trace = unique_trace(ch);
            m.constants["center"] = static_cast<double>(center);
            m.constants["unique_trace"] = trace ? 1 : 0;
            m.ok = center == 1 && trace;
            m.evidence_only = true;
            m.note = "finite windows only: trivial buffered center and a primitive inclusion matrix";
            break;
        }
        case condition::lr_recognition: {
            std::vector<std::pair<std::string, word>> ys;
            for (int a = 0; a < cat.rank(); ++a) ys.push_back({cat.labels[a].name, word{object{a}}});
            object x = ch.site(0);
            std::string xn = object_name(cat, x);
            if (x.size() > 1) xn = "(" + xn + ")";
            ys.push_back({xn + "^2", word{x, x}});
            m.ok = true;
            for (const auto& [name, Y] : ys) {
                auto lr = lr_recognition(ch, Y);
                m.data["relative_commutant:" + name] = static_cast<double>(lr.relative_commutant);
                m.data["end:" + name] = static_cast<double>(lr.end_dim);
                if (lr.relative_commutant != lr.end_dim) m.ok = false;
            }
            break;
        }
        case condition::ct_generation: {
            auto g = charge_transporter_generation(ch, seeded_simples(cat, seed));
            m.data["span"] = static_cast<double>(g.span_dim);
            m.data["dim_A"] = static_cast<double>(g.full_dim);
            m.data["dim_B0"] = static_cast<double>(g.b0_dim);
            m.data["sectors"] = g.sectors_used;
            m.constants["deficit"] = static_cast<double>(g.full_dim - g.span_dim);
            m.ok = g.span_dim == g.full_dim;
            break;
        }
        case condition::local_alignment: {
            rng_t rng(seed);
            auto a = local_alignment(ch, rng);
            m.data["dim_B1"] = static_cast<double>(a.b1_dim);
            m.data["dim_F_Zreg"] = static_cast<double>(a.f_dim);
            m.data["image"] = static_cast<double>(a.image_dim);
            m.constants["dim_gap"] = static_cast<double>(a.f_dim - a.b1_dim);
            m.constants["image_gap"] = static_cast<double>(a.f_dim - a.image_dim);
            m.constants["bimodule_table_match"] = a.table_match ? 1 : 0;
            m.defect = std::max(a.centrality, a.isometry);
            m.ok = a.b1_dim == a.f_dim && a.image_dim == a.f_dim && a.table_match && m.defect <= tol;
            break;
        }
        case condition::right_index: {
            m.ok = true;
            int visible = 0;
            for (const auto& s : seeded_simples(cat, seed)) {
                dhr_module M(s.obj, ch);
                if (M.dim() == 0) continue;
                int L = minimal_localization_length(M);
                if (L < 0) continue;
                auto B = localized_basis(M, ch.lo(), ch.lo() + L - 1);
                auto ri = right_index(M, B);
                m.data["index:" + sector_key(s)] = ri.value;
                double d = std::max(std::abs(ri.value - s.qdim), ri.scalar_defect);
                m.defect = std::max(m.defect, d);
                ++visible;
            }
            m.data["sectors"] = visible;
            m.ok = m.defect <= std::max(tol, 1e-6);
            break;
        }
        case condition::jones: {
            rng_t rng(seed);
            cut_frame f = window_frame(ch);
            auto idx = watatani_index(f, rng);
            auto j = jones_basic_construction(f, rng);
            m.constants["index"] = idx.index;
            m.data["sum_dim_sq"] = idx.sum_dim_sq;
            m.data["dim_B1"] = static_cast<double>(j.b1_dim);
            m.data["relation_defect"] = j.relation_defect;
            m.data["dual_defect"] = j.dual_defect;
            m.data["spanning_set"] = j.spanning ? 1 : 0;
            m.defect = std::max({j.relation_defect, j.dual_defect, j.projection_defect, idx.scalar_defect});
            m.ok = m.defect <= tol && j.b1_dim == j.b1_dim_check;
            break;
        }
    }
    return m;
}

condition_report check_conditions(const chain_spec& ch, const std::vector<condition>& which, std::uint64_t seed, double tol,
                                  int jobs) {
    condition_report rep;
    rep.category = ch.cat->name;
    rep.window = ch.k;
    rep.seed = seed;
    chain_spec next = make_chain(*ch.cat, ch.k + 1, ch.pattern);
    const size_t ntask = 2 * which.size();
    std::vector<measurement> res(ntask);
    std::vector<std::exception_ptr> errs(ntask);
    std::atomic<size_t> cursor{0};
    auto work = [&]() {
        for (size_t t = cursor++; t < ntask; t = cursor++) {
            try {
                res[t] = measure(which[t / 2], t % 2 ? next : ch, seed, tol);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        }
    };
    const int nw = std::max(1, std::min<int>(jobs, static_cast<int>(ntask)));
    std::vector<std::thread> pool;
    for (int w = 1; w < nw; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);
    for (size_t ci = 0; ci < which.size(); ++ci) {
        const condition c = which[ci];
        const measurement& m1 = res[2 * ci];
        const measurement& m2 = res[2 * ci + 1];
        condition_entry e;
        e.name = condition_name(c);
        e.windows = {ch.k, next.k};
        e.max_defect = std::max(m1.defect, m2.defect);
        bool stable = true;
        for (const auto& [key, v] : m1.constants) {
            auto it = m2.constants.find(key);
            double w = it == m2.constants.end() ? std::nan("") : it->second;
            if (std::abs(v - w) <= 1e-6 * std::max(1.0, std::abs(v))) {
                e.constants[key] = v;
            } else {
                stable = false;
                e.constants[key + "@k" + std::to_string(ch.k)] = v;
                e.constants[key + "@k" + std::to_string(next.k)] = w;
            }
        }
        for (const auto& [key, v] : m1.data) e.constants[key + "@k" + std::to_string(ch.k)] = v;
        for (const auto& [key, v] : m2.data) e.constants[key + "@k" + std::to_string(next.k)] = v;
        if (m1.ok && m2.ok && stable)
            e.result = m1.evidence_only ? verdict::evidence : verdict::pass;
        else if (m1.ok != m2.ok || (m1.ok && !stable))
            e.result = verdict::unstable;
        else
            e.result = verdict::fail;
        e.note = m1.note.empty() ? m2.note : m1.note;
        rep.conditions.push_back(std::move(e));
    }
    return rep;
}

}  // namespace fc
