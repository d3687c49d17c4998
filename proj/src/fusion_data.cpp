#include "fusionchain/category.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace fc {

namespace {

std::atomic<std::uint64_t> next_uid{1};

}  // namespace

double category::total_dim_sq() const {
    double s = 0;
    for (double d : dims_) s += d * d;
    return s;
}

int category::label_of(const std::string& s) const {
    for (const auto& l : labels)
        if (l.name == s) return l.id;
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (end && *end == 0 && !s.empty() && v >= 0 && v < n_) return static_cast<int>(v);
    return -1;
}

bool category::admissible(int a, int b, int c, int d) const {
    for (int e = 0; e < n_; ++e)
        if (N(a, b, e) && N(e, c, d)) return true;
    return false;
}

cplx category::F(int a, int b, int c, int d, int e, int al, int be, int f, int ga, int de) const {
    const fblock& blk = F_[idx4(a, b, c, d)];
    if (blk.m.size() == 0) return 0.0;
    int M = max_mult_;
    int r = blk.row_at[(e * M + al) * M + be];
    int s = blk.col_at[(f * M + ga) * M + de];
    if (r < 0 || s < 0) return 0.0;
    return blk.m(r, s);
}

void category::set_rules(std::vector<simple_label> lab, std::vector<int> fusion) {
    labels = std::move(lab);
    n_ = static_cast<int>(labels.size());
    fusion_ = std::move(fusion);
    max_mult_ = 1;
    for (int v : fusion_) max_mult_ = std::max(max_mult_, v);
    F_.assign(static_cast<size_t>(n_) * n_ * n_ * n_, fblock{});
    dims_ = quantum_dimensions(n_, fusion_);
}

std::vector<std::array<int, 3>> category::f_rows(int a, int b, int c, int d) const {
    std::vector<std::array<int, 3>> r;
    for (int e = 0; e < n_; ++e)
        for (int al = 0; al < N(a, b, e); ++al)
            for (int be = 0; be < N(e, c, d); ++be) r.push_back({e, al, be});
    return r;
}

std::vector<std::array<int, 3>> category::f_cols(int a, int b, int c, int d) const {
    std::vector<std::array<int, 3>> r;
    for (int f = 0; f < n_; ++f)
        for (int ga = 0; ga < N(b, c, f); ++ga)
            for (int de = 0; de < N(a, f, d); ++de) r.push_back({f, ga, de});
    return r;
}

void category::set_block(int a, int b, int c, int d, cmat m) {
    fblock& blk = F_[idx4(a, b, c, d)];
    blk.rows = f_rows(a, b, c, d);
    blk.cols = f_cols(a, b, c, d);
    if (m.rows() != static_cast<Eigen::Index>(blk.rows.size()) ||
        m.cols() != static_cast<Eigen::Index>(blk.cols.size()))
        throw input_error("F block shape mismatch at (" + std::to_string(a) + "," + std::to_string(b) +
                          "," + std::to_string(c) + ";" + std::to_string(d) + ")");
    blk.m = std::move(m);
}

void category::finalize() {
    int M = max_mult_;
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b)
            for (int c = 0; c < n_; ++c)
                for (int d = 0; d < n_; ++d) {
                    fblock& blk = F_[idx4(a, b, c, d)];
                    bool adm = admissible(a, b, c, d);
                    if (adm && blk.m.size() == 0)
                        throw input_error("missing F block for admissible tuple (" + std::to_string(a) + "," +
                                          std::to_string(b) + "," + std::to_string(c) + ";" +
                                          std::to_string(d) + ")");
                    if (!adm) continue;
                    blk.row_at.assign(static_cast<size_t>(n_) * M * M, -1);
                    blk.col_at.assign(static_cast<size_t>(n_) * M * M, -1);
                    for (size_t i = 0; i < blk.rows.size(); ++i) {
                        auto [e, x, y] = blk.rows[i];
                        blk.row_at[(e * M + x) * M + y] = static_cast<int>(i);
                    }
                    for (size_t i = 0; i < blk.cols.size(); ++i) {
                        auto [e, x, y] = blk.cols[i];
                        blk.col_at[(e * M + x) * M + y] = static_cast<int>(i);
                    }
                }
    uid_ = next_uid++;
}

std::vector<double> quantum_dimensions(int n, const std::vector<int>& fusion) {
    std::vector<double> d(n, 1.0);
    for (int a = 0; a < n; ++a) {
        rmat Na(n, n);
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) Na(b, c) = fusion[(a * n + b) * n + c];
        Eigen::EigenSolver<rmat> es(Na, false);
        double rho = 0;
        for (Eigen::Index i = 0; i < n; ++i) rho = std::max(rho, std::abs(es.eigenvalues()(i)));
        d[a] = rho;
    }
    return d;
}

namespace {

void check_rules(int n, const std::vector<simple_label>& lab, const std::vector<int>& N) {
    auto at = [&](int a, int b, int c) { return N[(a * n + b) * n + c]; };
    if (n < 1) throw input_error("category needs at least one simple");
    for (int a = 0; a < n; ++a) {
        int d = lab[a].dual_id;
        if (d < 0 || d >= n || lab[d].dual_id != a) throw input_error("dual is not an involution");
    }
    if (lab[0].dual_id != 0) throw input_error("unit must be self-dual");
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (at(0, a, b) != (a == b) || at(a, 0, b) != (a == b)) throw input_error("unit law violated");
            if (at(a, b, 0) != (b == lab[a].dual_id)) throw input_error("duals not unique");
        }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y) {
                    long l = 0, r = 0;
                    for (int c = 0; c < n; ++c) {
                        l += static_cast<long>(at(a, b, c)) * at(c, x, y);
                        r += static_cast<long>(at(b, x, c)) * at(a, c, y);
                    }
                    if (l != r) throw input_error("fusion rules not associative");
                }
}

struct builder {
    category cat;
    builder(std::string name, std::vector<std::string> names, std::vector<int> dual, std::vector<int> fusion) {
        cat.name = std::move(name);
        std::vector<simple_label> lab;
        for (size_t i = 0; i < names.size(); ++i)
            lab.push_back({static_cast<int>(i), names[i], dual[i]});
        check_rules(static_cast<int>(lab.size()), lab, fusion);
        cat.set_rules(std::move(lab), std::move(fusion));
    }
    // Fill remaining admissible blocks; only 1x1 blocks may default.
    category done() {
        int n = cat.rank();
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        if (!cat.admissible(a, b, c, d) || cat.F(a, b, c, d).m.size()) continue;
                        auto rows = cat.f_rows(a, b, c, d);
                        if (rows.size() != 1) throw std::logic_error("builtin block needs explicit data");
                        cat.set_block(a, b, c, d, cmat::Identity(1, 1));
                    }
        cat.finalize();
        return std::move(cat);
    }
};

std::vector<int> group_fusion(int n) {
    std::vector<int> N(static_cast<size_t>(n) * n * n, 0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) N[(a * n + b) * n + (a + b) % n] = 1;
    return N;
}

category make_trivial() {
    builder b("trivial", {"1"}, {0}, {1});
    return b.done();
}

category make_vec_z(int n) {
    std::vector<std::string> names{"1"};
    std::vector<int> dual{0};
    for (int i = 1; i < n; ++i) {
        names.push_back(i == 1 ? "g" : "g" + std::to_string(i));
        dual.push_back(n - i);
    }
    builder b("vec_z" + std::to_string(n), names, dual, group_fusion(n));
    return b.done();
}

category make_fibonacci() {
    std::vector<int> N(8, 0);
    auto set = [&](int a, int b, int c) { N[(a * 2 + b) * 2 + c] = 1; };
    set(0, 0, 0);
    set(0, 1, 1);
    set(1, 0, 1);
    set(1, 1, 0);
    set(1, 1, 1);
    builder b("fibonacci", {"1", "tau"}, {0, 1}, N);
    double phi = (1 + std::sqrt(5.0)) / 2;
    cmat f(2, 2);
    f << 1 / phi, 1 / std::sqrt(phi), 1 / std::sqrt(phi), -1 / phi;
    b.cat.set_block(1, 1, 1, 1, f);
    return b.done();
}

category make_ising() {
    std::vector<int> N(27, 0);
    auto set = [&](int a, int b, int c) { N[(a * 3 + b) * 3 + c] = 1; };
    // 0 = 1, 1 = sigma, 2 = psi
    for (int a = 0; a < 3; ++a) {
        set(0, a, a);
        if (a) set(a, 0, a);
    }
    set(1, 1, 0);
    set(1, 1, 2);
    set(1, 2, 1);
    set(2, 1, 1);
    set(2, 2, 0);
    builder b("ising", {"1", "sigma", "psi"}, {0, 1, 2}, N);
    double s = 1 / std::sqrt(2.0);
    cmat f(2, 2);
    f << s, s, s, -s;
    b.cat.set_block(1, 1, 1, 1, f);
    b.cat.set_block(1, 2, 1, 2, -cmat::Identity(1, 1));
    b.cat.set_block(2, 1, 2, 1, -cmat::Identity(1, 1));
    return b.done();
}

double json_num(const nlohmann::json& j) {
    if (!j.is_number()) throw input_error("expected a number in F data");
    return j.get<double>();
}

}  // namespace

std::vector<std::string> builtin_names() { return {"trivial", "fibonacci", "ising", "vec_z2", "vec_z3"}; }

category builtin_category(const std::string& name) {
    if (name == "trivial") return make_trivial();
    if (name == "fibonacci") return make_fibonacci();
    if (name == "ising") return make_ising();
    if (name == "vec_z2") return make_vec_z(2);
    if (name == "vec_z3") return make_vec_z(3);
    throw input_error("unknown builtin category: " + name);
}

category load_category(const std::string& source) {
    for (const auto& b : builtin_names())
        if (b == source) return builtin_category(source);
    std::ifstream in(source);
    if (!in) throw input_error("cannot open category file: " + source);
    return load_category(in);
}

category load_category(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("malformed category file: ") + e.what());
    }
    try {
        auto names = j.at("simples").get<std::vector<std::string>>();
        auto dual = j.at("dual").get<std::vector<int>>();
        int n = static_cast<int>(names.size());
        if (static_cast<int>(dual.size()) != n) throw input_error("dual list length mismatch");
        std::vector<int> N(static_cast<size_t>(n) * n * n, 0);
        for (const auto& e : j.at("fusion")) {
            auto v = e.get<std::vector<int>>();
            if (v.size() != 4) throw input_error("fusion entries are [a,b,c,N]");
            for (int t = 0; t < 3; ++t)
                if (v[t] < 0 || v[t] >= n) throw input_error("fusion label out of range");
            if (v[3] < 0) throw input_error("negative fusion multiplicity");
            N[(v[0] * n + v[1]) * n + v[2]] = v[3];
        }
        std::vector<simple_label> lab;
        for (int i = 0; i < n; ++i) lab.push_back({i, names[i], dual[i]});
        check_rules(n, lab, N);
        category cat;
        cat.name = j.value("name", std::string("custom"));
        cat.tolerance = j.value("tolerance", 1e-9);
        cat.set_rules(std::move(lab), N);
        auto at = [&](int a, int b, int c) { return N[(a * n + b) * n + c]; };

        for (const auto& blk : j.at("F")) {
            auto abcd = blk.at("abcd").get<std::vector<int>>();
            if (abcd.size() != 4) throw input_error("abcd must have 4 labels");
            for (int v : abcd)
                if (v < 0 || v >= n) throw input_error("F label out of range");
            int a = abcd[0], b = abcd[1], c = abcd[2], d = abcd[3];
            if (!cat.admissible(a, b, c, d)) throw input_error("F block given for inadmissible tuple");
            if (cat.F(a, b, c, d).m.size()) throw input_error("duplicate F block");
            auto canon_rows = cat.f_rows(a, b, c, d);
            auto canon_cols = cat.f_cols(a, b, c, d);
            // inner/outer fusion counts for the row side (ab->e, ec->d) and column side (bc->f, af->d)
            auto decode = [&](const nlohmann::json& idx, bool row) -> std::array<int, 3> {
                auto v = idx.get<std::vector<int>>();
                if (v.empty() || v.size() > 3) throw input_error("bad F index entry");
                int e = v[0];
                if (e < 0 || e >= n) throw input_error("F index label out of range");
                int nin = row ? at(a, b, e) : at(b, c, e);
                int nout = row ? at(e, c, d) : at(a, e, d);
                int x = 0, y = 0;
                if (v.size() == 2) {
                    if (nout == 0) throw input_error("F index not admissible");
                    x = v[1] / nout;
                    y = v[1] % nout;
                } else if (v.size() == 3) {
                    x = v[1];
                    y = v[2];
                }
                if (x < 0 || x >= nin || y < 0 || y >= nout) throw input_error("F index not admissible");
                return {e, x, y};
            };
            const auto& jr = blk.at("rows");
            const auto& jc = blk.at("cols");
            if (jr.size() != canon_rows.size() || jc.size() != canon_cols.size())
                throw input_error("F block has wrong number of rows or columns");
            std::vector<int> rp, cp;
            for (const auto& r : jr) {
                auto key = decode(r, true);
                auto it = std::find(canon_rows.begin(), canon_rows.end(), key);
                rp.push_back(static_cast<int>(it - canon_rows.begin()));
            }
            for (const auto& r : jc) {
                auto key = decode(r, false);
                auto it = std::find(canon_cols.begin(), canon_cols.end(), key);
                cp.push_back(static_cast<int>(it - canon_cols.begin()));
            }
            auto sr = rp, sc = cp;
            std::sort(sr.begin(), sr.end());
            std::sort(sc.begin(), sc.end());
            if (std::adjacent_find(sr.begin(), sr.end()) != sr.end() ||
                std::adjacent_find(sc.begin(), sc.end()) != sc.end())
                throw input_error("repeated F index");
            const auto& re = blk.at("re");
            const nlohmann::json im = blk.contains("im") ? blk.at("im") : nlohmann::json();
            cmat m = cmat::Zero(static_cast<Eigen::Index>(rp.size()), static_cast<Eigen::Index>(cp.size()));
            if (re.size() != rp.size()) throw input_error("F re has wrong shape");
            for (size_t r = 0; r < rp.size(); ++r) {
                if (re[r].size() != cp.size()) throw input_error("F re has wrong shape");
                for (size_t s = 0; s < cp.size(); ++s) {
                    double vr = json_num(re[r][s]);
                    double vi = 0;
                    if (!im.is_null()) {
                        if (im.size() != rp.size() || im[r].size() != cp.size())
                            throw input_error("F im has wrong shape");
                        vi = json_num(im[r][s]);
                    }
                    m(rp[r], cp[s]) = cplx(vr, vi);
                }
            }
            cat.set_block(a, b, c, d, std::move(m));
        }
        cat.finalize();
        return cat;
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("malformed category file: ") + e.what());
    }
}

validation_report validate_category(const category& cat, double tol) {
    validation_report rep;
    const int n = cat.rank();
    auto N = [&](int a, int b, int c) { return cat.N(a, b, c); };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double s = 0;
            for (int c = 0; c < n; ++c) s += N(a, b, c) * cat.dim(c);
            rep.dimension = std::max(rep.dimension, std::abs(cat.dim(a) * cat.dim(b) - s));
        }
    for (int a = 0; a < n; ++a)
        if (cat.dim(a) < 1 - tol) rep.dimension = std::max(rep.dimension, 1 - cat.dim(a));
    rep.dimension = std::max(rep.dimension, std::abs(cat.dim(0) - 1));

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    if (!cat.admissible(a, b, c, d)) continue;
                    const cmat& m = cat.F(a, b, c, d).m;
                    if (m.rows() != m.cols()) {
                        rep.unitarity = std::max(rep.unitarity, 1.0);
                        continue;
                    }
                    rep.unitarity = std::max(
                        rep.unitarity, max_abs<cplx>(m * m.adjoint() - cmat::Identity(m.rows(), m.rows())));
                    if (a == 0 || b == 0 || c == 0)
                        rep.unit = std::max(rep.unit, max_abs<cplx>(m - cmat::Identity(m.rows(), m.cols())));
                }

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    for (int y = 0; y < n; ++y)
                        for (int e = 0; e < n; ++e)
                            for (int al = 0; al < N(a, b, e); ++al)
                                for (int f = 0; f < n; ++f)
                                    for (int be = 0; be < N(e, c, f); ++be)
                                        for (int ga = 0; ga < N(f, d, y); ++ga)
                                            for (int g = 0; g < n; ++g)
                                                for (int de = 0; de < N(c, d, g); ++de)
                                                    for (int h = 0; h < n; ++h)
                                                        for (int ze = 0; ze < N(b, g, h); ++ze)
                                                            for (int et = 0; et < N(a, h, y); ++et) {
                                                                cplx lhs = 0;
                                                                for (int ep = 0; ep < N(e, g, y); ++ep)
                                                                    lhs += cat.F(e, c, d, y, f, be, ga, g, de, ep) *
                                                                           cat.F(a, b, g, y, e, al, ep, h, ze, et);
                                                                cplx rhs = 0;
                                                                for (int k = 0; k < n; ++k)
                                                                    for (int ka = 0; ka < N(b, c, k); ++ka)
                                                                        for (int la = 0; la < N(a, k, f); ++la)
                                                                            for (int mu = 0; mu < N(k, d, h); ++mu)
                                                                                rhs += cat.F(a, b, c, f, e, al, be, k, ka, la) *
                                                                                       cat.F(a, k, d, y, f, la, ga, h, mu, et) *
                                                                                       cat.F(b, c, d, h, k, ka, mu, g, de, ze);
                                                                rep.pentagon = std::max(rep.pentagon, std::abs(lhs - rhs));
                                                            }
    rep.pass = rep.pentagon <= tol && rep.unitarity <= tol && rep.dimension <= tol && rep.unit <= tol &&
               rep.fusion <= tol;
    return rep;
}

}  // namespace fc
