#include "fusionchain/morphism.hpp"

#include <functional>
#include <mutex>
#include <stdexcept>

namespace fc {

namespace {

template <class T>
class cache {
public:
    std::shared_ptr<const T> get(const std::string& k) {
        std::lock_guard<std::mutex> g(m_);
        auto it = map_.find(k);
        return it == map_.end() ? nullptr : it->second;
    }
    std::shared_ptr<const T> put(const std::string& k, std::shared_ptr<const T> v) {
        std::lock_guard<std::mutex> g(m_);
        auto [it, fresh] = map_.emplace(k, std::move(v));
        return it->second;
    }
    void clear() {
        std::lock_guard<std::mutex> g(m_);
        map_.clear();
    }

private:
    std::mutex m_;
    std::unordered_map<std::string, std::shared_ptr<const T>> map_;
};

cache<tree_basis> basis_cache;
cache<split_info> split_cache;
cache<ext_map> ext_cache;
cache<std::vector<cmat>> bracket_cache;

void put_int(std::string& s, int v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
}

std::string tree_key(const fusion_tree& t) {
    std::string s;
    s.reserve(t.leaf.size() * 6);
    for (size_t i = 0; i < t.leaf.size(); ++i) {
        put_int(s, t.leaf[i]);
        put_int(s, t.lab[i]);
        put_int(s, t.mu[i]);
    }
    return s;
}

std::string cat_key(const category& c) { return std::to_string(c.uid()) + ":"; }

bool is_left_nested(const std::string& br, size_t n) { return br.empty() || br == left_nested(n); }

std::pair<std::string, std::string> split_bracket(const std::string& br) {
    if (br.size() < 2 || br.front() != '(' || br.back() != ')') throw std::invalid_argument("bad bracketing " + br);
    int depth = 0;
    for (size_t i = 1; i + 1 < br.size(); ++i) {
        if (br[i] == '(') ++depth;
        if (br[i] == ')') --depth;
        if (depth == 0) return {br.substr(1, i), br.substr(i + 1, br.size() - i - 2)};
    }
    throw std::invalid_argument("bad bracketing " + br);
}

size_t bracket_leaves(const std::string& br) {
    size_t n = 0;
    for (char c : br)
        if (c == 'x') ++n;
    return n;
}

fusion_tree prefix_tree(const fusion_tree& t, size_t p) {
    fusion_tree r;
    r.leaf.assign(t.leaf.begin(), t.leaf.begin() + p);
    r.lab.assign(t.lab.begin(), t.lab.begin() + p);
    r.mu.assign(t.mu.begin(), t.mu.begin() + p);
    return r;
}

void expect_canonical(const morphism& f, const char* what) {
    if (!is_left_nested(f.src_br, f.src.size()) || !is_left_nested(f.tgt_br, f.tgt.size()))
        throw std::invalid_argument(std::string(what) + " needs left-nested morphisms");
}

// U[Y]: left-nested trees x bracketed trees.
std::shared_ptr<const std::vector<cmat>> bracket_unitary(const category& cat, const word& w, const std::string& br) {
    const int n = cat.rank();
    auto B = basis_of(cat, w);
    if (is_left_nested(br, w.size())) {
        auto out = std::make_shared<std::vector<cmat>>();
        for (int Y = 0; Y < n; ++Y) out->push_back(cmat::Identity(B->dim(Y), B->dim(Y)));
        return out;
    }
    std::string key = cat_key(cat) + word_key(w) + "|" + br;
    if (auto c = bracket_cache.get(key)) return c;
    auto [lb, rb] = split_bracket(br);
    size_t p = bracket_leaves(lb);
    word wl = slice(w, 0, p), wr = slice(w, p, w.size());
    auto UL = bracket_unitary(cat, wl, lb);
    auto UR = bracket_unitary(cat, wr, rb);
    auto BL = basis_of(cat, wl);
    auto BR = basis_of(cat, wr);
    auto sp = split_of(cat, w, p);
    auto out = std::make_shared<std::vector<cmat>>();
    for (int Y = 0; Y < n; ++Y) {
        cmat U = cmat::Zero(B->dim(Y), B->dim(Y));
        Eigen::Index col = 0;
        for (int e = 0; e < n; ++e) {
            const auto& ent = sp->by_root[Y][e];
            for (int h = 0; h < n; ++h)
                for (int mu = 0; mu < cat.N(e, h, Y); ++mu) {
                    int de = BL->dim(e), dh = BR->dim(h);
                    if (de == 0 || dh == 0) continue;
                    auto V = ext_unitary(cat, e, wr, Y);
                    int start = V->range_start[h * cat.max_mult() + mu];
                    // W[s, bR] = sum_t2 V[s, (h,mu,t2)] UR(h)[t2, bR]
                    cmat W = V->V.middleCols(start, dh) * (*UR)[h];
                    for (int bl = 0; bl < de; ++bl)
                        for (int brr = 0; brr < dh; ++brr) {
                            for (const auto& en : ent) U(en.T, col) += (*UL)[e](en.t1, bl) * W(en.s, brr);
                            ++col;
                        }
                }
        }
        if (col != U.cols()) throw std::logic_error("bracketed basis size mismatch");
        out->push_back(std::move(U));
    }
    return bracket_cache.put(key, out);
}

}  // namespace

word simple_word(const std::vector<int>& labels) {
    word w;
    for (int a : labels) w.push_back(object{a});
    return w;
}

word concat(const word& a, const word& b) {
    word r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

word slice(const word& w, size_t lo, size_t hi) { return word(w.begin() + lo, w.begin() + hi); }

double object_dim(const category& cat, const object& x) {
    double s = 0;
    for (int a : x) s += cat.dim(a);
    return s;
}

double word_dim(const category& cat, const word& w) {
    double d = 1;
    for (const auto& x : w) d *= object_dim(cat, x);
    return d;
}

std::string word_key(const word& w) {
    std::string s;
    for (const auto& x : w) {
        s.push_back('[');
        for (int a : x) put_int(s, a);
        s.push_back(']');
    }
    return s;
}

int tree_basis::find(int Y, const fusion_tree& t) const {
    auto it = index_[Y].find(tree_key(t));
    return it == index_[Y].end() ? -1 : it->second;
}

void tree_basis::build_index() {
    index_.assign(trees.size(), {});
    for (size_t Y = 0; Y < trees.size(); ++Y)
        for (size_t i = 0; i < trees[Y].size(); ++i) index_[Y].emplace(tree_key(trees[Y][i]), static_cast<int>(i));
}

std::shared_ptr<const tree_basis> basis_of(const category& cat, const word& w) {
    std::string key = cat_key(cat) + word_key(w);
    if (auto c = basis_cache.get(key)) return c;
    const int n = cat.rank();
    auto b = std::make_shared<tree_basis>();
    b->w = w;
    b->trees.assign(n, {});
    if (w.empty()) {
        b->trees[0].push_back(fusion_tree{});
    } else if (w.size() == 1) {
        for (size_t s = 0; s < w[0].size(); ++s)
            b->trees[w[0][s]].push_back(fusion_tree{{static_cast<int>(s)}, {w[0][s]}, {0}});
    } else {
        auto prev = basis_of(cat, slice(w, 0, w.size() - 1));
        const object& x = w.back();
        for (int Y = 0; Y < n; ++Y)
            for (int e = 0; e < n; ++e)
                for (const auto& t : prev->trees[e])
                    for (size_t s = 0; s < x.size(); ++s)
                        for (int mu = 0; mu < cat.N(e, x[s], Y); ++mu) {
                            fusion_tree u = t;
                            u.leaf.push_back(static_cast<int>(s));
                            u.lab.push_back(Y);
                            u.mu.push_back(mu);
                            b->trees[Y].push_back(std::move(u));
                        }
    }
    b->build_index();
    return basis_cache.put(key, b);
}

std::vector<fusion_tree> fusion_tree_basis(const category& cat, const word& w, int root) {
    return basis_of(cat, w)->trees[root];
}

std::string left_nested(size_t n) {
    if (n == 0) return "";
    std::string s = "x";
    for (size_t i = 1; i < n; ++i) s = "(" + s + "x)";
    return s;
}

std::string right_nested(size_t n) {
    if (n == 0) return "";
    std::string s = "x";
    for (size_t i = 1; i < n; ++i) s = "(x" + s + ")";
    return s;
}

std::string join_brackets(const std::string& l, const std::string& r) {
    if (l.empty()) return r;
    if (r.empty()) return l;
    return "(" + l + r + ")";
}

std::shared_ptr<const split_info> split_of(const category& cat, const word& w, size_t p) {
    std::string key = cat_key(cat) + word_key(w) + "#" + std::to_string(p);
    if (auto c = split_cache.get(key)) return c;
    const int n = cat.rank();
    auto B = basis_of(cat, w);
    auto B1 = basis_of(cat, slice(w, 0, p));
    word rest = slice(w, p, w.size());
    std::vector<std::shared_ptr<const tree_basis>> ext(n);
    auto out = std::make_shared<split_info>();
    out->by_root.assign(n, std::vector<std::vector<split_entry>>(n));
    for (int Y = 0; Y < n; ++Y)
        for (int T = 0; T < B->dim(Y); ++T) {
            const fusion_tree& t = B->trees[Y][T];
            int e = p == 0 ? 0 : t.lab[p - 1];
            int t1 = p == 0 ? 0 : B1->find(e, prefix_tree(t, p));
            if (!ext[e]) ext[e] = basis_of(cat, concat(word{object{e}}, rest));
            fusion_tree u;
            u.leaf.push_back(0);
            u.lab.push_back(e);
            u.mu.push_back(0);
            u.leaf.insert(u.leaf.end(), t.leaf.begin() + p, t.leaf.end());
            u.lab.insert(u.lab.end(), t.lab.begin() + p, t.lab.end());
            u.mu.insert(u.mu.end(), t.mu.begin() + p, t.mu.end());
            int s = ext[e]->find(Y, u);
            if (t1 < 0 || s < 0) throw std::logic_error("tree split failed");
            out->by_root[Y][e].push_back({T, t1, s});
        }
    return split_cache.put(key, out);
}

std::shared_ptr<const ext_map> ext_unitary(const category& cat, int e, const word& w2, int Y) {
    std::string key = cat_key(cat) + std::to_string(e) + "," + std::to_string(Y) + word_key(w2);
    if (auto c = ext_cache.get(key)) return c;
    const int n = cat.rank();
    const int M = cat.max_mult();
    auto E = basis_of(cat, concat(word{object{e}}, w2));
    auto B2 = basis_of(cat, w2);
    auto out = std::make_shared<ext_map>();
    out->range_start.assign(static_cast<size_t>(n) * M, -1);
    for (int h = 0; h < n; ++h)
        for (int mu = 0; mu < cat.N(e, h, Y); ++mu) {
            out->range_start[h * M + mu] = static_cast<int>(out->cols.size());
            for (int t2 = 0; t2 < B2->dim(h); ++t2) out->cols.push_back({h, mu, t2});
        }
    const Eigen::Index ncols = static_cast<Eigen::Index>(out->cols.size());
    out->V = cmat::Zero(E->dim(Y), ncols);
    if (w2.empty()) {
        if (ncols) out->V(0, 0) = 1.0;
    } else if (w2.size() == 1) {
        for (Eigen::Index c = 0; c < ncols; ++c) {
            const auto& pc = out->cols[c];
            int s = B2->trees[pc.h][pc.t2].leaf[0];
            int r = E->find(Y, fusion_tree{{0, s}, {e, Y}, {0, pc.mu}});
            out->V(r, c) = 1.0;
        }
    } else {
        const size_t np = w2.size() - 1;
        word w2p = slice(w2, 0, np);
        const object& x = w2.back();
        auto B2p = basis_of(cat, w2p);
        auto Ep = basis_of(cat, concat(word{object{e}}, w2p));
        std::vector<std::shared_ptr<const ext_map>> Vg(n);
        std::vector<std::vector<int>> ext_idx(n);
        for (int g = 0; g < n; ++g) {
            Vg[g] = ext_unitary(cat, e, w2p, g);
            ext_idx[g].assign(static_cast<size_t>(Ep->dim(g)) * x.size() * M, -2);
        }
        auto row_of = [&](int g, int rp, int s, int lam) {
            int& slot = ext_idx[g][(static_cast<size_t>(rp) * x.size() + s) * M + lam];
            if (slot == -2) {
                fusion_tree u = Ep->trees[g][rp];
                u.leaf.push_back(s);
                u.lab.push_back(Y);
                u.mu.push_back(lam);
                slot = E->find(Y, u);
            }
            return slot;
        };
        for (Eigen::Index c = 0; c < ncols; ++c) {
            const auto& pc = out->cols[c];
            const fusion_tree& tt = B2->trees[pc.h][pc.t2];
            int s = tt.leaf[np], nu = tt.mu[np], hp = tt.lab[np - 1];
            int t2p = B2p->find(hp, prefix_tree(tt, np));
            for (int g = 0; g < n; ++g) {
                const ext_map& vg = *Vg[g];
                if (vg.V.rows() == 0) continue;
                for (int ka = 0; ka < cat.N(e, hp, g); ++ka) {
                    int cg = vg.range_start[hp * M + ka] + t2p;
                    for (int lam = 0; lam < cat.N(g, x[s], Y); ++lam) {
                        cplx coeff = std::conj(cat.F(e, hp, x[s], Y, g, ka, lam, pc.h, nu, pc.mu));
                        if (std::abs(coeff) < 1e-300) continue;
                        for (Eigen::Index rp = 0; rp < vg.V.rows(); ++rp) {
                            cplx v = vg.V(rp, cg);
                            if (v == 0.0) continue;
                            int r = row_of(g, static_cast<int>(rp), s, lam);
                            out->V(r, c) += v * coeff;
                        }
                    }
                }
            }
        }
    }
    return ext_cache.put(key, out);
}

void clear_caches() {
    basis_cache.clear();
    split_cache.clear();
    ext_cache.clear();
    bracket_cache.clear();
}

morphism morphism::zero(const category& cat, const word& src, const word& tgt) {
    morphism m;
    m.cat = &cat;
    m.src = src;
    m.tgt = tgt;
    auto bs = basis_of(cat, src);
    auto bt = basis_of(cat, tgt);
    for (int Y = 0; Y < cat.rank(); ++Y) m.blk.push_back(cmat::Zero(bt->dim(Y), bs->dim(Y)));
    return m;
}

morphism morphism::identity(const category& cat, const word& w) {
    morphism m = zero(cat, w, w);
    for (auto& b : m.blk) b.setIdentity();
    return m;
}

morphism morphism::adjoint() const {
    morphism m;
    m.cat = cat;
    m.src = tgt;
    m.tgt = src;
    m.src_br = tgt_br;
    m.tgt_br = src_br;
    for (const auto& b : blk) m.blk.push_back(b.adjoint());
    return m;
}

bool morphism::same_space(const morphism& o) const {
    return cat == o.cat && src == o.src && tgt == o.tgt && src_br == o.src_br && tgt_br == o.tgt_br;
}

morphism& morphism::operator+=(const morphism& o) {
    if (!same_space(o)) throw std::invalid_argument("adding morphisms of different spaces");
    for (size_t Y = 0; Y < blk.size(); ++Y) blk[Y] += o.blk[Y];
    return *this;
}

morphism& morphism::operator-=(const morphism& o) {
    if (!same_space(o)) throw std::invalid_argument("subtracting morphisms of different spaces");
    for (size_t Y = 0; Y < blk.size(); ++Y) blk[Y] -= o.blk[Y];
    return *this;
}

morphism& morphism::operator*=(cplx s) {
    for (auto& b : blk) b *= s;
    return *this;
}

double morphism::max_abs() const {
    double m = 0;
    for (const auto& b : blk) m = std::max(m, fc::max_abs<cplx>(b));
    return m;
}

double morphism::frob() const {
    double s = 0;
    for (const auto& b : blk) s += b.squaredNorm();
    return std::sqrt(s);
}

cplx morphism::inner(const morphism& o) const {
    cplx s = 0;
    for (size_t Y = 0; Y < blk.size(); ++Y)
        if (blk[Y].size()) s += (blk[Y].conjugate().cwiseProduct(o.blk[Y])).sum();
    return s;
}

Eigen::Index morphism::size() const {
    Eigen::Index s = 0;
    for (const auto& b : blk) s += b.size();
    return s;
}

morphism operator+(morphism a, const morphism& b) { return a += b; }
morphism operator-(morphism a, const morphism& b) { return a -= b; }
morphism operator*(cplx s, morphism a) { return a *= s; }
double distance(const morphism& a, const morphism& b) { return (a - b).max_abs(); }

morphism compose(const morphism& f, const morphism& g) {
    if (f.cat != g.cat || f.src != g.tgt || f.src_br != g.tgt_br)
        throw std::invalid_argument("compose: source of f differs from target of g");
    morphism m;
    m.cat = f.cat;
    m.src = g.src;
    m.tgt = f.tgt;
    m.src_br = g.src_br;
    m.tgt_br = f.tgt_br;
    for (size_t Y = 0; Y < f.blk.size(); ++Y) m.blk.push_back(f.blk[Y] * g.blk[Y]);
    return m;
}

morphism operator*(const morphism& f, const morphism& g) { return compose(f, g); }

morphism tensor(const morphism& f, const morphism& g) {
    expect_canonical(f, "tensor");
    expect_canonical(g, "tensor");
    const category& cat = *f.cat;
    const int n = cat.rank();
    const int M = cat.max_mult();
    morphism r = morphism::zero(cat, concat(f.src, g.src), concat(f.tgt, g.tgt));
    auto sa = split_of(cat, r.src, f.src.size());
    auto sb = split_of(cat, r.tgt, f.tgt.size());
    for (int Y = 0; Y < n; ++Y)
        for (int e = 0; e < n; ++e) {
            const auto& cols = sa->by_root[Y][e];
            const auto& rows = sb->by_root[Y][e];
            if (cols.empty() || rows.empty()) continue;
            auto VA = ext_unitary(cat, e, g.src, Y);
            auto VB = ext_unitary(cat, e, g.tgt, Y);
            cmat Me = cmat::Zero(VB->V.rows(), VA->V.rows());
            for (int h = 0; h < n; ++h) {
                const cmat& gh = g.blk[h];
                if (gh.size() == 0) continue;
                for (int mu = 0; mu < cat.N(e, h, Y); ++mu) {
                    int a = VA->range_start[h * M + mu], b = VB->range_start[h * M + mu];
                    Me.noalias() += VB->V.middleCols(b, gh.rows()) * gh * VA->V.middleCols(a, gh.cols()).adjoint();
                }
            }
            const cmat& fe = f.blk[e];
            cmat& out = r.blk[Y];
            for (const auto& rw : rows)
                for (const auto& cl : cols) out(rw.T, cl.T) = fe(rw.t1, cl.t1) * Me(rw.s, cl.s);
        }
    return r;
}

morphism tensor_id(const morphism& f, const word& right) {
    expect_canonical(f, "tensor");
    const category& cat = *f.cat;
    const int n = cat.rank();
    morphism r = morphism::zero(cat, concat(f.src, right), concat(f.tgt, right));
    auto sa = split_of(cat, r.src, f.src.size());
    auto sb = split_of(cat, r.tgt, f.tgt.size());
    for (int Y = 0; Y < n; ++Y)
        for (int e = 0; e < n; ++e) {
            const auto& cols = sa->by_root[Y][e];
            const auto& rows = sb->by_root[Y][e];
            if (cols.empty() || rows.empty()) continue;
            std::vector<std::vector<std::pair<int, int>>> by_s;
            for (const auto& cl : cols) {
                if (static_cast<size_t>(cl.s) >= by_s.size()) by_s.resize(cl.s + 1);
                by_s[cl.s].push_back({cl.T, cl.t1});
            }
            const cmat& fe = f.blk[e];
            cmat& out = r.blk[Y];
            for (const auto& rw : rows) {
                if (static_cast<size_t>(rw.s) >= by_s.size()) continue;
                for (auto [T, t1] : by_s[rw.s]) out(rw.T, T) = fe(rw.t1, t1);
            }
        }
    return r;
}

morphism id_tensor(const word& left, const morphism& g) {
    expect_canonical(g, "tensor");
    const category& cat = *g.cat;
    const int n = cat.rank();
    const int M = cat.max_mult();
    morphism r = morphism::zero(cat, concat(left, g.src), concat(left, g.tgt));
    auto sa = split_of(cat, r.src, left.size());
    auto sb = split_of(cat, r.tgt, left.size());
    for (int Y = 0; Y < n; ++Y)
        for (int e = 0; e < n; ++e) {
            const auto& cols = sa->by_root[Y][e];
            const auto& rows = sb->by_root[Y][e];
            if (cols.empty() || rows.empty()) continue;
            auto VA = ext_unitary(cat, e, g.src, Y);
            auto VB = ext_unitary(cat, e, g.tgt, Y);
            cmat Me = cmat::Zero(VB->V.rows(), VA->V.rows());
            for (int h = 0; h < n; ++h) {
                const cmat& gh = g.blk[h];
                if (gh.size() == 0) continue;
                for (int mu = 0; mu < cat.N(e, h, Y); ++mu) {
                    int a = VA->range_start[h * M + mu], b = VB->range_start[h * M + mu];
                    Me.noalias() += VB->V.middleCols(b, gh.rows()) * gh * VA->V.middleCols(a, gh.cols()).adjoint();
                }
            }
            std::vector<std::vector<std::pair<int, int>>> by_t1;
            for (const auto& cl : cols) {
                if (static_cast<size_t>(cl.t1) >= by_t1.size()) by_t1.resize(cl.t1 + 1);
                by_t1[cl.t1].push_back({cl.T, cl.s});
            }
            cmat& out = r.blk[Y];
            for (const auto& rw : rows) {
                if (static_cast<size_t>(rw.t1) >= by_t1.size()) continue;
                for (auto [T, s] : by_t1[rw.t1]) out(rw.T, T) = Me(rw.s, s);
            }
        }
    return r;
}

morphism recouple(const morphism& f, const std::string& new_src_br, const std::string& new_tgt_br) {
    const category& cat = *f.cat;
    auto Us_old = bracket_unitary(cat, f.src, f.src_br);
    auto Ut_old = bracket_unitary(cat, f.tgt, f.tgt_br);
    auto Us_new = bracket_unitary(cat, f.src, new_src_br);
    auto Ut_new = bracket_unitary(cat, f.tgt, new_tgt_br);
    morphism r = f;
    r.src_br = is_left_nested(new_src_br, f.src.size()) ? "" : new_src_br;
    r.tgt_br = is_left_nested(new_tgt_br, f.tgt.size()) ? "" : new_tgt_br;
    for (size_t Y = 0; Y < f.blk.size(); ++Y)
        r.blk[Y] = (*Ut_new)[Y].adjoint() * (*Ut_old)[Y] * f.blk[Y] * (*Us_old)[Y].adjoint() * (*Us_new)[Y];
    return r;
}

morphism recouple(const morphism& f, const std::string& new_br) { return recouple(f, new_br, new_br); }

cplx unnormalized_trace(const morphism& f) {
    if (f.src != f.tgt) throw std::invalid_argument("trace of a non-endomorphism");
    cplx s = 0;
    for (size_t Y = 0; Y < f.blk.size(); ++Y) {
        if (f.blk[Y].rows() != f.blk[Y].cols()) throw std::invalid_argument("non-square block");
        s += f.cat->dim(static_cast<int>(Y)) * f.blk[Y].trace();
    }
    return s;
}

cplx categorical_trace(const morphism& f) { return unnormalized_trace(f) / word_dim(*f.cat, f.src); }

morphism partial_trace(const morphism& f, side sd, size_t count) {
    if (f.src != f.tgt) throw std::invalid_argument("partial trace of a non-endomorphism");
    if (count > f.src.size()) throw std::invalid_argument("partial trace count exceeds word length");
    expect_canonical(f, "partial_trace");
    const category& cat = *f.cat;
    const int n = cat.rank();
    const int M = cat.max_mult();
    const size_t len = f.src.size();
    if (sd == side::right) {
        size_t p = len - count;
        word w1 = slice(f.src, 0, p);
        double d2 = word_dim(cat, slice(f.src, p, len));
        morphism r = morphism::zero(cat, w1, w1);
        auto sp = split_of(cat, f.src, p);
        for (int Y = 0; Y < n; ++Y)
            for (int e = 0; e < n; ++e) {
                const auto& ent = sp->by_root[Y][e];
                if (ent.empty()) continue;
                double w = cat.dim(Y) / (cat.dim(e) * d2);
                std::vector<std::vector<std::pair<int, int>>> by_s;
                for (const auto& en : ent) {
                    if (static_cast<size_t>(en.s) >= by_s.size()) by_s.resize(en.s + 1);
                    by_s[en.s].push_back({en.T, en.t1});
                }
                for (const auto& b : by_s)
                    for (auto [T1, a1] : b)
                        for (auto [T2, a2] : b) r.blk[e](a1, a2) += w * f.blk[Y](T1, T2);
            }
        return r;
    }
    size_t p = count;
    word w2 = slice(f.src, p, len);
    double d1 = word_dim(cat, slice(f.src, 0, p));
    morphism r = morphism::zero(cat, w2, w2);
    auto sp = split_of(cat, f.src, p);
    for (int Y = 0; Y < n; ++Y)
        for (int e = 0; e < n; ++e) {
            const auto& ent = sp->by_root[Y][e];
            if (ent.empty()) continue;
            auto V = ext_unitary(cat, e, w2, Y);
            cmat G = cmat::Zero(V->V.rows(), V->V.rows());
            std::vector<std::vector<std::pair<int, int>>> by_t1;
            for (const auto& en : ent) {
                if (static_cast<size_t>(en.t1) >= by_t1.size()) by_t1.resize(en.t1 + 1);
                by_t1[en.t1].push_back({en.T, en.s});
            }
            for (const auto& b : by_t1)
                for (auto [T1, s1] : b)
                    for (auto [T2, s2] : b) G(s1, s2) += f.blk[Y](T1, T2);
            cmat H = V->V.adjoint() * G * V->V;
            for (int h = 0; h < n; ++h)
                for (int mu = 0; mu < cat.N(e, h, Y); ++mu) {
                    int st = V->range_start[h * M + mu];
                    int dh = r.blk[h].rows();
                    if (dh == 0) continue;
                    r.blk[h] += (cat.dim(Y) / (cat.dim(h) * d1)) * H.block(st, st, dh, dh);
                }
        }
    return r;
}

morphism tree_vector(const category& cat, const word& w, int Y, int k) {
    morphism m = morphism::zero(cat, word{object{Y}}, w);
    m.blk[Y](k, 0) = 1.0;
    return m;
}

std::vector<std::vector<morphism>> isotypic_isometries(const category& cat, const word& w, const word& appended) {
    word full = concat(w, appended);
    auto B = basis_of(cat, full);
    std::vector<std::vector<morphism>> out(cat.rank());
    // The tree basis is orthonormal, so the ordered Gram-Schmidt of tree vectors is the tree vectors.
    for (int Y = 0; Y < cat.rank(); ++Y)
        for (int k = 0; k < B->dim(Y); ++k) out[Y].push_back(tree_vector(cat, full, Y, k));
    return out;
}

cvec flatten(const morphism& f) {
    cvec v(f.size());
    Eigen::Index o = 0;
    for (const auto& b : f.blk) {
        v.segment(o, b.size()) = Eigen::Map<const cvec>(b.data(), b.size());
        o += b.size();
    }
    return v;
}

morphism unflatten(const morphism& shape, const cvec& v) {
    morphism r = shape;
    Eigen::Index o = 0;
    for (auto& b : r.blk) {
        b = Eigen::Map<const cmat>(v.data() + o, b.rows(), b.cols());
        o += b.size();
    }
    return r;
}

}  // namespace fc
