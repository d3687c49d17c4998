#pragma once

#include "fusionchain/morphism.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fc {

// Sites n in [-k, k] carry pattern[n mod |pattern|]; the pattern also fills the buffers outside the window.
struct chain_spec {
    const category* cat = nullptr;
    int k = 1;
    std::vector<object> pattern;

    object site(int n) const;
    word interval(int a, int b) const;  // empty when b < a
    word window() const { return interval(-k, k); }
    int lo() const { return -k; }
    int hi() const { return k; }
};

object default_site_object(const category& cat);
object parse_object(const category& cat, const std::string& s);  // "tau", "1+g", "0+1"
std::vector<object> parse_objects(const category& cat, const std::string& s);  // comma separated
std::string object_name(const category& cat, const object& x);
chain_spec make_chain(const category& cat, int k, std::vector<object> pattern = {});

std::vector<int> support(const category& cat, const word& w);  // simples with nonzero multiplicity
std::vector<long> multiplicities(const category& cat, const word& w);  // m_Y by path counting

struct interval_algebra {
    int a = 0, b = 0;
    word w;
    std::vector<long> m;  // block sizes m_Y
    long dim = 0;
};

interval_algebra make_interval_algebra(const chain_spec& ch, int a, int b);
// x in End(X_[a,b]) included in End(X_[c,d]).
morphism include_element(const chain_spec& ch, const morphism& x, int a, int b, int c, int d);
morphism matrix_unit(const category& cat, const word& w, int Y, int r, int c);

struct half_lines {
    interval_algebra minus, plus, window;
    long b0_dim = 0;
};
half_lines half_line_algebras(const chain_spec& ch);

// Subalgebras of End(w) given by a linear basis.
struct subalgebra {
    word w;
    std::vector<morphism> basis;
    size_t dim() const { return basis.size(); }
};

subalgebra full_algebra(const category& cat, const word& w);
subalgebra commutant(const category& cat, const std::vector<morphism>& gens, const word& w, double tol = 1e-9);
subalgebra generated_algebra(const category& cat, const std::vector<morphism>& gens, const word& w, double tol = 1e-9);
std::vector<morphism> orthonormalize(const std::vector<morphism>& v, double tol = 1e-9);

struct center_info {
    int dim = 0;
    std::vector<morphism> projections;  // minimal central projections
};
center_info algebra_center(const category& cat, const subalgebra& m, rng_t& rng, double tol = 1e-9);

// Product coordinates at the cut p of w: per root Y, channels (e, h, mu) with blocks indexed t1 * m_h + t2.
struct channel {
    int e, h, mu;
    int off, n1, n2;
};
class cut_frame {
public:
    cut_frame(const category& cat, const word& w, size_t p);

    const category& cat() const { return *cat_; }
    const word& w() const { return w_; }
    size_t cut() const { return p_; }
    const std::vector<channel>& channels(int Y) const { return ch_[Y]; }
    const cmat& Q(int Y) const { return Q_[Y]; }
    int m1(int e) const { return m1_[e]; }
    int m2(int h) const { return m2_[h]; }

    std::vector<cmat> to_product(const morphism& a) const;
    morphism from_product(const std::vector<cmat>& blocks) const;

    // B0 elements are blocks b[e * n + h] of size m1(e) m2(h).
    std::vector<cmat> expectation(const std::vector<cmat>& prod) const;
    morphism embed_b0(const std::vector<cmat>& b) const;
    std::vector<cmat> embed_b0_product(const std::vector<cmat>& b) const;
    morphism E(const morphism& a) const { return embed_b0(expectation(to_product(a))); }
    std::vector<cmat> rank_one_expectation(int Y, const cvec& x, const cvec& y) const;  // E(|x><y|)
    std::vector<cmat> b0_zero() const;
    std::vector<cmat> b0_product(const std::vector<cmat>& a, const std::vector<cmat>& b) const;
    std::vector<cmat> random_b0(rng_t& rng) const;
    int b0_rank() const { return n_; }

private:
    const category* cat_;
    word w_;
    size_t p_;
    std::vector<std::vector<channel>> ch_;
    std::vector<cmat> Q_;
    std::vector<int> m1_, m2_;
    int n_ = 0;
};

cut_frame window_frame(const chain_spec& ch);  // cut between sites -1 and 0

enum class expectation_kind { right_cut, tail, head, dual };

// right_cut: A -> B0. tail (param n): trace out X_[-k,-n-1]. head (param n): trace out X_[n+1,k].
// dual acts on the basic extension and is evaluated through dual_expectation.
class expectation_map {
public:
    expectation_map(expectation_kind kind, const chain_spec& ch, int param = 0);
    expectation_kind kind() const { return kind_; }
    int param() const { return param_; }
    morphism apply(const morphism& a) const;
    const cut_frame& frame() const { return *frame_; }

private:
    expectation_kind kind_;
    int param_;
    chain_spec ch_;
    std::shared_ptr<const cut_frame> frame_;
};

inline expectation_map conditional_expectation(expectation_kind kind, const chain_spec& ch, int param = 0) {
    return expectation_map(kind, ch, param);
}

// Quasi-basis elements u = coeff |row><ref| inside block Y (product coordinates).
struct quasi_element {
    int Y, row;
    double coeff;
    cvec ref;
};
struct quasi_basis {
    std::vector<quasi_element> u;
};
quasi_basis make_quasi_basis(const cut_frame& f, bool random_refs, rng_t& rng);
std::vector<cmat> quasi_index(const cut_frame& f, const quasi_basis& q);  // sum u u*
std::vector<cmat> quasi_expand(const cut_frame& f, const quasi_basis& q, const std::vector<cmat>& x);  // sum u E(u* x)
// Ind^-1 sum_i E(u_i) u_i^*, the value of the dual expectation on the Jones projection.
std::vector<cmat> dual_expectation_of_jones(const cut_frame& f, const quasi_basis& q, double ind);

struct index_report {
    double index = 0;          // Ind E when scalar
    double scalar_defect = 0;  // distance of sum u u* from a scalar
    double reconstruction = 0; // x vs sum u E(u* x) on random x
    double pp_constant = 0;    // 1 / ||Ind||
    double pp_defect = 0;      // min eigenvalue of E(a) - pp a on random positive a (negative part)
    double sum_dim_sq = 0;
};
index_report watatani_index(const cut_frame& f, rng_t& rng);

struct jones_report {
    double projection_defect = 0;  // e = e* = e^2 on L^2(A)
    double relation_defect = 0;    // e a e - E(a) e on a spanning set
    long spanning_checked = 0;
    bool spanning = true;          // false when random elements replaced the matrix units
    double dual_defect = 0;        // E_dual(e) - Ind^-1
    double index = 0;
    long b1_dim = 0;
    long b1_dim_check = 0;
};
jones_report jones_basic_construction(const cut_frame& f, rng_t& rng, long max_units = 20000);

long b1_dimension(const cut_frame& f);
long b1_dimension_numeric(const cut_frame& f);

// Buffered commutant problems. Unknowns T_{c,g} in Hom([c] M [g] z1, [c] M [g] z2); either end label may be
// absent. Buffers impose commutation with the algebras obtained by adding sites whose roots range over the
// buffer supports; the right buffer acts through the half-braidings c1, c2 (indexed by simple) when z is present.
struct buffered_problem {
    const category* cat = nullptr;
    std::vector<int> left_labels, right_labels;
    bool has_left = true, has_right = true;
    word middle;
    word z1, z2;                   // zero or one site each
    std::vector<morphism> c1, c2;  // c[x] : [z, x] -> [x, z]
    std::vector<int> left_buffer, right_buffer;  // supports; empty disables the side
};

struct buffered_solution {
    int dim = 0;
    std::vector<std::pair<int, int>> index;      // (c, g) per unknown block, -1 when absent
    std::vector<std::vector<morphism>> basis;    // each solution as its blocks
    double residual = 0;
};

buffered_solution solve_buffered(const buffered_problem& pb, double tol = 1e-9);

}  // namespace fc
