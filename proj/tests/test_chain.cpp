#include "doctest.h"
#include "fusionchain/chain.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace fc;
using testing_util::min_eig;
using testing_util::random_morphism;

namespace {

// Ind_Y = (1/d_Y) sum_{e in supp W-, g in supp W+} N_eg^Y d_e d_g.
std::vector<double> index_oracle(const category& c, const chain_spec& ch) {
    auto s1 = support(c, ch.interval(-ch.k, -1));
    auto s2 = support(c, ch.interval(0, ch.k));
    auto mw = multiplicities(c, ch.window());
    std::vector<double> out;
    for (int Y = 0; Y < c.rank(); ++Y) {
        if (!mw[Y]) continue;
        double s = 0;
        for (int e : s1)
            for (int g : s2) s += c.N(e, g, Y) * c.dim(e) * c.dim(g);
        out.push_back(s / c.dim(Y));
    }
    return out;
}

// x in End(X_[lo,hi]) whose inclusion into End(X_[lo-B, hi+B]) commutes with the given generators.
int brute_commutant_dim(const chain_spec& ch, int lo, int hi, int B, const std::vector<morphism>& gens) {
    const category& c = *ch.cat;
    word w = ch.interval(lo, hi);
    morphism shape = morphism::zero(c, w, w);
    const Eigen::Index D = shape.size();
    std::vector<cmat> parts;
    Eigen::Index rows = 0;
    for (const auto& s : gens) {
        cmat A;
        for (Eigen::Index j = 0; j < D; ++j) {
            cvec u = cvec::Zero(D);
            u(j) = 1.0;
            morphism x = include_element(ch, unflatten(shape, u), lo, hi, lo - B, hi + B);
            cvec col = flatten(x * s - s * x);
            if (j == 0) A = cmat::Zero(col.size(), D);
            A.col(j) = col;
        }
        rows += A.rows();
        parts.push_back(A);
    }
    cmat all(rows, D);
    Eigen::Index o = 0;
    for (const auto& p : parts) {
        all.middleRows(o, p.rows()) = p;
        o += p.rows();
    }
    return static_cast<int>(null_space(all, 1e-9).cols());
}

std::vector<morphism> included_units(const chain_spec& ch, int a, int b, int c, int d) {
    std::vector<morphism> out;
    for (const auto& x : full_algebra(*ch.cat, ch.interval(a, b)).basis) out.push_back(include_element(ch, x, a, b, c, d));
    return out;
}

}  // namespace

TEST_CASE("interval algebra dimensions") {
    category fib = builtin_category("fibonacci");
    auto ch = make_chain(fib, 3);
    CHECK(make_interval_algebra(ch, 0, 0).dim == 1);
    CHECK(make_interval_algebra(ch, 0, 3).dim == 13);
    category z2 = builtin_category("vec_z2");
    auto chg = make_chain(z2, 2, {parse_object(z2, "g")});
    CHECK(make_interval_algebra(chg, 0, 1).dim == 1);
    for (const char* name : {"fibonacci", "ising", "vec_z2", "vec_z3"}) {
        category c = builtin_category(name);
        for (int k = 1; k <= 3; ++k) {
            auto chk = make_chain(c, k);
            auto A = make_interval_algebra(chk, -k, k);
            CHECK(A.dim == oracle::end_dim(c, A.w));
            auto B = basis_of(c, A.w);
            long tree_dim = 0;
            for (int Y = 0; Y < c.rank(); ++Y) tree_dim += static_cast<long>(B->dim(Y)) * B->dim(Y);
            CHECK(tree_dim == A.dim);
        }
    }
    CHECK_THROWS(make_interval_algebra(ch, -4, 0));
}

TEST_CASE("site object parsing and periodic patterns") {
    category z3 = builtin_category("vec_z3");
    CHECK(parse_object(z3, "1+g") == object{0, 1});
    CHECK(parse_object(z3, "0+2") == object{0, 2});
    CHECK_THROWS_AS(parse_object(z3, "h"), input_error);
    auto ch = make_chain(z3, 2, parse_objects(z3, "g,g2"));
    CHECK(ch.site(0) == object{1});
    CHECK(ch.site(1) == object{2});
    CHECK(ch.site(-1) == object{2});
    CHECK(ch.site(-2) == object{1});
    CHECK(object_name(z3, parse_object(z3, "1+g")) == "1+g");
}

TEST_CASE("inclusions are unital, transitive, tracial, and local") {
    category fib = builtin_category("fibonacci");
    auto ch = make_chain(fib, 3);
    rng_t rng(11);
    morphism id = morphism::identity(fib, ch.interval(-1, 0));
    CHECK(distance(include_element(ch, id, -1, 0, -3, 3), morphism::identity(fib, ch.window())) < 1e-12);
    morphism x = random_morphism(fib, ch.interval(-2, -1), ch.interval(-2, -1), rng);
    morphism y = random_morphism(fib, ch.interval(0, 1), ch.interval(0, 1), rng);
    morphism xi = include_element(ch, x, -2, -1, -3, 3);
    morphism yi = include_element(ch, y, 0, 1, -3, 3);
    CHECK((xi * yi - yi * xi).max_abs() < 1e-10);
    CHECK(distance(include_element(ch, include_element(ch, x, -2, -1, -2, 1), -2, 1, -3, 3), xi) < 1e-10);
    CHECK(std::abs(categorical_trace(xi) - categorical_trace(x)) < 1e-10);
    CHECK(distance(include_element(ch, x * x, -2, -1, -3, 3), xi * xi) < 1e-10);
    CHECK(distance(include_element(ch, x.adjoint(), -2, -1, -3, 3), xi.adjoint()) < 1e-10);
    CHECK_THROWS(include_element(ch, x, -2, -1, -1, 3));
}

TEST_CASE("half-line algebras") {
    category fib = builtin_category("fibonacci");
    auto h = half_line_algebras(make_chain(fib, 2));
    CHECK(h.minus.dim == 2);
    CHECK(h.plus.dim == 5);
    CHECK(h.b0_dim == 10);
    category triv = builtin_category("trivial");
    auto ht = half_line_algebras(make_chain(triv, 2));
    CHECK(ht.minus.dim == 1);
    CHECK(ht.plus.dim == 1);
    CHECK(ht.b0_dim == 1);
}

TEST_CASE("commutants and centers") {
    category fib = builtin_category("fibonacci");
    rng_t rng(5);
    word tt = simple_word({1, 1});
    auto full = full_algebra(fib, tt);
    CHECK(commutant(fib, {}, tt).dim() == full.dim());
    CHECK(commutant(fib, full.basis, tt).dim() == 2);
    auto z = algebra_center(fib, full, rng);
    CHECK(z.dim == 2);
    REQUIRE(z.projections.size() == 2);
    morphism sum = z.projections[0] + z.projections[1];
    CHECK(distance(sum, morphism::identity(fib, tt)) < 1e-9);
    for (const auto& p : z.projections) {
        CHECK(distance(p * p, p) < 1e-9);
        double t = categorical_trace(p).real(), d2 = fib.dim(1) * fib.dim(1);
        CHECK((std::abs(t - 1.0 / d2) < 1e-9 || std::abs(t - fib.dim(1) / d2) < 1e-9));
    }
    word t4 = simple_word({1, 1, 1, 1});
    auto full4 = full_algebra(fib, t4);
    auto z4 = algebra_center(fib, full4, rng);
    CHECK(z4.dim == 2);

    category is = builtin_category("ising");
    auto ch = make_chain(is, 2);
    auto h = half_line_algebras(ch);
    std::vector<morphism> b0;
    for (const auto& x : full_algebra(is, h.minus.w).basis)
        for (const auto& y : full_algebra(is, h.plus.w).basis) b0.push_back(tensor(x, y));
    subalgebra B0{ch.window(), b0};
    auto zb = algebra_center(is, B0, rng);
    int blocks_minus = 0, blocks_plus = 0;
    for (long m : h.minus.m) blocks_minus += m > 0;
    for (long m : h.plus.m) blocks_plus += m > 0;
    CHECK(zb.dim == blocks_minus * blocks_plus);
    CHECK(static_cast<int>(zb.projections.size()) == zb.dim);
}

TEST_CASE("generated algebras: covering of overlapping intervals") {
    category fib = builtin_category("fibonacci");
    auto ch = make_chain(fib, 2);
    auto gens = included_units(ch, -1, 0, -1, 1);
    auto g2 = included_units(ch, 0, 1, -1, 1);
    gens.insert(gens.end(), g2.begin(), g2.end());
    CHECK(static_cast<long>(generated_algebra(fib, gens, ch.interval(-1, 1)).dim()) == make_interval_algebra(ch, -1, 1).dim);
    auto d1 = included_units(ch, -1, -1, -1, 0);
    auto d2 = included_units(ch, 0, 0, -1, 0);
    d1.insert(d1.end(), d2.begin(), d2.end());
    CHECK(generated_algebra(fib, d1, ch.interval(-1, 0)).dim() == 1);
}

TEST_CASE("cut frame is unitary and B0 embeds as tensor products") {
    rng_t rng(3);
    category is = builtin_category("ising");
    auto ch = make_chain(is, 2);
    cut_frame f = window_frame(ch);
    for (int Y = 0; Y < is.rank(); ++Y) {
        const cmat& Q = f.Q(Y);
        CHECK(max_abs<cplx>(Q.adjoint() * Q - cmat::Identity(Q.rows(), Q.cols())) < 1e-10);
    }
    word w1 = ch.interval(-2, -1), w2 = ch.interval(0, 2);
    morphism x = random_morphism(is, w1, w1, rng), y = random_morphism(is, w2, w2, rng);
    morphism b = tensor(x, y);
    CHECK(distance(f.E(b), b) < 1e-10);
    auto p = f.to_product(b);
    CHECK(distance(f.from_product(p), b) < 1e-10);
}

TEST_CASE("conditional expectations: idempotent, positive, trace preserving") {
    rng_t rng(9);
    category is = builtin_category("ising");
    auto ch = make_chain(is, 2);
    word W = ch.window();
    for (auto kind : {expectation_kind::right_cut, expectation_kind::tail, expectation_kind::head}) {
        auto E = conditional_expectation(kind, ch, 0);
        for (int t = 0; t < 3; ++t) {
            morphism a = random_morphism(is, W, W, rng);
            morphism ea = E.apply(a);
            CHECK(distance(E.apply(ea), ea) < 1e-10);
            CHECK(std::abs(categorical_trace(ea) - categorical_trace(a)) < 1e-10);
            CHECK(min_eig(E.apply(a * a.adjoint())) > -1e-10);
        }
        CHECK(distance(E.apply(morphism::identity(is, W)), morphism::identity(is, W)) < 1e-10);
    }
    category fib = builtin_category("fibonacci");
    auto chf = make_chain(fib, 3);
    auto En = conditional_expectation(expectation_kind::tail, chf, 1);
    morphism a = random_morphism(fib, chf.window(), chf.window(), rng);
    morphism b = include_element(chf, random_morphism(fib, chf.interval(-1, 3), chf.interval(-1, 3), rng), -1, 3, -3, 3);
    // Bimodularity over the target algebra.
    CHECK(distance(En.apply(a * b), En.apply(a) * b) < 1e-10);
    CHECK_THROWS(conditional_expectation(expectation_kind::dual, chf).apply(a));
}

TEST_CASE("Watatani index from the quasi-basis matches the independent formula") {
    rng_t rng(17);
    {
        category triv = builtin_category("trivial");
        auto r = watatani_index(window_frame(make_chain(triv, 2)), rng);
        CHECK(r.index == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (const char* name : {"fibonacci", "vec_z2", "vec_z3", "ising"}) {
        category c = builtin_category(name);
        double prev = -1;
        for (int k = 2; k <= 3; ++k) {
            auto ch = make_chain(c, k);
            auto f = window_frame(ch);
            auto r = watatani_index(f, rng);
            auto orc = index_oracle(c, ch);
            for (double v : orc) CHECK(std::abs(v - r.index) < 1e-9);
            CHECK(r.scalar_defect < 1e-8);
            CHECK(r.reconstruction < 1e-9);
            CHECK(r.pp_defect < 1e-10);
            if (prev > 0) CHECK(std::abs(prev - r.index) < 1e-6);
            prev = r.index;
            if (std::string(name) != "ising") CHECK(std::abs(r.index - c.total_dim_sq()) < 1e-9);
        }
    }
    category is = builtin_category("ising");
    CHECK(watatani_index(window_frame(make_chain(is, 2)), rng).index == doctest::Approx(2.0));
}

TEST_CASE("Jones basic construction") {
    rng_t rng(23);
    category z2 = builtin_category("vec_z2");
    {
        auto f = window_frame(make_chain(z2, 2, {parse_object(z2, "g")}));
        auto r = jones_basic_construction(f, rng);
        CHECK(r.relation_defect <= 1e-10);
        CHECK(r.projection_defect <= 1e-10);
        CHECK(r.index == doctest::Approx(1.0));
    }
    category triv = builtin_category("trivial");
    {
        auto r = jones_basic_construction(window_frame(make_chain(triv, 1)), rng);
        CHECK(r.index == doctest::Approx(1.0));
        CHECK(r.b1_dim == 1);
    }
    category fib = builtin_category("fibonacci");
    auto f = window_frame(make_chain(fib, 3));
    auto r = jones_basic_construction(f, rng);
    CHECK(r.relation_defect <= 1e-10);
    CHECK(r.dual_defect <= 1e-8);
    CHECK(r.b1_dim == r.b1_dim_check);
    CHECK(r.spanning_checked > 0);
    CHECK(r.spanning);
}

TEST_CASE("buffered solver agrees with brute force commutants") {
    category fib = builtin_category("fibonacci");
    auto ch = make_chain(fib, 1);
    // x in A_[-1,1] commuting with A_[-2,-1] v A_[1,2] (buffer one site each side).
    auto gens = included_units(ch, -2, -1, -2, 2);
    auto g2 = included_units(ch, 1, 2, -2, 2);
    gens.insert(gens.end(), g2.begin(), g2.end());
    int brute = brute_commutant_dim(ch, -1, 1, 1, gens);
    buffered_problem pb;
    pb.cat = &fib;
    pb.left_labels = support(fib, ch.interval(-1, -1));
    pb.right_labels = support(fib, ch.interval(1, 1));
    pb.middle = ch.interval(0, 0);
    pb.left_buffer = support(fib, ch.interval(-2, -2));
    pb.right_buffer = support(fib, ch.interval(2, 2));
    auto sol = solve_buffered(pb);
    CHECK(sol.dim == brute);
    CHECK(sol.dim == 1);

    // The raw commutant in the finite window keeps the boundary blocks.
    auto ch3 = make_chain(fib, 3);
    auto raw = included_units(ch3, -3, -1, -3, 3);
    auto raw2 = included_units(ch3, 2, 3, -3, 3);
    raw.insert(raw.end(), raw2.begin(), raw2.end());
    CHECK(commutant(fib, raw, ch3.window()).dim() == 25);
    buffered_problem nob = pb;
    nob.left_buffer.clear();
    nob.right_buffer.clear();
    nob.middle = ch3.interval(0, 1);
    nob.left_labels = support(fib, ch3.interval(-3, -1));
    nob.right_labels = support(fib, ch3.interval(2, 3));
    CHECK(solve_buffered(nob).dim == 25);

    category z2 = builtin_category("vec_z2");
    auto chz = make_chain(z2, 1);
    auto gz = included_units(chz, -2, -1, -2, 2);
    auto gz2 = included_units(chz, 1, 2, -2, 2);
    gz.insert(gz.end(), gz2.begin(), gz2.end());
    buffered_problem pz;
    pz.cat = &z2;
    pz.left_labels = support(z2, chz.interval(-1, -1));
    pz.right_labels = support(z2, chz.interval(1, 1));
    pz.middle = chz.interval(0, 0);
    pz.left_buffer = support(z2, chz.interval(-2, -2));
    pz.right_buffer = support(z2, chz.interval(2, 2));
    CHECK(solve_buffered(pz).dim == brute_commutant_dim(chz, -1, 1, 1, gz));
}

TEST_CASE("buffered relative commutant with an appended object") {
    category fib = builtin_category("fibonacci");
    auto ch = make_chain(fib, 2);
    for (auto Y : {simple_word({1}), simple_word({1, 1})}) {
        buffered_problem pb;
        pb.cat = &fib;
        pb.left_labels = support(fib, ch.interval(-2, -1));
        pb.has_right = false;
        pb.middle = Y;
        pb.left_buffer = support(fib, ch.interval(-4, -3));
        auto sol = solve_buffered(pb);
        CHECK(sol.dim == oracle::end_dim(fib, Y));
        CHECK(sol.residual < 1e-9);
    }
}
