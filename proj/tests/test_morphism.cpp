#include "doctest.h"

#include "fusionchain/duality.hpp"
#include "fusionchain/morphism.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace fc;
using testing_util::min_eig;
using testing_util::random_morphism;

namespace {

word uniform(const object& x, size_t n) { return word(n, x); }

}  // namespace

TEST_CASE("tree basis sizes") {
    category fib = builtin_category("fibonacci");
    CHECK(fusion_tree_basis(fib, simple_word({1, 1}), 0).size() == 1);
    CHECK(fusion_tree_basis(fib, simple_word({1, 1, 1, 1}), 1).size() == 3);
    category triv = builtin_category("trivial");
    CHECK(fusion_tree_basis(triv, simple_word({0, 0, 0}), 0).size() == 1);
}

TEST_CASE("tree basis matches path counts") {
    struct cs {
        const char* name;
        object x;
    };
    for (const auto& c : {cs{"trivial", {0}}, cs{"fibonacci", {1}}, cs{"fibonacci", {0, 1}}, cs{"ising", {1}},
                          cs{"ising", {0, 1}}, cs{"vec_z2", {0, 1}}, cs{"vec_z3", {0, 1}}, cs{"vec_z3", {1, 2}}}) {
        category cat = builtin_category(c.name);
        for (size_t n = 1; n <= 6; ++n) {
            word w = uniform(c.x, n);
            auto counts = oracle::path_counts(cat, w);
            auto B = basis_of(cat, w);
            long total = 0;
            for (int Y = 0; Y < cat.rank(); ++Y) {
                CHECK(B->dim(Y) == counts[Y]);
                total += static_cast<long>(B->dim(Y)) * B->dim(Y);
            }
            CHECK(total == oracle::end_dim(cat, w));
        }
    }
    category fib = builtin_category("fibonacci");
    CHECK(oracle::end_dim(fib, simple_word({1, 1, 1, 1})) == 13);
}

TEST_CASE("compose and projections") {
    category fib = builtin_category("fibonacci");
    rng_t rng(1);
    word w = simple_word({1, 1, 1});
    morphism g = random_morphism(fib, w, w, rng);
    morphism id = morphism::identity(fib, w);
    CHECK(distance(id * g, g) <= 1e-12);
    CHECK(distance(g * id, g) <= 1e-12);
    morphism v = tree_vector(fib, w, 1, 1);
    morphism p = v * v.adjoint();
    CHECK(distance(p * p, p) <= 1e-12);
    CHECK(distance(p.adjoint(), p) <= 1e-12);
}

TEST_CASE("tensor identities and bifunctoriality") {
    for (const char* name : {"fibonacci", "ising", "vec_z3"}) {
        category c = builtin_category(name);
        rng_t rng(7);
        object x = std::string(name) == "ising" ? object{0, 1} : object{0, 1};
        word a1{x, x}, b1{x}, a2{x}, b2{x, x};
        morphism f = random_morphism(c, a1, b1, rng);
        morphism g = random_morphism(c, a2, b2, rng);
        CHECK(distance(tensor(morphism::identity(c, a1), morphism::identity(c, a2)),
                       morphism::identity(c, concat(a1, a2))) <= 1e-12);
        morphism fg = tensor(f, g);
        CHECK(distance(fg, tensor_id(f, b2) * id_tensor(a1, g)) <= 1e-10);
        CHECK(distance(fg, id_tensor(b1, g) * tensor_id(f, a2)) <= 1e-10);
        CHECK(distance(tensor_id(f, a2), tensor(f, morphism::identity(c, a2))) <= 1e-12);
        CHECK(distance(id_tensor(a1, g), tensor(morphism::identity(c, a1), g)) <= 1e-12);
        morphism f2 = random_morphism(c, b1, a1, rng);
        morphism g2 = random_morphism(c, b2, a2, rng);
        CHECK(distance(tensor(f2, g2) * tensor(f, g), tensor(f2 * f, g2 * g)) <= 1e-10);
        CAPTURE(name);
    }
}

TEST_CASE("tensor is strictly associative in the left-nested basis") {
    for (const char* name : {"fibonacci", "ising"}) {
        category c = builtin_category(name);
        rng_t rng(3);
        object x = std::string(name) == "ising" ? object{1, 2} : object{1};
        word a{x}, b{x, x}, d{x, x};
        morphism f = random_morphism(c, a, b, rng);
        morphism g = random_morphism(c, b, a, rng);
        morphism h = random_morphism(c, d, d, rng);
        CAPTURE(name);
        CHECK(distance(tensor(tensor(f, g), h), tensor(f, tensor(g, h))) <= 1e-10);
        CHECK(distance(tensor(tensor(h, f), g), tensor(h, tensor(f, g))) <= 1e-10);
    }
}

TEST_CASE("categorical trace") {
    category fib = builtin_category("fibonacci");
    word w = simple_word({1, 1});
    CHECK(std::abs(categorical_trace(morphism::identity(fib, w)) - 1.0) <= 1e-12);
    morphism v = tree_vector(fib, w, 0, 0);
    double phi = (1 + std::sqrt(5.0)) / 2;
    CHECK(std::abs(categorical_trace(v * v.adjoint()) - 1.0 / (phi * phi)) <= 1e-12);
    CHECK(std::abs(categorical_trace(v * v.adjoint()).real() - 0.381966) <= 1e-6);

    rng_t rng(11);
    word X = simple_word({1, 1});
    word Yw = simple_word({1, 1});
    word XY = concat(X, Yw);
    morphism a = random_morphism(fib, XY, XY, rng);
    morphism b = random_morphism(fib, XY, XY, rng);
    CHECK(std::abs(categorical_trace(a * b) - categorical_trace(b * a)) <= 1e-10);
    CHECK(std::abs(categorical_trace(a) - categorical_trace(partial_trace(a, side::right, 2))) <= 1e-10);
    CHECK(std::abs(categorical_trace(a) - categorical_trace(partial_trace(a, side::left, 2))) <= 1e-10);
    CHECK(std::abs(categorical_trace(a) - categorical_trace(partial_trace(partial_trace(a, side::left, 1), side::left, 3))) <=
          1e-10);
    CHECK(distance(partial_trace(morphism::identity(fib, XY), side::left, 3), morphism::identity(fib, simple_word({1}))) <=
          1e-12);
    CHECK(distance(partial_trace(morphism::identity(fib, XY), side::right, 1), morphism::identity(fib, simple_word({1, 1, 1}))) <=
          1e-12);
}

TEST_CASE("partial traces are conditional expectations") {
    category c = builtin_category("ising");
    rng_t rng(5);
    word X{object{0, 1}, object{1}};
    word Yw{object{1}, object{0, 2}};
    word XY = concat(X, Yw);
    morphism a = random_morphism(c, XY, XY, rng);
    morphism x = random_morphism(c, X, X, rng);
    morphism y = random_morphism(c, Yw, Yw, rng);
    // bimodularity over the untouched factor
    CHECK(distance(partial_trace(tensor_id(x, Yw) * a, side::right, 2), x * partial_trace(a, side::right, 2)) <= 1e-10);
    CHECK(distance(partial_trace(id_tensor(X, y) * a, side::left, 2), y * partial_trace(a, side::left, 2)) <= 1e-10);
    // tr(x (x) y) = tr(x) tr(y)
    CHECK(std::abs(categorical_trace(tensor(x, y)) - categorical_trace(x) * categorical_trace(y)) <= 1e-10);
    morphism p = tree_vector(c, X, 1, 0) * tree_vector(c, X, 1, 0).adjoint();
    CHECK(std::abs(categorical_trace(tensor_id(p, Yw)) - categorical_trace(p)) <= 1e-12);
}

TEST_CASE("Pimsner-Popa bound for partial traces") {
    for (const char* name : {"fibonacci", "ising"}) {
        category c = builtin_category(name);
        rng_t rng(17);
        object x{1};
        word X{x, x};
        word Yw{x};
        word XY = concat(X, Yw);
        double dY = word_dim(c, Yw);
        for (int trial = 0; trial < 5; ++trial) {
            morphism r = random_morphism(c, XY, XY, rng);
            morphism a = r.adjoint() * r;
            morphism E = tensor_id(partial_trace(a, side::right, 1), Yw);
            morphism d = E - (1.0 / (dY * dY)) * a;
            CHECK(min_eig(d) >= -1e-10);
        }
    }
}

TEST_CASE("recoupling") {
    category c = builtin_category("ising");
    rng_t rng(23);
    word w{object{1}, object{1}, object{1}, object{0, 2}};
    morphism f = random_morphism(c, w, w, rng);
    morphism g = random_morphism(c, w, w, rng);
    std::string rn = right_nested(4);
    std::string mid = join_brackets(join_brackets("x", "x"), join_brackets("x", "x"));
    CHECK(distance(recouple(f, left_nested(4)), f) <= 1e-12);
    for (const auto& br : {rn, mid}) {
        morphism fr = recouple(f, br);
        CHECK(distance(recouple(fr, left_nested(4)), f) <= 1e-10);
        CHECK(std::abs(categorical_trace(fr) - categorical_trace(f)) <= 1e-10);
        CHECK(distance(recouple(f * g, br), fr * recouple(g, br)) <= 1e-10);
        CHECK(distance(recouple(fr, br), fr) <= 1e-12);
    }
    // right-nested recoupling of x (x) (y (x) z) equals the tensor computed through the left factor
    category fib = builtin_category("fibonacci");
    word a = simple_word({1});
    word bc = simple_word({1, 1});
    morphism u = random_morphism(fib, a, a, rng);
    morphism v = random_morphism(fib, bc, bc, rng);
    morphism t = tensor(u, v);
    morphism tr = recouple(t, right_nested(3));
    // in the right-nested basis the block for root Y is sum over (e,h,mu) columns of u_e (x) v_h
    auto B = basis_of(fib, bc);
    for (int Y = 0; Y < 2; ++Y) {
        Eigen::Index off = 0;
        for (int e = 0; e < 2; ++e)
            for (int h = 0; h < 2; ++h)
                for (int mu = 0; mu < fib.N(e, h, Y); ++mu) {
                    int de = e == 1 ? 1 : 0;
                    int dh = B->dim(h);
                    if (de == 0 || dh == 0) continue;
                    cmat expect = u.blk[e](0, 0) * v.blk[h];
                    CHECK(max_abs<cplx>(tr.blk[Y].block(off, off, dh, dh) - expect) <= 1e-10);
                    off += dh;
                }
    }
}

TEST_CASE("isotypic isometries") {
    category triv = builtin_category("trivial");
    auto it = isotypic_isometries(triv, simple_word({0}), {});
    REQUIRE(it[0].size() == 1);
    CHECK(distance(it[0][0], morphism::identity(triv, simple_word({0}))) == 0.0);

    category fib = builtin_category("fibonacci");
    auto iso = isotypic_isometries(fib, simple_word({1, 1}), {});
    CHECK(iso[0].size() == 1);
    CHECK(iso[1].size() == 1);
    category is = builtin_category("ising");
    for (const auto& [cat, w] : {std::pair{&fib, simple_word({1, 1})}, std::pair{&is, simple_word({1, 1, 1})}}) {
        auto v = isotypic_isometries(*cat, w, {});
        morphism sum = morphism::zero(*cat, w, w);
        for (int Y = 0; Y < cat->rank(); ++Y)
            for (size_t k = 0; k < v[Y].size(); ++k) {
                sum += v[Y][k] * v[Y][k].adjoint();
                for (size_t j = 0; j < v[Y].size(); ++j) {
                    morphism ip = v[Y][k].adjoint() * v[Y][j];
                    CHECK(std::abs(ip.blk[Y](0, 0) - (k == j ? 1.0 : 0.0)) <= 1e-12);
                }
            }
        CHECK(distance(sum, morphism::identity(*cat, w)) <= 1e-10);
    }
}
