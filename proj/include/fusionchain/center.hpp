#pragma once

#include "fusionchain/chain.hpp"

#include <string>
#include <vector>

namespace fc {

// An object of the center: underlying site object z (simples, repeats allowed) and c[x] : [z, x] -> [x, z].
struct center_object {
    const category* cat = nullptr;
    object z;
    std::vector<morphism> c;
    std::string name;

    std::vector<int> multiplicities() const;
    double qdim() const { return object_dim(*cat, z); }
};

center_object unit_center_object(const category& cat);
// Z^reg = (+)_i U_i^* U_i with the regular half-braiding.
center_object regular_center_object(const category& cat);
// I(a) = (+)_i U_i^* a U_i, same formula with id_a in the middle.
center_object induced_object(const category& cat, int a);
center_object direct_sum(const std::vector<center_object>& parts);
// Replace c by (id (x) u*) c (u (x) id) for an isometry u : [z'] -> [z].
center_object restrict_to(const center_object& Z, const morphism& u, const object& znew);

morphism half_braiding_site(const center_object& Z, const object& x);  // [z, x] -> [x, z]
morphism half_braiding(const center_object& Z, const word& w);         // [z] w -> w [z]
morphism monodromy(const center_object& A, const center_object& B);    // on [a, b]

struct half_braiding_report {
    double unitarity = 0, naturality = 0, hexagon = 0;
    bool pass = false;
};
half_braiding_report verify_half_braiding(const center_object& Z, rng_t& rng, double tol = 1e-8);

// Hom_Z(A, B) as morphisms [a] -> [b].
std::vector<morphism> center_homs(const center_object& A, const center_object& B, double tol = 1e-9);

struct tube_algebra {
    center_object I;  // (+)_a I(a)
    subalgebra alg;   // End_Z(I)
    long dim_count = 0;       // sum_{a,b,x} dim Hom(x a, b x)
    double closure_residual = 0;
    double adjoint_residual = 0;
    bool commutative = false;
};
tube_algebra make_tube_algebra(const category& cat, rng_t& rng);

struct center_simple {
    int id = 0;
    center_object obj;
    std::vector<int> mult;
    double qdim = 0;
    cplx twist = 1;
};
std::vector<center_simple> center_simples(const tube_algebra& t, rng_t& rng);
std::vector<int> decompose(const center_object& Z, const std::vector<center_simple>& simples);

cplx twist(const center_object& Z);
cmat tube_s_matrix(const std::vector<center_simple>& s);
cmat tube_t_matrix(const std::vector<center_simple>& s);

struct modular_check {
    double s_unitarity = 0, s_symmetry = 0, st_relation = 0;
    cplx st_phase = 1;
    bool modular = false;
};
modular_check check_modular(const cmat& S, const cmat& T, double tol = 1e-6);

}  // namespace fc
