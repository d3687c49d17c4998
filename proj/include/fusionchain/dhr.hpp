#pragma once

#include "fusionchain/center.hpp"

#include <string>
#include <vector>

namespace fc {

long fz_dimension(const category& cat, const word& w, const object& z);  // sum_Y m_Y(w) m_Y(w z)

// The window module F_W(Z) = Hom(X_W, X_W (x) z); further intervals are reached through eta.
class dhr_module {
public:
    dhr_module(const center_object& Z, const chain_spec& ch);

    const category& cat() const { return *ch_.cat; }
    const chain_spec& chain() const { return ch_; }
    const center_object& Z() const { return Z_; }
    const word& window() const { return W_; }
    word zword() const { return word{Z_.z}; }
    double qdim() const { return Z_.qdim(); }
    long dim() const;

    morphism zero() const;
    morphism random(rng_t& rng) const;
    morphism left(const morphism& a, const morphism& x) const;   // (a (x) id_z) x
    morphism right(const morphism& x, const morphism& a) const { return x * a; }
    morphism inner(const morphism& x, const morphism& y) const { return x.adjoint() * y; }
    morphism left_inner(const morphism& x, const morphism& y) const;  // d_Z (id (x) tr_z)(x y*)

    // eta_{[a,b],[c,d]} : Hom(X_[a,b], X_[a,b] z) -> Hom(X_[c,d], X_[c,d] z).
    morphism eta(const morphism& f, int a, int b, int c, int d) const;
    morphism embed(const morphism& f, int a, int b) const { return eta(f, a, b, ch_.lo(), ch_.hi()); }

    // Tensor form of a window element x in Hom(X_W, X_W z): rows per label e of X_W.
    std::vector<cmat> left_coordinates(const morphism& x) const;
    morphism from_left_coordinates(const std::vector<cmat>& c) const;

private:
    center_object Z_;
    chain_spec ch_;
    word W_;
};

dhr_module dhr_bimodule(const center_object& Z, const chain_spec& ch);

struct projective_basis {
    int a = 0, b = 0;
    std::vector<morphism> xi;  // window vectors
    std::vector<std::vector<morphism>> gram;  // gram[i][j] = <xi_i | xi_j>
    size_t size() const { return xi.size(); }
};

struct basis_report {
    double reconstruction = 0;  // x - sum xi <xi|x> on random x
    double completeness = 0;    // sum xi xi* against the projection onto the visible blocks
    double locality = 0;        // a xi - xi a for a outside [a,b]
};

// Basis w^Y_k = v^Y_k p^Y on X_[a,b], embedded into the window. Throws when [a,b] misses a needed simple.
projective_basis localized_basis(const dhr_module& M, int a, int b);
basis_report check_basis(const dhr_module& M, const projective_basis& B, rng_t& rng);
int minimal_localization_length(const dhr_module& M);  // -1 when no interval of the window suffices

struct transporter_matrix {
    std::vector<std::vector<morphism>> t;  // t[i][j] = <xi1_i | xi2_j>
    double tt_star = 0, p1t = 0, t_star_t = 0, tp2 = 0;
    double base_change = 0, adjoint_change = 0;
    double max_defect() const;
};
transporter_matrix charge_transporters(const dhr_module& M, const projective_basis& b1, const projective_basis& b2);
double b0_distance(const chain_spec& ch, const transporter_matrix& T);  // relative distance from B0

// xi (x) nu := (xi (x) id) nu, an element of Hom(X_W, X_W zx zy).
morphism box(const morphism& xi, const morphism& nu, const word& znu);

// The braiding as post-composition with a morphism X_W zx zy -> X_W zy zx.
morphism braiding(const dhr_module& MX, const dhr_module& MY, const projective_basis& bx, const projective_basis& by);

struct monodromy_result {
    morphism composed, transported;
    double agreement = 0;
};
// Bases: bx1 < by < bx2 for X and Y.
monodromy_result dhr_monodromy(const dhr_module& MX, const dhr_module& MY, const projective_basis& bx1,
                               const projective_basis& by, const projective_basis& bx2);

struct dhr_sector {
    dhr_module M;
    projective_basis left, mid, right;
};
std::vector<dhr_sector> dhr_sectors(const std::vector<center_simple>& simples, const chain_spec& ch, int length = 0);

struct modular_data {
    cmat S, T;
    double s_unitarity = 0, s_symmetry = 0, st_relation = 0;
    double tube_distance = 0;  // against the tube oracle, same labels
    double monodromy_agreement = 0;
    bool visible = true;  // every sector has a nonzero window module
    bool modular = false;
};
modular_data dhr_modular_data(const std::vector<dhr_sector>& sectors, const std::vector<center_simple>& simples);

// Half-line restriction: X_- = span xi_j A_- (sign < 0) or X_+ (sign > 0), as the window image of F_[-k,-1] or F_[0,k].
struct half_line_module {
    int sign = -1;
    int a = 0, b = 0;
    std::vector<morphism> span;  // orthonormal C-basis of the subspace of F_W
};
half_line_module restrict_half_line(const dhr_module& M, int sign);
double span_defect(const dhr_module& M, const projective_basis& b1, const projective_basis& b2, int sign);
// f-tilde as post-composition: sum_j f(xi_j) xi_j^*, given the values f(xi_j).
morphism tilde_extension(const projective_basis& B, const std::vector<morphism>& values);

enum class central_kind { b0, a };
buffered_solution central_vectors(const dhr_module& M, central_kind kind, int buffer = -1);
buffered_solution intertwiner_space(const dhr_module& MX, const dhr_module& MY, int buffer = -1);
buffered_solution half_line_intertwiners(const dhr_module& MX, const dhr_module& MY, int buffer = -1);
buffered_solution b0_a_intertwiners(const dhr_module& MX, const dhr_module& MY, int buffer = -1);

struct left_basis_report {
    std::vector<morphism> zeta;
    double saturation = 0;     // || e_S - 1 ||
    long deficit = 0;          // dim F - dim A |> span
    double reconstruction = 0; // x - sum <x, zeta>_left zeta
    double locality = 0;
    int smallest_saturating = -1;  // interval length, when searched
};
left_basis_report left_localized_basis(const dhr_module& M, int a, int b, rng_t& rng);

struct rind_report {
    double value = 0, scalar_defect = 0;
};
rind_report right_index(const dhr_module& M, const projective_basis& B);

}  // namespace fc
