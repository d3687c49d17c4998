#pragma once

#include "fusionchain/morphism.hpp"

namespace fc {

struct duality_pair {
    word w, wdual;
    morphism R;     // 1 -> W* W
    morphism Rbar;  // 1 -> W W*
};

struct duality_defects {
    double zigzag_left = 0;   // (Rbar* (x) id_W)(id_W (x) R) - id_W
    double zigzag_right = 0;  // (R* (x) id_W*)(id_W* (x) Rbar) - id_W*
    double normalization = 0; // R*R and Rbar*Rbar against d(W)
};

object dual_object(const category& cat, const object& x);
word dual_word(const category& cat, const word& w);
duality_pair duality_morphisms(const category& cat, const word& w);
duality_defects check_duality(const duality_pair& p);

}  // namespace fc
