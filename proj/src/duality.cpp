#include "fusionchain/duality.hpp"

#include <cmath>

namespace fc {

object dual_object(const category& cat, const object& x) {
    object y;
    for (int a : x) y.push_back(cat.dual(a));
    return y;
}

word dual_word(const category& cat, const word& w) {
    word r;
    for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(dual_object(cat, *it));
    return r;
}

namespace {

// Site-level cups: sum over summands of the simple cups.
duality_pair site_pair(const category& cat, const object& x) {
    duality_pair p;
    p.w = {x};
    object xd = dual_object(cat, x);
    p.wdual = {xd};
    p.R = morphism::zero(cat, {}, {xd, x});
    p.Rbar = morphism::zero(cat, {}, {x, xd});
    auto bR = basis_of(cat, p.R.tgt);
    auto bRb = basis_of(cat, p.Rbar.tgt);
    for (size_t s = 0; s < x.size(); ++s) {
        int a = x[s], ad = cat.dual(a);
        int si = static_cast<int>(s);
        double d = cat.dim(a);
        int r = bR->find(0, fusion_tree{{si, si}, {ad, 0}, {0, 0}});
        p.R.blk[0](r, 0) = std::sqrt(d);
        cplx f = cat.F(a, ad, a, a, 0, 0, 0, 0, 0, 0);
        int rb = bRb->find(0, fusion_tree{{si, si}, {a, 0}, {0, 0}});
        p.Rbar.blk[0](rb, 0) = 1.0 / (std::sqrt(d) * f);
    }
    return p;
}

}  // namespace

duality_pair duality_morphisms(const category& cat, const word& w) {
    if (w.empty()) {
        duality_pair p;
        p.R = morphism::identity(cat, {});
        p.Rbar = p.R;
        return p;
    }
    duality_pair acc = site_pair(cat, w[0]);
    for (size_t i = 1; i < w.size(); ++i) {
        duality_pair y = site_pair(cat, w[i]);
        // R_{Xy} = (id_{y*} (x) R_X (x) id_y) R_y
        morphism R = tensor_id(id_tensor(y.wdual, acc.R), y.w) * y.R;
        // Rbar_{Xy} = (id_X (x) Rbar_y (x) id_{X*}) Rbar_X
        morphism Rb = id_tensor(acc.w, tensor_id(y.Rbar, acc.wdual)) * acc.Rbar;
        acc.w = concat(acc.w, y.w);
        acc.wdual = concat(y.wdual, acc.wdual);
        acc.R = std::move(R);
        acc.Rbar = std::move(Rb);
    }
    return acc;
}

duality_defects check_duality(const duality_pair& p) {
    const category& cat = *p.R.cat;
    duality_defects d;
    morphism idw = morphism::identity(cat, p.w);
    morphism idd = morphism::identity(cat, p.wdual);
    morphism z1 = tensor_id(p.Rbar.adjoint(), p.w) * id_tensor(p.w, p.R);
    morphism z2 = tensor_id(p.R.adjoint(), p.wdual) * id_tensor(p.wdual, p.Rbar);
    d.zigzag_left = distance(z1, idw);
    d.zigzag_right = distance(z2, idd);
    double dw = word_dim(cat, p.w);
    cplx a = (p.R.adjoint() * p.R).blk[0](0, 0);
    cplx b = (p.Rbar.adjoint() * p.Rbar).blk[0](0, 0);
    d.normalization = std::max(std::abs(a - dw), std::abs(b - dw));
    return d;
}

}  // namespace fc
