#pragma once

#include "fusionchain/morphism.hpp"

namespace testing_util {

inline fc::morphism random_morphism(const fc::category& c, const fc::word& src, const fc::word& tgt, fc::rng_t& rng) {
    fc::morphism m = fc::morphism::zero(c, src, tgt);
    for (auto& b : m.blk) b = fc::random_cmat(b.rows(), b.cols(), rng);
    return m;
}

inline double min_eig(const fc::morphism& h) {
    double m = 1e300;
    for (const auto& b : h.blk) {
        if (b.size() == 0) continue;
        Eigen::SelfAdjointEigenSolver<fc::cmat> es((b + b.adjoint()) * 0.5);
        m = std::min(m, es.eigenvalues().minCoeff());
    }
    return m;
}

}  // namespace testing_util
