#pragma once

#include "npz/model.hpp"

namespace fixtures {

// Coexistence set: lambda1 = 0.5, lambda2 = 0.58 with constant kernels a = b = 1.
inline npz::ModelParams coexistence() {
    npz::ModelParams p;
    p.lambda_input = 2.0;
    p.alpha1 = 1.0;
    p.alpha2 = 1.0;
    p.alpha3 = 0.4;
    p.alpha4 = 0.5;
    p.alpha5 = 0.2;
    p.sigma1 = 1.0;
    p.sigma2 = 1.0;
    p.sigma3 = 0.2;
    return p;
}

// Same set with a higher zooplankton loss: lambda2 = -0.52.
inline npz::ModelParams phyto_only() {
    auto p = coexistence();
    p.alpha3 = 1.5;
    return p;
}

// lambda1 = -0.48.
inline npz::ModelParams washout() {
    npz::ModelParams p;
    p.lambda_input = 1.0;
    p.alpha1 = 2.0;
    p.alpha2 = 0.8;
    p.alpha3 = 0.4;
    p.alpha4 = 0.4;
    p.alpha5 = 0.2;
    p.sigma1 = 1.0;
    p.sigma2 = 0.6;
    p.sigma3 = 0.2;
    return p;
}

inline npz::Model constant_model(const npz::ModelParams& p, double a = 1.0, double b = 1.0) {
    return {p, npz::FunctionalResponse::constant(a), npz::FunctionalResponse::constant(b)};
}

}  // namespace fixtures
