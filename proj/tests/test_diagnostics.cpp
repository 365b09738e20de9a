#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "npz/diagnostics.hpp"
#include "npz/error.hpp"

using namespace npz;
using doctest::Approx;

namespace {

Trajectory synthetic(double dt, double t_end, double (*log_y)(double)) {
    Trajectory tr;
    tr.config.dt = dt;
    tr.config.t_end = t_end;
    const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) * dt;
        tr.times.push_back(t);
        tr.log_y.push_back(log_y(t));
        tr.log_z.push_back(log_y(t));
        tr.states.push_back({1.0, std::exp(log_y(t)), std::exp(log_y(t))});
    }
    return tr;
}

}  // namespace

TEST_CASE("slope of a synthetic exponential decay") {
    const std::vector<Trajectory> ens{
        synthetic(0.01, 100, [](double t) { return -0.7 * t + 0.01 * std::sin(t); })};
    const auto s = log_slope(ens, Component::Y, 10, 100);
    CHECK(s.slope == Approx(-0.7).epsilon(0.01 / 0.7));
    CHECK(s.n_paths == 1);
    CHECK_THROWS_AS(log_slope(ens, Component::Y, 10, 15), WindowTooShort);
}

TEST_CASE("slope estimator is unbiased on geometric Brownian motion") {
    const double sigma = 0.5;
    ModelParams p = fixtures::coexistence();
    p.alpha3 = 1.0;
    p.alpha5 = 0.0;
    p.sigma3 = sigma;
    // With y fixed at zero, z solves dZ = -alpha3 Z dt + sigma3 Z dW, a pure GBM.
    const auto m = fixtures::constant_model(p);
    SimConfig c;
    c.dt = 0.01;
    c.t_end = 100;
    c.burn_in = 1;
    c.subsample_every = 10;
    c.n_paths = 64;
    c.seed = 404;
    const auto ens = simulate_ensemble(m, {1.0, 0.0, 1.0}, c);
    const auto s = log_slope(ens, Component::Z, 0, 100);
    const double target = -p.alpha3 - 0.5 * sigma * sigma;
    CHECK(std::abs(s.slope - target) <= 3 * s.std_error);
}

TEST_CASE("extinction check on the washout set and its negative control") {
    const auto m = fixtures::constant_model(fixtures::washout());
    SimConfig c;
    c.dt = 1e-3;
    c.t_end = 200;
    c.burn_in = 1;
    c.subsample_every = 100;
    c.n_paths = 16;
    c.seed = 8;
    ExtinctionCheckOptions o;
    o.t_lo = 40;
    o.t_hi = 200;
    const auto rep = extinction_rate_check(m, Regime::TotalExtinction, c, o);
    CHECK(rep.passed);
    REQUIRE(rep.checks.size() == 2);
    CHECK(rep.checks[0].target == Approx(-0.48));
    CHECK(rep.checks[1].target == Approx(-0.42));

    o.target_shift = 1.0;
    CHECK_FALSE(extinction_rate_check(m, Regime::TotalExtinction, c, o).passed);

    CHECK_THROWS_AS(extinction_rate_check(m, Regime::Coexistence, c, o), PreconditionError);
}

TEST_CASE("moment bound check") {
    const auto p = fixtures::coexistence();
    const auto m = fixtures::constant_model(p);
    SimConfig c;
    c.t_end = 60;
    c.burn_in = 1;
    c.subsample_every = 100;
    c.n_paths = 32;
    const auto ens = simulate_ensemble(m, {1, 1, 1}, c);
    const double q0 = derive_constants(p).q0;
    const auto r = moment_bound_check(ens, q0, q0);
    CHECK(r.curve.size() == ens.front().size());
    CHECK(r.plateau_ratio > 0.0);
    CHECK_THROWS_AS(moment_bound_check(ens, q0 + 0.1, q0), PreconditionError);
}

TEST_CASE("moment curve grows without a washout") {
    auto p = fixtures::coexistence();
    p.alpha1 = -0.3;  // deliberately violates the model: nutrient accumulates
    const auto m = fixtures::constant_model(p);
    SimConfig c;
    c.t_end = 40;
    c.burn_in = 1;
    c.subsample_every = 100;
    c.n_paths = 16;
    const auto ens = simulate_ensemble(m, {1, 1, 1}, c);
    CHECK_FALSE(moment_curve(ens, 1.05).passed);
}

TEST_CASE("negative moments") {
    SimConfig c;
    c.t_end = 100;
    c.burn_in = 1;
    c.subsample_every = 100;
    c.n_paths = 32;
    const auto f = FunctionalResponse::constant(1.0);

    const auto zero = negative_moment_check(fixtures::coexistence(), f, 0.0, c);
    CHECK(zero.passed);
    for (double v : zero.curve) CHECK(v == 1.0);

    const auto coex = negative_moment_check(fixtures::coexistence(), f, 0.1, c);
    CHECK(coex.passed);

    const auto wash = negative_moment_check(fixtures::washout(), f, 0.1, c);
    CHECK(wash.lambda1 < 0);
    CHECK_FALSE(wash.passed);
}

TEST_CASE("convergence check basics") {
    const auto m = fixtures::constant_model(fixtures::coexistence());
    SimConfig c;
    c.t_end = 100;
    c.burn_in = 10;
    c.subsample_every = 100;
    c.n_paths = 2;
    c.seed = 3;
    ConvergenceOptions o;
    o.seed_b = c.seed;
    const auto same = convergence_check(m, {1, 1, 1}, {1, 1, 1}, c, o);
    CHECK(same.final_tv == 0.0);
    CHECK(same.passed);

    CHECK_THROWS_AS(
        convergence_check(fixtures::constant_model(fixtures::phyto_only()), {1, 1, 1}, {2, 2, 2}, c),
        PreconditionError);
}
