#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "npz/error.hpp"
#include "npz/invariant.hpp"
#include "npz/thresholds.hpp"

using namespace npz;
using doctest::Approx;

namespace {

ModelParams shape2_params() {
    ModelParams p = fixtures::coexistence();
    p.alpha1 = 1.0;
    p.sigma1 = std::sqrt(2.0);
    p.lambda_input = 3.0;
    return p;
}

struct SampleStats {
    double mean = 0.0;
    double se = 0.0;
};

SampleStats stats(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / (n - 1) / n)};
}

EmpiricalMeasure measure(std::vector<double> masses) {
    EmpiricalMeasure m;
    m.grid.log_edges = {std::vector<double>(masses.size() + 1)};
    std::iota(m.grid.log_edges[0].begin(), m.grid.log_edges[0].end(), 0.0);
    m.masses = std::move(masses);
    m.n_samples = 1;
    return m;
}

}  // namespace

TEST_CASE("shape and scale from parameters") {
    const auto d = invgamma_from_params(shape2_params());
    CHECK(d.shape == Approx(2.0));
    CHECK(d.scale == Approx(3.0));
    CHECK(d.mean() == Approx(3.0));
    const auto d1 = invgamma_from_params(shape2_params(), 1.0);
    CHECK(d1.scale == Approx(4.0));
    CHECK(d1.mean() == Approx(4.0));

    auto bad = shape2_params();
    bad.sigma1 = 0.0;
    CHECK_THROWS_AS(invgamma_from_params(bad), PreconditionError);
}

TEST_CASE("density formula and support") {
    const auto d = invgamma_from_params(shape2_params());
    CHECK(invgamma_density(d, 3.0) == Approx(std::exp(-1.0) / 3.0).epsilon(1e-12));
    CHECK(invgamma_density(d, 3.0) == Approx(0.12263).epsilon(1e-4));
    CHECK_THROWS_AS(invgamma_density(d, 0.0), PreconditionError);
    CHECK_THROWS_AS(invgamma_density(d, -1.0), PreconditionError);
}

TEST_CASE("density integrates to one and matches the cdf") {
    const InverseGamma d{3.0, 4.0, 0.0};
    // Direct integration in u, independent of the Gamma-weight substitution.
    const auto r = integrate_gk15([&](double t) {
        // u = t / (1 - t) maps (0, 1) onto (0, inf)
        if (t <= 0.0 || t >= 1.0) return 0.0;
        const double u = t / (1 - t);
        return invgamma_density(d, u) / ((1 - t) * (1 - t));
    }, 0.0, 1.0, 1e-11);
    CHECK(r.value == Approx(1.0).epsilon(1e-8));
    CHECK(d.cdf(2.0) == Approx(boost::math::gamma_q(3.0, 2.0)).epsilon(1e-14));
}

TEST_CASE("quadrature examples") {
    const auto d = invgamma_from_params(shape2_params());
    CHECK(quadrature_against_invgamma(d, [](double) { return 1.0; }).value ==
          Approx(1.0).epsilon(1e-10));
    CHECK(quadrature_against_invgamma(d, [](double u) { return u; }).value ==
          Approx(3.0).epsilon(1e-9));

    const auto p = fixtures::coexistence();
    for (double theta : {0.0, 0.01, 0.5, 2.0}) {
        const auto dt = invgamma_from_params(p, theta);
        const double a = 1.7;
        CHECK(quadrature_against_invgamma(dt, [&](double u) { return a * u; }).value ==
              Approx(a * (p.lambda_input + theta) / p.alpha1).epsilon(1e-9));
    }
}

TEST_CASE("moments exist exactly below the shape") {
    const InverseGamma d{3.0, 4.0, 0.0};
    // E[X^2] = scale^2 / ((shape - 1)(shape - 2)) = 8.
    CHECK(d.moment(2.0) == Approx(8.0));
    CHECK(d.moment(1.0) == Approx(2.0));
    CHECK_THROWS_AS(d.moment(3.0), NotApplicable);

    // Shapes small enough that u^k stays in double range far into the tail.
    for (double shape : {1.5, 2.0}) {
        const InverseGamma law{shape, 3.0, 0.0};
        for (double k : {0.5, 1.0, shape - 0.1}) {
            const auto pw = [k](double u) { return std::pow(u, k); };
            CHECK(quadrature_against_invgamma(law, pw).value ==
                  Approx(law.moment(k)).epsilon(1e-8));
        }
        for (double k : {shape, shape + 0.5}) {
            const auto pw = [k](double u) { return std::pow(u, k); };
            CHECK_THROWS_AS(quadrature_against_invgamma(law, pw), ToleranceNotMet);
        }
    }
    for (double k : {3.0, 3.5}) {
        CHECK_THROWS_AS(
            quadrature_against_invgamma(d, [k](double u) { return std::pow(u, k); }),
            ToleranceNotMet);
    }
}

TEST_CASE("sampling reproduces mean and second moment") {
    const auto p = fixtures::coexistence();
    const auto d = invgamma_from_params(p, 0.0);
    RngStream s(2024, 0, Channel::Aux);
    const auto xs = invgamma_sample(d, s, 1000000);
    const auto st = stats(xs);
    CHECK(std::abs(st.mean / d.mean() - 1.0) <= 0.005);

    // Shape 3 has an infinite fourth moment, so check the second moment on a lighter tail.
    const InverseGamma light{6.0, 5.0, 0.0};
    RngStream s2(2025, 0, Channel::Aux);
    const auto ys = invgamma_sample(light, s2, 1000000);
    double m2 = 0.0;
    for (double y : ys) m2 += y * y;
    m2 /= static_cast<double>(ys.size());
    CHECK(std::abs(m2 / light.moment(2.0) - 1.0) <= 0.01);

    RngStream r1(5, 1, Channel::Aux), r2(5, 1, Channel::Aux);
    CHECK(invgamma_sample(d, r1, 100) == invgamma_sample(d, r2, 100));
}

TEST_CASE("quadrature agrees with sampling for every preset") {
    const auto p = fixtures::coexistence();
    const auto d = invgamma_from_params(p);
    RngStream s(99, 0, Channel::Aux);
    const auto xs = invgamma_sample(d, s, 1000000);
    for (const auto& f : {FunctionalResponse::constant(1.3), FunctionalResponse::holling2(2.0, 0.7),
                          FunctionalResponse::beddington(1.5, 0.4, 2.0)}) {
        const auto g = [&](double u) { return f(u, 0.0) * u; };
        const double q = quadrature_against_invgamma(d, g).value;
        std::vector<double> gs(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) gs[i] = g(xs[i]);
        const auto st = stats(gs);
        CHECK(std::abs(q - st.mean) <= 3.0 * st.se);
    }
}

TEST_CASE("ell_theta is continuous at zero") {
    const auto p = fixtures::coexistence();
    for (const auto& f : {FunctionalResponse::constant(1.3), FunctionalResponse::holling2(2.0, 0.7),
                          FunctionalResponse::beddington(1.5, 0.4, 2.0)}) {
        const double l0 = ell_theta(p, f, 0.0);
        const double l1 = ell_theta(p, f, 0.01);
        CHECK(std::abs(l1 - l0) <= 0.02 * l0);
    }
    const double a = 1.3;
    const auto c = FunctionalResponse::constant(a);
    CHECK(ell_theta(p, c, 0.01) - ell_theta(p, c, 0.0) ==
          Approx(a * 0.01 / p.alpha1).epsilon(1e-6));
}

TEST_CASE("ergodic average") {
    const auto p = fixtures::coexistence();
    SimConfig c;
    c.t_end = 400;
    c.burn_in = 40;
    c.subsample_every = 10;
    c.seed = 3;
    const auto tr = simulate_nutrient1d(p, 1.0, c);
    const auto one = ergodic_average(tr, [](const State&) { return 1.0; }, c.burn_in);
    CHECK(one.mean == 1.0);
    CHECK(one.half_width == 0.0);
    CHECK(one.n_batches == kDefaultBatches);

    const auto ex = ergodic_average(tr, [](const State& s) { return s.x; }, c.burn_in);
    CHECK(ex.covers(p.lambda_input / p.alpha1));

    CHECK_THROWS_AS(ergodic_average(tr, [](const State&) { return 1.0; }, 250.0),
                    PreconditionError);
}

TEST_CASE("boundary run satisfies the phytoplankton stationarity identity") {
    const auto p = fixtures::coexistence();
    SimConfig c;
    c.t_end = 1000;
    c.burn_in = 100;
    c.subsample_every = 20;
    c.n_paths = 4;
    c.seed = 17;
    const double a = 1.0;
    const auto paths = simulate_boundary2d_ensemble(p, FunctionalResponse::constant(a), 1, 1, c);
    const auto e = ergodic_average(std::span<const Trajectory>(paths),
                                   [a](const State& s) { return a * s.x; }, c.burn_in);
    CHECK(e.covers(p.alpha2 + 0.5 * p.sigma2 * p.sigma2));
}

TEST_CASE("occupation histograms") {
    const auto p = fixtures::coexistence();
    SimConfig c;
    c.t_end = 200;
    c.burn_in = 20;
    c.subsample_every = 10;
    const auto tr = simulate_full3d(fixtures::constant_model(p), {1, 1, 1}, c);
    for (std::size_t dims : {1, 2, 3}) {
        const auto h = occupation_histogram(tr, dims, 10, c.burn_in);
        CHECK(h.total_mass() == Approx(1.0).epsilon(1e-12));
        for (double m : h.masses) CHECK(m >= 0.0);
        CHECK(h.masses.size() == std::pow(10, dims));
        CHECK(tv_distance(h, h) == 0.0);
    }
    CHECK_THROWS_AS(occupation_histogram(tr, 1, 4, c.burn_in), PreconditionError);
    const std::vector<Trajectory> one{tr};
    const auto grid = make_log_grid(one, 1, 8, 0, 200);
    CHECK_THROWS_AS(occupation_histogram(one, grid, 500, 600), PreconditionError);
}

TEST_CASE("total variation is a metric on a fixed grid") {
    CHECK(tv_distance(measure({1, 0, 0, 0}), measure({0, 0, 0.5, 0.5})) == 1.0);
    RngStream s(8, 0, Channel::Aux);
    auto random_measure = [&] {
        std::vector<double> m(16);
        double tot = 0;
        for (auto& v : m) tot += (v = s.next_uniform());
        for (auto& v : m) v /= tot;
        return measure(m);
    };
    for (int i = 0; i < 200; ++i) {
        const auto a = random_measure(), b = random_measure(), c = random_measure();
        const double ab = tv_distance(a, b), ba = tv_distance(b, a);
        CHECK(ab == ba);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(tv_distance(a, c) <= ab + tv_distance(b, c) + 1e-15);
    }
    CHECK_THROWS_AS(tv_distance(measure({1, 0}), measure({1, 0, 0})), PreconditionError);
}

TEST_CASE("ks distance against the law") {
    const InverseGamma d{3.0, 4.0, 0.0};
    RngStream s(4, 0, Channel::Aux);
    const auto xs = invgamma_sample(d, s, 100000);
    CHECK(ks_distance(xs, d) < 0.01);
    const InverseGamma wrong{3.0, 6.0, 0.0};
    CHECK(ks_distance(xs, wrong) > 0.1);
}
