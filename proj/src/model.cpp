#include "npz/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "npz/error.hpp"

namespace npz {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

constexpr std::size_t kBoundGridPoints = 64;
constexpr std::size_t kMonotoneGridPoints = 1000;
constexpr double kGridLo = 1e-6;
constexpr double kGridHi = 1e6;
constexpr double kGridTol = 1e-12;

bool preset_params_ok(const FunctionalResponse& f, std::string& detail) {
    return std::visit(
        overloaded{
            [&](const ConstantResponse& c) {
                detail = "a=" + fmt(c.a);
                return finite_nonneg(c.a);
            },
            [&](const HollingII& c) {
                detail = "a=" + fmt(c.a) + " h=" + fmt(c.h);
                return finite_nonneg(c.a) && finite_nonneg(c.h);
            },
            [&](const BeddingtonDeAngelis& c) {
                detail = "a=" + fmt(c.a) + " h=" + fmt(c.h) + " k=" + fmt(c.k);
                return finite_nonneg(c.a) && finite_nonneg(c.h) && finite_nonneg(c.k);
            },
            [&](const CustomResponse& c) {
                detail = "custom '" + c.name + "'";
                return static_cast<bool>(c.fn) && finite_nonneg(c.bound);
            },
        },
        f.kind());
}

// 0 <= F(u, v) <= bound on a geometric grid including the axes.
CheckResult check_bounded(const std::string& label, const FunctionalResponse& f) {
    CheckResult r{label + " bounded", true, ""};
    const double bound = f.bound();
    if (!std::isfinite(bound)) {
        r.passed = false;
        r.detail = "declared bound is not finite";
        return r;
    }
    auto pts = geometric_grid(kGridLo, kGridHi, kBoundGridPoints);
    pts.insert(pts.begin(), 0.0);
    for (double u : pts) {
        for (double v : pts) {
            const double val = f(u, v);
            if (!std::isfinite(val) || val < 0.0 || val > bound * (1.0 + kGridTol) + kGridTol) {
                r.passed = false;
                r.detail = "F(" + fmt(u) + "," + fmt(v) + ")=" + fmt(val) + " outside [0," +
                           fmt(bound) + "]";
                return r;
            }
        }
    }
    r.detail = "L=" + fmt(bound);
    return r;
}

CheckResult check_lipschitz(const std::string& label, const FunctionalResponse& f) {
    const double lip = f.lipschitz();
    return {label + " lipschitz", std::isfinite(lip), "L=" + fmt(lip)};
}

CheckResult check_monotone(const FunctionalResponse& f1) {
    CheckResult r{"F1(u,0)u nondecreasing", true, ""};
    const auto pts = geometric_grid(kGridLo, kGridHi, kMonotoneGridPoints);
    double prev = f1(pts.front(), 0.0) * pts.front();
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double cur = f1(pts[i], 0.0) * pts[i];
        if (!(cur >= prev - kGridTol * std::max(1.0, std::abs(prev)))) {
            r.passed = false;
            r.detail = "decrease at u=" + fmt(pts[i]);
            return r;
        }
        prev = cur;
    }
    r.detail = std::to_string(kMonotoneGridPoints) + " grid points";
    return r;
}

}  // namespace

std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
        throw PreconditionError("geometric_grid: need 0 < lo < hi and n >= 2");
    }
    std::vector<double> out(n);
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(llo + step * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

DerivedConstants derive_constants(const ModelParams& p) {
    DerivedConstants d;
    d.alpha0 = std::min({p.alpha1, p.alpha2 - p.alpha4, p.alpha3 - p.alpha5}) / 3.0;
    const double max_sigma_sq =
        std::max({p.sigma1 * p.sigma1, p.sigma2 * p.sigma2, p.sigma3 * p.sigma3});
    const double by_noise = max_sigma_sq > 0.0 ? 1.0 + d.alpha0 / max_sigma_sq
                                               : std::numeric_limits<double>::infinity();
    const double by_invgamma = 1.0 + 2.0 * p.alpha1 / (p.sigma1 * p.sigma1);
    d.q0 = std::min({2.0, by_noise, by_invgamma}) - kQ0Margin;
    return d;
}

double FunctionalResponse::operator()(double u, double v) const {
    return std::visit(overloaded{
                          [](const ConstantResponse& c) { return c.a; },
                          [u](const HollingII& c) { return c.a / (1.0 + c.h * u); },
                          [u, v](const BeddingtonDeAngelis& c) {
                              return c.a / (1.0 + c.h * u + c.k * v);
                          },
                          [u, v](const CustomResponse& c) { return c.fn(u, v); },
                      },
                      kind_);
}

double FunctionalResponse::bound() const {
    return std::visit(overloaded{
                          [](const ConstantResponse& c) { return c.a; },
                          [](const HollingII& c) { return c.a; },
                          [](const BeddingtonDeAngelis& c) { return c.a; },
                          [](const CustomResponse& c) { return c.bound; },
                      },
                      kind_);
}

double FunctionalResponse::lipschitz() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        overloaded{
            [](const ConstantResponse& c) { return c.a; },
            // d/du [a u / (1 + h u)] = a / (1 + h u)^2 <= a
            [](const HollingII& c) { return c.a; },
            // |d/dv| = a k u / (1 + h u + k v)^2 <= a k / (4 h)
            [inf](const BeddingtonDeAngelis& c) {
                if (c.k == 0.0) return c.a;
                if (c.h == 0.0) return c.a == 0.0 ? 0.0 : inf;
                return std::max(c.a, c.a * c.k / (4.0 * c.h));
            },
            [](const CustomResponse& c) { return c.lipschitz; },
        },
        kind_);
}

std::string FunctionalResponse::kind_name() const {
    return std::visit(overloaded{
                          [](const ConstantResponse&) { return std::string("Constant"); },
                          [](const HollingII&) { return std::string("HollingII"); },
                          [](const BeddingtonDeAngelis&) {
                              return std::string("BeddingtonDeAngelis");
                          },
                          [](const CustomResponse& c) { return "Custom:" + c.name; },
                      },
                      kind_);
}

std::optional<double> FunctionalResponse::constant_value() const {
    if (const auto* c = std::get_if<ConstantResponse>(&kind_)) return c->a;
    return std::nullopt;
}

double FunctionalResponse::parameter(const std::string& name) const {
    auto missing = [&]() -> double {
        throw PreconditionError("response " + kind_name() + " has no parameter '" + name + "'");
    };
    return std::visit(overloaded{
                          [&](const ConstantResponse& c) { return name == "a" ? c.a : missing(); },
                          [&](const HollingII& c) {
                              if (name == "a") return c.a;
                              if (name == "h") return c.h;
                              return missing();
                          },
                          [&](const BeddingtonDeAngelis& c) {
                              if (name == "a") return c.a;
                              if (name == "h") return c.h;
                              if (name == "k") return c.k;
                              return missing();
                          },
                          [&](const CustomResponse&) { return missing(); },
                      },
                      kind_);
}

FunctionalResponse FunctionalResponse::with_parameter(const std::string& name, double value) const {
    (void)parameter(name);
    Kind k = kind_;
    std::visit(overloaded{
                   [&](ConstantResponse& c) { c.a = value; },
                   [&](HollingII& c) { (name == "a" ? c.a : c.h) = value; },
                   [&](BeddingtonDeAngelis& c) {
                       (name == "a" ? c.a : name == "h" ? c.h : c.k) = value;
                   },
                   [](CustomResponse&) {},
               },
               k);
    return FunctionalResponse(std::move(k));
}

void check_state(const State& s) {
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z)) {
        throw NonFiniteInput("state has a non-finite coordinate");
    }
    if (s.x < 0.0 || s.y < 0.0 || s.z < 0.0) {
        throw PreconditionError("state must lie in the nonnegative orthant");
    }
}

Vec3 drift(const Model& m, const State& s) {
    check_state(s);
    const auto& p = m.params;
    const double uptake = m.f1(s.x, s.y) * s.x * s.y;
    const double grazing = m.f2(s.y, s.z) * s.y * s.z;
    return {p.lambda_input - uptake - p.alpha1 * s.x + p.alpha4 * s.y + p.alpha5 * s.z,
            uptake - grazing - p.alpha2 * s.y, grazing - p.alpha3 * s.z};
}

Vec3 diffusion(const ModelParams& p, const State& s) {
    check_state(s);
    return {p.sigma1 * s.x, p.sigma2 * s.y, p.sigma3 * s.z};
}

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<std::string> ValidationReport::violations() const {
    std::vector<std::string> out;
    for (const auto& c : checks) {
        if (!c.passed) out.push_back(c.name);
    }
    return out;
}

ValidationReport validate_params(const ModelParams& p, const FunctionalResponse& f1,
                                 const FunctionalResponse& f2) {
    ValidationReport rep;
    auto add = [&](std::string name, bool ok, std::string detail = {}) {
        rep.checks.push_back({std::move(name), ok, std::move(detail)});
    };

    const std::array<double, 9> fields{p.lambda_input, p.alpha1, p.alpha2, p.alpha3, p.alpha4,
                                       p.alpha5,       p.sigma1, p.sigma2, p.sigma3};
    const bool finite = std::all_of(fields.begin(), fields.end(),
                                    [](double v) { return std::isfinite(v); });
    add("finite", finite);
    add("nonnegative", std::all_of(fields.begin(), fields.end(), [](double v) { return v >= 0.0; }));
    add("lambda_input > 0", p.lambda_input > 0.0, "lambda_input=" + fmt(p.lambda_input));
    add("alpha1 > 0", p.alpha1 > 0.0, "alpha1=" + fmt(p.alpha1));
    add("sigma1 > 0", p.sigma1 > 0.0, "sigma1=" + fmt(p.sigma1));
    add("alpha4 < alpha2", p.alpha4 < p.alpha2,
        "alpha4=" + fmt(p.alpha4) + " alpha2=" + fmt(p.alpha2));
    add("alpha5 < alpha3", p.alpha5 < p.alpha3,
        "alpha5=" + fmt(p.alpha5) + " alpha3=" + fmt(p.alpha3));

    for (const auto& [label, f] : {std::pair<std::string, const FunctionalResponse&>{"f1", f1},
                                   std::pair<std::string, const FunctionalResponse&>{"f2", f2}}) {
        std::string detail;
        const bool ok = preset_params_ok(f, detail);
        add(label + " parameters", ok, detail);
        if (ok) {
            rep.checks.push_back(check_bounded(label, f));
            rep.checks.push_back(check_lipschitz(label, f));
        } else {
            add(label + " bounded", false, "invalid parameters");
            add(label + " lipschitz", false, "invalid parameters");
        }
    }
    rep.checks.push_back(check_monotone(f1));

    if (rep.passed()) {
        const auto d = derive_constants(p);
        const bool ok = d.alpha0 > 0.0 && d.q0 > 1.0;
        add("q0 > 1", ok, "alpha0=" + fmt(d.alpha0) + " q0=" + fmt(d.q0));
        if (ok) rep.derived = d;
    }
    return rep;
}

}  // namespace npz
