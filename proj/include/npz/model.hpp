#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace npz {

// Rate and noise constants of the nutrient-phytoplankton-zooplankton SDE.
// Units: lambda_input in mass/volume/time, alpha* in 1/time, sigma* in 1/sqrt(time).
struct ModelParams {
    double lambda_input = 0.0;
    double alpha1 = 0.0;  // nutrient washout
    double alpha2 = 0.0;  // phytoplankton loss
    double alpha3 = 0.0;  // zooplankton loss
    double alpha4 = 0.0;  // recycling from dead phytoplankton
    double alpha5 = 0.0;  // recycling from dead zooplankton
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double sigma3 = 0.0;

    bool operator==(const ModelParams&) const = default;
};

struct DerivedConstants {
    double alpha0 = 0.0;  // dissipation rate
    double q0 = 0.0;      // largest admissible moment exponent
};

// Margin subtracted from the supremum of admissible exponents when picking q0.
inline constexpr double kQ0Margin = 1e-6;

// Requires alpha0 > 0 and sigma1 > 0; validate_params checks both first.
DerivedConstants derive_constants(const ModelParams& p);

// Interaction kernels F(u, v). The response enters the dynamics as F(u, v) * u * w.
struct ConstantResponse {
    double a = 0.0;
};

struct HollingII {
    double a = 0.0;
    double h = 0.0;
};

struct BeddingtonDeAngelis {
    double a = 0.0;
    double h = 0.0;
    double k = 0.0;
};

// User-supplied kernel with declared constants. Only grid checks can vouch for it.
struct CustomResponse {
    std::string name;
    std::function<double(double, double)> fn;
    double bound = 0.0;
    double lipschitz = 0.0;
};

class FunctionalResponse {
public:
    using Kind = std::variant<ConstantResponse, HollingII, BeddingtonDeAngelis, CustomResponse>;

    FunctionalResponse() : kind_(ConstantResponse{0.0}) {}
    FunctionalResponse(Kind kind) : kind_(std::move(kind)) {}  // NOLINT(implicit)

    static FunctionalResponse constant(double a) { return {ConstantResponse{a}}; }
    static FunctionalResponse holling2(double a, double h) { return {HollingII{a, h}}; }
    static FunctionalResponse beddington(double a, double h, double k) {
        return {BeddingtonDeAngelis{a, h, k}};
    }

    double operator()(double u, double v) const;

    // sup over u, v >= 0 of F(u, v).
    double bound() const;
    // Lipschitz constant of (u, v) -> F(u, v) * u; +inf when unbounded.
    double lipschitz() const;

    const Kind& kind() const noexcept { return kind_; }
    std::string kind_name() const;
    bool is_constant() const noexcept { return std::holds_alternative<ConstantResponse>(kind_); }
    // The constant value; std::nullopt for non-constant kernels.
    std::optional<double> constant_value() const;

    // Parameter access by name ("a", "h", "k") for presets; throws PreconditionError otherwise.
    double parameter(const std::string& name) const;
    FunctionalResponse with_parameter(const std::string& name, double value) const;

private:
    Kind kind_;
};

// Everything needed to evaluate the vector field.
struct Model {
    ModelParams params;
    FunctionalResponse f1;
    FunctionalResponse f2;
};

struct State {
    double x = 0.0;  // nutrient
    double y = 0.0;  // phytoplankton
    double z = 0.0;  // zooplankton

    bool operator==(const State&) const = default;
};

using Vec3 = std::array<double, 3>;

// Throws NonFiniteInput on NaN/inf and PreconditionError on negative coordinates.
void check_state(const State& s);

Vec3 drift(const Model& m, const State& s);
Vec3 diffusion(const ModelParams& p, const State& s);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    std::optional<DerivedConstants> derived;

    bool passed() const;
    // Names of the failed sub-assumptions ("AssumptionViolated" entries).
    std::vector<std::string> violations() const;
};

// Runs every sub-assumption and always returns the full report.
ValidationReport validate_params(const ModelParams& p, const FunctionalResponse& f1,
                                 const FunctionalResponse& f2);

inline ValidationReport validate_params(const Model& m) {
    return validate_params(m.params, m.f1, m.f2);
}

// Geometric grid of n points on [lo, hi], inclusive of both ends.
std::vector<double> geometric_grid(double lo, double hi, std::size_t n);

}  // namespace npz
