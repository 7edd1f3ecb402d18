#pragma once

// Confidence limits for the mean of a [0,1]-bounded variable observed under
// inverse sampling: draw until the running sum first reaches gamma, then
// build an interval from the stopping count n.
//
// Four constructions are provided. The Hoeffding-based limits solve
// H(z, mu) = ln(delta/2) / gamma by bisection; the Massart-based limits are
// explicit. The *Bernoulli variants assume 0/1 samples and an integer gamma
// and are slightly tighter on the upper side.

#include "invseq/divergence.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace invseq {

enum class MethodId {
    HoeffdingGeneral,
    HoeffdingBernoulli,
    MassartGeneral,
    MassartBernoulli,
};

/// "hoeffding-general", "hoeffding-bernoulli", "massart-general", "massart-bernoulli".
std::string_view to_string(MethodId method);

/// Inverse of to_string; throws std::invalid_argument on unknown names.
MethodId parse_method(std::string_view name);

bool requires_integer_gamma(MethodId method);

/// Observed stopping count n, threshold gamma and confidence parameter delta.
struct IntervalInputs {
    std::uint64_t n = 0;
    double gamma = 0.0;
    double delta = 0.0;
};

/// Throws std::invalid_argument unless gamma > 0, delta in (0, 1) and
/// n >= ceil(gamma).
void validate(const IntervalInputs& inputs);

bool is_integer_gamma(double gamma);

/// One confidence limit. Diagnostics are present only when a root solve ran.
struct Limit {
    double value = 0.0;
    std::optional<RootSolveDiagnostics> diagnostics;
};

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 1.0;
    MethodId method = MethodId::HoeffdingGeneral;
    IntervalInputs inputs;
    std::optional<RootSolveDiagnostics> lower_diagnostics;
    std::optional<RootSolveDiagnostics> upper_diagnostics;
    bool clamped = false; // a Massart limit was pulled back into [0, 1]

    double width() const { return upper - lower; }
    /// Largest solver residual across both limits, if any solve ran.
    std::optional<double> max_residual() const;
    /// Total bisection iterations across both limits, if any solve ran.
    std::optional<int> total_iterations() const;
};

/// ln(delta/2) / gamma.
double divergence_level(double gamma, double delta);

// Hoeffding-based limits, any [0,1] variable.
Limit hoeffding_general_upper(const IntervalInputs& inputs);
Limit hoeffding_general_lower(const IntervalInputs& inputs);

// Hoeffding-based limits for Bernoulli samples with integer gamma.
Limit hoeffding_bernoulli_upper(const IntervalInputs& inputs);
Limit hoeffding_bernoulli_lower(const IntervalInputs& inputs);

/// 9 / (2 ln(2/delta)); throws std::domain_error unless 0 < delta < 1.
double massart_theta(double delta);

ConfidenceInterval massart_general_interval(const IntervalInputs& inputs);
ConfidenceInterval massart_bernoulli_interval(const IntervalInputs& inputs);

/// Dispatches to the construction named by `method`.
ConfidenceInterval compute_interval(MethodId method, const IntervalInputs& inputs);

} // namespace invseq
