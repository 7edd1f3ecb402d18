#include "invseq/confidence_limits.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace invseq {

namespace {

constexpr std::array<std::pair<MethodId, std::string_view>, 4> kMethodNames{{
    {MethodId::HoeffdingGeneral, "hoeffding-general"},
    {MethodId::HoeffdingBernoulli, "hoeffding-bernoulli"},
    {MethodId::MassartGeneral, "massart-general"},
    {MethodId::MassartBernoulli, "massart-bernoulli"},
}};

void require_integer_gamma(const IntervalInputs& inputs, MethodId method) {
    if (!is_integer_gamma(inputs.gamma)) {
        std::ostringstream msg;
        msg << to_string(method) << " requires an integer gamma, got " << inputs.gamma;
        throw std::invalid_argument(msg.str());
    }
}

// A root beyond the reach of the smallest positive double rounds to the
// interval end; report it as that end, without solver diagnostics.
Limit solve_upper(double z, double c) {
    try {
        const RootSolveResult r = solve_mu_above(z, c);
        return Limit{r.root, r.diagnostics};
    } catch (const RootUnderflowError&) {
        return Limit{1.0, std::nullopt};
    }
}

Limit solve_lower(double z, double c) {
    try {
        const RootSolveResult r = solve_mu_below(z, c);
        return Limit{r.root, r.diagnostics};
    } catch (const RootUnderflowError&) {
        return Limit{0.0, std::nullopt};
    }
}

// gamma/m + 3/(4 + m theta) * [1 - 2 gamma/m + sign * sqrt(1 + theta gamma (1 - gamma/m))]
double massart_form(double m, double gamma, double theta, double sign) {
    const double ratio = gamma / m;
    const double root = std::sqrt(1.0 + theta * gamma * (1.0 - ratio));
    return ratio + 3.0 / (4.0 + m * theta) * (1.0 - 2.0 * ratio + sign * root);
}

double massart_lower(const IntervalInputs& in, double theta, bool& clamped) {
    const double raw = massart_form(static_cast<double>(in.n), in.gamma, theta, -1.0);
    if (raw < 0.0) {
        clamped = true;
        return 0.0;
    }
    return raw;
}

double clamp_upper(double raw, bool& clamped) {
    if (raw > 1.0) {
        clamped = true;
        return 1.0;
    }
    return raw;
}

} // namespace

std::string_view to_string(MethodId method) {
    for (const auto& [id, name] : kMethodNames) {
        if (id == method) return name;
    }
    return "unknown";
}

MethodId parse_method(std::string_view name) {
    for (const auto& [id, known] : kMethodNames) {
        if (known == name) return id;
    }
    throw std::invalid_argument("unknown method '" + std::string(name) +
                                "' (expected hoeffding-general, hoeffding-bernoulli, "
                                "massart-general or massart-bernoulli)");
}

bool requires_integer_gamma(MethodId method) {
    return method == MethodId::HoeffdingBernoulli || method == MethodId::MassartBernoulli;
}

bool is_integer_gamma(double gamma) { return std::isfinite(gamma) && gamma == std::floor(gamma); }

void validate(const IntervalInputs& inputs) {
    if (!(inputs.gamma > 0.0) || !std::isfinite(inputs.gamma)) {
        throw std::invalid_argument("gamma must be a finite positive number");
    }
    if (!(inputs.delta > 0.0 && inputs.delta < 1.0)) {
        throw std::invalid_argument("delta must lie in (0, 1)");
    }
    if (inputs.n == 0 || static_cast<double>(inputs.n) < std::ceil(inputs.gamma)) {
        std::ostringstream msg;
        msg << "n must be at least ceil(gamma) = " << std::ceil(inputs.gamma) << ", got " << inputs.n;
        throw std::invalid_argument(msg.str());
    }
}

std::optional<double> ConfidenceInterval::max_residual() const {
    std::optional<double> out;
    for (const auto* d : {&lower_diagnostics, &upper_diagnostics}) {
        if (*d) out = std::max(out.value_or(0.0), (*d)->residual);
    }
    return out;
}

std::optional<int> ConfidenceInterval::total_iterations() const {
    std::optional<int> out;
    for (const auto* d : {&lower_diagnostics, &upper_diagnostics}) {
        if (*d) out = out.value_or(0) + (*d)->iterations;
    }
    return out;
}

double divergence_level(double gamma, double delta) { return std::log(delta / 2.0) / gamma; }

Limit hoeffding_general_upper(const IntervalInputs& inputs) {
    validate(inputs);
    const double n = static_cast<double>(inputs.n);
    if (n <= inputs.gamma + 1.0) return Limit{1.0, std::nullopt};
    const double z = inputs.gamma / (n - 1.0);
    return solve_upper(z, divergence_level(inputs.gamma, inputs.delta));
}

Limit hoeffding_general_lower(const IntervalInputs& inputs) {
    validate(inputs);
    // n == gamma gives z == 1 exactly, which the solver answers as (delta/2)^(1/gamma).
    const double z = inputs.gamma / static_cast<double>(inputs.n);
    return solve_lower(z, divergence_level(inputs.gamma, inputs.delta));
}

Limit hoeffding_bernoulli_upper(const IntervalInputs& inputs) {
    validate(inputs);
    require_integer_gamma(inputs, MethodId::HoeffdingBernoulli);
    const double n = static_cast<double>(inputs.n);
    if (n == inputs.gamma) return Limit{1.0, std::nullopt};
    return solve_upper(inputs.gamma / n, divergence_level(inputs.gamma, inputs.delta));
}

Limit hoeffding_bernoulli_lower(const IntervalInputs& inputs) {
    validate(inputs);
    require_integer_gamma(inputs, MethodId::HoeffdingBernoulli);
    return hoeffding_general_lower(inputs);
}

double massart_theta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("massart_theta: delta must lie in (0, 1)");
    return 9.0 / (2.0 * std::log(2.0 / delta));
}

ConfidenceInterval massart_general_interval(const IntervalInputs& inputs) {
    validate(inputs);
    const double theta = massart_theta(inputs.delta);
    ConfidenceInterval ci;
    ci.method = MethodId::MassartGeneral;
    ci.inputs = inputs;
    ci.lower = massart_lower(inputs, theta, ci.clamped);
    const double n = static_cast<double>(inputs.n);
    ci.upper = n <= inputs.gamma + 1.0 ? 1.0
                                       : clamp_upper(massart_form(n - 1.0, inputs.gamma, theta, 1.0), ci.clamped);
    return ci;
}

ConfidenceInterval massart_bernoulli_interval(const IntervalInputs& inputs) {
    validate(inputs);
    require_integer_gamma(inputs, MethodId::MassartBernoulli);
    const double theta = massart_theta(inputs.delta);
    ConfidenceInterval ci;
    ci.method = MethodId::MassartBernoulli;
    ci.inputs = inputs;
    ci.lower = massart_lower(inputs, theta, ci.clamped);
    ci.upper = clamp_upper(massart_form(static_cast<double>(inputs.n), inputs.gamma, theta, 1.0), ci.clamped);
    return ci;
}

ConfidenceInterval compute_interval(MethodId method, const IntervalInputs& inputs) {
    switch (method) {
    case MethodId::MassartGeneral:
        return massart_general_interval(inputs);
    case MethodId::MassartBernoulli:
        return massart_bernoulli_interval(inputs);
    case MethodId::HoeffdingGeneral:
    case MethodId::HoeffdingBernoulli: {
        const bool bernoulli = method == MethodId::HoeffdingBernoulli;
        const Limit lo = bernoulli ? hoeffding_bernoulli_lower(inputs) : hoeffding_general_lower(inputs);
        const Limit hi = bernoulli ? hoeffding_bernoulli_upper(inputs) : hoeffding_general_upper(inputs);
        ConfidenceInterval ci;
        ci.method = method;
        ci.inputs = inputs;
        ci.lower = lo.value;
        ci.upper = hi.value;
        ci.lower_diagnostics = lo.diagnostics;
        ci.upper_diagnostics = hi.diagnostics;
        return ci;
    }
    }
    throw std::invalid_argument("unknown method");
}

} // namespace invseq
