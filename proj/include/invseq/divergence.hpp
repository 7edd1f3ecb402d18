#pragma once

// Divergence function for inverse-sampling confidence limits.
//
//   H(z, mu) = ln(mu / z) + (1/z - 1) * ln((1 - mu) / (1 - z))
//
// defined for 0 < z < 1, 0 < mu < 1, and extended to z = 1 by its pointwise
// limit H(1, mu) = ln(mu). H(z, .) is zero at mu = z, strictly increasing on
// (0, z), strictly decreasing on (z, 1), and tends to -inf at both ends, so
// H(z, mu) = c has exactly one root on each side of z for any c < 0.
// z * H(z, mu) is the negated Bernoulli relative entropy KL(z || mu).

#include <cstdint>
#include <stdexcept>
#include <string>

namespace invseq {

/// Thrown when the bisection cannot meet its tolerances within the
/// iteration cap. Valid inputs never trigger it.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when the root lies closer to the interval end (0 or 1) than the
/// smallest positive double, so no representable bracket exists.
class RootUnderflowError : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

struct RootSolveDiagnostics {
    int iterations = 0;
    double residual = 0.0;      // |H(z, root) - c|
    double bracket_width = 0.0; // final hi - lo
};

struct RootSolveResult {
    double root = 0.0;
    /// 1 - root, carried at full relative precision. Roots above z are
    /// searched through this complement, so `root` itself may round to 1
    /// when the true root is within an ulp of 1.
    double complement = 1.0;
    RootSolveDiagnostics diagnostics;
};

struct SolverTolerances {
    double mu_tolerance = 1e-12;
    double residual_tolerance = 1e-10;
    int max_iterations = 200;
};

/// H(z, mu). Accepts z in (0, 1] and mu in (0, 1); throws std::domain_error
/// otherwise.
double h_divergence(double z, double mu);

/// dH/dmu = 1/(mu(1-mu)) - 1/(z(1-mu)) for z, mu in (0, 1).
double h_partial_mu(double z, double mu);

/// Unique mu in (z, 1) with H(z, mu) = c. Requires 0 < z < 1 and c < 0.
/// The residual is measured at the complement, not at the rounded root.
RootSolveResult solve_mu_above(double z, double c, const SolverTolerances& tol = {});

/// Unique mu in (0, z) with H(z, mu) = c. Requires 0 < z <= 1 and c < 0;
/// z = 1 is answered in closed form, mu = e^c.
RootSolveResult solve_mu_below(double z, double c, const SolverTolerances& tol = {});

/// Hoeffding bound exp(n z H(z, mu)) on Pr{sample mean >= z} (z > mu) or
/// Pr{sample mean <= z} (z < mu) for n i.i.d. [0,1] variables with mean mu.
double hoeffding_tail_bound(std::uint64_t n, double z, double mu);

} // namespace invseq
