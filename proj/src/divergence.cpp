#include "invseq/divergence.hpp"

#include <cmath>
#include <sstream>

namespace invseq {

namespace {

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

void require_mu(double mu, const char* where) {
    if (!in_open_unit(mu)) {
        std::ostringstream msg;
        msg << where << ": mu must lie in (0, 1), got " << mu;
        throw std::domain_error(msg.str());
    }
}

void require_z(double z, bool allow_one, const char* where) {
    const bool ok = allow_one ? (z > 0.0 && z <= 1.0) : in_open_unit(z);
    if (!ok) {
        std::ostringstream msg;
        msg << where << ": z must lie in " << (allow_one ? "(0, 1]" : "(0, 1)") << ", got " << z;
        throw std::domain_error(msg.str());
    }
}

void require_level(double c, const char* where) {
    if (!(c < 0.0) || !std::isfinite(c)) {
        std::ostringstream msg;
        msg << where << ": target level must be finite and negative, got " << c;
        throw std::domain_error(msg.str());
    }
}

double divergence_unchecked(double z, double mu) {
    if (z == 1.0) return std::log(mu);
    const long double log_ratio = std::log(static_cast<long double>(mu)) - std::log(static_cast<long double>(z));
    const long double tail_ratio = (1.0L - mu) / (1.0L - z);
    const long double weight = 1.0L / z - 1.0L;
    return static_cast<double>(log_ratio + weight * std::log(tail_ratio));
}

// Bisection on a bracket [lo, hi] where f(inside) > 0 on the z side and
// f < 0 on the boundary side. `z_side_is_lo` says which end is near z.
template <typename F>
RootSolveResult bisect(F&& f, double lo, double hi, bool z_side_is_lo, const SolverTolerances& tol,
                       const char* where) {
    // Aim well inside the residual tolerance so a re-evaluation of H at the
    // returned root, off by a few ulps, still meets it. The tolerance proper
    // is the acceptance test once the bracket stops shrinking.
    const double residual_target = tol.residual_tolerance / 64.0;
    RootSolveResult out;
    double mid = lo + 0.5 * (hi - lo);
    double f_mid = f(mid);
    int iter = 0;
    for (; iter < tol.max_iterations; ++iter) {
        const double next = lo + 0.5 * (hi - lo);
        if (next <= lo || next >= hi) break; // no representable point left
        mid = next;
        f_mid = f(mid);
        const bool toward_boundary = f_mid > 0.0;
        if (toward_boundary == z_side_is_lo) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= tol.mu_tolerance && std::abs(f_mid) <= residual_target) {
            ++iter;
            break;
        }
    }
    out.root = mid;
    out.diagnostics.iterations = iter;
    out.diagnostics.residual = std::abs(f_mid);
    out.diagnostics.bracket_width = hi - lo;
    if (!(out.diagnostics.residual <= tol.residual_tolerance)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << where << ": residual " << out.diagnostics.residual << " above tolerance after " << iter
            << " iterations (root estimate " << mid << ")";
        throw ConvergenceError(msg.str());
    }
    return out;
}

} // namespace

double h_divergence(double z, double mu) {
    require_z(z, true, "h_divergence");
    require_mu(mu, "h_divergence");
    return divergence_unchecked(z, mu);
}

double h_partial_mu(double z, double mu) {
    require_z(z, false, "h_partial_mu");
    require_mu(mu, "h_partial_mu");
    return 1.0 / (mu * (1.0 - mu)) - 1.0 / (z * (1.0 - mu));
}

RootSolveResult solve_mu_above(double z, double c, const SolverTolerances& tol) {
    require_z(z, false, "solve_mu_above");
    require_level(c, "solve_mu_above");
    // Search over w = 1 - mu so roots near 1 keep their relative precision.
    const long double log_z = std::log(static_cast<long double>(z));
    const long double log_1mz = std::log1p(-static_cast<long double>(z));
    const long double weight = 1.0L / z - 1.0L;
    auto f = [=](double w) {
        const long double wl = w;
        return static_cast<double>(std::log1p(-wl) - log_z + weight * (std::log(wl) - log_1mz)) - c;
    };

    // f(1 - z) = -c > 0; walk the small end toward 0 until f changes sign.
    double hi = 1.0 - z;
    double lo = 0.5 * hi;
    while (f(lo) >= 0.0) {
        hi = lo;
        lo *= 0.5;
        if (lo <= 0.0) throw RootUnderflowError("solve_mu_above: root closer to 1 than any double resolves");
    }
    RootSolveResult r = bisect(f, lo, hi, /*z_side_is_lo=*/false, tol, "solve_mu_above");
    r.complement = r.root;
    r.root = 1.0 - r.complement;
    return r;
}

RootSolveResult solve_mu_below(double z, double c, const SolverTolerances& tol) {
    require_z(z, true, "solve_mu_below");
    require_level(c, "solve_mu_below");
    if (z == 1.0) {
        RootSolveResult out;
        out.root = std::exp(c);
        out.complement = -std::expm1(c);
        out.diagnostics.residual = std::abs(std::log(out.root) - c);
        return out;
    }
    auto f = [z, c](double mu) { return divergence_unchecked(z, mu) - c; };

    double hi = z;
    double lo = 0.5 * z;
    while (f(lo) >= 0.0) {
        hi = lo;
        lo *= 0.5;
        if (lo <= 0.0) throw RootUnderflowError("solve_mu_below: root closer to 0 than any double resolves");
    }
    RootSolveResult r = bisect(f, lo, hi, /*z_side_is_lo=*/false, tol, "solve_mu_below");
    r.complement = 1.0 - r.root;
    return r;
}

double hoeffding_tail_bound(std::uint64_t n, double z, double mu) {
    if (n == 0) throw std::domain_error("hoeffding_tail_bound: n must be at least 1");
    require_z(z, false, "hoeffding_tail_bound");
    require_mu(mu, "hoeffding_tail_bound");
    return std::exp(static_cast<double>(n) * z * divergence_unchecked(z, mu));
}

} // namespace invseq
