#pragma once

// Monte Carlo validation of the inverse-sampling confidence intervals.
//
// Every Monte Carlo assertion uses a three-standard-error slack. Streams are
// derived from (master_seed, sampling cell, trial), so reports do not depend
// on the number of worker threads.

#include "invseq/confidence_limits.hpp"
#include "invseq/sampling.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace invseq {

inline constexpr double kStderrSlack = 3.0;

struct ExperimentConfig {
    std::vector<BoundedDistribution> distributions;
    std::vector<double> gammas;
    std::vector<double> deltas;
    std::vector<MethodId> methods;
    std::uint64_t trials = 20000;
    std::uint64_t master_seed = 42;
    unsigned threads = 0; // 0: one per hardware thread
};

/// Bernoulli methods need a Bernoulli distribution and an integer gamma;
/// general methods apply everywhere.
bool method_applies(MethodId method, const BoundedDistribution& dist, double gamma);

/// bernoulli 0.1/0.3/0.5/0.9, uniform(0,1), discrete 0.25/0.75; gamma in
/// {5, 10, 50}; delta in {0.05, 0.1}; all four methods; T = 20000.
ExperimentConfig default_experiment_config(std::uint64_t master_seed = 42);

struct CoverageCell {
    std::string dist;
    double mu = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    MethodId method = MethodId::HoeffdingGeneral;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    double coverage = 0.0;
    double coverage_stderr = 0.0;
    double mean_n = 0.0;
    double mean_n_stderr = 0.0;
    std::uint64_t violations = 0;
    std::uint64_t clamped = 0; // trials whose Massart limit was clamped
    double margin = 0.0;       // coverage - (1 - delta)
    bool pass = false;
};

/// Wald bracket gamma/mu <= E[n] < (gamma + 1)/mu, checked on one sampling cell.
struct WaldCell {
    std::string dist;
    double mu = 0.0;
    double gamma = 0.0;
    std::uint64_t trials = 0;
    double mean_n = 0.0;
    double mean_n_stderr = 0.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    bool pass = false;
};

struct CoverageReport {
    std::vector<CoverageCell> cells;
    std::vector<WaldCell> wald;

    bool all_pass() const;
};

/// Runs every applicable (distribution, gamma, delta, method) cell. Stopping
/// counts are simulated once per (distribution, gamma) and shared by the
/// delta/method cells built on them. Throws std::invalid_argument on a bad
/// config or when no cell is applicable.
CoverageReport run_coverage_experiment(const ExperimentConfig& config);

WaldCell wald_check(const BoundedDistribution& dist, double gamma, std::uint64_t trials, std::uint64_t seed,
                    unsigned threads = 0);

enum class TailStatus { Pass, Fail, Skipped };

std::string_view to_string(TailStatus status);

struct TailSide {
    double threshold = 0.0;
    double empirical = 0.0;
    double stderr_ = 0.0;
    std::optional<double> bound; // empty when skipped
    TailStatus status = TailStatus::Skipped;
};

struct TailCheckRow {
    std::string dist;
    double mu = 0.0;
    double gamma = 0.0;
    double epsilon = 0.0;
    std::uint64_t trials = 0;
    /// Pr{n <= gamma / (mu (1 + eps))} vs exp(gamma H((1 + eps) mu, mu)).
    TailSide left;
    /// Pr{n >= gamma / (mu (1 - eps))} vs exp(gamma H(gamma / (gamma/(mu(1-eps)) - 1), mu)).
    TailSide right;
    /// Same event vs exp(gamma H(mu (1 - eps), mu)); Bernoulli with integer gamma only.
    std::optional<TailSide> binomial_right;
};

struct TailCheckReport {
    std::vector<TailCheckRow> rows;

    bool all_pass() const; // skipped sides do not count as failures
};

TailCheckReport run_tail_check(const BoundedDistribution& dist, double gamma, const std::vector<double>& epsilons,
                               std::uint64_t trials, std::uint64_t seed, unsigned threads = 0);

struct WidthRow {
    std::uint64_t n = 0;
    MethodId hoeffding = MethodId::HoeffdingGeneral;
    MethodId massart = MethodId::MassartGeneral;
    ConfidenceInterval hoeffding_interval;
    ConfidenceInterval massart_interval;
    bool contains = false; // Massart interval contains the Hoeffding one
};

struct WidthReport {
    double gamma = 0.0;
    double delta = 0.0;
    std::vector<WidthRow> rows;

    std::vector<const WidthRow*> violations() const;
};

/// Pairs hoeffding-general with massart-general for every n, and the two
/// Bernoulli methods as well when gamma is an integer.
WidthReport width_comparison(double gamma, double delta, std::uint64_t n_from, std::uint64_t n_to);

} // namespace invseq
