#pragma once

// Inverse sampling over [0,1]-valued distributions with closed-form means.
//
// Distribution spec strings:
//   bernoulli:<p>
//   uniform:<a>,<b>
//   discrete:<v1>@<p1>,<v2>@<p2>,...

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace invseq {

using Rng = std::mt19937_64;

/// Independent stream for one trial. The seed is
///   splitmix64(master ^ splitmix64(cell ^ splitmix64(trial)))
/// fed through std::seed_seq, so a (master, cell, trial) triple always
/// reproduces the same sample path regardless of scheduling.
Rng make_stream(std::uint64_t master_seed, std::uint64_t cell_index, std::uint64_t trial_index);

std::uint64_t splitmix64(std::uint64_t x);

/// Uniform double in [0, 1) from the top 53 bits of one generator output.
double unit_uniform(Rng& rng);

struct Bernoulli {
    double p = 0.5;
};

struct Uniform {
    double a = 0.0;
    double b = 1.0;
};

struct DiscretePoint {
    double value = 0.0;
    double prob = 0.0;
};

struct Discrete {
    std::vector<DiscretePoint> points;
};

/// Immutable [0,1]-valued distribution. Construction validates parameters;
/// the mean must be positive so that inverse sampling terminates.
class BoundedDistribution {
public:
    static BoundedDistribution bernoulli(double p);
    static BoundedDistribution uniform(double a, double b);
    static BoundedDistribution discrete(std::vector<DiscretePoint> points);

    /// Exact analytic mean.
    double mean() const { return mean_; }

    /// True when the mean is strictly inside (0, 1), as coverage experiments need.
    bool has_interior_mean() const { return mean_ > 0.0 && mean_ < 1.0; }

    bool is_bernoulli() const { return std::holds_alternative<Bernoulli>(kind_); }

    double draw(Rng& rng) const;

    /// Canonical spec string; parse_distribution(spec()) reproduces *this.
    std::string spec() const;

    const std::variant<Bernoulli, Uniform, Discrete>& kind() const { return kind_; }

private:
    BoundedDistribution(std::variant<Bernoulli, Uniform, Discrete> kind, double mean);

    std::variant<Bernoulli, Uniform, Discrete> kind_;
    std::vector<double> cumulative_; // discrete only
    double mean_ = 0.0;
};

/// Strict parser for the spec-string grammar; throws std::invalid_argument.
BoundedDistribution parse_distribution(std::string_view text);

double mean_of(const BoundedDistribution& dist);

struct StoppingRecord {
    std::uint64_t n = 0;         // first index with running sum >= gamma
    double final_sum = 0.0;
    double last_increment = 0.0;
};

/// Thrown when a run exceeds the draw guard.
class SamplingGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultDrawGuard = 1'000'000'000;

/// Draws until the running sum first reaches gamma.
StoppingRecord run_inverse_sampling(const BoundedDistribution& dist, double gamma, Rng& rng,
                                    std::uint64_t max_draws = kDefaultDrawGuard);

} // namespace invseq
