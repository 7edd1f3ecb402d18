#include "invseq/coverage.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace invseq {

namespace {

unsigned resolve_threads(unsigned requested, std::size_t work) {
    unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(work, 1)));
}

// Runs fn(i) for i in [0, count). Results must go to slot i so that the
// outcome is independent of scheduling. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    threads = resolve_threads(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

constexpr std::size_t kTrialChunk = 1024;

std::vector<std::uint64_t> simulate_counts(const BoundedDistribution& dist, double gamma, std::uint64_t trials,
                                           std::uint64_t seed, std::uint64_t cell, unsigned threads) {
    std::vector<std::uint64_t> counts(trials);
    const std::size_t chunks = (trials + kTrialChunk - 1) / kTrialChunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
        const std::uint64_t end = std::min<std::uint64_t>(trials, (c + 1) * kTrialChunk);
        for (std::uint64_t t = c * kTrialChunk; t < end; ++t) {
            Rng rng = make_stream(seed, cell, t);
            counts[t] = run_inverse_sampling(dist, gamma, rng).n;
        }
    });
    return counts;
}

struct MeanStats {
    double mean = 0.0;
    double stderr_ = 0.0;
};

MeanStats mean_and_stderr(const std::vector<std::uint64_t>& xs) {
    MeanStats s;
    if (xs.empty()) return s;
    long double sum = 0.0L;
    for (auto x : xs) sum += static_cast<long double>(x);
    const long double mean = sum / static_cast<long double>(xs.size());
    s.mean = static_cast<double>(mean);
    if (xs.size() < 2) return s;
    long double ss = 0.0L;
    for (auto x : xs) {
        const long double d = static_cast<long double>(x) - mean;
        ss += d * d;
    }
    const long double var = ss / static_cast<long double>(xs.size() - 1);
    s.stderr_ = static_cast<double>(std::sqrt(var / static_cast<long double>(xs.size())));
    return s;
}

double proportion_stderr(double p, std::uint64_t trials) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

WaldCell wald_from_counts(const BoundedDistribution& dist, double gamma, const std::vector<std::uint64_t>& counts) {
    const auto stats = mean_and_stderr(counts);
    WaldCell w;
    w.dist = dist.spec();
    w.mu = dist.mean();
    w.gamma = gamma;
    w.trials = counts.size();
    w.mean_n = stats.mean;
    w.mean_n_stderr = stats.stderr_;
    w.lower_bound = gamma / w.mu;
    w.upper_bound = (gamma + 1.0) / w.mu;
    w.pass = w.mean_n >= w.lower_bound - kStderrSlack * w.mean_n_stderr &&
             w.mean_n <= w.upper_bound + kStderrSlack * w.mean_n_stderr;
    return w;
}

void validate_config(const ExperimentConfig& config) {
    if (config.trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (config.distributions.empty() || config.gammas.empty() || config.deltas.empty() || config.methods.empty()) {
        throw std::invalid_argument("experiment grid axes must be non-empty");
    }
    for (const auto& d : config.distributions) {
        if (!d.has_interior_mean()) {
            throw std::invalid_argument("coverage experiments need a distribution mean strictly inside (0, 1): " +
                                        d.spec());
        }
    }
    for (double g : config.gammas) {
        if (!(g > 0.0) || !std::isfinite(g)) throw std::invalid_argument("gamma must be a finite positive number");
    }
    for (double d : config.deltas) {
        if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    }
}

struct CellPlan {
    std::size_t sampling_cell;
    double delta;
    MethodId method;
};

CoverageCell evaluate_cell(const CellPlan& plan, const BoundedDistribution& dist, double gamma,
                           const std::vector<std::uint64_t>& counts, const MeanStats& n_stats, std::uint64_t seed) {
    const double mu = dist.mean();
    std::unordered_map<std::uint64_t, std::pair<bool, bool>> by_n; // n -> (covered, clamped)
    CoverageCell cell;
    cell.dist = dist.spec();
    cell.mu = mu;
    cell.gamma = gamma;
    cell.delta = plan.delta;
    cell.method = plan.method;
    cell.trials = counts.size();
    cell.seed = seed;
    for (auto n : counts) {
        auto it = by_n.find(n);
        if (it == by_n.end()) {
            const auto ci = compute_interval(plan.method, IntervalInputs{n, gamma, plan.delta});
            it = by_n.emplace(n, std::make_pair(ci.lower < mu && mu < ci.upper, ci.clamped)).first;
        }
        if (!it->second.first) ++cell.violations;
        if (it->second.second) ++cell.clamped;
    }
    const auto trials = static_cast<double>(cell.trials);
    cell.coverage = 1.0 - static_cast<double>(cell.violations) / trials;
    cell.coverage_stderr = proportion_stderr(cell.coverage, cell.trials);
    cell.mean_n = n_stats.mean;
    cell.mean_n_stderr = n_stats.stderr_;
    cell.margin = cell.coverage - (1.0 - plan.delta);
    cell.pass = cell.coverage >= (1.0 - plan.delta) - kStderrSlack * cell.coverage_stderr;
    return cell;
}

TailSide compare_tail(double threshold, double empirical, std::uint64_t trials, std::optional<double> bound) {
    TailSide side;
    side.threshold = threshold;
    side.empirical = empirical;
    side.stderr_ = proportion_stderr(empirical, trials);
    side.bound = bound;
    if (!bound) {
        side.status = TailStatus::Skipped;
    } else {
        side.status = empirical <= *bound + kStderrSlack * side.stderr_ ? TailStatus::Pass : TailStatus::Fail;
    }
    return side;
}

double fraction_if(const std::vector<std::uint64_t>& counts, auto&& pred) {
    const auto hits = std::count_if(counts.begin(), counts.end(), pred);
    return static_cast<double>(hits) / static_cast<double>(counts.size());
}

} // namespace

bool method_applies(MethodId method, const BoundedDistribution& dist, double gamma) {
    if (!requires_integer_gamma(method)) return true;
    return dist.is_bernoulli() && is_integer_gamma(gamma);
}

ExperimentConfig default_experiment_config(std::uint64_t master_seed) {
    ExperimentConfig config;
    for (double p : {0.1, 0.3, 0.5, 0.9}) config.distributions.push_back(BoundedDistribution::bernoulli(p));
    config.distributions.push_back(BoundedDistribution::uniform(0.0, 1.0));
    config.distributions.push_back(BoundedDistribution::discrete({{0.25, 0.5}, {0.75, 0.5}}));
    config.gammas = {5.0, 10.0, 50.0};
    config.deltas = {0.05, 0.1};
    config.methods = {MethodId::HoeffdingGeneral, MethodId::HoeffdingBernoulli, MethodId::MassartGeneral,
                      MethodId::MassartBernoulli};
    config.trials = 20000;
    config.master_seed = master_seed;
    return config;
}

bool CoverageReport::all_pass() const {
    return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.pass; }) &&
           std::all_of(wald.begin(), wald.end(), [](const auto& w) { return w.pass; });
}

CoverageReport run_coverage_experiment(const ExperimentConfig& config) {
    validate_config(config);

    const std::size_t n_gammas = config.gammas.size();
    const std::size_t n_sampling = config.distributions.size() * n_gammas;
    auto dist_of = [&](std::size_t s) -> const BoundedDistribution& { return config.distributions[s / n_gammas]; };
    auto gamma_of = [&](std::size_t s) { return config.gammas[s % n_gammas]; };

    std::vector<CellPlan> plans;
    for (std::size_t s = 0; s < n_sampling; ++s) {
        for (double delta : config.deltas) {
            for (MethodId m : config.methods) {
                if (method_applies(m, dist_of(s), gamma_of(s))) plans.push_back({s, delta, m});
            }
        }
    }
    if (plans.empty()) {
        throw std::invalid_argument("no applicable cells: Bernoulli methods need a bernoulli distribution and an "
                                    "integer gamma");
    }

    std::vector<std::vector<std::uint64_t>> counts(n_sampling);
    for (std::size_t s = 0; s < n_sampling; ++s) {
        counts[s] = simulate_counts(dist_of(s), gamma_of(s), config.trials, config.master_seed, s, config.threads);
    }

    CoverageReport report;
    std::vector<MeanStats> stats(n_sampling);
    for (std::size_t s = 0; s < n_sampling; ++s) {
        stats[s] = mean_and_stderr(counts[s]);
        report.wald.push_back(wald_from_counts(dist_of(s), gamma_of(s), counts[s]));
    }

    report.cells.resize(plans.size());
    parallel_for(plans.size(), config.threads, [&](std::size_t i) {
        const auto& plan = plans[i];
        report.cells[i] = evaluate_cell(plan, dist_of(plan.sampling_cell), gamma_of(plan.sampling_cell),
                                        counts[plan.sampling_cell], stats[plan.sampling_cell], config.master_seed);
    });
    return report;
}

WaldCell wald_check(const BoundedDistribution& dist, double gamma, std::uint64_t trials, std::uint64_t seed,
                    unsigned threads) {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    return wald_from_counts(dist, gamma, simulate_counts(dist, gamma, trials, seed, 0, threads));
}

std::string_view to_string(TailStatus status) {
    switch (status) {
    case TailStatus::Pass:
        return "pass";
    case TailStatus::Fail:
        return "fail";
    case TailStatus::Skipped:
        return "skipped";
    }
    return "unknown";
}

bool TailCheckReport::all_pass() const {
    auto ok = [](const TailSide& s) { return s.status != TailStatus::Fail; };
    return std::all_of(rows.begin(), rows.end(), [&](const TailCheckRow& r) {
        return ok(r.left) && ok(r.right) && (!r.binomial_right || ok(*r.binomial_right));
    });
}

TailCheckReport run_tail_check(const BoundedDistribution& dist, double gamma, const std::vector<double>& epsilons,
                               std::uint64_t trials, std::uint64_t seed, unsigned threads) {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (epsilons.empty()) throw std::invalid_argument("at least one epsilon is required");
    for (double e : epsilons) {
        if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("epsilon values must lie in (0, 1)");
    }
    if (!dist.has_interior_mean()) {
        throw std::invalid_argument("tail checks need a distribution mean strictly inside (0, 1)");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be a finite positive number");

    const double mu = dist.mean();
    const auto counts = simulate_counts(dist, gamma, trials, seed, 0, threads);
    const bool binomial = dist.is_bernoulli() && is_integer_gamma(gamma);

    TailCheckReport report;
    for (double eps : epsilons) {
        TailCheckRow row;
        row.dist = dist.spec();
        row.mu = mu;
        row.gamma = gamma;
        row.epsilon = eps;
        row.trials = trials;

        const double left_threshold = gamma / (mu * (1.0 + eps));
        const double left_z = (1.0 + eps) * mu;
        std::optional<double> left_bound;
        if (left_z <= 1.0) left_bound = std::exp(gamma * h_divergence(left_z, mu));
        row.left = compare_tail(left_threshold,
                                fraction_if(counts, [&](std::uint64_t n) { return static_cast<double>(n) <= left_threshold; }),
                                trials, left_bound);

        const double right_threshold = gamma / (mu * (1.0 - eps));
        const double right_empirical =
            fraction_if(counts, [&](std::uint64_t n) { return static_cast<double>(n) >= right_threshold; });
        const double right_z = gamma / (right_threshold - 1.0);
        std::optional<double> right_bound;
        if (right_z > 0.0 && right_z < 1.0) right_bound = std::exp(gamma * h_divergence(right_z, mu));
        row.right = compare_tail(right_threshold, right_empirical, trials, right_bound);

        if (binomial) {
            row.binomial_right = compare_tail(right_threshold, right_empirical, trials,
                                              std::exp(gamma * h_divergence(mu * (1.0 - eps), mu)));
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::vector<const WidthRow*> WidthReport::violations() const {
    std::vector<const WidthRow*> out;
    for (const auto& r : rows) {
        if (!r.contains) out.push_back(&r);
    }
    return out;
}

WidthReport width_comparison(double gamma, double delta, std::uint64_t n_from, std::uint64_t n_to) {
    if (n_from > n_to) throw std::invalid_argument("n_from must not exceed n_to");
    WidthReport report;
    report.gamma = gamma;
    report.delta = delta;
    std::vector<std::pair<MethodId, MethodId>> pairs{{MethodId::HoeffdingGeneral, MethodId::MassartGeneral}};
    if (is_integer_gamma(gamma)) pairs.emplace_back(MethodId::HoeffdingBernoulli, MethodId::MassartBernoulli);
    for (std::uint64_t n = n_from; n <= n_to; ++n) {
        const IntervalInputs in{n, gamma, delta};
        for (const auto& [h, m] : pairs) {
            WidthRow row;
            row.n = n;
            row.hoeffding = h;
            row.massart = m;
            row.hoeffding_interval = compute_interval(h, in);
            row.massart_interval = compute_interval(m, in);
            row.contains = row.massart_interval.lower <= row.hoeffding_interval.lower &&
                           row.massart_interval.upper >= row.hoeffding_interval.upper;
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

} // namespace invseq
