#include "cli.hpp"

#include "invseq/confidence_limits.hpp"
#include "invseq/coverage.hpp"
#include "invseq/report_io.hpp"
#include "invseq/sampling.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>

namespace invseq::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

struct CommonFlags {
    std::string format = "csv";
};

struct CiFlags {
    std::string method;
    std::uint64_t n = 0;
    double gamma = 0.0;
    double delta = 0.0;
};

struct TableFlags {
    std::string method;
    double gamma = 0.0;
    double delta = 0.0;
    std::uint64_t n_from = 0;
    std::uint64_t n_to = 0;
};

struct SimulateFlags {
    std::vector<std::string> dists;
    std::vector<double> gammas;
    std::vector<double> deltas;
    std::vector<std::string> methods;
    std::int64_t trials = 20000;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 0;
};

struct TailFlags {
    std::string dist;
    double gamma = 0.0;
    std::vector<double> epsilons;
    std::int64_t trials = 50000;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 0;
};

void add_format(CLI::App* cmd, CommonFlags& common) {
    cmd->add_option("--format", common.format, "Output format: csv | json | human (default csv)")
        ->check(CLI::IsMember({"csv", "json", "human"}));
}

void add_seed(CLI::App* cmd, std::uint64_t& seed) {
    cmd->add_option("--seed", seed,
                    "Master seed, unsigned 64-bit (default: $INVSEQ_SEED, else 42)")
        ->envname("INVSEQ_SEED");
}

void add_threads(CLI::App* cmd, unsigned& threads) {
    cmd->add_option("--threads", threads,
                    "Worker threads, >= 0; 0 uses every hardware thread. Output does not depend on it");
}

std::uint64_t require_trials(std::int64_t trials) {
    if (trials < 1) throw std::invalid_argument("--trials must be at least 1");
    return static_cast<std::uint64_t>(trials);
}

int cmd_ci(const CiFlags& f, OutputFormat format, std::ostream& out) {
    const auto ci = compute_interval(parse_method(f.method), IntervalInputs{f.n, f.gamma, f.delta});
    write_records(out, {to_record(ci)}, format);
    return kExitOk;
}

int cmd_table(const TableFlags& f, OutputFormat format, std::ostream& out) {
    const auto method = parse_method(f.method);
    if (f.n_from > f.n_to) throw std::invalid_argument("--n-from must not exceed --n-to");
    validate(IntervalInputs{f.n_from, f.gamma, f.delta});
    std::vector<OutputRecord> rows;
    for (std::uint64_t n = f.n_from; n <= f.n_to; ++n) {
        rows.push_back(to_record(compute_interval(method, IntervalInputs{n, f.gamma, f.delta})));
    }
    write_records(out, rows, format);
    return kExitOk;
}

int cmd_simulate(const SimulateFlags& f, OutputFormat format, std::ostream& out, std::ostream& err) {
    ExperimentConfig config;
    for (const auto& d : f.dists) config.distributions.push_back(parse_distribution(d));
    config.gammas = f.gammas;
    config.deltas = f.deltas;
    if (f.methods.empty()) {
        config.methods = {MethodId::HoeffdingGeneral, MethodId::HoeffdingBernoulli, MethodId::MassartGeneral,
                          MethodId::MassartBernoulli};
    } else {
        for (const auto& m : f.methods) config.methods.push_back(parse_method(m));
        // An explicitly requested method must apply to every requested cell.
        for (MethodId m : config.methods) {
            for (const auto& d : config.distributions) {
                for (double g : config.gammas) {
                    if (!method_applies(m, d, g)) {
                        throw std::invalid_argument(std::string(to_string(m)) +
                                                    " needs a bernoulli distribution and an integer gamma (got " +
                                                    d.spec() + ", gamma " + format_double(g, kMachineDigits) + ")");
                    }
                }
            }
        }
    }
    config.trials = require_trials(f.trials);
    config.master_seed = f.seed;
    config.threads = f.threads;

    const auto report = run_coverage_experiment(config);
    std::vector<OutputRecord> rows;
    for (const auto& cell : report.cells) rows.push_back(to_record(cell));
    write_records(out, rows, format);
    for (const auto& w : report.wald) {
        if (!w.pass) {
            err << "wald bracket failed: " << w.dist << " gamma " << format_double(w.gamma, kMachineDigits)
                << " mean_n " << format_double(w.mean_n, kMachineDigits) << " outside ["
                << format_double(w.lower_bound, kMachineDigits) << ", " << format_double(w.upper_bound, kMachineDigits)
                << "] +/- 3 se\n";
        }
    }
    return report.all_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_tail_check(const TailFlags& f, OutputFormat format, std::ostream& out) {
    const auto dist = parse_distribution(f.dist);
    const auto report = run_tail_check(dist, f.gamma, f.epsilons, require_trials(f.trials), f.seed, f.threads);
    std::vector<OutputRecord> rows;
    for (const auto& row : report.rows) {
        for (auto& rec : to_records(row)) rows.push_back(std::move(rec));
    }
    write_records(out, rows, format);
    return report.all_pass() ? kExitOk : kExitCheckFailed;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Confidence intervals for bounded means under inverse sampling", "invseq"};
    app.require_subcommand(1);

    CommonFlags common;

    CiFlags ci;
    auto* ci_cmd = app.add_subcommand("ci", "Compute one confidence interval from a stopping count");
    ci_cmd->add_option("--method", ci.method,
                       "hoeffding-general | hoeffding-bernoulli | massart-general | massart-bernoulli")
        ->required();
    ci_cmd->add_option("--n", ci.n, "Stopping count n, integer >= ceil(gamma)")->required();
    ci_cmd->add_option("--gamma", ci.gamma, "Sum threshold gamma > 0 (integer for *-bernoulli methods)")->required();
    ci_cmd->add_option("--delta", ci.delta, "Confidence parameter delta in (0, 1); coverage is 1 - delta")
        ->required();
    add_format(ci_cmd, common);

    TableFlags table;
    auto* table_cmd = app.add_subcommand("table", "Tabulate intervals over a range of stopping counts");
    table_cmd->add_option("--method", table.method,
                          "hoeffding-general | hoeffding-bernoulli | massart-general | massart-bernoulli")
        ->required();
    table_cmd->add_option("--gamma", table.gamma, "Sum threshold gamma > 0 (integer for *-bernoulli methods)")
        ->required();
    table_cmd->add_option("--delta", table.delta, "Confidence parameter delta in (0, 1)")->required();
    table_cmd->add_option("--n-from", table.n_from, "First stopping count, integer >= ceil(gamma)")->required();
    table_cmd->add_option("--n-to", table.n_to, "Last stopping count, integer >= --n-from")->required();
    add_format(table_cmd, common);

    SimulateFlags sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo coverage experiment");
    sim_cmd->add_option("--dist", sim.dists,
                        "Distribution spec, repeatable: bernoulli:<p> | uniform:<a>,<b> | "
                        "discrete:<v1>@<p1>,<v2>@<p2>,... (values in [0,1], mean in (0,1))")
        ->required();
    sim_cmd->add_option("--gamma", sim.gammas, "Sum threshold(s) gamma > 0, comma separated")
        ->required()
        ->delimiter(',');
    sim_cmd->add_option("--delta", sim.deltas, "Confidence parameter(s) delta in (0, 1), comma separated")
        ->required()
        ->delimiter(',');
    sim_cmd->add_option("--method", sim.methods,
                        "Method(s), comma separated (default: every method applicable to each cell)")
        ->delimiter(',');
    sim_cmd->add_option("--trials", sim.trials, "Trials per cell, integer >= 1 (default 20000)");
    add_seed(sim_cmd, sim.seed);
    add_threads(sim_cmd, sim.threads);
    add_format(sim_cmd, common);

    TailFlags tail;
    auto* tail_cmd = app.add_subcommand("tail-check", "Compare stopping-count tails with their analytic bounds");
    tail_cmd->add_option("--dist", tail.dist, "Distribution spec (see simulate), mean in (0,1)")->required();
    tail_cmd->add_option("--gamma", tail.gamma, "Sum threshold gamma > 0")->required();
    tail_cmd->add_option("--epsilons", tail.epsilons, "Relative deviations in (0, 1), comma separated, non-empty")
        ->required()
        ->delimiter(',');
    tail_cmd->add_option("--trials", tail.trials, "Trials, integer >= 1 (default 50000)");
    add_seed(tail_cmd, tail.seed);
    add_threads(tail_cmd, tail.threads);
    add_format(tail_cmd, common);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        const auto format = parse_format(common.format);
        if (ci_cmd->parsed()) return cmd_ci(ci, format, out);
        if (table_cmd->parsed()) return cmd_table(table, format, out);
        if (sim_cmd->parsed()) return cmd_simulate(sim, format, out, err);
        if (tail_cmd->parsed()) return cmd_tail_check(tail, format, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    err << "error: no subcommand given\n";
    return kExitUsage;
}

} // namespace invseq::cli
