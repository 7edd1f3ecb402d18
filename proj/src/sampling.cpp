#include "invseq/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace invseq {

namespace {

constexpr double kProbSumTolerance = 1e-9;

bool in_closed_unit(double x) { return x >= 0.0 && x <= 1.0; }

double parse_number(std::string_view text, std::string_view what) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw std::invalid_argument("malformed number '" + std::string(text) + "' in " + std::string(what));
    }
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string format_number(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

void require_positive_mean(double mean) {
    if (!(mean > 0.0)) {
        throw std::invalid_argument("distribution mean must be positive for inverse sampling to terminate");
    }
}

} // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t master_seed, std::uint64_t cell_index, std::uint64_t trial_index) {
    const std::uint64_t key = splitmix64(master_seed ^ splitmix64(cell_index ^ splitmix64(trial_index)));
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
    return Rng(seq);
}

double unit_uniform(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

BoundedDistribution::BoundedDistribution(std::variant<Bernoulli, Uniform, Discrete> kind, double mean)
    : kind_(std::move(kind)), mean_(mean) {
    if (const auto* d = std::get_if<Discrete>(&kind_)) {
        double acc = 0.0;
        cumulative_.reserve(d->points.size());
        for (const auto& pt : d->points) {
            acc += pt.prob;
            cumulative_.push_back(acc);
        }
        cumulative_.back() = 1.0;
    }
}

BoundedDistribution BoundedDistribution::bernoulli(double p) {
    if (!in_closed_unit(p)) throw std::invalid_argument("bernoulli: p must lie in [0, 1]");
    require_positive_mean(p);
    return BoundedDistribution(Bernoulli{p}, p);
}

BoundedDistribution BoundedDistribution::uniform(double a, double b) {
    if (!in_closed_unit(a) || !in_closed_unit(b) || !(a < b)) {
        throw std::invalid_argument("uniform: need 0 <= a < b <= 1");
    }
    return BoundedDistribution(Uniform{a, b}, 0.5 * (a + b));
}

BoundedDistribution BoundedDistribution::discrete(std::vector<DiscretePoint> points) {
    if (points.empty()) throw std::invalid_argument("discrete: at least one support point required");
    double total = 0.0;
    double mean = 0.0;
    for (const auto& pt : points) {
        if (!in_closed_unit(pt.value)) throw std::invalid_argument("discrete: support values must lie in [0, 1]");
        if (!(pt.prob > 0.0 && pt.prob <= 1.0)) {
            throw std::invalid_argument("discrete: probabilities must lie in (0, 1]");
        }
        total += pt.prob;
        mean += pt.value * pt.prob;
    }
    if (std::abs(total - 1.0) > kProbSumTolerance) {
        std::ostringstream msg;
        msg << "discrete: probabilities sum to " << total << ", expected 1";
        throw std::invalid_argument(msg.str());
    }
    mean = std::min(mean, 1.0);
    require_positive_mean(mean);
    return BoundedDistribution(Discrete{std::move(points)}, mean);
}

double BoundedDistribution::draw(Rng& rng) const {
    const double u = unit_uniform(rng);
    if (const auto* b = std::get_if<Bernoulli>(&kind_)) return u < b->p ? 1.0 : 0.0;
    if (const auto* un = std::get_if<Uniform>(&kind_)) return un->a + (un->b - un->a) * u;
    const auto& pts = std::get<Discrete>(kind_).points;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                                                       static_cast<std::ptrdiff_t>(pts.size()) - 1));
    return pts[idx].value;
}

std::string BoundedDistribution::spec() const {
    if (const auto* b = std::get_if<Bernoulli>(&kind_)) return "bernoulli:" + format_number(b->p);
    if (const auto* u = std::get_if<Uniform>(&kind_)) {
        return "uniform:" + format_number(u->a) + "," + format_number(u->b);
    }
    std::string out = "discrete:";
    const auto& pts = std::get<Discrete>(kind_).points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out += ',';
        out += format_number(pts[i].value) + "@" + format_number(pts[i].prob);
    }
    return out;
}

BoundedDistribution parse_distribution(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("distribution spec '" + std::string(text) +
                                    "' must look like bernoulli:<p>, uniform:<a>,<b> or discrete:<v>@<p>,...");
    }
    const auto family = text.substr(0, colon);
    const auto args = text.substr(colon + 1);
    const auto fields = split(args, ',');

    if (family == "bernoulli") {
        if (fields.size() != 1) throw std::invalid_argument("bernoulli spec takes exactly one parameter");
        return BoundedDistribution::bernoulli(parse_number(fields[0], "bernoulli:<p>"));
    }
    if (family == "uniform") {
        if (fields.size() != 2) throw std::invalid_argument("uniform spec takes exactly two parameters");
        return BoundedDistribution::uniform(parse_number(fields[0], "uniform:<a>,<b>"),
                                            parse_number(fields[1], "uniform:<a>,<b>"));
    }
    if (family == "discrete") {
        std::vector<DiscretePoint> points;
        for (const auto field : fields) {
            const auto at = field.find('@');
            if (at == std::string_view::npos || field.find('@', at + 1) != std::string_view::npos) {
                throw std::invalid_argument("discrete entry '" + std::string(field) + "' must be <value>@<prob>");
            }
            points.push_back({parse_number(field.substr(0, at), "discrete value"),
                              parse_number(field.substr(at + 1), "discrete probability")});
        }
        return BoundedDistribution::discrete(std::move(points));
    }
    throw std::invalid_argument("unknown distribution family '" + std::string(family) + "'");
}

double mean_of(const BoundedDistribution& dist) { return dist.mean(); }

StoppingRecord run_inverse_sampling(const BoundedDistribution& dist, double gamma, Rng& rng,
                                    std::uint64_t max_draws) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be a finite positive number");
    StoppingRecord rec;
    double sum = 0.0;
    while (sum < gamma) {
        if (rec.n == max_draws) {
            std::ostringstream msg;
            msg << "inverse sampling exceeded " << max_draws << " draws (sum " << sum << " < gamma " << gamma
                << "); is the distribution mean near zero?";
            throw SamplingGuardError(msg.str());
        }
        const double x = dist.draw(rng);
        sum += x;
        rec.last_increment = x;
        ++rec.n;
    }
    rec.final_sum = sum;
    return rec;
}

} // namespace invseq
