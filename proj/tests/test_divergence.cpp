#include "invseq/divergence.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace invseq;
using Catch::Approx;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kLevel = std::log(0.025) / 10.0; // gamma = 10, delta = 0.05

std::vector<double> grid(double lo, double hi, int points) {
    std::vector<double> xs;
    for (int i = 0; i < points; ++i) xs.push_back(lo + (hi - lo) * (i + 0.5) / points);
    return xs;
}

} // namespace

TEST_CASE("divergence values", "[divergence]") {
    CHECK(h_divergence(0.3, 0.3) == 0.0);
    CHECK_THAT(h_divergence(0.5, 0.25), WithinAbs(-0.28768207245178093, 1e-15));
    CHECK_THAT(h_divergence(0.5, 0.25), WithinAbs(oracle::divergence(0.5, 0.25), 1e-15));
    CHECK(h_divergence(1.0, 0.4) == std::log(0.4));
    CHECK_THAT(h_divergence(0.75, 0.5), WithinAbs(-0.17441604792151595, 1e-15));
}

TEST_CASE("divergence matches the high-precision definition", "[divergence]") {
    for (double z : grid(0.0, 1.0, 40)) {
        for (double mu : grid(0.0, 1.0, 40)) {
            const double want = oracle::divergence(z, mu);
            CHECK_THAT(h_divergence(z, mu), WithinAbs(want, 1e-13 * std::max(1.0, std::abs(want))));
        }
    }
}

TEST_CASE("divergence rejects arguments outside its domain", "[divergence]") {
    CHECK_THROWS_AS(h_divergence(0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(h_divergence(-0.1, 0.5), std::domain_error);
    CHECK_THROWS_AS(h_divergence(1.01, 0.5), std::domain_error);
    CHECK_THROWS_AS(h_divergence(0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(h_divergence(0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(h_divergence(0.5, std::nan("")), std::domain_error);
    CHECK_THROWS_AS(h_partial_mu(1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(h_partial_mu(0.5, 1.0), std::domain_error);
}

TEST_CASE("partial derivative in mu", "[divergence]") {
    CHECK(h_partial_mu(0.5, 0.5) == 0.0);
    CHECK_THAT(h_partial_mu(0.5, 0.25), WithinRel(8.0 / 3.0, 1e-14));
    CHECK_THAT(h_partial_mu(0.25, 0.5), WithinRel(-4.0, 1e-14));
}

TEST_CASE("partial derivative agrees with finite differences", "[divergence][property]") {
    for (double z : grid(0.05, 0.95, 30)) {
        for (double mu : grid(0.05, 0.95, 30)) {
            const double fd = oracle::divergence_slope(z, mu, 1e-6);
            const double d = h_partial_mu(z, mu);
            if (std::abs(d) < 1e-3) {
                CHECK_THAT(d, WithinAbs(fd, 1e-8));
            } else {
                CHECK_THAT(d, WithinRel(fd, 1e-6));
            }
            if (mu > z) CHECK(d < 0.0);
            if (mu < z) CHECK(d > 0.0);
        }
    }
}

TEST_CASE("divergence is nonpositive and vanishes only on the diagonal", "[divergence][property]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
    for (int i = 0; i < 5000; ++i) {
        const double z = u(rng);
        const double mu = u(rng);
        const double h = h_divergence(z, mu);
        CHECK(h <= 0.0);
        if (std::abs(z - mu) > 1e-6) CHECK(h < 0.0);
    }
    for (double mu : grid(0.0, 1.0, 50)) CHECK(h_divergence(1.0, mu) < 0.0);
}

TEST_CASE("divergence is unimodal in mu around z", "[divergence][property]") {
    for (double z : {0.05, 0.3, 0.5, 0.77, 0.95}) {
        const auto above = grid(z, 1.0, 200);
        for (std::size_t i = 1; i < above.size(); ++i) CHECK(h_divergence(z, above[i - 1]) > h_divergence(z, above[i]));
        const auto below = grid(0.0, z, 200);
        for (std::size_t i = 1; i < below.size(); ++i) CHECK(h_divergence(z, below[i - 1]) < h_divergence(z, below[i]));
    }
}

TEST_CASE("relative-deviation maps are decreasing in epsilon", "[divergence][property]") {
    for (double mu : {0.1, 0.5, 0.9}) {
        // H((1 + e) mu, mu) on (0, 1/mu - 1) and H((1 - e) mu, mu) on (0, 1).
        const auto up = grid(0.0, 1.0 / mu - 1.0, 100);
        for (std::size_t i = 1; i < up.size(); ++i) {
            CHECK(h_divergence((1 + up[i - 1]) * mu, mu) > h_divergence((1 + up[i]) * mu, mu));
        }
        const auto down = grid(0.0, 1.0, 100);
        for (std::size_t i = 1; i < down.size(); ++i) {
            CHECK(h_divergence((1 - down[i - 1]) * mu, mu) > h_divergence((1 - down[i]) * mu, mu));
        }
        for (double gamma : {5.0, 10.0}) {
            auto arg = [&](double e) { return gamma / (gamma / (mu * (1 - e)) - 1); };
            const auto eps = grid(mu / (gamma + mu), 1.0, 100);
            for (std::size_t i = 1; i < eps.size(); ++i) {
                CHECK(h_divergence(arg(eps[i - 1]), mu) > h_divergence(arg(eps[i]), mu));
            }
        }
    }
}

TEST_CASE("root above z", "[divergence][solver]") {
    const auto r = solve_mu_above(0.5, kLevel);
    CHECK_THAT(r.root, WithinAbs(oracle::half_root_above(kLevel), 1e-11));
    CHECK_THAT(r.root, WithinAbs(0.77771257975592356, 1e-11));
    CHECK(r.diagnostics.residual <= 1e-10);
    CHECK(r.diagnostics.bracket_width <= 1e-12);
    CHECK(r.diagnostics.iterations > 0);
    CHECK(r.diagnostics.iterations <= 200);

    const auto near = solve_mu_above(0.5, -1e-15);
    CHECK(near.root > 0.5);
    CHECK(near.root - 0.5 < 1e-7);

    // 1 - root is about 1e-21 here: the root rounds to 1, its complement does not.
    const auto steep = solve_mu_above(0.9, -5.0);
    CHECK(steep.complement > 0.0);
    CHECK(steep.complement < 0.1);
    CHECK(steep.complement < 1e-20);
    CHECK(steep.root == 1.0);
    CHECK(steep.diagnostics.residual <= 1e-10);
    CHECK(std::abs(oracle::divergence_at_complement(0.9, steep.complement) + 5.0) <= 1e-10);

    const auto moderate = solve_mu_above(0.9, -3.0);
    CHECK(moderate.root > 0.9);
    CHECK(moderate.root < 1.0);
    CHECK(std::abs(oracle::divergence_at_complement(0.9, moderate.complement) + 3.0) <= 1e-10);
    CHECK(std::abs(moderate.complement - (1.0 - moderate.root)) <= 1e-16);
}

TEST_CASE("root below z", "[divergence][solver]") {
    const auto r = solve_mu_below(0.5, kLevel);
    CHECK_THAT(r.root, WithinAbs(oracle::half_root_below(kLevel), 1e-11));
    CHECK_THAT(r.root, WithinAbs(0.22228742024407644, 1e-11));
    CHECK(r.diagnostics.residual <= 1e-10);

    const auto at_one = solve_mu_below(1.0, kLevel);
    CHECK_THAT(at_one.root, WithinAbs(0.69150289218123918, 1e-15));
    CHECK(at_one.diagnostics.iterations == 0);

    const auto near = solve_mu_below(0.5, -1e-15);
    CHECK(near.root < 0.5);
    CHECK(0.5 - near.root < 1e-7);
}

TEST_CASE("solver rejects bad levels and arguments", "[divergence][solver]") {
    CHECK_THROWS_AS(solve_mu_above(0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(solve_mu_above(0.5, 0.1), std::domain_error);
    CHECK_THROWS_AS(solve_mu_above(1.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(solve_mu_below(0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(solve_mu_below(0.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(solve_mu_below(0.5, -INFINITY), std::domain_error);
    // 1 - root is near exp(-3e5), below the smallest positive double.
    CHECK_THROWS_AS(solve_mu_above(0.9999, -31.0), RootUnderflowError);
}

TEST_CASE("solver residual and bracket hold on random inputs", "[divergence][solver][property]") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> uz(1e-4, 1.0 - 1e-4);
    std::uniform_real_distribution<double> ulog(-12.0, 1.5);
    for (int i = 0; i < 3000; ++i) {
        const double z = uz(rng);
        const double c = -std::pow(10.0, ulog(rng));
        if (oracle::divergence_at_complement(z, std::numeric_limits<double>::denorm_min()) < c) {
            const auto hi = solve_mu_above(z, c);
            CHECK(hi.root > z);
            CHECK(hi.root <= 1.0);
            CHECK(hi.complement > 0.0);
            CHECK(hi.complement < 1.0 - z);
            CHECK(std::abs(oracle::divergence_at_complement(z, hi.complement) - c) <= 1e-10);
        } else {
            CHECK_THROWS_AS(solve_mu_above(z, c), RootUnderflowError);
        }
        const auto lo = solve_mu_below(z, c);
        CHECK(lo.root > 0.0);
        CHECK(lo.root < z);
        CHECK(std::abs(h_divergence(z, lo.root) - c) <= 1e-10);
    }
}

TEST_CASE("hoeffding tail bound", "[divergence]") {
    CHECK_THAT(hoeffding_tail_bound(1, 0.5, 0.25), WithinRel(0.86602540378443865, 1e-14));
    CHECK_THAT(hoeffding_tail_bound(100, 0.5, 0.25), WithinRel(5.6632165642693762e-7, 1e-12));
    CHECK(hoeffding_tail_bound(37, 0.4, 0.4) == 1.0);
    CHECK(hoeffding_tail_bound(1000, 0.4, 0.4 + 1e-12) == Approx(1.0));
    CHECK_THROWS_AS(hoeffding_tail_bound(0, 0.5, 0.25), std::domain_error);
    CHECK_THROWS_AS(hoeffding_tail_bound(1, 1.0, 0.25), std::domain_error);
}
