#include <doctest.h>

#include <cmath>

#include "mcpmev/errors.hpp"
#include "mcpmev/games.hpp"
#include "mcpmev/rng.hpp"

using namespace mcpmev;
using games::CensorUserParams;
using games::StealParams;
using games::TimingChoice;

namespace {

// Explicit binomial-sum oracle for E[1/(N+1)], N ~ Binomial(m-1, p).
double binom_mean_inverse(double p, int m) {
    double total = 0.0;
    for (int n = 0; n <= m - 1; ++n) {
        double coef = 1.0;
        for (int i = 0; i < n; ++i) coef *= static_cast<double>(m - 1 - i) / (i + 1);
        total += coef * std::pow(p, n) * std::pow(1.0 - p, m - 1 - n) / (n + 1);
    }
    return total;
}

double uni(rng::RngStream& r, double lo, double hi) { return lo + (hi - lo) * r.next_double(); }

}  // namespace

TEST_SUITE("games") {
    TEST_CASE("user utility evaluation") {
        const CensorUserParams p{10.0, 1.0, 1, 0.5};
        CHECK(games::user_utility(0, p) == 0.0);
        CHECK(games::user_utility(3, p) == doctest::Approx(5.75).epsilon(1e-12));
        const CensorUserParams sure{4.0, 1.0, 2, 0.0};
        CHECK(games::user_utility(1, sure) == doctest::Approx(4.0 - 2.0));
    }

    TEST_CASE("optimal broadcast rounds") {
        CHECK(games::optimal_rounds({1.0, 1.0, 1, 0.5}) == 0);
        CHECK(games::optimal_rounds({10.0, 1.0, 1, 0.5}) == 3);
        CHECK(games::optimal_rounds({5.0, 1.0, 1, 0.0}) == 1);
    }

    TEST_CASE("optimal rounds equal brute force on random draws") {
        rng::RngStream r(21, 0);
        for (int i = 0; i < 1000; ++i) {
            CensorUserParams p;
            p.v = std::exp(uni(r, std::log(0.5), std::log(100.0)));
            p.c = std::exp(uni(r, std::log(0.005), std::log(1.0)));
            p.s = 1 + static_cast<int>(r.uniform_below(5));
            p.Q = 0.995 * r.next_double();
            long long best_k = 0;
            double best_u = 0.0;
            for (int k = 1; k <= 10000; ++k) {
                const double u = games::user_utility(k, p);
                if (u > best_u) {
                    best_u = u;
                    best_k = k;
                }
            }
            REQUIRE(games::optimal_rounds(p) == best_k);
        }
    }

    TEST_CASE("heuristic rounds") {
        CHECK(games::heuristic_rounds(10.0, 3.0) == 3);
        CHECK(games::heuristic_rounds(1.0, 1.0) == 1);
        CHECK(games::heuristic_rounds(2.5, 1.0) == 2);
        CHECK_THROWS_AS(games::heuristic_rounds(0.0, 1.0), DomainError);
    }

    TEST_CASE("steal profitability threshold is strict") {
        CHECK(games::steal_profitable({0.3, 0.2, 4.0, 10.0, 0.0, 1}));
        CHECK_FALSE(games::steal_profitable({0.3, 0.2, 4.0, 8.0, 0.0, 1}));  // boundary
        CHECK_FALSE(games::steal_profitable({0.0, 0.0, 1.0, 100.0, 0.0, 1}));
    }

    TEST_CASE("mixed equilibrium boundaries and the hand-checked interior") {
        // Single thief with a profitable steal always attempts.
        CHECK(games::steal_mixed_equilibrium({0.5, 0.0, 0.1, 1.0, 0.0, 1}) == 1.0);
        // g(p) = 0.25 - 0.5 p has the root 0.5.
        const StealParams sp{0.6, 0.4, 0.75, 1.0, 0.0, 2};
        CHECK(games::steal_mixed_equilibrium(sp) == doctest::Approx(0.5).epsilon(1e-10));
        // No profitable attempt.
        CHECK(games::steal_mixed_equilibrium({0.2, 0.0, 5.0, 1.0, 0.0, 3}) == 0.0);
    }

    TEST_CASE("closed-form mean inverse matches the binomial sum") {
        for (int m = 1; m <= 20; ++m)
            for (double p = 0.0; p <= 1.0; p += 0.125)
                CHECK(games::mean_inverse_attempters(p, m) ==
                      doctest::Approx(binom_mean_inverse(p, m)).epsilon(1e-12));
    }

    TEST_CASE("equilibrium root is tight at interior solutions") {
        rng::RngStream r(22, 0);
        for (int i = 0; i < 300; ++i) {
            StealParams sp;
            const double win = uni(r, 0.2, 1.0);
            sp.sigma = 0.5 * win;
            sp.rho = 0.5 * win;
            sp.tau = uni(r, 0.5, 10.0);
            sp.m = 2 + static_cast<int>(r.uniform_below(6));
            const double w = win * sp.prize();
            sp.phi = w * (1.0 / sp.m + (1.0 - 1.0 / sp.m) * uni(r, 0.05, 0.95));
            const double p = games::steal_mixed_equilibrium(sp);
            const double g = w * games::mean_inverse_attempters(p, sp.m) - sp.phi;
            CHECK(std::fabs(g) <= 1e-10);
        }
    }

    TEST_CASE("anti-steal multiplicity") {
        CHECK(games::anti_steal_multiplicity(10.0, 3.0) == 3);
        CHECK(games::anti_steal_multiplicity(1.0, 2.0) == 0);
        CHECK(games::anti_steal_multiplicity(10.0, 5.0) == 2);  // 10/2 = 5 is not < 5
        CHECK_THROWS_AS(games::anti_steal_multiplicity(1.0, 0.0), DomainError);
        // Scan oracle on random draws: returned n is minimal.
        rng::RngStream r(23, 0);
        for (int i = 0; i < 200; ++i) {
            const double tau = uni(r, 0.01, 50.0);
            const double phi = uni(r, 0.01, 10.0);
            const long long n = games::anti_steal_multiplicity(tau, phi);
            CHECK(tau / static_cast<double>(n + 1) < phi);
            if (n > 0) CHECK(tau / static_cast<double>(n) >= phi);
        }
    }

    TEST_CASE("snipe best response") {
        const auto p = games::TimingParams::linear(1.0, 0.0, 0.4, 0.8);
        CHECK(games::snipe_best_response(p, 0.6) == TimingChoice::Wait);
        CHECK(games::snipe_best_response(p, 0.5) == TimingChoice::Indifferent);
        CHECK(games::snipe_best_response(p, 0.0) == TimingChoice::SendNow);
    }

    TEST_CASE("deadline: hand case, limit case, degenerate case") {
        const auto p = games::TimingParams::linear(1.0, 0.0, 0.4, 0.8);
        CHECK(games::deadline(p) == doctest::Approx(0.5).epsilon(1e-10));
        const auto limit = games::TimingParams::linear(1.0, 0.0, 0.0, 0.999999);
        CHECK(games::deadline(limit) == doctest::Approx(1.0).epsilon(1e-6));
        auto degenerate = games::TimingParams::linear(1.0, 0.0, 0.4, 0.8);
        degenerate.w = 1.5;  // W <= w
        CHECK_THROWS_AS(games::deadline(degenerate), NoRoot);
        auto no_advantage = games::TimingParams::linear(1.0, 0.0, 0.5, 0.4);
        CHECK_THROWS_AS(games::deadline(no_advantage), NoRoot);
    }

    TEST_CASE("deadline splits wait and send regions") {
        const auto p = games::TimingParams::exponential(2.0, 0.4, 0.3, 0.9, 2.0);
        const double sbar = games::deadline(p);
        const double snipe_val = 0.9 * 2.0 + 0.1 * 0.4;
        const double now_val = 0.3 * 2.0 + 0.7 * 0.4;
        for (double s = 0.0; s < sbar - 1e-6; s += sbar / 7.0)
            CHECK(p.rho_b(s) * snipe_val - now_val > 0.0);
        for (double s = sbar + 1e-6; s <= 1.0; s += (1.0 - sbar) / 7.0)
            CHECK(p.rho_b(s) * snipe_val - now_val < 0.0);
    }
}
