#include <doctest.h>

#include <cmath>
#include <vector>

#include "mcpmev/auction.hpp"
#include "mcpmev/errors.hpp"
#include "mcpmev/rng.hpp"

using namespace mcpmev;

TEST_SUITE("auction") {
    TEST_CASE("uniform reserve") {
        CHECK(auction::uniform_reserve(1.0) == 0.5);
        CHECK(auction::uniform_reserve(8.0) == 4.0);
        CHECK_THROWS_AS(auction::uniform_reserve(0.0), DomainError);
    }

    TEST_CASE("uniform revenue closed form") {
        CHECK(auction::uniform_revenue(1.0, 0.5, 1) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(auction::uniform_revenue(1.0, 0.5, 2) ==
              doctest::Approx(5.0 / 12.0).epsilon(1e-12));
        CHECK(auction::uniform_revenue(1.0, 0.0, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK_THROWS_AS(auction::uniform_revenue(1.0, 1.5, 2), DomainError);
    }

    TEST_CASE("optimal revenue values and identities") {
        CHECK(auction::uniform_opt_revenue(1.0, 1) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(auction::uniform_opt_revenue(1.0, 2) ==
              doctest::Approx(5.0 / 12.0).epsilon(1e-12));
        CHECK(auction::uniform_opt_revenue(1.0, 5) == doctest::Approx(0.671875).epsilon(1e-12));
        for (int m = 1; m <= 30; ++m) {
            CHECK(auction::uniform_opt_revenue(1.0, m) ==
                  doctest::Approx(auction::uniform_revenue(1.0, 0.5, m)).epsilon(1e-12));
            CHECK(auction::uniform_opt_revenue(1.0, m) >
                  auction::uniform_revenue(1.0, 0.0, m));
        }
    }

    TEST_CASE("grid argmax of the revenue curve sits at vbar/2") {
        for (int m : {1, 2, 5}) {
            double best_r = 0.0, best = -1.0;
            const int steps = 2000;
            for (int i = 0; i <= steps; ++i) {
                const double r = static_cast<double>(i) / steps;
                const double rev = auction::uniform_revenue(1.0, r, m);
                if (rev > best) {
                    best = rev;
                    best_r = r;
                }
            }
            CHECK(std::fabs(best_r - 0.5) <= 1.0 / steps);
        }
    }

    TEST_CASE("Monte Carlo second-price-with-reserve agrees with the formula") {
        rng::RngStream r(31, 0);
        const int trials = 200000;
        for (int m : {1, 2, 5}) {
            double sum = 0.0, sumsq = 0.0;
            for (int t = 0; t < trials; ++t) {
                double v1 = 0.0, v2 = 0.0;
                for (int j = 0; j < m; ++j) {
                    const double v = r.next_double();
                    if (v > v1) {
                        v2 = v1;
                        v1 = v;
                    } else if (v > v2) {
                        v2 = v;
                    }
                }
                const double rev = v1 >= 0.5 ? std::max(v2, 0.5) : 0.0;
                sum += rev;
                sumsq += rev * rev;
            }
            const double mean = sum / trials;
            const double se = std::sqrt((sumsq / trials - mean * mean) / trials);
            CHECK(std::fabs(mean - auction::uniform_revenue(1.0, 0.5, m)) <= 3.0 * se);
        }
    }

    TEST_CASE("numeric optimal-auction revenue on the uniform distribution") {
        for (int m : {1, 2, 5}) {
            auction::AuctionSpec spec;
            spec.m = m;
            spec.dist = {[](double v) { return v; }, [](double) { return 1.0; }, 1.0};
            CHECK(auction::myerson_revenue_numeric(spec, {1e-10, 1e-10, 200}) ==
                  doctest::Approx(auction::uniform_opt_revenue(1.0, m)).epsilon(1e-6));
        }
    }

    TEST_CASE("numeric path rejects irregular distributions") {
        auction::AuctionSpec spec;
        spec.m = 2;
        // Point mass: zero density away from the atom.
        spec.dist = {[](double v) { return v < 0.5 ? 0.0 : 1.0; }, [](double) { return 0.0; },
                     1.0};
        CHECK_THROWS_AS(auction::myerson_revenue_numeric(spec), NotRegular);
    }

    TEST_CASE("keep versus auction") {
        const hazard::HazardParams hz{1.0, 1.0, 1.0, 1.0};
        std::vector<double> grid;
        for (int i = 0; i <= 40; ++i) grid.push_back(0.1 * i);

        const auto zero = auction::keep_vs_auction(0.5, hz, [](double) { return 0.0; }, grid);
        CHECK(zero.choice == auction::SellerChoice::Keep);

        const double m_tau = hazard::envelope(0.5, hz);
        const auto rich =
            auction::keep_vs_auction(0.5, hz, [&](double) { return m_tau + 1.0; }, grid);
        CHECK(rich.choice == auction::SellerChoice::Auction);
        CHECK(rich.value == doctest::Approx(m_tau + 1.0));

        // Identical deterministic bidder values: posted price ties keep at tau
        // when immediate inclusion is already optimal.
        const double tau = 2.0;
        const auto posted = auction::keep_vs_auction(
            tau, hz, [&](double a) { return auction::posted_price_revenue(tau, a, hz); }, grid);
        CHECK(posted.choice == auction::SellerChoice::Keep);
        CHECK(posted.value == doctest::Approx(tau));
        CHECK(posted.auction_value == doctest::Approx(tau));
    }

    TEST_CASE("posted price revenue") {
        const hazard::HazardParams hz{1.0, 1.0, 1.0, 1.0};
        CHECK(auction::posted_price_revenue(3.0, 0.0, hz) == 3.0);
        CHECK(auction::posted_price_revenue(1.0, std::log(2.0), hz) ==
              doctest::Approx(0.5).epsilon(1e-12));
        CHECK(auction::posted_price_revenue(0.0, 1.0, hz) == 0.0);
    }

    TEST_CASE("bidder value model") {
        auction::BidderValueModel m;
        m.tau = 1.0;
        m.alpha = std::log(2.0);
        m.hazard = {1.0, 1.0, 1.0, 1.0};
        // e^{-lambda alpha} tau + accrual = 0.5 + 0.375.
        CHECK(m.base_value() == doctest::Approx(0.875).epsilon(1e-12));
        rng::RngStream r(71, 0);
        CHECK(m.sample_value(r) == doctest::Approx(0.875).epsilon(1e-12));
        m.mev_bonus_dist = [](rng::RngStream& s) { return 0.2 * s.next_double(); };
        const double v = m.sample_value(r);
        CHECK(v >= 0.5);
        CHECK(v <= 0.7);
    }
}
