#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mcpmev/errors.hpp"
#include "mcpmev/poa.hpp"
#include "mcpmev/sim.hpp"

using namespace mcpmev;
using sim::TickConfig;

namespace {

TickConfig single_proposer() {
    TickConfig cfg;
    cfg.proposers = {{"P0", 1, 1.0, 1e9, 0.0, 0.0}};
    cfg.ell = 1;
    cfg.txs.count = 20;
    cfg.txs.tip_lo = 1;
    cfg.txs.tip_hi = 50;
    return cfg;
}

std::string fingerprint(const sim::TickOutcome& out) {
    std::ostringstream os;
    for (const auto& id : out.merge.order) os << id << '|';
    for (const auto& [p, u] : out.merge.payouts) os << p << '=' << u << '|';
    for (const auto& p : out.made_tick) os << p << '|';
    os << out.merge.burned;
    return os.str();
}

}  // namespace

TEST_SUITE("sim") {
    TEST_CASE("degenerate tick executes everything and pays full tips") {
        TickConfig cfg = single_proposer();
        cfg.txs.tip_lo = 10;
        cfg.txs.tip_hi = 10;
        const auto out = sim::run_tick(cfg, rng::RngStream(7, 0));
        CHECK(out.made_tick.count("P0") == 1);
        CHECK(static_cast<int>(out.merge.order.size()) == cfg.txs.count);
        CHECK(out.merge.rejected.empty());
        for (const auto& [id, ev] : out.events) {
            (void)id;
            CHECK(ev.made_tick);
        }
        CHECK(out.merge.burned == 0);
        CHECK(out.merge.payouts.at("P0") ==
              10ull * static_cast<std::uint64_t>(cfg.txs.count));
    }

    TEST_CASE("zero budgets leave the merge empty") {
        TickConfig cfg = single_proposer();
        cfg.proposers[0].budget = 0.0;
        const auto out = sim::run_tick(cfg, rng::RngStream(7, 0));
        CHECK(out.made_tick.empty());
        CHECK(out.merge.order.empty());
        CHECK(out.merge.payouts.empty());
    }

    TEST_CASE("duplicate submissions execute once and split the tip") {
        TickConfig cfg;
        cfg.proposers = {{"A", 1, 1.0, 1e9, 0.0, 0.0}, {"B", 2, 1.0, 1e9, 0.0, 0.0}};
        cfg.ell = 1;
        cfg.txs.count = 10;
        cfg.txs.tip_lo = 9;
        cfg.txs.tip_hi = 9;
        cfg.txs.submissions = 2;
        const auto out = sim::run_tick(cfg, rng::RngStream(8, 0));
        CHECK(static_cast<int>(out.merge.executed.size()) == cfg.txs.count);
        CHECK(static_cast<int>(out.merge.order.size()) == cfg.txs.count);
        for (const auto& [logical, m] : out.merge.duplicate_counts) {
            (void)logical;
            CHECK(m == 2);
        }
        // 9 units split over 2 copies: 4 each, 1 burned, exact conservation.
        std::uint64_t paid = out.merge.burned;
        for (const auto& [prop, units] : out.merge.payouts) {
            (void)prop;
            paid += units;
        }
        CHECK(paid == 9ull * static_cast<std::uint64_t>(cfg.txs.count));
        CHECK(out.merge.burned == static_cast<std::uint64_t>(cfg.txs.count));
        CHECK(out.merge.payouts.at("A") + out.merge.payouts.at("B") ==
              8ull * static_cast<std::uint64_t>(cfg.txs.count));
    }

    TEST_CASE("run_tick is reproducible") {
        TickConfig cfg;
        cfg.proposers = {{"A", 2, 1.0, 2.0, 0.1, 0.0},
                         {"B", 1, 2.0, 1.5, 0.2, 0.1},
                         {"C", 3, 0.5, 3.0, 0.0, 0.2}};
        cfg.ell = 2;
        cfg.capacity = 2;
        cfg.txs.count = 40;
        cfg.txs.dep_density = 0.4;
        cfg.txs.submissions = 2;
        cfg.thief = sim::ThiefStrategy::AlwaysSteal;
        cfg.obs_latency = 0.05;
        const auto a = sim::run_tick(cfg, rng::RngStream(99, 5));
        const auto b = sim::run_tick(cfg, rng::RngStream(99, 5));
        CHECK(fingerprint(a) == fingerprint(b));
        const auto c = sim::run_tick(cfg, rng::RngStream(100, 5));
        CHECK(fingerprint(a) != fingerprint(c));  // different seed, different tick
    }

    TEST_CASE("conservation holds across thief and capacity scenarios") {
        TickConfig cfg;
        cfg.proposers = {{"A", 2, 1.0, 2.0, 0.1, 0.0},
                         {"B", 1, 2.0, 1.5, 0.2, 0.1},
                         {"C", 3, 0.5, 3.0, 0.0, 0.2}};
        cfg.ell = 2;
        cfg.txs.count = 30;
        cfg.txs.tip_lo = 7;
        cfg.txs.tip_hi = 7;  // fixed tips make executed value exact
        cfg.txs.dep_density = 0.3;
        cfg.txs.submissions = 2;
        cfg.thief = sim::ThiefStrategy::AlwaysSteal;
        cfg.obs_latency = 0.0;
        for (std::uint64_t s = 0; s < 20; ++s) {
            const auto out = sim::run_tick(cfg, rng::RngStream(3, s));
            std::uint64_t paid = out.merge.burned;
            for (const auto& [prop, units] : out.merge.payouts) {
                (void)prop;
                paid += units;
            }
            CHECK(out.merge.executed.size() == out.merge.duplicate_counts.size());
            CHECK(paid == 7ull * out.merge.executed.size());
        }
    }

    TEST_CASE("sigma and rho estimators: degenerate and limit cases") {
        TickConfig cfg;
        cfg.proposers = {{"victim", 1, 1.0, 2.0, 0.0, 0.0}, {"thief", 2, 1.0, 0.0, 0.0, 0.0}};
        cfg.ell = 2;
        const auto zero = sim::estimate_sigma_rho(cfg, "victim", "thief", 20000,
                                                  rng::RngStream(11, 0));
        CHECK(zero.sigma.mean == 0.0);
        CHECK(zero.rho.mean == 0.0);

        // Victim almost never certifies: rho approaches the thief's own
        // certificate success probability.
        TickConfig slow = cfg;
        slow.proposers = {{"victim", 1, 1e-4, 1.0, 0.0, 0.0}, {"thief", 2, 1.0, 1.5, 0.0, 0.0}};
        const auto est =
            sim::estimate_sigma_rho(slow, "victim", "thief", 200000, rng::RngStream(12, 0));
        const double expect = poa::poa_success(2, 1.0, 1.5);
        CHECK(std::fabs(est.rho.mean - expect) <= 3.0 * est.rho.se + 1e-6);
        CHECK(est.sigma.mean <= 1e-3);
    }

    TEST_CASE("estimators are thread-count invariant") {
        TickConfig cfg;
        cfg.proposers = {{"victim", 1, 1.0, 2.0, 0.0, 0.0}, {"thief", 2, 1.5, 1.0, 0.0, 0.0}};
        cfg.ell = 2;
        const auto one = sim::estimate_sigma_rho(cfg, "victim", "thief", 100000,
                                                 rng::RngStream(13, 0), 1);
        const auto four = sim::estimate_sigma_rho(cfg, "victim", "thief", 100000,
                                                  rng::RngStream(13, 0), 4);
        CHECK(one.sigma.mean == four.sigma.mean);
        CHECK(one.rho.mean == four.rho.mean);

        const auto incl1 = sim::estimate_inclusion(cfg, 2, 100000, rng::RngStream(14, 0), 1);
        const auto incl4 = sim::estimate_inclusion(cfg, 2, 100000, rng::RngStream(14, 0), 4);
        CHECK(incl1.mean == incl4.mean);
    }

    TEST_CASE("inclusion estimator endpoints") {
        TickConfig cfg;
        cfg.proposers = {{"A", 1, 1.0, 1e9, 0.0, 0.0}, {"B", 2, 1.0, 1e9, 0.0, 0.0}};
        cfg.ell = 1;
        CHECK(sim::estimate_inclusion(cfg, 0, 1000, rng::RngStream(15, 0)).mean == 0.0);
        CHECK(sim::estimate_inclusion(cfg, 2, 1000, rng::RngStream(15, 0)).mean == 1.0);
        CHECK_THROWS_AS(sim::estimate_inclusion(cfg, 3, 10, rng::RngStream(15, 0)),
                        ConfigError);
    }

    TEST_CASE("empirical inclusion increments diminish") {
        TickConfig cfg;
        cfg.ell = 2;
        for (int j = 0; j < 5; ++j)
            cfg.proposers.push_back({"P" + std::to_string(j), j + 1, 1.0, 1.5, 0.4, 0.0});
        double prev = 0.0, prev_inc = 2.0;
        for (int k = 1; k <= 4; ++k) {
            const auto est = sim::estimate_inclusion(
                cfg, k, 200000, rng::RngStream(18, 100 * static_cast<std::uint64_t>(k)));
            const double inc = est.mean - prev;
            CHECK(inc < prev_inc);
            CHECK(inc > 0.0);
            prev = est.mean;
            prev_inc = inc;
        }
    }

    TEST_CASE("sigma and rho events are disjoint") {
        TickConfig cfg;
        cfg.proposers = {{"victim", 1, 1.0, 1.0, 0.0, 0.0}, {"thief", 2, 1.0, 1.0, 0.0, 0.0}};
        cfg.ell = 1;
        const auto est =
            sim::estimate_sigma_rho(cfg, "victim", "thief", 100000, rng::RngStream(19, 0));
        CHECK(est.sigma.mean + est.rho.mean <= 1.0);
        CHECK(est.sigma.mean > 0.0);
        CHECK(est.rho.mean > 0.0);
    }

    TEST_CASE("delay objective at zero delay is exact") {
        const hazard::HazardParams hz{1.0, 1.0, 1.0, 1.0};
        const double alphas[] = {0.0, std::log(2.0)};
        const auto rows =
            sim::check_delay_objective(hz, 0.5, alphas, 50000, rng::RngStream(16, 0));
        CHECK(rows[0].sim_mean == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(rows[0].se == 0.0);
        CHECK(std::fabs(rows[1].sim_mean - rows[1].analytic) <= 3.0 * rows[1].se);
        CHECK(rows[1].analytic == doctest::Approx(0.625).epsilon(1e-12));
    }

    TEST_CASE("delay objective saturates without a tip") {
        const hazard::HazardParams hz{1.0, 1.0, 1.0, 1.0};
        const double alphas[] = {8.0};
        const auto rows =
            sim::check_delay_objective(hz, 0.0, alphas, 200000, rng::RngStream(20, 0));
        CHECK(std::fabs(rows[0].sim_mean - 0.5) <= 3.0 * rows[0].se + 1e-3);
        CHECK(rows[0].analytic == doctest::Approx(0.5).epsilon(1e-3));
    }

    TEST_CASE("mixed equilibrium deviations gain nothing") {
        const games::StealParams sp{0.6, 0.4, 0.75, 1.0, 0.0, 2};  // p* = 1/2
        const double devs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
        const auto rows =
            sim::check_mixed_equilibrium(sp, devs, 100000, rng::RngStream(17, 0));
        REQUIRE(rows.size() == 5);
        for (const auto& row : rows) CHECK(row.gain <= 3.0 * row.se + 1e-12);
    }

    TEST_CASE("config validation") {
        TickConfig cfg;
        CHECK_THROWS_AS(sim::run_tick(cfg, rng::RngStream(1, 0)), ConfigError);
        cfg = single_proposer();
        cfg.proposers[0].censor_prob = 1.0;
        CHECK_THROWS_AS(sim::run_tick(cfg, rng::RngStream(1, 0)), ConfigError);
        cfg = single_proposer();
        cfg.ell = 0;
        CHECK_THROWS_AS(sim::run_tick(cfg, rng::RngStream(1, 0)), ConfigError);
        cfg = single_proposer();
        cfg.capacity = 0;
        CHECK_THROWS_AS(sim::run_tick(cfg, rng::RngStream(1, 0)), ConfigError);
    }
}
