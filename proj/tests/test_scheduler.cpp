#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "mcpmev/errors.hpp"
#include "mcpmev/rng.hpp"
#include "mcpmev/scheduler.hpp"

using namespace mcpmev;
using sched::ProposerRank;
using sched::Tx;

namespace {

Tx make_tx(std::string id, std::uint64_t tip, std::string proposer,
           std::vector<std::string> deps = {}, std::uint64_t hash = 0) {
    Tx tx;
    tx.id = id;
    tx.logical_id = id;
    tx.tip = tip;
    tx.proposer = std::move(proposer);
    tx.deps = std::move(deps);
    tx.tie_hash = hash;
    return tx;
}

const ProposerRank kTwoRanks{{{"P1", 1}, {"P2", 2}}};

}  // namespace

TEST_SUITE("scheduler") {
    TEST_CASE("siphash reference vectors") {
        // Official vectors: key 000102...0f, message 00 01 02 ...
        const std::uint64_t k0 = 0x0706050403020100ULL;
        const std::uint64_t k1 = 0x0f0e0d0c0b0a0908ULL;
        CHECK(sched::siphash24(k0, k1, "") == 0x726fdb47dd0e0e31ULL);
        const char one[] = {0};
        CHECK(sched::siphash24(k0, k1, std::string_view(one, 1)) == 0x74f839c593dc67fdULL);
        const char eight[] = {0, 1, 2, 3, 4, 5, 6, 7};
        CHECK(sched::siphash24(k0, k1, std::string_view(eight, 8)) == 0x93f5f5799a932462ULL);
    }

    TEST_CASE("tie hash is deterministic with pinned golden values") {
        CHECK(sched::tie_hash("test", "a", 0) == 0x97849f27491336d7ULL);
        CHECK(sched::tie_hash("test", "a", 1) == 0x8115ede44797418eULL);
        CHECK(sched::tie_hash("epoch7", "user42", 7) == 0x05a46e241d9e7420ULL);
        CHECK(sched::tie_hash("test", "a", 0) == sched::tie_hash("test", "a", 0));
        CHECK(sched::tie_hash("test", "a", 0) != sched::tie_hash("test", "a", 1));
        CHECK(sched::tie_hash("test", "a", 0) != sched::tie_hash("test", "b", 0));
    }

    TEST_CASE("priority key ordering") {
        const auto key = [&](const Tx& tx) { return sched::priority_key(tx, kTwoRanks); };
        CHECK(key(make_tx("a", 7, "P1")).before(key(make_tx("b", 5, "P1"))));
        CHECK(key(make_tx("a", 5, "P1")).before(key(make_tx("b", 5, "P2"))));

        Tx early = make_tx("a", 5, "P1");
        early.t_da = 0.1;
        Tx late = make_tx("b", 5, "P1");
        late.t_da = 0.2;
        CHECK(sched::priority_key(early, kTwoRanks).before(sched::priority_key(late, kTwoRanks)));

        const Tx high_hash = make_tx("a", 5, "P1", {}, 900);
        const Tx low_hash = make_tx("b", 5, "P1", {}, 100);
        CHECK(key(high_hash).before(key(low_hash)));

        CHECK_THROWS_AS(key(make_tx("a", 1, "P9")), UnknownProposer);
    }

    TEST_CASE("mixed timestamp presence is rejected") {
        Tx a = make_tx("a", 1, "P1");
        a.t_da = 0.5;
        const Tx b = make_tx("b", 1, "P1");
        const std::vector<Tx> txs = {a, b};
        CHECK_THROWS_AS(sched::priority_keys(txs, kTwoRanks), MixedTimestampPresence);
        CHECK_THROWS_AS(sched::pdm_merge(txs, kTwoRanks), MixedTimestampPresence);
    }

    TEST_CASE("ranks must form a permutation") {
        CHECK_THROWS_AS(ProposerRank({{"P1", 1}, {"P2", 3}}), DomainError);
        CHECK_THROWS_AS(ProposerRank({{"P1", 2}, {"P2", 2}}), DomainError);
    }

    TEST_CASE("independent transactions sort by tip") {
        const std::vector<Tx> txs = {make_tx("a", 5, "P1"), make_tx("b", 3, "P1"),
                                     make_tx("c", 7, "P2")};
        const auto res = sched::pdm_merge(txs, kTwoRanks);
        CHECK(res.order == std::vector<std::string>{"c", "a", "b"});
        CHECK(res.rejected.empty());
    }

    TEST_CASE("dependencies gate eligibility") {
        // b pays more but depends on a; c runs first despite b's higher tip.
        const std::vector<Tx> txs = {make_tx("a", 1, "P1"), make_tx("b", 9, "P1", {"a"}),
                                     make_tx("c", 5, "P2")};
        const auto res = sched::pdm_merge(txs, kTwoRanks);
        CHECK(res.order == std::vector<std::string>{"c", "a", "b"});
    }

    TEST_CASE("cycles are rejected along with dependents") {
        std::vector<Tx> txs = {make_tx("a", 5, "P1", {"b"}), make_tx("b", 6, "P1", {"a"}),
                               make_tx("c", 1, "P2")};
        auto res = sched::pdm_merge(txs, kTwoRanks);
        CHECK(res.order == std::vector<std::string>{"c"});
        CHECK(res.rejected == std::vector<std::string>{"a", "b"});

        txs.push_back(make_tx("d", 9, "P2", {"a"}));  // depends on the cycle
        res = sched::pdm_merge(txs, kTwoRanks);
        CHECK(res.rejected == std::vector<std::string>{"a", "b", "d"});

        // Self-dependency is a one-node cycle.
        const std::vector<Tx> self = {make_tx("s", 2, "P1", {"s"})};
        CHECK(sched::pdm_merge(self, kTwoRanks).rejected == std::vector<std::string>{"s"});
    }

    TEST_CASE("unresolved references reject the referrer and its dependents") {
        const std::vector<Tx> txs = {make_tx("a", 5, "P1", {"ghost"}),
                                     make_tx("b", 4, "P1", {"a"}), make_tx("c", 1, "P2")};
        const auto res = sched::pdm_merge(txs, kTwoRanks);
        CHECK(res.order == std::vector<std::string>{"c"});
        CHECK(res.rejected == std::vector<std::string>{"a", "b"});
    }

    TEST_CASE("duplicate ids are an error") {
        const std::vector<Tx> txs = {make_tx("a", 1, "P1"), make_tx("a", 1, "P2")};
        CHECK_THROWS_AS(sched::pdm_merge(txs, kTwoRanks), DuplicateId);
    }

    TEST_CASE("tip split across duplicate copies") {
        Tx a = make_tx("x.1", 10, "P1");
        a.logical_id = "x";
        Tx b = make_tx("x.2", 10, "P2");
        b.logical_id = "x";
        const std::vector<Tx> txs = {a, b};
        const auto res = sched::pdm_merge(txs, kTwoRanks);
        CHECK(res.order.size() == 1);
        CHECK(res.order[0] == "x.1");  // equal tip, P1 outranks P2
        CHECK(res.executed.at("x") == "x.1");
        CHECK(res.pruned == std::vector<std::string>{"x.2"});
        CHECK(res.payouts.at("P1") == 5);
        CHECK(res.payouts.at("P2") == 5);
        CHECK(res.burned == 0);
        CHECK(res.duplicate_counts.at("x") == 2);
    }

    TEST_CASE("three-way split conserves exactly") {
        const ProposerRank ranks({{"P1", 1}, {"P2", 2}, {"P3", 3}});
        std::vector<Tx> txs;
        for (int i = 0; i < 3; ++i) {
            Tx t = make_tx("x." + std::to_string(i), 9, "P" + std::to_string(i + 1));
            t.logical_id = "x";
            txs.push_back(t);
        }
        const auto res = sched::pdm_merge(txs, ranks);
        for (const auto& [prop, units] : res.payouts) CHECK(units == 3);
        CHECK(res.burned == 0);

        // 10 units over 3 copies: 3 each plus one burned unit.
        for (Tx& t : txs) t.tip = 10;
        const auto res2 = sched::pdm_merge(txs, ranks);
        std::uint64_t total = res2.burned;
        for (const auto& [prop, units] : res2.payouts) total += units;
        CHECK(res2.burned == 1);
        CHECK(total == 10);
    }

    TEST_CASE("single copy keeps the full tip") {
        const std::vector<Tx> txs = {make_tx("a", 7, "P2")};
        const auto res = sched::pdm_merge(txs, kTwoRanks);
        CHECK(res.payouts.at("P2") == 7);
        CHECK(res.burned == 0);
    }

    TEST_CASE("duplicates with inconsistent tips or deps are errors") {
        Tx a = make_tx("x.1", 10, "P1");
        a.logical_id = "x";
        Tx b = make_tx("x.2", 11, "P2");
        b.logical_id = "x";
        CHECK_THROWS_AS(sched::pdm_merge(std::vector{a, b}, kTwoRanks),
                        InconsistentDuplicateTips);

        b.tip = 10;
        b.deps = {"a"};
        const std::vector<Tx> txs = {make_tx("a", 1, "P1"), a, b};
        CHECK_THROWS_AS(sched::pdm_merge(txs, kTwoRanks), InconsistentDuplicateDeps);
    }

    TEST_CASE("permutation invariance on random DAGs") {
        rng::RngStream r(61, 0);
        for (int iter = 0; iter < 100; ++iter) {
            const int n = 2 + static_cast<int>(r.uniform_below(60));
            std::vector<Tx> txs;
            for (int i = 0; i < n; ++i) {
                Tx t = make_tx("n" + std::to_string(i), r.uniform_below(50),
                               i % 2 == 0 ? "P1" : "P2", {}, r.next_u64());
                txs.push_back(t);
            }
            const int edges = static_cast<int>(r.uniform_below(2 * n));
            for (int e = 0; e < edges; ++e) {
                const int j = 1 + static_cast<int>(r.uniform_below(n - 1));
                const int i = static_cast<int>(r.uniform_below(j));
                txs[j].deps.push_back("n" + std::to_string(i));
            }
            const auto base = sched::pdm_merge(txs, kTwoRanks);
            for (int p = 0; p < 10; ++p) {
                for (std::size_t j = txs.size(); j > 1; --j)
                    std::swap(txs[j - 1], txs[r.uniform_below(j)]);
                const auto again = sched::pdm_merge(txs, kTwoRanks);
                REQUIRE(again.order == base.order);
                REQUIRE(again.payouts == base.payouts);
            }
        }
    }

    TEST_CASE("merge cost scales like X log X + E") {
        const auto run_once = [](int n) {
            std::vector<Tx> txs;
            txs.reserve(static_cast<std::size_t>(n));
            rng::RngStream r(62, static_cast<std::uint64_t>(n));
            for (int i = 0; i < n; ++i) {
                Tx t = make_tx("n" + std::to_string(i), r.uniform_below(1000),
                               i % 2 == 0 ? "P1" : "P2", {}, r.next_u64());
                txs.push_back(std::move(t));
            }
            const int edges = 2 * n;
            for (int e = 0; e < edges; ++e) {
                const int j = 1 + static_cast<int>(r.uniform_below(n - 1));
                const int i = static_cast<int>(r.uniform_below(j));
                txs[static_cast<std::size_t>(j)].deps.push_back("n" + std::to_string(i));
            }
            const auto t0 = std::chrono::steady_clock::now();
            const auto res = sched::pdm_merge(txs, kTwoRanks);
            const auto t1 = std::chrono::steady_clock::now();
            CHECK(res.order.size() == static_cast<std::size_t>(n));
            return std::chrono::duration<double>(t1 - t0).count();
        };
        const auto cost = [](int n) {
            return n * std::log2(static_cast<double>(n)) + 2.0 * n;
        };
        const auto median3 = [&](int n) {
            double a = run_once(n), b = run_once(n), c = run_once(n);
            return std::max(std::min(a, b), std::min(std::max(a, b), c));
        };
        const double small = median3(12500);
        const double big = median3(100000);
        const double predicted = small * cost(100000) / cost(12500);
        CHECK(big < 2.5 * predicted);
        CHECK(big < 5.0);  // absolute sanity
    }
}
