#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mcpmev/games.hpp"
#include "mcpmev/hazard.hpp"
#include "mcpmev/rng.hpp"
#include "mcpmev/scheduler.hpp"

namespace mcpmev::sim {

struct ProposerCfg {
    std::string id;
    int rank = 1;
    double mu = 1.0;              // co-signer arrival rate
    double budget = 1.0;          // publish-to-boundary time budget
    double censor_prob = 0.0;
    double publish_latency = 0.0; // receipt-to-DD-publish delay
};

struct WorkloadSpec {
    int count = 0;
    std::uint64_t tip_lo = 1;
    std::uint64_t tip_hi = 100;
    double dep_density = 0.0;   // chance a tx depends on an earlier one
    int submissions = 1;        // copies per logical tx, distinct proposers
};

enum class ThiefStrategy { None, AlwaysSteal, MixedEq };

struct TickConfig {
    std::vector<ProposerCfg> proposers;
    int ell = 1;
    std::optional<int> capacity;  // blocks admitted per tick; empty = unlimited
    WorkloadSpec txs;
    ThiefStrategy thief = ThiefStrategy::None;
    double thief_attempt_prob = 0.0;  // attempt probability under MixedEq
    double obs_latency = 0.0;         // victim publish to thief observation
    std::string epoch_seed = "epoch";
    hazard::HazardParams hazard = {};

    void validate() const;
    const ProposerCfg& proposer(const std::string& id) const;
};

struct TxEvent {
    std::string proposer;
    double reveal_time = 0.0;
    bool made_tick = false;
    bool executed = false;
};

struct TickOutcome {
    sched::MergeResult merge;
    std::set<std::string> made_tick;
    std::map<std::string, double> poa_time;  // proposer -> certificate time
    std::map<sched::TxId, TxEvent> events;
};

/// One full tick: uniform tx allocation, censorship, DD publish, PoA race,
/// capacity cut, thief duplication, priority-DAG merge, split payouts.
/// Deterministic given (cfg, stream).
TickOutcome run_tick(const TickConfig& cfg, rng::RngStream stream);

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
    long long trials = 0;
};

struct SigmaRho {
    Estimate sigma;
    Estimate rho;
};

/// Monte Carlo frequencies of the disjoint steal events for a tagged
/// transaction first revealed by `victim`: sigma (both certify in the tick
/// and the thief's duplicate is ordered first via the certificate race) and
/// rho (victim misses the tick while the thief's duplicate makes it).
/// Results are a pure function of (cfg, stream, trials); `threads` only
/// parallelizes fixed batches.
SigmaRho estimate_sigma_rho(const TickConfig& cfg, const std::string& victim,
                            const std::string& thief, long long trials,
                            rng::RngStream stream, int threads = 1);

/// Empirical inclusion frequency of a logical tx submitted to the first k
/// configured proposers.
Estimate estimate_inclusion(const TickConfig& cfg, int k, long long trials,
                            rng::RngStream stream, int threads = 1);

struct DeviationRow {
    double q = 0.0;      // deviating attempt probability
    double gain = 0.0;   // deviator mean payoff minus equilibrium mean payoff
    double se = 0.0;
};

/// Simulates the symmetric steal-attempt game at its mixed equilibrium and
/// reports the payoff change from unilateral deviations.
std::vector<DeviationRow> check_mixed_equilibrium(const games::StealParams& sp,
                                                  std::span<const double> deviations,
                                                  long long trials, rng::RngStream stream,
                                                  int threads = 1);

struct DelayRow {
    double alpha = 0.0;
    double sim_mean = 0.0;
    double se = 0.0;
    double analytic = 0.0;
};

/// Validates the delay objective against its generative story: accrual up to
/// the pre-emption time, tip paid on survival past alpha.
std::vector<DelayRow> check_delay_objective(const hazard::HazardParams& hz, double tau,
                                            std::span<const double> alphas, long long trials,
                                            rng::RngStream stream, int threads = 1);

}  // namespace mcpmev::sim
