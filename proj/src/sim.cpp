#include "mcpmev/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "mcpmev/errors.hpp"

namespace mcpmev::sim {

void TickConfig::validate() const {
    if (proposers.empty()) throw ConfigError("TickConfig: need at least one proposer");
    std::vector<int> ranks;
    std::set<std::string> ids;
    for (const ProposerCfg& p : proposers) {
        if (!ids.insert(p.id).second) throw ConfigError("TickConfig: duplicate proposer id " + p.id);
        ranks.push_back(p.rank);
        if (!(p.mu > 0.0)) throw ConfigError("TickConfig: mu must be > 0");
        if (!(p.budget >= 0.0)) throw ConfigError("TickConfig: budget must be >= 0");
        if (!(p.censor_prob >= 0.0 && p.censor_prob < 1.0))
            throw ConfigError("TickConfig: censor_prob must be in [0,1)");
        if (!(p.publish_latency >= 0.0))
            throw ConfigError("TickConfig: publish_latency must be >= 0");
    }
    std::sort(ranks.begin(), ranks.end());
    for (std::size_t i = 0; i < ranks.size(); ++i)
        if (ranks[i] != static_cast<int>(i) + 1)
            throw ConfigError("TickConfig: proposer ranks must be a permutation of 1..n");
    if (ell < 1) throw ConfigError("TickConfig: ell must be >= 1");
    if (capacity && *capacity < 1) throw ConfigError("TickConfig: capacity must be >= 1");
    if (txs.count < 0) throw ConfigError("TickConfig: tx count must be >= 0");
    if (txs.tip_lo > txs.tip_hi) throw ConfigError("TickConfig: tip_lo > tip_hi");
    if (!(txs.dep_density >= 0.0 && txs.dep_density <= 1.0))
        throw ConfigError("TickConfig: dep_density must be in [0,1]");
    if (txs.submissions < 1) throw ConfigError("TickConfig: submissions must be >= 1");
    if (!(thief_attempt_prob >= 0.0 && thief_attempt_prob <= 1.0))
        throw ConfigError("TickConfig: thief_attempt_prob must be in [0,1]");
    if (!(obs_latency >= 0.0)) throw ConfigError("TickConfig: obs_latency must be >= 0");
    hazard.validate();
}

const ProposerCfg& TickConfig::proposer(const std::string& id) const {
    for (const ProposerCfg& p : proposers)
        if (p.id == id) return p;
    throw ConfigError("TickConfig: no proposer named " + id);
}

namespace {

std::string copy_id(int logical, const std::string& proposer) {
    return "t" + std::to_string(logical) + "." + proposer;
}

}  // namespace

TickOutcome run_tick(const TickConfig& cfg, rng::RngStream stream) {
    cfg.validate();
    const int n = static_cast<int>(cfg.proposers.size());

    struct Logical {
        std::uint64_t tip = 0;
        int dep = -1;  // earlier logical index, or -1
    };
    std::vector<Logical> logicals(static_cast<std::size_t>(cfg.txs.count));

    // Per-proposer block contents: logical indices in arrival order.
    std::vector<std::vector<int>> blocks(static_cast<std::size_t>(n));

    for (int i = 0; i < cfg.txs.count; ++i) {
        Logical& lg = logicals[static_cast<std::size_t>(i)];
        lg.tip = cfg.txs.tip_lo + stream.uniform_below(cfg.txs.tip_hi - cfg.txs.tip_lo + 1);
        const int owner = static_cast<int>(stream.uniform_below(static_cast<std::uint64_t>(n)));
        if (i > 0 && stream.next_double() < cfg.txs.dep_density)
            lg.dep = static_cast<int>(stream.uniform_below(static_cast<std::uint64_t>(i)));
        // Copies go to the owner and the next proposers cyclically.
        const int copies = std::min(cfg.txs.submissions, n);
        for (int c = 0; c < copies; ++c) {
            const int prop = (owner + c) % n;
            if (stream.next_double() < cfg.proposers[static_cast<std::size_t>(prop)].censor_prob)
                continue;
            blocks[static_cast<std::size_t>(prop)].push_back(i);
        }
    }

    // Thieves copy from the pre-theft snapshot of observable blocks.
    if (cfg.thief != ThiefStrategy::None) {
        const std::vector<std::vector<int>> snapshot = blocks;
        std::vector<std::set<int>> holds(static_cast<std::size_t>(n));
        for (int p = 0; p < n; ++p)
            for (int lg : snapshot[static_cast<std::size_t>(p)])
                holds[static_cast<std::size_t>(p)].insert(lg);
        for (int victim = 0; victim < n; ++victim) {
            for (int thief = 0; thief < n; ++thief) {
                if (thief == victim) continue;
                const double seen_at =
                    cfg.proposers[static_cast<std::size_t>(victim)].publish_latency +
                    cfg.obs_latency;
                if (seen_at > cfg.proposers[static_cast<std::size_t>(thief)].publish_latency)
                    continue;  // revealed too late for the thief's own publish
                for (int lg : snapshot[static_cast<std::size_t>(victim)]) {
                    if (holds[static_cast<std::size_t>(thief)].count(lg)) continue;
                    const bool attempt = cfg.thief == ThiefStrategy::AlwaysSteal ||
                                         stream.next_double() < cfg.thief_attempt_prob;
                    if (!attempt) continue;
                    holds[static_cast<std::size_t>(thief)].insert(lg);
                    blocks[static_cast<std::size_t>(thief)].push_back(lg);
                }
            }
        }
    }

    // Certificate race per block; capacity keeps the earliest certificates.
    TickOutcome out;
    std::vector<bool> made(static_cast<std::size_t>(n), false);
    std::vector<double> poa_abs(static_cast<std::size_t>(n), 0.0);
    for (int p = 0; p < n; ++p) {
        const ProposerCfg& pc = cfg.proposers[static_cast<std::size_t>(p)];
        const double s = stream.erlang(cfg.ell, pc.mu);
        made[static_cast<std::size_t>(p)] = s <= pc.budget;
        poa_abs[static_cast<std::size_t>(p)] = pc.publish_latency + s;
        out.poa_time[pc.id] = poa_abs[static_cast<std::size_t>(p)];
    }
    if (cfg.capacity) {
        std::vector<int> winners;
        for (int p = 0; p < n; ++p)
            if (made[static_cast<std::size_t>(p)]) winners.push_back(p);
        if (static_cast<int>(winners.size()) > *cfg.capacity) {
            std::sort(winners.begin(), winners.end(), [&](int a, int b) {
                if (poa_abs[static_cast<std::size_t>(a)] != poa_abs[static_cast<std::size_t>(b)])
                    return poa_abs[static_cast<std::size_t>(a)] <
                           poa_abs[static_cast<std::size_t>(b)];
                return cfg.proposers[static_cast<std::size_t>(a)].rank <
                       cfg.proposers[static_cast<std::size_t>(b)].rank;
            });
            for (std::size_t i = static_cast<std::size_t>(*cfg.capacity); i < winners.size(); ++i)
                made[static_cast<std::size_t>(winners[i])] = false;
        }
    }

    // Assemble the merge input from blocks that made the tick.
    std::vector<std::vector<std::string>> present_copies(
        static_cast<std::size_t>(cfg.txs.count));
    for (int p = 0; p < n; ++p) {
        if (!made[static_cast<std::size_t>(p)]) continue;
        for (int lg : blocks[static_cast<std::size_t>(p)])
            present_copies[static_cast<std::size_t>(lg)].push_back(
                copy_id(lg, cfg.proposers[static_cast<std::size_t>(p)].id));
    }
    std::vector<sched::Tx> merge_input;
    std::map<std::string, int> rank_map;
    for (const ProposerCfg& pc : cfg.proposers) rank_map[pc.id] = pc.rank;
    for (int p = 0; p < n; ++p) {
        const ProposerCfg& pc = cfg.proposers[static_cast<std::size_t>(p)];
        const bool in_tick = made[static_cast<std::size_t>(p)];
        int pos = 0;
        for (int lg : blocks[static_cast<std::size_t>(p)]) {
            const std::string id = copy_id(lg, pc.id);
            if (in_tick) {
                sched::Tx tx;
                tx.id = id;
                tx.logical_id = "t" + std::to_string(lg);
                tx.tip = logicals[static_cast<std::size_t>(lg)].tip;
                tx.proposer = pc.id;
                const int dep = logicals[static_cast<std::size_t>(lg)].dep;
                if (dep >= 0) {
                    const auto& dep_copies = present_copies[static_cast<std::size_t>(dep)];
                    if (dep_copies.empty())
                        tx.deps.push_back("missing:t" + std::to_string(dep));
                    else
                        tx.deps = dep_copies;
                }
                tx.t_da = pc.publish_latency + 1e-6 * (pos + 1);
                tx.tie_hash = sched::tie_hash(cfg.epoch_seed, "u" + std::to_string(lg),
                                              static_cast<std::uint64_t>(lg));
                merge_input.push_back(std::move(tx));
            }
            TxEvent ev;
            ev.proposer = pc.id;
            ev.reveal_time = pc.publish_latency;
            ev.made_tick = in_tick;
            out.events[id] = ev;
            ++pos;
        }
        if (in_tick) out.made_tick.insert(pc.id);
    }

    out.merge = sched::pdm_merge(merge_input, sched::ProposerRank(rank_map));
    for (const auto& [logical, copy] : out.merge.executed) {
        const auto it = out.events.find(copy);
        if (it != out.events.end()) it->second.executed = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Batched Monte Carlo with deterministic aggregation

namespace {

constexpr long long kBatchSize = 1 << 14;

struct MeanAcc {
    double sum = 0.0;
    double sumsq = 0.0;
    long long n = 0;

    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++n;
    }
    void merge(const MeanAcc& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        n += o.n;
    }
};

Estimate to_estimate(const MeanAcc& a) {
    Estimate e;
    e.trials = a.n;
    if (a.n == 0) return e;
    e.mean = a.sum / static_cast<double>(a.n);
    if (a.n > 1) {
        const double var =
            std::max(0.0, (a.sumsq - a.sum * a.sum / static_cast<double>(a.n)) /
                              static_cast<double>(a.n - 1));
        e.se = std::sqrt(var / static_cast<double>(a.n));
    }
    return e;
}

// Runs `trials` split into fixed batches; batch b draws from stream
// (seed, stream_id + b) so the result is independent of thread count.
// `body(stream, acc)` runs one trial. Consumes ceil(trials / kBatchSize)
// stream ids starting at base.stream_id().
template <typename Acc, typename Body>
Acc run_batched(long long trials, const rng::RngStream& base, int threads, Body&& body) {
    if (trials < 0) throw DomainError("trials must be >= 0");
    const long long nbatches = (trials + kBatchSize - 1) / kBatchSize;
    std::vector<Acc> accs(static_cast<std::size_t>(nbatches));
    std::atomic<long long> next{0};
    const auto worker = [&]() {
        for (;;) {
            const long long b = next.fetch_add(1);
            if (b >= nbatches) return;
            const long long count =
                std::min(kBatchSize, trials - b * kBatchSize);
            rng::RngStream s(base.seed(), base.stream_id() + static_cast<std::uint64_t>(b));
            Acc& acc = accs[static_cast<std::size_t>(b)];
            for (long long t = 0; t < count; ++t) body(s, acc);
        }
    };
    const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(nbatches)));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    Acc total;
    for (const Acc& a : accs) total.merge(a);
    return total;
}

std::uint64_t streams_used(long long trials) {
    return static_cast<std::uint64_t>((trials + kBatchSize - 1) / kBatchSize);
}

}  // namespace

SigmaRho estimate_sigma_rho(const TickConfig& cfg, const std::string& victim,
                            const std::string& thief, long long trials,
                            rng::RngStream stream, int threads) {
    cfg.validate();
    const ProposerCfg& v = cfg.proposer(victim);
    const ProposerCfg& j = cfg.proposer(thief);
    if (victim == thief) throw ConfigError("estimate_sigma_rho: victim == thief");

    const double pub_v = v.publish_latency;
    // The thief republishes after observing; waiting burns certificate budget.
    const double pub_j = std::max(j.publish_latency, pub_v + cfg.obs_latency);
    const double resid_j = j.budget - (pub_j - j.publish_latency);

    struct Acc {
        MeanAcc sigma, rho;
        void merge(const Acc& o) {
            sigma.merge(o.sigma);
            rho.merge(o.rho);
        }
    };
    const Acc acc = run_batched<Acc>(trials, stream, threads, [&](rng::RngStream& s, Acc& a) {
        const double sv = s.erlang(cfg.ell, v.mu);
        const double sj = s.erlang(cfg.ell, j.mu);
        const bool v_makes = sv <= v.budget;
        const bool j_makes = resid_j >= 0.0 && sj <= resid_j;
        const bool j_first = pub_j + sj < pub_v + sv;
        a.sigma.add((v_makes && j_makes && j_first) ? 1.0 : 0.0);
        a.rho.add((!v_makes && j_makes) ? 1.0 : 0.0);
    });
    return {to_estimate(acc.sigma), to_estimate(acc.rho)};
}

Estimate estimate_inclusion(const TickConfig& cfg, int k, long long trials,
                            rng::RngStream stream, int threads) {
    cfg.validate();
    if (k < 0) throw DomainError("estimate_inclusion: k must be >= 0");
    if (k > static_cast<int>(cfg.proposers.size()))
        throw ConfigError("estimate_inclusion: k exceeds proposer count");
    const MeanAcc acc =
        run_batched<MeanAcc>(trials, stream, threads, [&](rng::RngStream& s, MeanAcc& a) {
            bool included = false;
            for (int r = 0; r < k; ++r) {
                const ProposerCfg& p = cfg.proposers[static_cast<std::size_t>(r)];
                if (s.next_double() < p.censor_prob) continue;
                if (s.erlang(cfg.ell, p.mu) <= p.budget) included = true;
            }
            a.add(included ? 1.0 : 0.0);
        });
    return to_estimate(acc);
}

std::vector<DeviationRow> check_mixed_equilibrium(const games::StealParams& sp,
                                                  std::span<const double> deviations,
                                                  long long trials, rng::RngStream stream,
                                                  int threads) {
    sp.validate();
    const double p_star = games::steal_mixed_equilibrium(sp);
    const double win_prob = sp.sigma + sp.rho;
    const double prize = sp.prize();

    const auto payoff_estimate = [&](double q, std::uint64_t slot) {
        rng::RngStream base(stream.seed(), stream.stream_id() + slot * streams_used(trials));
        return to_estimate(
            run_batched<MeanAcc>(trials, base, threads, [&](rng::RngStream& s, MeanAcc& a) {
                const bool me = s.next_double() < q;
                int rivals = 0;
                for (int r = 0; r < sp.m - 1; ++r)
                    if (s.next_double() < p_star) ++rivals;
                double payoff = 0.0;
                if (me) {
                    const bool winner = s.uniform_below(static_cast<std::uint64_t>(rivals) + 1) == 0;
                    const bool landed = winner && s.next_double() < win_prob;
                    payoff = (landed ? prize : 0.0) - sp.phi;
                }
                a.add(payoff);
            }));
    };

    const Estimate at_eq = payoff_estimate(p_star, 0);
    std::vector<DeviationRow> rows;
    rows.reserve(deviations.size());
    for (std::size_t i = 0; i < deviations.size(); ++i) {
        const Estimate dev = payoff_estimate(deviations[i], i + 1);
        DeviationRow row;
        row.q = deviations[i];
        row.gain = dev.mean - at_eq.mean;
        row.se = std::hypot(dev.se, at_eq.se);
        rows.push_back(row);
    }
    return rows;
}

std::vector<DelayRow> check_delay_objective(const hazard::HazardParams& hz, double tau,
                                            std::span<const double> alphas, long long trials,
                                            rng::RngStream stream, int threads) {
    hz.validate();
    if (!(tau >= 0.0)) throw DomainError("check_delay_objective: tau must be >= 0");
    std::vector<DelayRow> rows;
    rows.reserve(alphas.size());
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double alpha = alphas[i];
        if (!(alpha >= 0.0)) throw DomainError("check_delay_objective: alpha must be >= 0");
        rng::RngStream base(stream.seed(),
                            stream.stream_id() + static_cast<std::uint64_t>(i) *
                                                     streams_used(trials));
        const MeanAcc acc =
            run_batched<MeanAcc>(trials, base, threads, [&](rng::RngStream& s, MeanAcc& a) {
                const double preempt = s.exponential(hz.lambda);
                const double accrued = hz.A * -std::expm1(-hz.k * std::min(alpha, preempt));
                bool tip_survives;
                if (hz.delta == hz.lambda)
                    tip_survives = preempt > alpha;  // one clock in the one-hazard model
                else if (hz.delta == 0.0)
                    tip_survives = true;
                else
                    tip_survives = s.exponential(hz.delta) > alpha;
                a.add(accrued + (tip_survives ? tau : 0.0));
            });
        DelayRow row;
        row.alpha = alpha;
        const Estimate est = to_estimate(acc);
        row.sim_mean = est.mean;
        row.se = est.se;
        row.analytic = hazard::u_mev(alpha, tau, hz);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace mcpmev::sim
