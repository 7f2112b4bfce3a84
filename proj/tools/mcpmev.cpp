// Command-line front end: every analytic operation and the tick simulator as
// subcommands. Each subcommand reads a JSON config (with a required "kind"
// field matching the subcommand), writes CSV to --out, and drops a run
// manifest next to it. CSV output is byte-identical across reruns with the
// same config and seed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcpmev/auction.hpp"
#include "mcpmev/errors.hpp"
#include "mcpmev/externality.hpp"
#include "mcpmev/games.hpp"
#include "mcpmev/hazard.hpp"
#include "mcpmev/poa.hpp"
#include "mcpmev/rng.hpp"
#include "mcpmev/scheduler.hpp"
#include "mcpmev/sim.hpp"
#include "mcpmev/validate.hpp"
#include "mcpmev/version.hpp"

namespace {

using json = nlohmann::json;
using namespace mcpmev;

constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDomain = 3;

struct RunContext {
    std::string subcommand;
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    long long trials = 0;
    bool trials_given = false;
    int threads = 1;
};

std::string num9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    return cfg;
}

const json& require(const json& cfg, const std::string& key) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) throw ConfigError("config missing required key: " + key);
    return *it;
}

double as_double(const json& cfg, const std::string& key) {
    const json& v = require(cfg, key);
    if (!v.is_number()) throw ConfigError("config key must be a number: " + key);
    return v.get<double>();
}

double as_double_or(const json& cfg, const std::string& key, double fallback) {
    return cfg.contains(key) ? as_double(cfg, key) : fallback;
}

long long as_int(const json& cfg, const std::string& key) {
    const json& v = require(cfg, key);
    if (!v.is_number_integer()) throw ConfigError("config key must be an integer: " + key);
    return v.get<long long>();
}

long long as_int_or(const json& cfg, const std::string& key, long long fallback) {
    return cfg.contains(key) ? as_int(cfg, key) : fallback;
}

std::string as_string(const json& cfg, const std::string& key) {
    const json& v = require(cfg, key);
    if (!v.is_string()) throw ConfigError("config key must be a string: " + key);
    return v.get<std::string>();
}

std::string as_string_or(const json& cfg, const std::string& key, const std::string& fallback) {
    return cfg.contains(key) ? as_string(cfg, key) : fallback;
}

void check_kind(const json& cfg, const std::string& expected) {
    if (as_string(cfg, "kind") != expected)
        throw ConfigError("config kind must be \"" + expected + "\"");
}

void write_output(const RunContext& ctx, const std::string& csv) {
    std::ofstream out(ctx.out_path);
    if (!out) throw ConfigError("cannot open output file: " + ctx.out_path);
    out << csv;
    out.close();

    json manifest;
    manifest["subcommand"] = ctx.subcommand;
    manifest["config"] = ctx.config_path;
    manifest["out"] = ctx.out_path;
    manifest["seed"] = ctx.seed;
    manifest["trials"] = ctx.trials;
    manifest["threads"] = ctx.threads;
    manifest["version"] = kVersion;
    manifest["timestamp"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    std::ofstream mf(ctx.out_path + ".manifest.json");
    if (!mf) throw ConfigError("cannot open manifest file");
    mf << manifest.dump(2) << "\n";
}

hazard::HazardParams hazard_from(const json& cfg) {
    hazard::HazardParams p;
    p.A = as_double(cfg, "A");
    p.k = as_double(cfg, "k");
    p.lambda = as_double(cfg, "lambda");
    p.delta = as_double_or(cfg, "delta", p.lambda);
    p.validate();
    return p;
}

// --- subcommand bodies -----------------------------------------------------

std::string run_envelope(const json& cfg) {
    const hazard::HazardParams p = hazard_from(cfg);
    std::vector<double> taus;
    if (cfg.contains("taus")) {
        for (const json& t : require(cfg, "taus")) taus.push_back(t.get<double>());
    } else {
        const double lo = as_double(cfg, "tau_lo");
        const double hi = as_double(cfg, "tau_hi");
        const long long count = as_int(cfg, "tau_count");
        if (count < 2) throw ConfigError("tau_count must be >= 2");
        for (long long i = 0; i < count; ++i)
            taus.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                    static_cast<double>(count - 1));
    }
    const std::optional<double> beta =
        cfg.contains("beta") ? std::optional<double>(as_double(cfg, "beta")) : std::nullopt;
    const double tau_dagger = hazard::immediate_threshold(p);
    const double tau_drop = beta ? hazard::drop_cutoff(*beta, p) : 0.0;

    std::ostringstream os;
    os << "tau,envelope,alpha_star,tau_dagger,tau_drop\n";
    for (double tau : taus) {
        const double env = hazard::envelope(tau, p);
        const hazard::DelayChoice d = hazard::optimal_delay(tau, p);
        os << num9(tau) << ',' << num9(env) << ','
           << (d.saturated ? std::string("sat") : num9(d.alpha)) << ',' << num9(tau_dagger)
           << ',' << (beta ? num9(tau_drop) : std::string("")) << "\n";
    }
    return os.str();
}

std::string run_censorship(const json& cfg) {
    games::CensorUserParams p;
    p.v = as_double(cfg, "v");
    p.c = as_double(cfg, "c");
    p.s = static_cast<int>(as_int(cfg, "s"));
    p.Q = as_double(cfg, "Q");
    const long long k_star = games::optimal_rounds(p);
    const long long k_heur = games::heuristic_rounds(p.v, p.c);
    const long long k_max = as_int_or(cfg, "k_max", std::max(2 * k_star + 2, 10LL));

    std::ostringstream os;
    os << "k,utility,optimal_rounds,heuristic_rounds\n";
    for (long long k = 0; k <= k_max; ++k)
        os << k << ',' << num9(games::user_utility(static_cast<int>(k), p)) << ',' << k_star
           << ',' << k_heur << "\n";
    return os.str();
}

std::string run_steal(const json& cfg) {
    games::StealParams p;
    p.sigma = as_double(cfg, "sigma");
    p.rho = as_double(cfg, "rho");
    p.phi = as_double(cfg, "phi");
    p.tau = as_double(cfg, "tau");
    p.delta_x = as_double_or(cfg, "delta_x", 0.0);
    p.m = static_cast<int>(as_int(cfg, "m"));
    const bool profitable = games::steal_profitable(p);
    const double p_star = games::steal_mixed_equilibrium(p);
    const long long n_bar =
        p.phi > 0.0 ? games::anti_steal_multiplicity(p.tau, p.phi) : -1;

    std::ostringstream os;
    os << "sigma,rho,phi,tau,delta_x,m,profitable,p_star,n_bar\n";
    os << num9(p.sigma) << ',' << num9(p.rho) << ',' << num9(p.phi) << ',' << num9(p.tau)
       << ',' << num9(p.delta_x) << ',' << p.m << ',' << (profitable ? 1 : 0) << ','
       << num9(p_star) << ',' << n_bar << "\n";
    return os.str();
}

std::string run_auction(const json& cfg) {
    const std::string mode = as_string_or(cfg, "mode", "uniform");
    std::ostringstream os;
    if (mode == "uniform") {
        const double vbar = as_double(cfg, "vbar");
        const int m = static_cast<int>(as_int(cfg, "m"));
        std::vector<double> reserves;
        if (cfg.contains("reserves"))
            for (const json& v : require(cfg, "reserves")) reserves.push_back(v.get<double>());
        else
            for (int i = 0; i <= 20; ++i) reserves.push_back(vbar * i / 20.0);
        os << "reserve,revenue,opt_reserve,opt_revenue\n";
        const double rstar = auction::uniform_reserve(vbar);
        const double opt = auction::uniform_opt_revenue(vbar, m);
        for (double r : reserves)
            os << num9(r) << ',' << num9(auction::uniform_revenue(vbar, r, m)) << ','
               << num9(rstar) << ',' << num9(opt) << "\n";
    } else if (mode == "keep_vs_auction") {
        const hazard::HazardParams hz = hazard_from(cfg);
        const double tau = as_double(cfg, "tau");
        const int m = static_cast<int>(as_int(cfg, "m"));
        const double alpha_hi = as_double_or(cfg, "alpha_hi", 5.0);
        const long long count = as_int_or(cfg, "alpha_count", 51);
        const std::string curve = as_string_or(cfg, "curve", "posted");
        std::vector<double> grid;
        for (long long i = 0; i < count; ++i)
            grid.push_back(alpha_hi * static_cast<double>(i) / static_cast<double>(count - 1));
        const auto rev_curve = [&](double a) {
            if (curve == "posted") return auction::posted_price_revenue(tau, a, hz);
            // Bidder values Uniform[0, vbar(a)] with vbar(a) from the delayed
            // tip plus accrued reaction value.
            const double vb = auction::posted_price_revenue(tau, a, hz) + hazard::accrual(a, hz);
            return vb > 0.0 ? auction::uniform_opt_revenue(vb, m) : 0.0;
        };
        const auction::SellerDecision d = auction::keep_vs_auction(tau, hz, rev_curve, grid);
        os << "alpha,revenue,keep_value,choice\n";
        for (double a : grid)
            os << num9(a) << ',' << num9(rev_curve(a)) << ',' << num9(d.keep_value) << ','
               << (d.choice == auction::SellerChoice::Keep ? "keep" : "auction") << "\n";
    } else {
        throw ConfigError("auction mode must be \"uniform\" or \"keep_vs_auction\"");
    }
    return os.str();
}

std::string run_timing(const json& cfg) {
    const double W = as_double(cfg, "W");
    const double w = as_double(cfg, "w");
    const double pi_ba = as_double(cfg, "pi_ba");
    const double pi_snipe = as_double(cfg, "pi_snipe");
    games::TimingParams p =
        cfg.contains("rho_gamma")
            ? games::TimingParams::exponential(W, w, pi_ba, pi_snipe,
                                               as_double(cfg, "rho_gamma"))
            : games::TimingParams::linear(W, w, pi_ba, pi_snipe);
    const double sbar = games::deadline(p);
    const long long count = as_int_or(cfg, "s_count", 21);

    std::ostringstream os;
    os << "s,rho_b,choice,deadline\n";
    for (long long i = 0; i < count; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(count - 1);
        const games::TimingChoice c = games::snipe_best_response(p, p.rho_b(s));
        const char* name = c == games::TimingChoice::Wait
                               ? "wait"
                               : (c == games::TimingChoice::SendNow ? "send_now" : "indifferent");
        os << num9(s) << ',' << num9(p.rho_b(s)) << ',' << name << ',' << num9(sbar) << "\n";
    }
    return os.str();
}

std::string run_poa(const json& cfg) {
    const std::string mode = as_string_or(cfg, "mode", "success");
    std::ostringstream os;
    if (mode == "success") {
        const int ell = static_cast<int>(as_int(cfg, "ell"));
        const double mu = as_double(cfg, "mu");
        os << "budget,success\n";
        for (const json& b : require(cfg, "budgets"))
            os << num9(b.get<double>()) << ',' << num9(poa::poa_success(ell, mu, b.get<double>()))
               << "\n";
    } else if (mode == "race") {
        const int ell = static_cast<int>(as_int(cfg, "ell"));
        const double mu_i = as_double(cfg, "mu_i");
        os << "mu_j,race_prob\n";
        for (const json& m : require(cfg, "mu_js"))
            os << num9(m.get<double>()) << ','
               << num9(poa::race_prob(ell, mu_i, m.get<double>())) << "\n";
    } else if (mode == "bound") {
        poa::RaceParams p;
        p.ell = static_cast<int>(as_int(cfg, "ell"));
        p.mu_i = as_double(cfg, "mu_i");
        p.mu_j = as_double(cfg, "mu_j");
        p.delta_i = as_double_or(cfg, "delta_i", 0.0);
        os << "delta_j,bound,race_prob,thief_success\n";
        for (const json& d : require(cfg, "delta_js")) {
            p.delta_j = d.get<double>();
            os << num9(p.delta_j) << ',' << num9(poa::stealability_bound(p)) << ','
               << num9(poa::race_prob(p.ell, p.mu_i, p.mu_j)) << ','
               << num9(poa::poa_success(p.ell, p.mu_j, p.delta_j)) << "\n";
        }
    } else if (mode == "hypo") {
        std::vector<double> rates;
        for (const json& v : require(cfg, "rates")) rates.push_back(v.get<double>());
        os << "budget,success\n";
        for (const json& b : require(cfg, "budgets"))
            os << num9(b.get<double>()) << ','
               << num9(poa::hypoexponential_success(rates, b.get<double>())) << "\n";
    } else {
        throw ConfigError("poa mode must be success, race, bound, or hypo");
    }
    return os.str();
}

std::string run_spam(const json& cfg) {
    const std::string mode = as_string_or(cfg, "mode", "da");
    std::ostringstream os;
    if (mode == "da") {
        ext::SpamParams p;
        const std::string model = as_string(cfg, "theta");
        if (model == "concave") {
            p.theta = ext::ConcaveTheta{as_double(cfg, "theta_max"), as_double(cfg, "gamma")};
        } else if (model == "cliff") {
            p.theta = ext::CliffTheta{as_double(cfg, "s_cliff"), as_double(cfg, "theta_post")};
        } else {
            throw ConfigError("spam theta must be \"concave\" or \"cliff\"");
        }
        p.prize = as_double(cfg, "prize");
        p.cost = as_double(cfg, "cost");
        const ext::SpamOptimum o = ext::optimal_spam(p);
        os << "s_star,profit,profitable\n";
        os << num9(o.s) << ',' << num9(o.profit) << ',' << (o.profitable ? 1 : 0) << "\n";
    } else if (mode == "ordering") {
        ext::OrderingSpamParams p;
        p.base_fee = as_double(cfg, "base_fee");
        p.target_tip = as_double(cfg, "target_tip");
        for (const json& v : require(cfg, "overbids")) p.overbids.push_back(v.get<double>());
        std::vector<double> benefits;
        for (const json& v : require(cfg, "benefits")) benefits.push_back(v.get<double>());
        const int k_max = static_cast<int>(std::min(p.overbids.size(), benefits.size()));
        if (k_max < 1) throw ConfigError("ordering spam needs overbids and benefits");
        p.benefit = [&benefits](int k) { return benefits[static_cast<std::size_t>(k - 1)]; };
        const std::optional<int> best = ext::max_profitable_advance(p, k_max);
        os << "K,cost,benefit,profitable,best_K\n";
        for (int k = 1; k <= k_max; ++k) {
            const double c = ext::ordering_spam_cost(k, p);
            const double b = benefits[static_cast<std::size_t>(k - 1)];
            os << k << ',' << num9(c) << ',' << num9(b) << ',' << (b > c ? 1 : 0) << ','
               << (best ? std::to_string(*best) : std::string("none")) << "\n";
        }
    } else {
        throw ConfigError("spam mode must be \"da\" or \"ordering\"");
    }
    return os.str();
}

std::string run_multisub(const json& cfg) {
    ext::MultiSubParams p;
    p.v = as_double(cfg, "v");
    p.c = as_double(cfg, "c");
    p.eta = as_double_or(cfg, "eta", 0.0);
    p.e = ext::MultiSubParams::quadratic_externality(as_double_or(cfg, "e2", 0.0));
    const json& props = require(cfg, "proposers");
    int cap = static_cast<int>(as_int_or(cfg, "k_max", 50));
    if (props.is_object()) {
        p.proposers = ext::HomogeneousProposers{as_double(props, "p"), as_double(props, "pi")};
    } else if (props.is_array()) {
        std::vector<std::pair<double, double>> het;
        for (const json& e : props) het.emplace_back(as_double(e, "p"), as_double(e, "pi"));
        p.proposers = het;
        cap = std::min<int>(cap, static_cast<int>(het.size()));
    } else {
        throw ConfigError("proposers must be an object or an array");
    }
    const int kp = ext::private_opt_k(p, cap);
    const int ks = ext::social_opt_k(p, cap);
    std::ostringstream os;
    os << "k,psi,u_priv,u_soc,surcharge,k_priv,k_soc\n";
    for (int k = 0; k <= cap; ++k) {
        const double psi = ext::inclusion_prob(k, p);
        const double upriv = p.v * psi - k * p.c;
        const double usoc = upriv - p.eta * p.e(k);
        os << k << ',' << num9(psi) << ',' << num9(upriv) << ',' << num9(usoc) << ','
           << num9(ext::pigou_surcharge(k, p)) << ',' << kp << ',' << ks << "\n";
    }
    return os.str();
}

// Transaction list file, one record per line:
//   id logical_id proposer tip_units deps t_da nonce
// deps is a comma-separated id list or "-"; t_da is a real or "-" (all lines
// must agree); blank lines and lines starting with '#' are skipped.
std::vector<sched::Tx> load_tx_file(const std::string& path, const std::string& epoch_seed) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tx file: " + path);
    std::vector<sched::Tx> txs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        sched::Tx tx;
        std::string deps, t_da, nonce;
        if (!(ls >> tx.id >> tx.logical_id >> tx.proposer >> tx.tip >> deps >> t_da >> nonce))
            throw ConfigError("tx file line " + std::to_string(lineno) + ": expected 7 fields");
        if (deps != "-") {
            std::istringstream ds(deps);
            std::string d;
            while (std::getline(ds, d, ','))
                if (!d.empty()) tx.deps.push_back(d);
        }
        if (t_da != "-") tx.t_da = std::stod(t_da);
        tx.tie_hash = sched::tie_hash(epoch_seed, tx.logical_id, std::stoull(nonce));
        txs.push_back(std::move(tx));
    }
    return txs;
}

std::string run_schedule(const json& cfg) {
    const std::string epoch_seed = as_string_or(cfg, "epoch_seed", "epoch");
    const std::vector<sched::Tx> txs = load_tx_file(as_string(cfg, "tx_file"), epoch_seed);
    std::map<std::string, int> ranks;
    for (const auto& [prop, rank] : require(cfg, "ranks").items())
        ranks[prop] = rank.get<int>();
    const sched::MergeResult res = sched::pdm_merge(txs, sched::ProposerRank(ranks));

    std::ostringstream os;
    os << "section,position,id,proposer,value\n";
    for (std::size_t i = 0; i < res.order.size(); ++i)
        os << "order," << i << ',' << res.order[i] << ",,\n";
    for (const auto& [prop, units] : res.payouts)
        os << "payout,,," << prop << ',' << units << "\n";
    for (const auto& id : res.rejected) os << "rejected,," << id << ",,\n";
    for (const auto& id : res.pruned) os << "pruned,," << id << ",,\n";
    for (const auto& [logical, copy] : res.executed)
        os << "executed,," << copy << ",," << logical << "\n";
    os << "burned,,,," << res.burned << "\n";
    return os.str();
}

sim::TickConfig tick_config_from(const json& cfg, const RunContext& ctx) {
    sim::TickConfig tc;
    for (const json& p : require(cfg, "proposers")) {
        sim::ProposerCfg pc;
        pc.id = as_string(p, "id");
        pc.rank = static_cast<int>(as_int(p, "rank"));
        pc.mu = as_double(p, "mu");
        pc.budget = as_double(p, "budget");
        pc.censor_prob = as_double_or(p, "censor_prob", 0.0);
        pc.publish_latency = as_double_or(p, "publish_latency", 0.0);
        tc.proposers.push_back(std::move(pc));
    }
    tc.ell = static_cast<int>(as_int(cfg, "ell"));
    if (cfg.contains("capacity") && !cfg["capacity"].is_null())
        tc.capacity = static_cast<int>(as_int(cfg, "capacity"));
    if (cfg.contains("workload")) {
        const json& w = cfg["workload"];
        tc.txs.count = static_cast<int>(as_int(w, "count"));
        tc.txs.tip_lo = static_cast<std::uint64_t>(as_int_or(w, "tip_lo", 1));
        tc.txs.tip_hi = static_cast<std::uint64_t>(as_int_or(w, "tip_hi", 100));
        tc.txs.dep_density = as_double_or(w, "dep_density", 0.0);
        tc.txs.submissions = static_cast<int>(as_int_or(w, "submissions", 1));
    }
    const std::string thief = as_string_or(cfg, "thief", "none");
    if (thief == "none")
        tc.thief = sim::ThiefStrategy::None;
    else if (thief == "always")
        tc.thief = sim::ThiefStrategy::AlwaysSteal;
    else if (thief == "mixed")
        tc.thief = sim::ThiefStrategy::MixedEq;
    else
        throw ConfigError("thief must be none, always, or mixed");
    tc.thief_attempt_prob = as_double_or(cfg, "thief_p", 0.0);
    tc.obs_latency = as_double_or(cfg, "obs_latency", 0.0);
    tc.epoch_seed = as_string_or(cfg, "epoch_seed", "epoch");
    if (cfg.contains("hazard")) tc.hazard = hazard_from(cfg["hazard"]);
    (void)ctx;
    return tc;
}

std::string run_simulate(const json& cfg, const RunContext& ctx) {
    const std::string mode = as_string_or(cfg, "mode", "tick");
    const std::uint64_t seed = ctx.seed;
    const long long trials = ctx.trials_given ? ctx.trials : as_int_or(cfg, "trials", 100000);
    std::ostringstream os;
    if (mode == "tick") {
        const sim::TickConfig tc = tick_config_from(require(cfg, "tick"), ctx);
        const sim::TickOutcome out = sim::run_tick(tc, rng::RngStream(seed, 0));
        os << "section,key,value,extra\n";
        for (const auto& prop : out.made_tick) os << "made_tick," << prop << ",,\n";
        for (const auto& [prop, t] : out.poa_time) os << "poa_time," << prop << ',' << num9(t) << ",\n";
        for (std::size_t i = 0; i < out.merge.order.size(); ++i)
            os << "order," << i << ',' << out.merge.order[i] << ",\n";
        for (const auto& [prop, units] : out.merge.payouts)
            os << "payout," << prop << ',' << units << ",\n";
        for (const auto& id : out.merge.rejected) os << "rejected," << id << ",,\n";
        os << "burned,," << out.merge.burned << ",\n";
    } else if (mode == "sigma_rho") {
        const sim::TickConfig tc = tick_config_from(require(cfg, "tick"), ctx);
        const auto est = sim::estimate_sigma_rho(tc, as_string(cfg, "victim"),
                                                 as_string(cfg, "thief"), trials,
                                                 rng::RngStream(seed, 0), ctx.threads);
        os << "stat,mean,se,trials\n";
        os << "sigma," << num9(est.sigma.mean) << ',' << num9(est.sigma.se) << ','
           << est.sigma.trials << "\n";
        os << "rho," << num9(est.rho.mean) << ',' << num9(est.rho.se) << ',' << est.rho.trials
           << "\n";
    } else if (mode == "inclusion") {
        const sim::TickConfig tc = tick_config_from(require(cfg, "tick"), ctx);
        os << "k,psi_hat,se,trials\n";
        for (const json& kv : require(cfg, "ks")) {
            const int k = kv.get<int>();
            const auto est = sim::estimate_inclusion(
                tc, k, trials, rng::RngStream(seed, 1000 * static_cast<std::uint64_t>(k)),
                ctx.threads);
            os << k << ',' << num9(est.mean) << ',' << num9(est.se) << ',' << est.trials << "\n";
        }
    } else if (mode == "mixed_eq") {
        games::StealParams sp;
        sp.sigma = as_double(cfg, "sigma");
        sp.rho = as_double(cfg, "rho");
        sp.phi = as_double(cfg, "phi");
        sp.tau = as_double(cfg, "tau");
        sp.delta_x = as_double_or(cfg, "delta_x", 0.0);
        sp.m = static_cast<int>(as_int(cfg, "m"));
        std::vector<double> devs;
        if (cfg.contains("deviations"))
            for (const json& v : cfg["deviations"]) devs.push_back(v.get<double>());
        else {
            const double ps = games::steal_mixed_equilibrium(sp);
            devs = {0.0, 0.5 * ps, ps, 0.5 * (1.0 + ps), 1.0};
        }
        const auto rows =
            sim::check_mixed_equilibrium(sp, devs, trials, rng::RngStream(seed, 0), ctx.threads);
        os << "q,gain,se\n";
        for (const auto& row : rows)
            os << num9(row.q) << ',' << num9(row.gain) << ',' << num9(row.se) << "\n";
    } else if (mode == "delay_objective") {
        const hazard::HazardParams hz = hazard_from(require(cfg, "hazard"));
        const double tau = as_double(cfg, "tau");
        std::vector<double> alphas;
        for (const json& v : require(cfg, "alphas")) alphas.push_back(v.get<double>());
        const auto rows = sim::check_delay_objective(hz, tau, alphas, trials,
                                                     rng::RngStream(seed, 0), ctx.threads);
        os << "alpha,sim_mean,se,analytic\n";
        for (const auto& row : rows)
            os << num9(row.alpha) << ',' << num9(row.sim_mean) << ',' << num9(row.se) << ','
               << num9(row.analytic) << "\n";
    } else {
        throw ConfigError("simulate mode must be tick, sigma_rho, inclusion, mixed_eq, or delay_objective");
    }
    return os.str();
}

std::string run_validate_cmd(const RunContext& ctx, bool quick, bool& failed) {
    validate::Options opt;
    opt.seed = ctx.seed;
    opt.trial_scale = quick ? 0.02 : 1.0;
    opt.threads = ctx.threads;
    const auto results = validate::run_acceptance(opt);
    std::ostringstream os;
    os << "criterion,name,pass,detail\n";
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.id << "  " << r.name << "  ("
                  << r.detail << ")\n";
        std::string detail = r.detail;
        for (char& c : detail)
            if (c == ',') c = ';';
        os << r.id << ',' << r.name << ',' << (r.pass ? 1 : 0) << ',' << detail << "\n";
    }
    failed = !validate::all_passed(results);
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analytics and simulation for concurrent-proposer transaction ordering"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    RunContext ctx;
    const std::vector<std::string> kinds = {"envelope", "censorship", "steal",   "auction",
                                            "timing",   "poa",        "spam",    "multisub",
                                            "schedule", "simulate",   "validate"};
    for (const std::string& kind : kinds) {
        CLI::App* sub = app.add_subcommand(kind);
        sub->add_option("--config", ctx.config_path, "JSON config path")
            ->required(kind != "validate");
        sub->add_option("--out", ctx.out_path, "output CSV path")->required(kind != "validate");
        sub->add_option("--seed", ctx.seed, "random seed")->each([&](const std::string&) {
            ctx.seed_given = true;
        });
        sub->add_option("--trials", ctx.trials, "Monte Carlo trials")
            ->each([&](const std::string&) { ctx.trials_given = true; });
        sub->add_option("--threads", ctx.threads, "worker threads (results unchanged)");
        sub->callback([&ctx, kind]() { ctx.subcommand = kind; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        json cfg;
        if (!ctx.config_path.empty()) {
            cfg = load_config(ctx.config_path);
            check_kind(cfg, ctx.subcommand);
        } else if (ctx.subcommand != "validate") {
            throw ConfigError("--config is required");
        }
        if (!ctx.seed_given) ctx.seed = static_cast<std::uint64_t>(as_int_or(cfg, "seed", 1));

        std::string csv;
        bool failed = false;
        if (ctx.subcommand == "envelope")
            csv = run_envelope(cfg);
        else if (ctx.subcommand == "censorship")
            csv = run_censorship(cfg);
        else if (ctx.subcommand == "steal")
            csv = run_steal(cfg);
        else if (ctx.subcommand == "auction")
            csv = run_auction(cfg);
        else if (ctx.subcommand == "timing")
            csv = run_timing(cfg);
        else if (ctx.subcommand == "poa")
            csv = run_poa(cfg);
        else if (ctx.subcommand == "spam")
            csv = run_spam(cfg);
        else if (ctx.subcommand == "multisub")
            csv = run_multisub(cfg);
        else if (ctx.subcommand == "schedule")
            csv = run_schedule(cfg);
        else if (ctx.subcommand == "simulate")
            csv = run_simulate(cfg, ctx);
        else if (ctx.subcommand == "validate")
            csv = run_validate_cmd(ctx, cfg.is_object() && cfg.value("quick", false), failed);

        if (!ctx.out_path.empty()) write_output(ctx, csv);
        return failed ? kExitInternal : 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
