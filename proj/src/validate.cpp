#include "mcpmev/validate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mcpmev/auction.hpp"
#include "mcpmev/errors.hpp"
#include "mcpmev/externality.hpp"
#include "mcpmev/games.hpp"
#include "mcpmev/hazard.hpp"
#include "mcpmev/numeric.hpp"
#include "mcpmev/poa.hpp"
#include "mcpmev/rng.hpp"
#include "mcpmev/scheduler.hpp"
#include "mcpmev/sim.hpp"

namespace mcpmev::validate {

namespace {

using rng::RngStream;

double uniform(RngStream& r, double lo, double hi) {
    return lo + (hi - lo) * r.next_double();
}

double loguniform(RngStream& r, double lo, double hi) {
    return std::exp(uniform(r, std::log(lo), std::log(hi)));
}

/// Collects failures; keeps only the first few messages for the report.
struct Check {
    long long failures = 0;
    long long total = 0;
    std::string first_failure;

    void expect(bool ok, const std::string& msg) {
        ++total;
        if (ok) return;
        ++failures;
        if (first_failure.empty()) first_failure = msg;
    }

    CriterionResult result(int id, const std::string& name) const {
        CriterionResult r;
        r.id = id;
        r.name = name;
        r.pass = failures == 0;
        std::ostringstream os;
        os << total - failures << "/" << total << " checks";
        if (failures > 0) os << "; first failure: " << first_failure;
        r.detail = os.str();
        return r;
    }
};

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

template <typename Body>
MeanSe mc_mean(long long trials, Body&& body) {
    double sum = 0.0, sumsq = 0.0;
    for (long long t = 0; t < trials; ++t) {
        const double x = body();
        sum += x;
        sumsq += x * x;
    }
    MeanSe m;
    m.mean = sum / static_cast<double>(trials);
    if (trials > 1) {
        const double var = std::max(
            0.0, (sumsq - sum * sum / static_cast<double>(trials)) / static_cast<double>(trials - 1));
        m.se = std::sqrt(var / static_cast<double>(trials));
    }
    return m;
}

// One-hazard reference forms, kept separate from the general-form library
// path so the reduction check compares two independent routes.
double one_hazard_alpha(double tau, double A, double k, double lam) {
    if (tau <= 0.0) return std::numeric_limits<double>::infinity();
    if (tau >= A * k / lam) return 0.0;
    return std::log(A * k / (lam * tau)) / k;
}

double one_hazard_envelope(double tau, double A, double k, double lam) {
    const double sat = A * k / (k + lam);
    if (tau == 0.0) return sat;
    const double r = lam * tau / (A * k);
    if (r >= 1.0) return std::max(tau, sat);
    return sat * (1.0 - std::pow(r, 1.0 + lam / k)) + tau * std::pow(r, lam / k);
}

// Doubling bracket for a unimodal objective that eventually decreases.
double grow_bracket(const std::function<double(double)>& f, double start = 1.0) {
    double hi = start;
    while (f(hi) >= f(0.5 * hi) && hi < 1e9) hi *= 2.0;
    return hi;
}

// --------------------------------------------------------------------------
// Criterion 1: envelope and maximizer against a numeric oracle.
CriterionResult c1_envelope_oracle(const Options& opt) {
    Check chk;
    RngStream r(opt.seed, 100);
    const num::Tolerance gtol{1e-11, 0.0, 500};
    for (int i = 0; i < 1000; ++i) {
        hazard::HazardParams p;
        p.A = loguniform(r, 0.5, 2.0);
        p.k = loguniform(r, 0.5, 2.0);
        p.lambda = loguniform(r, 0.5, 2.0);
        p.delta = uniform(r, 0.3, 0.7) * (p.k + p.lambda);
        const double tau = loguniform(r, 0.2, 5.0) * p.A * p.k / p.delta;

        const double env = hazard::envelope(tau, p);
        const hazard::DelayChoice dc = hazard::optimal_delay(tau, p);

        const auto obj = [&](double a) { return hazard::u_mev(a, tau, p); };
        const double hi = grow_bracket(obj);
        const num::ScalarMax mx = num::maximize_scalar(obj, 0.0, hi, gtol);

        chk.expect(std::fabs(env - mx.value) <= 1e-8 * std::max(1.0, std::fabs(env)),
                   "envelope mismatch: " + fmt(env) + " vs " + fmt(mx.value));
        chk.expect(std::fabs(dc.alpha - mx.argmax) <= 1e-5,
                   "argmax mismatch: " + fmt(dc.alpha) + " vs " + fmt(mx.argmax));
    }
    return chk.result(1, "envelope oracle");
}

// Criterion 2: the two-hazard forms reduce to the one-hazard forms at
// delta = lambda.
CriterionResult c2_two_hazard_reduction(const Options& opt) {
    Check chk;
    RngStream r(opt.seed, 200);
    for (int i = 0; i < 1000; ++i) {
        const double A = loguniform(r, 0.5, 2.0);
        const double k = loguniform(r, 0.5, 2.0);
        const double lam = loguniform(r, 0.5, 2.0);
        const double tau = loguniform(r, 0.2, 5.0) * A * k / lam;
        const hazard::HazardParams p{A, k, lam, lam};

        const double env = hazard::envelope(tau, p);
        const double ref_env = one_hazard_envelope(tau, A, k, lam);
        chk.expect(std::fabs(env - ref_env) <= 1e-12 * std::max(1.0, std::fabs(ref_env)),
                   "envelope reduction: " + fmt(env) + " vs " + fmt(ref_env));

        const double alpha = hazard::optimal_delay(tau, p).alpha;
        const double ref_alpha = one_hazard_alpha(tau, A, k, lam);
        chk.expect(std::fabs(alpha - ref_alpha) <= 1e-12 * std::max(1.0, std::fabs(ref_alpha)),
                   "alpha reduction: " + fmt(alpha) + " vs " + fmt(ref_alpha));

        const double thr = hazard::immediate_threshold(p);
        chk.expect(std::fabs(thr - A * k / lam) <= 1e-12 * std::max(1.0, A * k / lam),
                   "threshold reduction");
    }
    return chk.result(2, "two-hazard reduction");
}

// Criterion 3: M(drop_cutoff(beta)) = beta; zero cutoff below M(0).
CriterionResult c3_drop_cutoff(const Options& opt) {
    Check chk;
    RngStream r(opt.seed, 300);
    const num::Tolerance tight{1e-13, 1e-13, 200};
    for (int i = 0; i < 100; ++i) {
        hazard::HazardParams p;
        p.A = loguniform(r, 0.5, 2.0);
        p.k = loguniform(r, 0.5, 2.0);
        p.lambda = loguniform(r, 0.5, 2.0);
        p.delta = (i % 2 == 0) ? p.lambda : uniform(r, 0.3, 0.7) * (p.k + p.lambda);
        const double m0 = hazard::envelope(0.0, p);

        const double beta = m0 * (1.0 + loguniform(r, 1e-3, 50.0));
        const double tau_d = hazard::drop_cutoff(beta, p, tight);
        const double back = hazard::envelope(tau_d, p);
        chk.expect(std::fabs(back - beta) <= 1e-9,
                   "cutoff inversion off by " + fmt(back - beta));

        const double beta_low = m0 * r.next_double();
        chk.expect(hazard::drop_cutoff(beta_low, p, tight) == 0.0,
                   "cutoff must be zero below M(0)");
    }
    return chk.result(3, "drop cutoff inversion");
}

// Criterion 4: optimal broadcast rounds equal brute force exactly.
CriterionResult c4_censorship_rounds(const Options& opt) {
    Check chk;
    RngStream r(opt.seed, 400);
    for (int i = 0; i < 1000; ++i) {
        games::CensorUserParams p;
        p.v = loguniform(r, 0.5, 100.0);
        p.c = loguniform(r, 0.005, 1.0);
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
        const long long got = games::optimal_rounds(p);
        chk.expect(got == best_k,
                   "rounds mismatch: got " + std::to_string(got) + " want " +
                       std::to_string(best_k));
    }
    return chk.result(4, "censorship rounds");
}

// Criterion 5: mixed steal equilibrium: root accuracy, simulated deviation
// gains, and comparative statics.
CriterionResult c5_mixed_steal(const Options& opt) {
    Check chk;
    RngStream r(opt.seed, 500);

    const auto g_of = [](const games::StealParams& sp, double p) {
        return (sp.sigma + sp.rho) * sp.prize() * games::mean_inverse_attempters(p, sp.m) -
               sp.phi;
    };

    for (int i = 0; i < 200; ++i) {
        games::StealParams sp;
        const double win = uniform(r, 0.2, 1.0);
        sp.sigma = 0.6 * win;
        sp.rho = 0.4 * win;
        sp.tau = loguniform(r, 0.5, 20.0);
        sp.delta_x = uniform(r, 0.0, 5.0);
        sp.m = 2 + static_cast<int>(r.uniform_below(5));
        const double w = win * sp.prize();
        sp.phi = w * (1.0 / sp.m + (1.0 - 1.0 / sp.m) * uniform(r, 0.05, 0.95));
        const double p_star = games::steal_mixed_equilibrium(sp);
        chk.expect(p_star > 0.0 && p_star < 1.0, "expected interior equilibrium");
        chk.expect(std::fabs(g_of(sp, p_star)) <= 1e-10,
                   "|g(p*)| = " + fmt(std::fabs(g_of(sp, p_star))));
    }

    // Simulated unilateral deviations at three interior configurations.
    const long long trials = std::max<long long>(1000, static_cast<long long>(1e5 * opt.trial_scale));
    const games::StealParams configs[] = {
        {0.6, 0.4, 0.75, 1.0, 0.0, 2},   // hand case: g(p) = 0.25 - 0.5 p
        {0.4, 0.2, 0.5, 2.0, 0.5, 3},
        {0.3, 0.3, 0.4, 1.5, 0.0, 5},
    };
    int cfg_index = 0;
    for (const games::StealParams& sp : configs) {
        const double p_star = games::steal_mixed_equilibrium(sp);
        const double devs[] = {0.0, 0.5 * p_star, p_star, 0.5 * (1.0 + p_star), 1.0};
        const auto rows = sim::check_mixed_equilibrium(
            sp, devs, trials, RngStream(opt.seed, 510 + 40 * static_cast<std::uint64_t>(cfg_index)),
            opt.threads);
        for (const sim::DeviationRow& row : rows)
            chk.expect(row.gain <= 3.0 * row.se + 1e-12,
                       "deviation q=" + fmt(row.q) + " gains " + fmt(row.gain) + " (se " +
                           fmt(row.se) + ")");
        ++cfg_index;
    }

    // Comparative statics on 4-point grids.
    const games::StealParams base{0.35, 0.25, 0.6, 1.5, 0.0, 3};
    double prev = -1.0;
    for (double tau : {0.8, 1.2, 1.8, 2.6}) {
        games::StealParams sp = base;
        sp.tau = tau;
        const double p = games::steal_mixed_equilibrium(sp);
        chk.expect(p >= prev - 1e-12, "p* not nondecreasing in prize");
        prev = p;
    }
    prev = -1.0;
    for (double win : {0.35, 0.5, 0.7, 0.95}) {
        games::StealParams sp = base;
        sp.sigma = 0.6 * win;
        sp.rho = 0.4 * win;
        const double p = games::steal_mixed_equilibrium(sp);
        chk.expect(p >= prev - 1e-12, "p* not nondecreasing in sigma+rho");
        prev = p;
    }
    prev = 2.0;
    for (double phi : {0.35, 0.5, 0.7, 0.85}) {
        games::StealParams sp = base;
        sp.phi = phi;
        const double p = games::steal_mixed_equilibrium(sp);
        chk.expect(p <= prev + 1e-12, "p* not nonincreasing in phi");
        prev = p;
    }
    prev = 2.0;
    for (int m : {2, 3, 5, 8}) {
        games::StealParams sp = base;
        sp.m = m;
        const double p = games::steal_mixed_equilibrium(sp);
        chk.expect(p <= prev + 1e-12, "p* not nonincreasing in m");
        prev = p;
    }
    return chk.result(5, "mixed steal equilibrium");
}

// Criterion 6: equal tip splitting defeats stealing at the multiplicity bound.
CriterionResult c6_equal_split(const Options& opt) {
    Check chk;
    RngStream r(opt.seed, 600);
    for (int i = 0; i < 100; ++i) {
        const double tau = loguniform(r, 0.1, 100.0);
        const double phi = loguniform(r, 0.05, 10.0);
        const long long n_bar = games::anti_steal_multiplicity(tau, phi);
        const double per_copy = tau / static_cast<double>(n_bar + 1);
        chk.expect(per_copy < phi, "per-copy prize not below phi at n_bar");
        if (n_bar > 0)
            chk.expect(tau / static_cast<double>(n_bar) >= phi, "n_bar not minimal");

        games::StealParams sp;
        sp.sigma = 0.6;
        sp.rho = 0.4;
        sp.phi = phi;
        sp.tau = per_copy;
        sp.delta_x = 0.0;
        sp.m = 1;
        chk.expect(!games::steal_profitable(sp), "steal still profitable at n_bar");
    }
    return chk.result(6, "equal-split deterrence");
}

// Criterion 7: uniform auction identities, Monte Carlo revenue, numeric
// optimal-auction revenue.
CriterionResult c7_auction(const Options& opt) {
    Check chk;
    for (double vbar : {1.0, 8.0}) {
        for (int m = 1; m <= 30; ++m) {
            const double a = auction::uniform_opt_revenue(vbar, m);
            const double b = auction::uniform_revenue(vbar, 0.5 * vbar, m);
            chk.expect(std::fabs(a - b) <= 1e-12 * vbar, "optimal-reserve identity at m=" +
                                                             std::to_string(m));
            const double no_reserve = auction::uniform_revenue(vbar, 0.0, m);
            chk.expect(a > no_reserve, "reserve must strictly beat no reserve");
        }
    }
    chk.expect(std::fabs(auction::uniform_opt_revenue(1.0, 1) - 0.25) <= 1e-12,
               "m=1 value 0.25");
    chk.expect(std::fabs(auction::uniform_opt_revenue(1.0, 2) - 5.0 / 12.0) <= 1e-12,
               "m=2 value 5/12");

    const long long trials = std::max<long long>(1000, static_cast<long long>(1e6 * opt.trial_scale));
    int slot = 0;
    for (int m : {1, 2, 5, 10}) {
        for (double reserve : {0.0, 0.25, 0.5}) {
            RngStream r(opt.seed, 700 + static_cast<std::uint64_t>(slot++));
            const MeanSe mc = mc_mean(trials, [&]() {
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
                return v1 >= reserve ? std::max(v2, reserve) : 0.0;
            });
            const double closed = auction::uniform_revenue(1.0, reserve, m);
            chk.expect(std::fabs(mc.mean - closed) <= 3.0 * mc.se,
                       "MC revenue m=" + std::to_string(m) + " r=" + fmt(reserve) + ": " +
                           fmt(mc.mean) + " vs " + fmt(closed));
        }
    }

    for (int m : {1, 2, 5}) {
        auction::AuctionSpec spec;
        spec.m = m;
        spec.dist.vbar = 1.0;
        spec.dist.cdf = [](double v) { return v; };
        spec.dist.pdf = [](double) { return 1.0; };
        const double numeric = auction::myerson_revenue_numeric(spec, {1e-10, 1e-10, 200});
        const double closed = auction::uniform_opt_revenue(1.0, m);
        chk.expect(std::fabs(numeric - closed) <= 1e-6,
                   "numeric optimal revenue m=" + std::to_string(m) + ": " + fmt(numeric) +
                       " vs " + fmt(closed));
    }
    return chk.result(7, "auction revenue");
}

// Criterion 8: certificate-latency math against Monte Carlo and the
// stealability bound.
CriterionResult c8_poa(const Options& opt) {
    Check chk;
    const long long trials = std::max<long long>(1000, static_cast<long long>(1e6 * opt.trial_scale));
    int slot = 0;
    for (int ell : {1, 2, 3, 5}) {
        for (double factor : {0.5, 1.0, 2.0}) {
            const double mu = 1.0;
            const double budget = factor * ell / mu;
            RngStream r(opt.seed, 800 + static_cast<std::uint64_t>(slot++));
            const MeanSe mc =
                mc_mean(trials, [&]() { return r.erlang(ell, mu) <= budget ? 1.0 : 0.0; });
            const double closed = poa::poa_success(ell, mu, budget);
            chk.expect(std::fabs(mc.mean - closed) <= 3.0 * mc.se,
                       "erlang cdf ell=" + std::to_string(ell) + ": " + fmt(mc.mean) + " vs " +
                           fmt(closed));
        }
    }
    for (int ell : {1, 2, 3, 5}) {
        for (double ratio : {0.5, 1.0, 2.0}) {
            RngStream r(opt.seed, 830 + static_cast<std::uint64_t>(slot++));
            const MeanSe mc = mc_mean(trials, [&]() {
                return r.erlang(ell, ratio) < r.erlang(ell, 1.0) ? 1.0 : 0.0;
            });
            const double closed = poa::race_prob(ell, 1.0, ratio);
            chk.expect(std::fabs(mc.mean - closed) <= 3.0 * mc.se,
                       "race ell=" + std::to_string(ell) + " ratio=" + fmt(ratio) + ": " +
                           fmt(mc.mean) + " vs " + fmt(closed));
        }
    }

    for (int ell : {1, 2, 3, 5, 50})
        chk.expect(std::fabs(poa::race_prob(ell, 1.0, 1.0) - 0.5) <= 1e-12, "symmetric race");
    for (int ell : {1, 2, 3, 5, 20})
        for (double ratio : {0.5, 1.0, 2.0, 10.0}) {
            const double s =
                poa::race_prob(ell, 1.0, ratio) + poa::race_prob(ell, ratio, 1.0);
            chk.expect(std::fabs(s - 1.0) <= 1e-12, "race pair sum");
        }

    // Simulated stealability against the analytic bound on a 27-point grid.
    const long long strials =
        std::max<long long>(1000, static_cast<long long>(1e5 * opt.trial_scale));
    for (int ell : {1, 2, 5}) {
        for (double ratio : {0.5, 1.0, 2.0}) {
            for (double factor : {0.5, 1.0, 2.0}) {
                sim::TickConfig cfg;
                cfg.ell = ell;
                cfg.proposers = {
                    {"victim", 1, 1.0, 2.0 * ell, 0.0, 0.0},
                    {"thief", 2, ratio, factor * ell / ratio, 0.0, 0.0},
                };
                const auto est = sim::estimate_sigma_rho(
                    cfg, "victim", "thief", strials,
                    RngStream(opt.seed, 900 + static_cast<std::uint64_t>(slot++)), opt.threads);
                poa::RaceParams rp;
                rp.ell = ell;
                rp.mu_i = 1.0;
                rp.mu_j = ratio;
                rp.delta_i = 2.0 * ell;
                rp.delta_j = factor * ell / ratio;
                const double bound = poa::stealability_bound(rp, {1e-10, 1e-10, 200});
                chk.expect(est.sigma.mean <= bound + 3.0 * est.sigma.se,
                           "sigma exceeds bound: " + fmt(est.sigma.mean) + " vs " + fmt(bound));
            }
        }
    }
    return chk.result(8, "certificate latency");
}

// --------------------------------------------------------------------------
// Criterion 9 helpers: random DAG workloads.

struct DagCase {
    std::vector<sched::Tx> txs;
    std::map<std::string, int> ranks;
};

DagCase random_dag(RngStream& r, int max_nodes, bool with_cycles, bool with_t_da,
                   bool with_duplicates) {
    DagCase dag;
    const int n_props = 1 + static_cast<int>(r.uniform_below(6));
    std::vector<int> perm(static_cast<std::size_t>(n_props));
    for (int i = 0; i < n_props; ++i) perm[static_cast<std::size_t>(i)] = i + 1;
    for (int i = n_props - 1; i > 0; --i)
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[r.uniform_below(static_cast<std::uint64_t>(i) + 1)]);
    for (int i = 0; i < n_props; ++i) dag.ranks["P" + std::to_string(i)] = perm[static_cast<std::size_t>(i)];

    const int n = 1 + static_cast<int>(r.uniform_below(static_cast<std::uint64_t>(max_nodes)));
    double t_da = 0.0;
    for (int i = 0; i < n; ++i) {
        sched::Tx tx;
        tx.id = "x" + std::to_string(i);
        tx.logical_id = tx.id;
        tx.tip = r.uniform_below(1000);
        tx.proposer = "P" + std::to_string(r.uniform_below(static_cast<std::uint64_t>(n_props)));
        tx.tie_hash = r.next_u64();
        if (with_t_da) {
            t_da += r.next_double();
            tx.t_da = t_da;
        }
        dag.txs.push_back(std::move(tx));
    }

    // Forward edges keep the base graph acyclic.
    const int m = static_cast<int>(r.uniform_below(std::min(351ULL, 2ULL * n + 1)));
    for (int e = 0; e < m && n >= 2; ++e) {
        const int j = 1 + static_cast<int>(r.uniform_below(static_cast<std::uint64_t>(n - 1)));
        const int i = static_cast<int>(r.uniform_below(static_cast<std::uint64_t>(j)));
        dag.txs[static_cast<std::size_t>(j)].deps.push_back("x" + std::to_string(i));
    }

    if (with_cycles && n >= 2) {
        const int cycles = 1 + static_cast<int>(r.uniform_below(2));
        for (int c = 0; c < cycles; ++c) {
            const int len = 2 + static_cast<int>(r.uniform_below(3));
            std::vector<int> nodes;
            for (int t = 0; t < len; ++t)
                nodes.push_back(static_cast<int>(r.uniform_below(static_cast<std::uint64_t>(n))));
            std::sort(nodes.begin(), nodes.end());
            nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
            if (nodes.size() < 2) continue;
            for (std::size_t t = 0; t < nodes.size(); ++t) {
                const int from = nodes[t];
                const int to = nodes[(t + 1) % nodes.size()];
                dag.txs[static_cast<std::size_t>(to)].deps.push_back("x" + std::to_string(from));
            }
        }
    }

    if (with_duplicates && n_props >= 2) {
        // Turn a few transactions into logical groups spread over proposers.
        const int groups = 1 + static_cast<int>(r.uniform_below(5));
        std::set<int> grouped;
        for (int g = 0; g < groups; ++g) {
            const int base = static_cast<int>(r.uniform_below(static_cast<std::uint64_t>(n)));
            if (!grouped.insert(base).second) continue;  // already grouped
            const int copies =
                1 + static_cast<int>(r.uniform_below(static_cast<std::uint64_t>(n_props - 1)));
            for (int cidx = 0; cidx < copies; ++cidx) {
                sched::Tx copy = dag.txs[static_cast<std::size_t>(base)];
                copy.id = copy.logical_id + ".d" + std::to_string(cidx);
                int op = 0;
                for (const char ch : dag.txs[static_cast<std::size_t>(base)].proposer)
                    if (ch >= '0' && ch <= '9') op = op * 10 + (ch - '0');
                copy.proposer = "P" + std::to_string((op + 1 + cidx) % n_props);
                copy.tie_hash = r.next_u64();
                if (with_t_da) {
                    t_da += r.next_double();
                    copy.t_da = t_da;
                }
                dag.txs.push_back(std::move(copy));
            }
        }
    }
    return dag;
}

std::string serialize(const sched::MergeResult& res) {
    std::ostringstream os;
    for (const auto& id : res.order) os << id << '|';
    os << '/';
    for (const auto& id : res.rejected) os << id << '|';
    os << '/';
    for (const auto& [prop, units] : res.payouts) os << prop << '=' << units << '|';
    os << '/' << res.burned;
    return os.str();
}

// Test-side cycle membership: a vertex is cyclic iff it reaches itself.
std::vector<bool> oracle_cyclic(const std::vector<sched::Tx>& txs) {
    const std::size_t n = txs.size();
    std::map<std::string, int> idx;
    for (std::size_t i = 0; i < n; ++i) idx[txs[i].id] = static_cast<int>(i);
    std::vector<std::vector<int>> out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& dep : txs[i].deps)
            if (idx.count(dep)) out[static_cast<std::size_t>(idx[dep])].push_back(static_cast<int>(i));
    std::vector<bool> cyclic(n, false);
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<bool> seen(n, false);
        std::vector<int> frontier = out[s];
        while (!frontier.empty()) {
            const int v = frontier.back();
            frontier.pop_back();
            if (v == static_cast<int>(s)) {
                cyclic[s] = true;
                break;
            }
            if (seen[static_cast<std::size_t>(v)]) continue;
            seen[static_cast<std::size_t>(v)] = true;
            for (int w : out[static_cast<std::size_t>(v)]) frontier.push_back(w);
        }
    }
    return cyclic;
}

CriterionResult c9_pdm(const Options& opt) {
    Check chk;
    RngStream r(opt.seed, 1100);

    // Determinism under permutations + linear extension. Duplicate groups can
    // add up to 25 copies, so the base node budget keeps totals within 200.
    for (int i = 0; i < 1000; ++i) {
        const bool with_cycles = i % 10 == 0;
        const bool with_t_da = i % 2 == 0;
        DagCase dag = random_dag(r, 175, with_cycles, with_t_da, i % 5 == 0);
        const sched::ProposerRank ranks(dag.ranks);
        const sched::MergeResult base = sched::pdm_merge(dag.txs, ranks);
        const std::string want = serialize(base);

        std::vector<sched::Tx> shuffled = dag.txs;
        for (int p = 0; p < 100; ++p) {
            for (std::size_t j = shuffled.size(); j > 1; --j)
                std::swap(shuffled[j - 1], shuffled[r.uniform_below(j)]);
            const sched::MergeResult again = sched::pdm_merge(shuffled, ranks);
            if (serialize(again) != want) {
                chk.expect(false, "merge not permutation-invariant");
                break;
            }
        }
        chk.expect(true, "");

        // Linear extension over the full merge sequence.
        std::map<std::string, std::size_t> pos;
        for (std::size_t j = 0; j < base.sequence.size(); ++j) pos[base.sequence[j]] = j;
        bool order_ok = true;
        for (const sched::Tx& tx : dag.txs) {
            if (!pos.count(tx.id)) continue;
            for (const auto& dep : tx.deps)
                if (pos.count(dep) && pos[dep] >= pos[tx.id]) order_ok = false;
        }
        chk.expect(order_ok, "dependency violated in output order");

        // Exact integer conservation: executed tips = payouts + burned.
        std::uint64_t executed_tips = 0;
        std::map<std::string, std::uint64_t> logical_tip;
        for (const sched::Tx& tx : dag.txs) logical_tip[tx.logical_id] = tx.tip;
        for (const auto& [logical, copy] : base.executed) executed_tips += logical_tip[logical];
        std::uint64_t paid = base.burned;
        for (const auto& [prop, units] : base.payouts) paid += units;
        chk.expect(paid == executed_tips, "payout conservation violated");
    }

    // Tip-raise monotonicity.
    for (int i = 0; i < 1000; ++i) {
        DagCase dag = random_dag(r, 120, false, i % 2 == 0, false);
        const sched::ProposerRank ranks(dag.ranks);
        const sched::MergeResult before = sched::pdm_merge(dag.txs, ranks);
        if (before.order.empty()) continue;
        const std::size_t pick = r.uniform_below(before.order.size());
        const sched::TxId target = before.order[pick];
        std::size_t old_pos = pick;
        for (sched::Tx& tx : dag.txs)
            if (tx.id == target) tx.tip += 1 + r.uniform_below(500);
        const sched::MergeResult after = sched::pdm_merge(dag.txs, ranks);
        std::size_t new_pos = after.order.size();
        for (std::size_t j = 0; j < after.order.size(); ++j)
            if (after.order[j] == target) new_pos = j;
        chk.expect(new_pos <= old_pos, "tip raise moved tx later");
    }

    // Cycle rejection matches an independent reachability oracle.
    for (int i = 0; i < 200; ++i) {
        DagCase dag = random_dag(r, 80, true, false, false);
        const std::vector<bool> cyc = oracle_cyclic(dag.txs);
        std::map<std::string, int> idx;
        for (std::size_t j = 0; j < dag.txs.size(); ++j) idx[dag.txs[j].id] = static_cast<int>(j);
        // Expected rejects: cyclic vertices plus everything reachable from them.
        std::vector<bool> expected(dag.txs.size(), false);
        std::vector<int> frontier;
        for (std::size_t j = 0; j < dag.txs.size(); ++j)
            if (cyc[j]) {
                expected[j] = true;
                frontier.push_back(static_cast<int>(j));
            }
        std::vector<std::vector<int>> out(dag.txs.size());
        for (std::size_t j = 0; j < dag.txs.size(); ++j)
            for (const auto& dep : dag.txs[j].deps)
                if (idx.count(dep))
                    out[static_cast<std::size_t>(idx[dep])].push_back(static_cast<int>(j));
        while (!frontier.empty()) {
            const int v = frontier.back();
            frontier.pop_back();
            for (int w : out[static_cast<std::size_t>(v)])
                if (!expected[static_cast<std::size_t>(w)]) {
                    expected[static_cast<std::size_t>(w)] = true;
                    frontier.push_back(w);
                }
        }
        std::set<std::string> want;
        for (std::size_t j = 0; j < dag.txs.size(); ++j)
            if (expected[j]) want.insert(dag.txs[j].id);
        const sched::MergeResult res =
            sched::pdm_merge(dag.txs, sched::ProposerRank(dag.ranks));
        const std::set<std::string> got(res.rejected.begin(), res.rejected.end());
        chk.expect(got == want, "rejected set differs from cycle oracle");
    }
    return chk.result(9, "priority-DAG merge");
}

// Criterion 10: multi-submission optima, corrective surcharge, simulator.
CriterionResult c10_multisub(const Options& opt) {
    Check chk;
    RngStream r(opt.seed, 1200);
    for (int i = 0; i < 1000; ++i) {
        ext::MultiSubParams p;
        p.v = loguniform(r, 1.0, 100.0);
        p.c = loguniform(r, 0.01, 1.0);
        p.eta = loguniform(r, 0.01, 1.0);
        const double e2 = loguniform(r, 0.001, 0.5);
        p.e = ext::MultiSubParams::quadratic_externality(e2);
        int cap = 100;
        if (i % 2 == 0) {
            p.proposers = ext::HomogeneousProposers{uniform(r, 0.0, 0.9), uniform(r, 0.1, 1.0)};
        } else {
            std::vector<std::pair<double, double>> het;
            for (int j = 0; j < 10; ++j)
                het.emplace_back(uniform(r, 0.0, 0.9), uniform(r, 0.1, 1.0));
            std::sort(het.begin(), het.end(), [](const auto& a, const auto& b) {
                return (1.0 - a.first) * a.second > (1.0 - b.first) * b.second;
            });
            p.proposers = het;
            cap = 10;
        }

        const auto brute = [&](bool social) {
            int best_k = 0;
            double best_u = 0.0;
            for (int k = 1; k <= cap; ++k) {
                double u = p.v * ext::inclusion_prob(k, p) - k * p.c;
                if (social) u -= p.eta * p.e(k);
                if (u > best_u) {
                    best_u = u;
                    best_k = k;
                }
            }
            return best_k;
        };

        const int kp = ext::private_opt_k(p, cap);
        const int ks = ext::social_opt_k(p, cap);
        chk.expect(kp == brute(false), "private optimum mismatch");
        chk.expect(ks == brute(true), "social optimum mismatch");
        chk.expect(ks <= kp, "social optimum above private optimum");

        const int adjusted = ext::private_opt_k(
            p, cap, [&](int k) { return ext::pigou_surcharge(k, p); });
        chk.expect(adjusted == ks, "surcharge-adjusted private optimum differs from social");
    }

    // Simulator inclusion frequencies against the analytic probability.
    sim::TickConfig cfg;
    cfg.ell = 2;
    for (int j = 0; j < 5; ++j) {
        sim::ProposerCfg pc;
        pc.id = "P" + std::to_string(j);
        pc.rank = j + 1;
        pc.mu = 1.0 + 0.3 * j;
        pc.budget = 1.5;
        pc.censor_prob = 0.1 + 0.1 * j;
        cfg.proposers.push_back(pc);
    }
    ext::MultiSubParams analytic;
    analytic.v = 10.0;
    analytic.c = 0.1;
    std::vector<std::pair<double, double>> het;
    for (const sim::ProposerCfg& pc : cfg.proposers)
        het.emplace_back(pc.censor_prob, poa::poa_success(cfg.ell, pc.mu, pc.budget));
    analytic.proposers = het;

    const long long trials =
        std::max<long long>(1000, static_cast<long long>(1e5 * opt.trial_scale));
    int slot = 0;
    for (int k : {1, 2, 3, 5}) {
        const auto est = sim::estimate_inclusion(
            cfg, k, trials, RngStream(opt.seed, 1300 + 20 * static_cast<std::uint64_t>(slot++)),
            opt.threads);
        const double psi = ext::inclusion_prob(k, analytic);
        chk.expect(std::fabs(est.mean - psi) <= 3.0 * est.se,
                   "inclusion k=" + std::to_string(k) + ": " + fmt(est.mean) + " vs " + fmt(psi));
    }
    return chk.result(10, "multi-submission optima");
}

// Criterion 11: spam optimum and bounded ordering spam.
CriterionResult c11_spam(const Options& opt) {
    Check chk;
    RngStream r(opt.seed, 1400);
    for (int i = 0; i < 100; ++i) {
        ext::SpamParams p;
        ext::ConcaveTheta th;
        th.theta_max = uniform(r, 0.2, 1.0);
        th.gamma = loguniform(r, 0.2, 5.0);
        p.theta = th;
        p.prize = loguniform(r, 0.5, 100.0);
        p.cost = loguniform(r, 0.05, 10.0);

        const ext::SpamOptimum closed = ext::optimal_spam(p);
        const auto profit = [&](double s) { return ext::spam_profit(s, p); };
        const double hi = grow_bracket(profit);
        const num::ScalarMax mx = num::maximize_scalar(profit, 0.0, hi, {1e-10, 0.0, 500});
        chk.expect(std::fabs(closed.s - mx.argmax) <= 1e-6,
                   "spam optimum: closed " + fmt(closed.s) + " vs numeric " + fmt(mx.argmax));
    }

    for (int i = 0; i < 100; ++i) {
        ext::OrderingSpamParams p;
        p.base_fee = loguniform(r, 0.05, 2.0);
        p.target_tip = uniform(r, 0.0, 5.0);
        const int k_max = 50;
        for (int k = 0; k < k_max; ++k) p.overbids.push_back(r.next_double());
        const double cap = loguniform(r, 1.0, 50.0);
        const double decay = uniform(r, 0.5, 0.95);
        p.benefit = [cap, decay](int k) { return cap * (1.0 - std::pow(decay, k)); };

        const std::optional<int> got = ext::max_profitable_advance(p, k_max);
        std::optional<int> want;
        for (int k = 1; k <= k_max; ++k)
            if (p.benefit(k) > ext::ordering_spam_cost(k, p)) want = k;
        chk.expect(got == want, "ordering spam enumeration mismatch");
    }
    return chk.result(11, "spam economics");
}

// Criterion 12: deadline root and sign structure.
CriterionResult c12_timing(const Options& opt) {
    Check chk;
    RngStream r(opt.seed, 1500);
    const num::Tolerance tight{1e-13, 0.0, 200};
    for (int i = 0; i < 100; ++i) {
        const double W = loguniform(r, 0.5, 10.0);
        const double w = uniform(r, 0.0, 0.9) * W;
        const double pi_ba = uniform(r, 0.0, 0.6);
        const double pi_snipe = pi_ba + uniform(r, 0.05, 1.0) * (1.0 - pi_ba);
        games::TimingParams p =
            i % 2 == 0 ? games::TimingParams::linear(W, w, pi_ba, pi_snipe)
                       : games::TimingParams::exponential(W, w, pi_ba, pi_snipe,
                                                          uniform(r, 0.5, 4.0));
        const double sbar = games::deadline(p, tight);
        const double snipe_val = pi_snipe * W + (1.0 - pi_snipe) * w;
        const double now_val = pi_ba * W + (1.0 - pi_ba) * w;
        const double h_at = p.rho_b(sbar) * snipe_val - now_val;
        chk.expect(std::fabs(h_at) <= 1e-10, "h(deadline) = " + fmt(h_at));

        for (double frac : {0.25, 0.5, 0.9}) {
            const double s = sbar * frac;
            chk.expect(games::snipe_best_response(p, p.rho_b(s)) == games::TimingChoice::Wait,
                       "expected Wait before the deadline");
        }
        for (double frac : {0.1, 0.5, 0.9}) {
            const double s = sbar + (1.0 - sbar) * frac;
            chk.expect(
                games::snipe_best_response(p, p.rho_b(s)) == games::TimingChoice::SendNow,
                "expected SendNow after the deadline");
        }
    }
    const games::TimingParams hand = games::TimingParams::linear(1.0, 0.0, 0.4, 0.8);
    chk.expect(std::fabs(games::deadline(hand, tight) - 0.5) <= 1e-10,
               "linear hand case deadline");
    return chk.result(12, "timing deadline");
}

// Criterion 13: the delay objective against its generative story.
CriterionResult c13_delay_objective(const Options& opt) {
    Check chk;
    const long long trials =
        std::max<long long>(1000, static_cast<long long>(1e6 * opt.trial_scale));
    const hazard::HazardParams hz{1.0, 1.0, 1.0, 1.0};
    const double alphas[] = {0.0, 0.25, std::log(2.0), 1.5, 3.0};
    const auto rows = sim::check_delay_objective(hz, 0.5, alphas, trials,
                                                 RngStream(opt.seed, 1600), opt.threads);
    for (const sim::DelayRow& row : rows)
        chk.expect(std::fabs(row.sim_mean - row.analytic) <=
                       std::max(3.0 * row.se, 1e-12),
                   "alpha=" + fmt(row.alpha) + ": " + fmt(row.sim_mean) + " vs " +
                       fmt(row.analytic));
    return chk.result(13, "delay objective");
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const Options& opt) {
    std::vector<CriterionResult> out;
    out.push_back(c1_envelope_oracle(opt));
    out.push_back(c2_two_hazard_reduction(opt));
    out.push_back(c3_drop_cutoff(opt));
    out.push_back(c4_censorship_rounds(opt));
    out.push_back(c5_mixed_steal(opt));
    out.push_back(c6_equal_split(opt));
    out.push_back(c7_auction(opt));
    out.push_back(c8_poa(opt));
    out.push_back(c9_pdm(opt));
    out.push_back(c10_multisub(opt));
    out.push_back(c11_spam(opt));
    out.push_back(c12_timing(opt));
    out.push_back(c13_delay_objective(opt));
    return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CriterionResult& r) { return r.pass; });
}

}  // namespace mcpmev::validate
