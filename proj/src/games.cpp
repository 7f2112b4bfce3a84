#include "mcpmev/games.hpp"

#include <cmath>

#include "mcpmev/errors.hpp"

namespace mcpmev::games {

void CensorUserParams::validate() const {
    if (!(v > 0.0) || !(c > 0.0)) throw DomainError("CensorUserParams: v, c must be > 0");
    if (s < 1) throw DomainError("CensorUserParams: s must be >= 1");
    if (!(Q >= 0.0 && Q < 1.0)) throw DomainError("CensorUserParams: Q must be in [0,1)");
}

double user_utility(int k, const CensorUserParams& p) {
    p.validate();
    if (k < 0) throw DomainError("user_utility: k must be >= 0");
    if (k == 0) return 0.0;
    return p.v * (1.0 - std::pow(p.Q, k)) - static_cast<double>(k) * p.s * p.c;
}

long long optimal_rounds(const CensorUserParams& p) {
    p.validate();
    const double sc = static_cast<double>(p.s) * p.c;
    const double margin0 = p.v * (1.0 - p.Q);
    if (margin0 <= sc) return 0;
    if (p.Q == 0.0) return 1;  // first broadcast already certain
    // k* = max{k : v Q^k (1-Q) > s c}; locate via logs, then settle the
    // strict inequality exactly around the estimate.
    const double x = std::log(sc / margin0) / std::log(p.Q);
    long long k = std::max(0LL, static_cast<long long>(std::floor(x)) - 2);
    const auto gain_positive = [&](long long kk) {
        return p.v * std::pow(p.Q, static_cast<double>(kk)) * (1.0 - p.Q) > sc;
    };
    while (k > 0 && !gain_positive(k)) --k;  // settle below the cutoff first
    while (gain_positive(k + 1)) ++k;
    return k + 1;
}

long long heuristic_rounds(double v, double c) {
    if (!(v > 0.0) || !(c > 0.0)) throw DomainError("heuristic_rounds: v, c must be > 0");
    return static_cast<long long>(std::floor(v / c));
}

void StealParams::validate() const {
    if (!(sigma >= 0.0) || !(rho >= 0.0) || sigma + rho > 1.0 + 1e-15)
        throw ProbabilityError("StealParams: need sigma, rho >= 0 with sigma + rho <= 1");
    if (!(phi >= 0.0) || !(tau >= 0.0) || !(delta_x >= 0.0))
        throw DomainError("StealParams: phi, tau, delta_x must be >= 0");
    if (m < 1) throw DomainError("StealParams: m must be >= 1");
}

bool steal_profitable(const StealParams& p) {
    p.validate();
    return (p.sigma + p.rho) * p.prize() > p.phi;
}

double mean_inverse_attempters(double p, int m) {
    if (m < 1) throw DomainError("mean_inverse_attempters: m must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw ProbabilityError("mean_inverse_attempters: p outside [0,1]");
    if (m == 1) return 1.0;
    if (p < 1e-8) return 1.0 - 0.5 * (m - 1) * p;  // series limit at p -> 0
    return -std::expm1(static_cast<double>(m) * std::log1p(-p)) / (m * p);
}

double steal_mixed_equilibrium(const StealParams& p, const num::Tolerance& tol) {
    p.validate();
    tol.validate();
    const double win = (p.sigma + p.rho) * p.prize();
    if (win <= p.phi) return 0.0;
    if (win >= static_cast<double>(p.m) * p.phi) return 1.0;
    const auto g = [&](double q) { return win * mean_inverse_attempters(q, p.m) - p.phi; };
    // g is continuous and strictly decreasing with g(0) > 0 > g(1).
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < tol.max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) return mid;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if (gm > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= tol.abs_tol * 1e-3) return 0.5 * (lo + hi);
    }
    throw NoConvergence("steal_mixed_equilibrium: max_iter exceeded");
}

long long anti_steal_multiplicity(double tau, double phi) {
    if (!(phi > 0.0)) throw DomainError("anti_steal_multiplicity: phi must be > 0");
    if (!(tau >= 0.0)) throw DomainError("anti_steal_multiplicity: tau must be >= 0");
    for (long long n = 0;; ++n) {
        if (tau / static_cast<double>(n + 1) < phi) return n;
    }
}

void TimingParams::validate() const {
    if (!(W > 0.0) || !(w >= 0.0)) throw DomainError("TimingParams: need W > 0 and w >= 0");
    if (!(pi_ba >= 0.0 && pi_ba <= 1.0) || !(pi_snipe >= 0.0 && pi_snipe <= 1.0))
        throw ProbabilityError("TimingParams: ordering probabilities outside [0,1]");
    if (!rho_b) throw DomainError("TimingParams: rho_b not set");
}

TimingParams TimingParams::linear(double W, double w, double pi_ba, double pi_snipe) {
    TimingParams p{W, w, pi_ba, pi_snipe, [](double s) { return 1.0 - s; }};
    return p;
}

TimingParams TimingParams::exponential(double W, double w, double pi_ba, double pi_snipe,
                                       double gamma) {
    if (!(gamma > 0.0)) throw DomainError("TimingParams::exponential: gamma must be > 0");
    TimingParams p{W, w, pi_ba, pi_snipe, [gamma](double s) {
                       return (std::exp(-gamma * s) - std::exp(-gamma)) / -std::expm1(-gamma);
                   }};
    return p;
}

TimingChoice snipe_best_response(const TimingParams& p, double rho_at_obs) {
    p.validate();
    if (!(rho_at_obs >= 0.0 && rho_at_obs <= 1.0))
        throw ProbabilityError("snipe_best_response: rho outside [0,1]");
    const double wait_val = rho_at_obs * (p.pi_snipe * p.W + (1.0 - p.pi_snipe) * p.w);
    const double now_val = p.pi_ba * p.W + (1.0 - p.pi_ba) * p.w;
    const double scale = std::max({1.0, std::fabs(wait_val), std::fabs(now_val)});
    if (std::fabs(wait_val - now_val) <= 1e-12 * scale) return TimingChoice::Indifferent;
    return wait_val > now_val ? TimingChoice::Wait : TimingChoice::SendNow;
}

double deadline(const TimingParams& p, const num::Tolerance& tol) {
    p.validate();
    if (!(p.W > p.w)) throw NoRoot("deadline: degenerate region W <= w");
    if (!(p.pi_snipe > p.pi_ba)) throw NoRoot("deadline: requires pi_snipe > pi_ba");
    const double snipe_val = p.pi_snipe * p.W + (1.0 - p.pi_snipe) * p.w;
    const double now_val = p.pi_ba * p.W + (1.0 - p.pi_ba) * p.w;
    const auto h = [&](double s) { return p.rho_b(s) * snipe_val - now_val; };
    if (!(h(0.0) > 0.0)) throw NoRoot("deadline: waiting never preferred at s = 0");
    if (h(1.0) > 0.0) throw NoRoot("deadline: no root in (0,1); rho_b(1) must vanish");
    return num::bisect(h, 0.0, 1.0, tol);
}

}  // namespace mcpmev::games
