#pragma once

#include <functional>

#include "mcpmev/numeric.hpp"

namespace mcpmev::games {

/// User-side censorship game: valuation v, per-submission cost c, contacted
/// proposer count s, and Q = product of the contacted proposers' censor
/// probabilities for one broadcast round.
struct CensorUserParams {
    double v = 1.0;
    double c = 1.0;
    int s = 1;
    double Q = 0.0;

    void validate() const;
};

/// Expected utility of k broadcast rounds: v (1 - Q^k) - k s c.
double user_utility(int k, const CensorUserParams& p);

/// Unique maximizer of user_utility over nonnegative integers.
long long optimal_rounds(const CensorUserParams& p);

/// floor(v / c): the rule-of-thumb round count used when Q is unknown.
long long heuristic_rounds(double v, double c);

/// Duplicate-steal game parameters. sigma: same-tick order win probability,
/// rho: victim-miss win probability (disjoint events), phi: marginal slot
/// shadow value, tau + delta_x: the prize, m: potential thieves.
struct StealParams {
    double sigma = 0.0;
    double rho = 0.0;
    double phi = 0.0;
    double tau = 0.0;
    double delta_x = 0.0;
    int m = 1;

    void validate() const;
    double prize() const { return tau + delta_x; }
};

/// Strict profitability test (sigma + rho)(tau + delta_x) > phi.
bool steal_profitable(const StealParams& p);

/// Attempt probability of the unique symmetric mixed equilibrium among
/// p.m identical thieves.
double steal_mixed_equilibrium(const StealParams& p, const num::Tolerance& tol = {});

/// Expected uniform-winner payoff factor E[1/(N+1)], N ~ Binomial(m-1, p).
double mean_inverse_attempters(double p, int m);

/// Smallest duplicate count n at which the equal-split prize tau/(n+1)
/// drops strictly below phi.
long long anti_steal_multiplicity(double tau, double phi);

/// Timing game: first/second mover surpluses, baseline and snipe ordering
/// probabilities, and the make-the-tick probability as a function of the
/// normalized send time.
struct TimingParams {
    double W = 1.0;
    double w = 0.0;
    double pi_ba = 0.0;
    double pi_snipe = 0.0;
    std::function<double(double)> rho_b;

    void validate() const;

    /// rho_b(s) = 1 - s.
    static TimingParams linear(double W, double w, double pi_ba, double pi_snipe);
    /// rho_b(s) = (e^{-gamma s} - e^{-gamma}) / (1 - e^{-gamma}).
    static TimingParams exponential(double W, double w, double pi_ba, double pi_snipe,
                                    double gamma);
};

enum class TimingChoice { Wait, SendNow, Indifferent };

/// Best response of the observing player given its current make-the-tick
/// probability.
TimingChoice snipe_best_response(const TimingParams& p, double rho_at_obs);

/// Last admissible send time: the root of
/// rho_b(s) (pi_snipe W + (1-pi_snipe) w) - (pi_ba W + (1-pi_ba) w).
double deadline(const TimingParams& p, const num::Tolerance& tol = {});

}  // namespace mcpmev::games
