#pragma once

#include <span>

#include "mcpmev/numeric.hpp"

namespace mcpmev::poa {

/// Certificate race between two proposers: ell co-signatures each, co-signer
/// arrival rates mu_i / mu_j, and residual time budgets after publish.
struct RaceParams {
    int ell = 1;
    double mu_i = 1.0;
    double mu_j = 1.0;
    double delta_i = 0.0;
    double delta_j = 0.0;

    void validate() const;
};

/// Probability that ell rate-mu co-signatures arrive within the budget
/// (Erlang CDF), evaluated in log space for overflow safety.
double poa_success(int ell, double mu, double budget);

/// Erlang(ell, mu) survival function and density.
double erlang_sf(int ell, double mu, double t);
double erlang_pdf(int ell, double mu, double t);

/// Probability that j's certificate completes before i's:
/// the 2*ell - 1 Bernoulli-trial tail sum, equal to the regularized
/// incomplete beta I_p(ell, ell) at p = mu_j / (mu_i + mu_j).
double race_prob(int ell, double mu_i, double mu_j);

/// Upper bound on same-tick stealability: the tighter of the truncated race
/// integral over [0, delta_j] and min{race_prob, poa_success(ell, mu_j, delta_j)}.
double stealability_bound(const RaceParams& p, const num::Tolerance& tol = {});

/// CDF at `budget` of a sum of independent exponentials with pairwise
/// distinct rates. Exactly equal rates collapse to the Erlang CDF; rates
/// merely close (within 1e-9 relative) raise DegenerateRates.
double hypoexponential_success(std::span<const double> rates, double budget);

}  // namespace mcpmev::poa
