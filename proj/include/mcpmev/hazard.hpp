#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mcpmev/numeric.hpp"

namespace mcpmev::hazard {

/// Delay-economics parameters: amplitude A, accrual rate k, pre-emption
/// hazard lambda, tip-discount hazard delta. delta == lambda is the
/// one-hazard model; both rates are per tick.
struct HazardParams {
    double A = 1.0;
    double k = 1.0;
    double lambda = 1.0;
    double delta = 1.0;

    static HazardParams one_hazard(double A, double k, double lambda) {
        return {A, k, lambda, lambda};
    }

    void validate() const;

    bool is_one_hazard() const { return delta == lambda; }

    /// Accrual ceiling A k / (k + lambda).
    double saturation() const { return A * k / (k + lambda); }
};

/// Expected MEV accrued over a delay of `alpha` ticks.
double accrual(double alpha, const HazardParams& p);

/// Delay objective: accrual plus the discount-surviving tip.
double u_mev(double alpha, double tau, const HazardParams& p);

/// Optimal delay for a given tip. `saturated` marks the tau-to-zero limit
/// where the objective is maximized only as alpha -> infinity; `alpha` is
/// +infinity there and `value` carries the limiting payoff.
struct DelayChoice {
    double alpha = 0.0;
    bool saturated = false;
    double value = 0.0;
};

DelayChoice optimal_delay(double tau, const HazardParams& p);

/// Delay envelope M(tau): the best payoff over all delays.
double envelope(double tau, const HazardParams& p);

/// Tip level at and above which zero delay is optimal (A k / delta).
double immediate_threshold(const HazardParams& p);

/// Unique cutoff tau_d with M(tau_d) = beta; zero when beta <= M(0).
double drop_cutoff(double beta, const HazardParams& p, const num::Tolerance& tol = {});

struct ProposerPolicyInput {
    double tau = 0.0;
    double beta = 0.0;
};

struct PolicyAction {
    enum class Kind { Drop, Keep };
    Kind kind = Kind::Keep;
    double alpha = 0.0;  // meaningful only for Keep
    bool saturated = false;
};

/// Drop the transaction iff its tip is below the drop cutoff; otherwise keep
/// with the optimal delay.
PolicyAction proposer_policy(const ProposerPolicyInput& in, const HazardParams& p,
                             const num::Tolerance& tol = {});

/// One reaction opportunity triggered by transactions in other blocks.
struct ReactionSpec {
    double incl_prob = 0.0;
    double pre_prob = 0.0;
    double post_prob = 0.0;
    double delta_pre = 0.0;
    double delta_post = 0.0;
};

/// Expected total payoff of conflict-free reactions.
double interblock_total(std::span<const ReactionSpec> reactions);

/// Power-law concurrency response: k(n) = k0 n^a, lambda(n) = lambda0 n^b.
struct ConcurrencyModel {
    double A = 1.0;
    double k0 = 1.0;
    double a = 0.0;
    double lambda0 = 1.0;
    double b = 0.0;

    double k(double n) const;
    double lambda(double n) const;
    double dk(double n) const;
    double dlambda(double n) const;
};

/// d(alpha*)/dn in the one-hazard interior regime A k(n) >= lambda(n) tau.
double delay_sensitivity(double n, double tau, const ConcurrencyModel& m);

/// Scans n over [n_lo, n_hi] in steps and returns the first grid point where
/// keeping-with-delay (M(tau; n) >= beta and alpha* > 0) switches on, given
/// it is off at n_lo. Empty when no such transition exists on the grid.
std::optional<double> dominance_threshold(const ConcurrencyModel& m, double tau, double beta,
                                          double n_lo, double n_hi, double step = 0.1);

}  // namespace mcpmev::hazard
