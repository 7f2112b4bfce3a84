#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "mcpmev/numeric.hpp"

namespace mcpmev::ext {

/// Smooth exclusion model theta(s) = theta_max (1 - e^{-gamma s}).
struct ConcaveTheta {
    double theta_max = 1.0;
    double gamma = 1.0;
};

/// Capacity-cliff exclusion model: zero below s_cliff, theta_post at and above.
struct CliffTheta {
    double s_cliff = 0.0;
    double theta_post = 1.0;
};

/// Availability-spam economics: exclusion model, prize for displacing the
/// victim block, and per-block data cost.
struct SpamParams {
    std::variant<ConcaveTheta, CliffTheta> theta = ConcaveTheta{};
    double prize = 0.0;
    double cost = 1.0;

    void validate() const;
    double theta_at(double s) const;
};

/// Attacker profit theta(s) * prize - s * cost.
double spam_profit(double s, const SpamParams& p);

struct SpamOptimum {
    double s = 0.0;
    double profit = 0.0;
    bool profitable = false;
};

/// Profit-maximizing spam level: closed-form interior optimum for the
/// concave family, the cliff point for the cliff family, zero when no
/// positive-profit level exists.
SpamOptimum optimal_spam(const SpamParams& p);

/// Tip-priority ordering spam: burned base fee, the target's tip, required
/// overbids per advanced position, and the (bounded) benefit schedule.
struct OrderingSpamParams {
    double base_fee = 0.0;
    double target_tip = 0.0;
    std::vector<double> overbids;
    std::function<double(int)> benefit;

    void validate() const;
};

/// Total private cost of advancing K positions.
double ordering_spam_cost(int K, const OrderingSpamParams& p);

/// Largest K <= K_max whose benefit strictly exceeds its cost, if any.
std::optional<int> max_profitable_advance(const OrderingSpamParams& p, int K_max);

/// Identical contacted proposers: censor probability p, PoA success pi.
struct HomogeneousProposers {
    double p = 0.0;
    double pi = 1.0;
};

/// Multi-submission game: valuation, per-submission cost, externality price
/// eta, convex externality schedule e(k), and the contacted proposer model.
struct MultiSubParams {
    double v = 1.0;
    double c = 1.0;
    double eta = 0.0;
    std::function<double(int)> e;
    std::variant<HomogeneousProposers, std::vector<std::pair<double, double>>> proposers =
        HomogeneousProposers{};
    /// Contact heterogeneous proposers in descending (1-p) pi order instead
    /// of the order given. Off by default: the given order is the contract.
    bool greedy_reorder = false;

    void validate() const;

    static std::function<double(int)> quadratic_externality(double coeff) {
        return [coeff](int k) { return coeff * static_cast<double>(k) * static_cast<double>(k); };
    }
};

/// Inclusion probability of k submissions.
double inclusion_prob(int k, const MultiSubParams& p);

/// Unique private optimum of v Psi_k - k c, located by the first nonpositive
/// increment. `marginal_surcharge`, when set, adds a per-submission charge at
/// step k (used to apply a corrective fee schedule).
int private_opt_k(const MultiSubParams& p, int K_max,
                  const std::function<double(int)>& marginal_surcharge = {});

/// Unique social optimum of v Psi_k - k c - eta e(k).
int social_opt_k(const MultiSubParams& p, int K_max);

/// Per-submission surcharge eta (e(k+1) - e(k)) aligning the private and
/// social optima.
double pigou_surcharge(int k, const MultiSubParams& p);

}  // namespace mcpmev::ext
