#include "mcpmev/externality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcpmev/errors.hpp"

namespace mcpmev::ext {

void SpamParams::validate() const {
    if (!(prize >= 0.0)) throw DomainError("SpamParams: prize must be >= 0");
    if (!(cost > 0.0)) throw DomainError("SpamParams: cost must be > 0");
    if (const auto* c = std::get_if<ConcaveTheta>(&theta)) {
        if (!(c->theta_max > 0.0 && c->theta_max <= 1.0))
            throw DomainError("ConcaveTheta: theta_max must be in (0,1]");
        if (!(c->gamma > 0.0)) throw DomainError("ConcaveTheta: gamma must be > 0");
    } else {
        const auto& cl = std::get<CliffTheta>(theta);
        if (!(cl.s_cliff >= 0.0)) throw DomainError("CliffTheta: s_cliff must be >= 0");
        if (!(cl.theta_post > 0.0 && cl.theta_post <= 1.0))
            throw DomainError("CliffTheta: theta_post must be in (0,1]");
    }
}

double SpamParams::theta_at(double s) const {
    if (const auto* c = std::get_if<ConcaveTheta>(&theta))
        return c->theta_max * -std::expm1(-c->gamma * s);
    const auto& cl = std::get<CliffTheta>(theta);
    return s >= cl.s_cliff ? cl.theta_post : 0.0;
}

double spam_profit(double s, const SpamParams& p) {
    p.validate();
    if (!(s >= 0.0)) throw DomainError("spam_profit: s must be >= 0");
    return p.theta_at(s) * p.prize - s * p.cost;
}

SpamOptimum optimal_spam(const SpamParams& p) {
    p.validate();
    if (const auto* c = std::get_if<ConcaveTheta>(&p.theta)) {
        // Interior stationarity: theta'(s) prize = cost with
        // theta'(s) = theta_max gamma e^{-gamma s}.
        const double margin0 = c->theta_max * c->gamma * p.prize;
        if (margin0 <= p.cost) return {0.0, 0.0, false};
        const double s = std::log(margin0 / p.cost) / c->gamma;
        const double profit = spam_profit(s, p);
        return {s, profit, profit > 0.0};
    }
    const auto& cl = std::get<CliffTheta>(p.theta);
    const double profit = cl.theta_post * p.prize - cl.s_cliff * p.cost;
    if (profit > 0.0) return {cl.s_cliff, profit, true};
    return {0.0, 0.0, false};
}

void OrderingSpamParams::validate() const {
    if (!(base_fee > 0.0)) throw DomainError("OrderingSpamParams: base_fee must be > 0");
    if (!(target_tip >= 0.0)) throw DomainError("OrderingSpamParams: target_tip must be >= 0");
    for (double d : overbids)
        if (!(d >= 0.0)) throw DomainError("OrderingSpamParams: overbids must be >= 0");
}

double ordering_spam_cost(int K, const OrderingSpamParams& p) {
    p.validate();
    if (K < 0) throw DomainError("ordering_spam_cost: K must be >= 0");
    if (static_cast<std::size_t>(K) > p.overbids.size())
        throw InsufficientDeltas("ordering_spam_cost: fewer overbids than K");
    double total = 0.0;
    for (int k = 0; k < K; ++k)
        total += p.base_fee + p.target_tip + p.overbids[static_cast<std::size_t>(k)];
    return total;
}

std::optional<int> max_profitable_advance(const OrderingSpamParams& p, int K_max) {
    p.validate();
    if (K_max < 1) throw DomainError("max_profitable_advance: K_max must be >= 1");
    if (!p.benefit) throw DomainError("max_profitable_advance: benefit not set");
    if (static_cast<std::size_t>(K_max) > p.overbids.size())
        throw InsufficientDeltas("max_profitable_advance: fewer overbids than K_max");
    std::optional<int> best;
    double cost = 0.0;
    for (int K = 1; K <= K_max; ++K) {
        cost += p.base_fee + p.target_tip + p.overbids[static_cast<std::size_t>(K - 1)];
        if (p.benefit(K) > cost) best = K;
    }
    return best;
}

void MultiSubParams::validate() const {
    if (!(v > 0.0) || !(c > 0.0)) throw DomainError("MultiSubParams: v, c must be > 0");
    if (!(eta >= 0.0)) throw DomainError("MultiSubParams: eta must be >= 0");
    if (const auto* h = std::get_if<HomogeneousProposers>(&proposers)) {
        if (!(h->p >= 0.0 && h->p < 1.0))
            throw ProbabilityError("MultiSubParams: censor probability outside [0,1)");
        if (!(h->pi > 0.0 && h->pi <= 1.0))
            throw ProbabilityError("MultiSubParams: PoA probability outside (0,1]");
    } else {
        for (const auto& [pp, pi] : std::get<std::vector<std::pair<double, double>>>(proposers)) {
            if (!(pp >= 0.0 && pp < 1.0))
                throw ProbabilityError("MultiSubParams: censor probability outside [0,1)");
            if (!(pi > 0.0 && pi <= 1.0))
                throw ProbabilityError("MultiSubParams: PoA probability outside (0,1]");
        }
    }
}

namespace {

// Per-contact success probabilities (1 - p_r) pi_r in contact order.
struct ContactPlan {
    double homogeneous = -1.0;  // < 0 means heterogeneous
    std::vector<double> successes;

    double at(int r) const {
        if (homogeneous >= 0.0) return homogeneous;
        if (static_cast<std::size_t>(r) >= successes.size())
            throw TooManyProposers("multi-submission: k exceeds the contacted proposer list");
        return successes[static_cast<std::size_t>(r)];
    }
};

ContactPlan contact_plan(const MultiSubParams& p) {
    ContactPlan plan;
    if (const auto* h = std::get_if<HomogeneousProposers>(&p.proposers)) {
        plan.homogeneous = (1.0 - h->p) * h->pi;
        return plan;
    }
    for (const auto& [pp, pi] : std::get<std::vector<std::pair<double, double>>>(p.proposers))
        plan.successes.push_back((1.0 - pp) * pi);
    if (p.greedy_reorder)
        std::sort(plan.successes.begin(), plan.successes.end(), std::greater<>());
    return plan;
}

int proposer_cap(const MultiSubParams& p, int K_max) {
    if (const auto* list = std::get_if<std::vector<std::pair<double, double>>>(&p.proposers))
        return std::min(K_max, static_cast<int>(list->size()));
    return K_max;
}

}  // namespace

double inclusion_prob(int k, const MultiSubParams& p) {
    p.validate();
    if (k < 0) throw DomainError("inclusion_prob: k must be >= 0");
    const ContactPlan plan = contact_plan(p);
    double miss = 1.0;
    for (int r = 0; r < k; ++r) miss *= 1.0 - plan.at(r);
    return 1.0 - miss;
}

namespace {

// Shared scan for the private and social problems: walks the increments
// until the first nonpositive one, checking the diminishing-gains premise
// along the way.
int opt_scan(const MultiSubParams& p, int K_max,
             const std::function<double(int)>& extra_marginal) {
    p.validate();
    if (K_max < 0) throw DomainError("opt_scan: K_max must be >= 0");
    const int cap = proposer_cap(p, K_max);
    const ContactPlan plan = contact_plan(p);
    double miss = 1.0;
    double prev_gain = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cap; ++k) {
        const double gain = miss * plan.at(k);  // Psi_{k+1} - Psi_k
        if (gain > prev_gain + 1e-15)
            throw NotDiminishing("multi-submission: marginal inclusion gains not decreasing");
        prev_gain = gain;
        const double marginal = p.v * gain - p.c - (extra_marginal ? extra_marginal(k) : 0.0);
        if (marginal <= 0.0) return k;
        miss *= 1.0 - plan.at(k);
    }
    return cap;
}

}  // namespace

int private_opt_k(const MultiSubParams& p, int K_max,
                  const std::function<double(int)>& marginal_surcharge) {
    return opt_scan(p, K_max, marginal_surcharge);
}

int social_opt_k(const MultiSubParams& p, int K_max) {
    if (!p.e) throw DomainError("social_opt_k: externality schedule e not set");
    double prev_diff = -std::numeric_limits<double>::infinity();
    return opt_scan(p, K_max, [&](int k) {
        const double diff = p.e(k + 1) - p.e(k);
        if (diff < prev_diff - 1e-12)
            throw DomainError("social_opt_k: externality schedule not convex");
        prev_diff = diff;
        return p.eta * diff;
    });
}

double pigou_surcharge(int k, const MultiSubParams& p) {
    p.validate();
    if (k < 0) throw DomainError("pigou_surcharge: k must be >= 0");
    if (!p.e) throw DomainError("pigou_surcharge: externality schedule e not set");
    return p.eta * (p.e(k + 1) - p.e(k));
}

}  // namespace mcpmev::ext
