#include "mcpmev/hazard.hpp"

#include <cmath>
#include <limits>

#include "mcpmev/errors.hpp"

namespace mcpmev::hazard {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_prob(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ProbabilityError(std::string(name) + " outside [0,1]");
}
}  // namespace

void HazardParams::validate() const {
    if (!(A > 0.0) || !(k > 0.0) || !(lambda > 0.0))
        throw DomainError("HazardParams: A, k, lambda must be > 0");
    if (!(delta >= 0.0)) throw DomainError("HazardParams: delta must be >= 0");
}

double accrual(double alpha, const HazardParams& p) {
    p.validate();
    if (!(alpha >= 0.0)) throw DomainError("accrual: alpha must be >= 0");
    return p.saturation() * -std::expm1(-(p.k + p.lambda) * alpha);
}

double u_mev(double alpha, double tau, const HazardParams& p) {
    p.validate();
    if (!(alpha >= 0.0)) throw DomainError("u_mev: alpha must be >= 0");
    if (!(tau >= 0.0)) throw DomainError("u_mev: tau must be >= 0");
    return accrual(alpha, p) + tau * std::exp(-p.delta * alpha);
}

DelayChoice optimal_delay(double tau, const HazardParams& p) {
    p.validate();
    if (!(tau >= 0.0)) throw DomainError("optimal_delay: tau must be >= 0");
    const double sat = p.saturation();
    const double dt = p.delta * tau;
    if (dt == 0.0) {
        // Maximizer only in the alpha -> infinity limit. With delta == 0 the
        // tip is never discounted, so it survives into the limit value.
        return {kInf, true, sat + (p.delta == 0.0 ? tau : 0.0)};
    }
    if (dt >= p.A * p.k) return {0.0, false, tau};
    if (p.delta >= p.k + p.lambda)
        throw UnsupportedRegime("optimal_delay: interior solution requires delta < k + lambda");
    const double alpha = std::log(p.A * p.k / dt) / (p.k + p.lambda - p.delta);
    return {alpha, false, u_mev(alpha, tau, p)};
}

double envelope(double tau, const HazardParams& p) {
    p.validate();
    if (!(tau >= 0.0)) throw DomainError("envelope: tau must be >= 0");
    const double sat = p.saturation();
    const double r = p.delta * tau / (p.A * p.k);
    if (r == 0.0) return sat + (p.delta == 0.0 ? tau : 0.0);
    if (r >= 1.0) return std::max(tau, sat);
    if (p.delta >= p.k + p.lambda)
        throw UnsupportedRegime("envelope: interior regime requires delta < k + lambda");
    const double denom = p.k + p.lambda - p.delta;
    return sat * (1.0 - std::pow(r, (p.k + p.lambda) / denom)) +
           tau * std::pow(r, p.delta / denom);
}

double immediate_threshold(const HazardParams& p) {
    p.validate();
    if (p.delta == 0.0) return kInf;
    return p.A * p.k / p.delta;
}

double drop_cutoff(double beta, const HazardParams& p, const num::Tolerance& tol) {
    p.validate();
    if (!(beta >= 0.0)) throw DomainError("drop_cutoff: beta must be >= 0");
    if (beta <= envelope(0.0, p)) return 0.0;
    // M(tau) >= tau, so doubling the upper end terminates.
    double hi = std::max(beta, 1.0);
    while (envelope(hi, p) < beta) hi *= 2.0;
    return num::bisect([&](double t) { return envelope(t, p) - beta; }, 0.0, hi, tol);
}

PolicyAction proposer_policy(const ProposerPolicyInput& in, const HazardParams& p,
                             const num::Tolerance& tol) {
    if (!(in.tau >= 0.0) || !(in.beta >= 0.0))
        throw DomainError("proposer_policy: tau and beta must be >= 0");
    const double tau_d = drop_cutoff(in.beta, p, tol);
    if (in.tau < tau_d) return {PolicyAction::Kind::Drop, 0.0, false};
    const DelayChoice d = optimal_delay(in.tau, p);
    return {PolicyAction::Kind::Keep, d.alpha, d.saturated};
}

double interblock_total(std::span<const ReactionSpec> reactions) {
    double total = 0.0;
    for (const ReactionSpec& r : reactions) {
        check_prob(r.incl_prob, "incl_prob");
        check_prob(r.pre_prob, "pre_prob");
        check_prob(r.post_prob, "post_prob");
        if (r.pre_prob + r.post_prob > 1.0 + 1e-15)
            throw ProbabilityError("pre_prob + post_prob exceeds 1");
        total += r.incl_prob * (r.pre_prob * r.delta_pre + r.post_prob * r.delta_post);
    }
    return total;
}

double ConcurrencyModel::k(double n) const { return k0 * std::pow(n, a); }
double ConcurrencyModel::lambda(double n) const { return lambda0 * std::pow(n, b); }
double ConcurrencyModel::dk(double n) const { return k0 * a * std::pow(n, a - 1.0); }
double ConcurrencyModel::dlambda(double n) const { return lambda0 * b * std::pow(n, b - 1.0); }

double delay_sensitivity(double n, double tau, const ConcurrencyModel& m) {
    if (!(n > 0.0) || !(tau > 0.0)) throw DomainError("delay_sensitivity: need n, tau > 0");
    const double k = m.k(n);
    const double lam = m.lambda(n);
    if (!(k > 0.0) || !(lam > 0.0))
        throw DomainError("delay_sensitivity: k(n), lambda(n) must be > 0");
    if (m.A * k < lam * tau)
        throw OutOfRegime("delay_sensitivity: outside interior regime A k(n) >= lambda(n) tau");
    const double kp = m.dk(n);
    const double lp = m.dlambda(n);
    return -(kp / (k * k)) * std::log(m.A * k / (lam * tau)) +
           (1.0 / k) * (kp / k - lp / lam);
}

std::optional<double> dominance_threshold(const ConcurrencyModel& m, double tau, double beta,
                                          double n_lo, double n_hi, double step) {
    if (!(step > 0.0) || !(n_lo > 0.0) || !(n_lo <= n_hi))
        throw DomainError("dominance_threshold: bad scan range");
    const auto keeps_with_delay = [&](double n) {
        const HazardParams p = HazardParams::one_hazard(m.A, m.k(n), m.lambda(n));
        if (envelope(tau, p) < beta) return false;          // drop region
        return m.lambda(n) * tau < m.A * m.k(n);            // interior: alpha* > 0
    };
    const long long steps = static_cast<long long>((n_hi - n_lo) / step + 1e-9);
    if (keeps_with_delay(n_lo)) return std::nullopt;  // nothing to expand into
    for (long long i = 1; i <= steps; ++i) {
        const double n = n_lo + static_cast<double>(i) * step;
        if (keeps_with_delay(n)) return n;
    }
    return std::nullopt;
}

}  // namespace mcpmev::hazard
