#include "mcpmev/poa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mcpmev/errors.hpp"

namespace mcpmev::poa {

namespace {

double logsumexp(std::span<const double> logs) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : logs) mx = std::max(mx, v);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double v : logs) s += std::exp(v - mx);
    return mx + std::log(s);
}

}  // namespace

void RaceParams::validate() const {
    if (ell < 1) throw DomainError("RaceParams: ell must be >= 1");
    if (!(mu_i > 0.0) || !(mu_j > 0.0)) throw DomainError("RaceParams: rates must be > 0");
    if (!(delta_i >= 0.0) || !(delta_j >= 0.0))
        throw DomainError("RaceParams: budgets must be >= 0");
}

double erlang_sf(int ell, double mu, double t) {
    if (ell < 1) throw DomainError("erlang_sf: ell must be >= 1");
    if (!(mu > 0.0)) throw DomainError("erlang_sf: mu must be > 0");
    if (!(t >= 0.0)) throw DomainError("erlang_sf: t must be >= 0");
    const double x = mu * t;
    if (x == 0.0) return 1.0;
    const double lx = std::log(x);
    std::vector<double> logs(static_cast<std::size_t>(ell));
    for (int r = 0; r < ell; ++r)
        logs[static_cast<std::size_t>(r)] = -x + r * lx - std::lgamma(r + 1.0);
    return std::exp(logsumexp(logs));
}

double poa_success(int ell, double mu, double budget) {
    if (ell < 1) throw DomainError("poa_success: ell must be >= 1");
    if (!(mu > 0.0)) throw DomainError("poa_success: mu must be > 0");
    if (!(budget >= 0.0)) throw DomainError("poa_success: budget must be >= 0");
    const double x = mu * budget;
    if (x == 0.0) return 0.0;
    const double lx = std::log(x);
    std::vector<double> logs(static_cast<std::size_t>(ell));
    for (int r = 0; r < ell; ++r)
        logs[static_cast<std::size_t>(r)] = -x + r * lx - std::lgamma(r + 1.0);
    return -std::expm1(logsumexp(logs));
}

double erlang_pdf(int ell, double mu, double t) {
    if (ell < 1) throw DomainError("erlang_pdf: ell must be >= 1");
    if (!(mu > 0.0)) throw DomainError("erlang_pdf: mu must be > 0");
    if (!(t >= 0.0)) throw DomainError("erlang_pdf: t must be >= 0");
    if (t == 0.0) return ell == 1 ? mu : 0.0;
    return std::exp(ell * std::log(mu) + (ell - 1) * std::log(t) - mu * t -
                    std::lgamma(static_cast<double>(ell)));
}

double race_prob(int ell, double mu_i, double mu_j) {
    if (ell < 1) throw DomainError("race_prob: ell must be >= 1");
    if (!(mu_i > 0.0) || !(mu_j > 0.0)) throw DomainError("race_prob: rates must be > 0");
    const double p = mu_j / (mu_i + mu_j);
    const double q = mu_i / (mu_i + mu_j);
    if (p == 0.0) return 0.0;
    if (q == 0.0) return 1.0;
    const int n = 2 * ell - 1;
    const double lp = std::log(p);
    const double lq = std::log(q);
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(ell));
    for (int r = ell; r <= n; ++r) {
        const double lc =
            std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
        logs.push_back(lc + r * lp + (n - r) * lq);
    }
    return std::min(1.0, std::exp(logsumexp(logs)));
}

double stealability_bound(const RaceParams& p, const num::Tolerance& tol) {
    p.validate();
    if (p.delta_j == 0.0) return 0.0;
    const double cap =
        std::min(race_prob(p.ell, p.mu_i, p.mu_j), poa_success(p.ell, p.mu_j, p.delta_j));
    const auto integrand = [&](double s) {
        return erlang_pdf(p.ell, p.mu_j, s) * erlang_sf(p.ell, p.mu_i, s);
    };
    // The integrand tail past this point is below erlang_sf(ell, mu_j, hi),
    // which the cutoff makes negligible; without the cutoff and segmenting,
    // huge budgets would put all probe points past the density bump.
    const double hi = std::min(p.delta_j, (40.0 + 10.0 * p.ell) / p.mu_j);
    const double mean = p.ell / p.mu_j;
    double integral = 0.0;
    double left = 0.0;
    for (double factor : {2.0, 4.0, 8.0, 16.0}) {
        const double right = std::min(hi, factor * mean);
        if (right > left) integral += num::integrate(integrand, left, right, tol);
        left = right;
    }
    if (hi > left) integral += num::integrate(integrand, left, hi, tol);
    return std::clamp(std::min(integral, cap), 0.0, 1.0);
}

double hypoexponential_success(std::span<const double> rates, double budget) {
    if (rates.empty()) throw DomainError("hypoexponential_success: need at least one rate");
    if (!(budget >= 0.0)) throw DomainError("hypoexponential_success: budget must be >= 0");
    for (double r : rates)
        if (!(r > 0.0)) throw DomainError("hypoexponential_success: rates must be > 0");
    if (budget == 0.0) return 0.0;

    const std::size_t n = rates.size();
    if (n == 1) return -std::expm1(-rates[0] * budget);

    const bool all_equal = std::all_of(rates.begin(), rates.end(),
                                       [&](double r) { return r == rates[0]; });
    if (all_equal) {
        // Exact ties are the Erlang limit; collapse instead of failing.
        return poa_success(static_cast<int>(n), rates[0], budget);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::fabs(rates[i] - rates[j]) <=
                1e-9 * std::max(std::fabs(rates[i]), std::fabs(rates[j])))
                throw DegenerateRates("hypoexponential_success: rates nearly equal; use Erlang");

    // Partial-fraction weights: w_i = prod_{j != i} mu_j / (mu_j - mu_i).
    double cdf = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            w *= rates[j] / (rates[j] - rates[i]);
        }
        cdf += w * -std::expm1(-rates[i] * budget);
    }
    return std::clamp(cdf, 0.0, 1.0);
}

}  // namespace mcpmev::poa
