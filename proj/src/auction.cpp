#include "mcpmev/auction.hpp"

#include <cmath>
#include <limits>

#include "mcpmev/errors.hpp"

namespace mcpmev::auction {

double uniform_reserve(double vbar) {
    if (!(vbar > 0.0)) throw DomainError("uniform_reserve: vbar must be > 0");
    return 0.5 * vbar;
}

double uniform_revenue(double vbar, double r, int m) {
    if (!(vbar > 0.0)) throw DomainError("uniform_revenue: vbar must be > 0");
    if (m < 1) throw DomainError("uniform_revenue: m must be >= 1");
    if (!(r >= 0.0 && r <= vbar)) throw DomainError("uniform_revenue: r outside [0, vbar]");
    const double x = r / vbar;
    const double md = static_cast<double>(m);
    return vbar * ((md - 1.0) / (md + 1.0) + std::pow(x, md) -
                   (2.0 * md / (md + 1.0)) * std::pow(x, md + 1.0));
}

double uniform_opt_revenue(double vbar, int m) {
    if (!(vbar > 0.0)) throw DomainError("uniform_opt_revenue: vbar must be > 0");
    if (m < 1) throw DomainError("uniform_opt_revenue: m must be >= 1");
    const double md = static_cast<double>(m);
    return vbar * ((md - 1.0) + std::ldexp(1.0, -m)) / (md + 1.0);
}

double BidderValueModel::base_value() const {
    hazard.validate();
    return tau * std::exp(-hazard.lambda * alpha) + hazard::accrual(alpha, hazard);
}

double BidderValueModel::sample_value(rng::RngStream& stream) const {
    hazard.validate();
    const double common = tau * std::exp(-hazard.lambda * alpha);
    if (!mev_bonus_dist) return common + hazard::accrual(alpha, hazard);
    return common + mev_bonus_dist(stream);
}

double myerson_revenue_numeric(const AuctionSpec& spec, const num::Tolerance& tol) {
    tol.validate();
    if (spec.m < 1) throw DomainError("myerson_revenue_numeric: m must be >= 1");
    const CustomDist& d = spec.dist;
    if (!d.cdf || !d.pdf || !(d.vbar > 0.0))
        throw DomainError("myerson_revenue_numeric: distribution not fully specified");

    const auto virtual_value = [&](double v) {
        const double f = d.pdf(v);
        if (!(f > 0.0) || !std::isfinite(f)) return std::numeric_limits<double>::quiet_NaN();
        return v - (1.0 - d.cdf(v)) / f;
    };

    // Regularity probe: the virtual value must be increasing on the support.
    constexpr int kProbe = 1000;
    double prev = -std::numeric_limits<double>::infinity();
    const double slack = 1e-12 * d.vbar;
    for (int i = 0; i < kProbe; ++i) {
        const double v = d.vbar * (i + 0.5) / kProbe;
        const double phi = virtual_value(v);
        if (!std::isfinite(phi)) throw NotRegular("myerson_revenue_numeric: undefined virtual value");
        if (phi < prev - slack)
            throw NotRegular("myerson_revenue_numeric: virtual value not increasing");
        prev = phi;
    }

    // Reserve: root of the virtual value (phi(vbar) = vbar > 0).
    const double lo = d.vbar * 0.5 / kProbe;
    double reserve = lo;
    if (virtual_value(lo) < 0.0)
        reserve = num::bisect(virtual_value, lo, d.vbar, tol);

    // E[max{phi(V*), 0}] against the max-of-m density m F^{m-1} f.
    const double md = static_cast<double>(spec.m);
    const auto integrand = [&](double v) {
        const double phi = virtual_value(v);
        const double dens = md * std::pow(d.cdf(v), md - 1.0) * d.pdf(v);
        return phi * dens;
    };
    return num::integrate(integrand, reserve, d.vbar, tol);
}

SellerDecision keep_vs_auction(double tau, const hazard::HazardParams& hz,
                               const std::function<double(double)>& rev_curve,
                               std::span<const double> alpha_grid) {
    if (!rev_curve) throw DomainError("keep_vs_auction: rev_curve not set");
    const double keep = hazard::envelope(tau, hz);
    double auc = -std::numeric_limits<double>::infinity();
    for (double a : alpha_grid) auc = std::max(auc, rev_curve(a));
    if (alpha_grid.empty()) auc = 0.0;
    SellerDecision out;
    out.keep_value = keep;
    out.auction_value = auc;
    out.choice = auc > keep ? SellerChoice::Auction : SellerChoice::Keep;
    out.value = std::max(keep, auc);
    return out;
}

double posted_price_revenue(double tau, double alpha, const hazard::HazardParams& hz) {
    hz.validate();
    if (!(tau >= 0.0) || !(alpha >= 0.0))
        throw DomainError("posted_price_revenue: tau and alpha must be >= 0");
    return tau * std::exp(-hz.lambda * alpha);
}

}  // namespace mcpmev::auction
