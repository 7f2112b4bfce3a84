#pragma once

#include <functional>
#include <span>

#include "mcpmev/hazard.hpp"
#include "mcpmev/numeric.hpp"
#include "mcpmev/rng.hpp"

namespace mcpmev::auction {

/// Reserve maximizing revenue for i.i.d. Uniform[0, vbar] bidder values.
double uniform_reserve(double vbar);

/// Second-price-with-reserve expected revenue for m i.i.d. Uniform[0, vbar]
/// bidders at reserve r.
double uniform_revenue(double vbar, double r, int m);

/// Revenue at the optimal reserve vbar/2.
double uniform_opt_revenue(double vbar, int m);

/// Value distribution on [0, vbar] given by its CDF and density.
struct CustomDist {
    std::function<double(double)> cdf;
    std::function<double(double)> pdf;
    double vbar = 1.0;
};

/// How a bidder values access to a transaction at delay alpha: the
/// discount-surviving tip plus a bidder-specific reaction bonus drawn from
/// `mev_bonus_dist` (empty means the common accrual value).
struct BidderValueModel {
    double tau = 0.0;
    double alpha = 0.0;
    hazard::HazardParams hazard;
    std::function<double(rng::RngStream&)> mev_bonus_dist;

    /// e^{-lambda alpha} tau + accrual(alpha): the homogeneous value.
    double base_value() const;

    /// Draws one bidder's value; uses the bonus distribution when set.
    double sample_value(rng::RngStream& stream) const;
};

struct AuctionSpec {
    int m = 1;
    CustomDist dist;
};

/// Optimal-auction revenue for a regular value distribution: locates the
/// reserve as the root of the virtual value and integrates the clipped
/// virtual value against the density of the highest of m draws. Throws
/// NotRegular when the virtual value is not increasing on a probe grid.
double myerson_revenue_numeric(const AuctionSpec& spec, const num::Tolerance& tol = {});

enum class SellerChoice { Keep, Auction };

struct SellerDecision {
    SellerChoice choice = SellerChoice::Keep;
    double value = 0.0;
    double keep_value = 0.0;
    double auction_value = 0.0;
};

/// Compare the delay envelope of keeping against the best auction revenue on
/// a delay grid; ties resolve to Keep.
SellerDecision keep_vs_auction(double tau, const hazard::HazardParams& hz,
                               const std::function<double(double)>& rev_curve,
                               std::span<const double> alpha_grid);

/// Revenue from posting price e^{-lambda alpha} tau to identical bidders.
double posted_price_revenue(double tau, double alpha, const hazard::HazardParams& hz);

}  // namespace mcpmev::auction
