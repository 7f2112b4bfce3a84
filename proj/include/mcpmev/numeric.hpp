#pragma once

#include <functional>

namespace mcpmev::num {

/// Convergence control shared by the scalar solvers.
struct Tolerance {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_iter = 200;

    void validate() const;
};

using ScalarFn = std::function<double(double)>;

/// Root of f on [lo, hi]; f(lo) and f(hi) must have opposite (or zero) signs.
double bisect(const ScalarFn& f, double lo, double hi, const Tolerance& tol = {});

struct ScalarMax {
    double argmax = 0.0;
    double value = 0.0;
};

/// Golden-section maximizer of a unimodal f on [lo, hi].
ScalarMax maximize_scalar(const ScalarFn& f, double lo, double hi, const Tolerance& tol = {});

/// Adaptive Simpson quadrature of f over [lo, hi].
double integrate(const ScalarFn& f, double lo, double hi, const Tolerance& tol = {});

}  // namespace mcpmev::num
