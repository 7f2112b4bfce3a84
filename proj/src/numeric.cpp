#include "mcpmev/numeric.hpp"

#include <cmath>

#include "mcpmev/errors.hpp"

namespace mcpmev::num {

void Tolerance::validate() const {
    if (abs_tol < 0.0 || rel_tol < 0.0 || !(abs_tol + rel_tol > 0.0))
        throw DomainError("Tolerance: need abs_tol, rel_tol >= 0 and abs_tol + rel_tol > 0");
    if (max_iter < 1) throw DomainError("Tolerance: max_iter must be >= 1");
}

double bisect(const ScalarFn& f, double lo, double hi, const Tolerance& tol) {
    tol.validate();
    if (!(lo < hi)) throw DomainError("bisect: need lo < hi");
    double flo = f(lo);
    if (flo == 0.0) return lo;
    double fhi = f(hi);
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw NoBracket("bisect: f(lo) and f(hi) have the same sign");

    for (int it = 0; it < tol.max_iter; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid == lo || mid == hi) return mid;  // bracket exhausted in double precision
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        const double width_goal = tol.abs_tol + tol.rel_tol * std::fabs(mid);
        if (std::fabs(fm) <= tol.abs_tol || (hi - lo) <= width_goal) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    throw NoConvergence("bisect: max_iter exceeded");
}

ScalarMax maximize_scalar(const ScalarFn& f, double lo, double hi, const Tolerance& tol) {
    tol.validate();
    if (!(lo <= hi)) throw DomainError("maximize_scalar: need lo <= hi");
    constexpr double invphi = 0.6180339887498949;  // 1/phi
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < tol.max_iter; ++it) {
        const double mid = a + 0.5 * (b - a);
        if ((b - a) <= tol.abs_tol + tol.rel_tol * std::fabs(mid)) {
            return {mid, f(mid)};
        }
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    throw NoConvergence("maximize_scalar: max_iter exceeded");
}

namespace {

struct SimpsonState {
    const ScalarFn& f;
    long long evals_left;
};

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(SimpsonState& st, double a, double b, double fa, double fm, double fb, double whole,
             double eps, int depth) {
    const double m = a + 0.5 * (b - a);
    const double lm = a + 0.25 * (b - a);
    const double rm = a + 0.75 * (b - a);
    if ((st.evals_left -= 2) < 0) throw NoConvergence("integrate: evaluation budget exceeded");
    const double flm = st.f(lm);
    const double frm = st.f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0) throw NoConvergence("integrate: max recursion depth reached");
    if (std::fabs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    return adapt(st, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           adapt(st, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace

double integrate(const ScalarFn& f, double lo, double hi, const Tolerance& tol) {
    tol.validate();
    if (lo == hi) return 0.0;
    double sign = 1.0;
    if (lo > hi) {
        std::swap(lo, hi);
        sign = -1.0;
    }
    const double fa = f(lo);
    const double fb = f(hi);
    const double m = lo + 0.5 * (hi - lo);
    const double fm = f(m);
    const double whole = simpson(fa, fm, fb, hi - lo);
    const double eps = tol.abs_tol + tol.rel_tol * std::fabs(whole);
    // Evaluation budget scales with max_iter so tight tolerances stay affordable.
    SimpsonState st{f, 2000LL * tol.max_iter};
    return sign * adapt(st, lo, hi, fa, fm, fb, whole, eps, 60);
}

}  // namespace mcpmev::num
