#pragma once

// Special functions and integration primitives shared by the model and the
// propagator: associated Laguerre polynomials, factorial ratios, and the
// cumulative area of the coupling modulation.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ionlambda {

/// L_n^k(x) by the upward three-term recurrence.
inline double laguerre_assoc(unsigned n, unsigned k, double x) {
    if (n == 0) return 1.0;
    double prev = 1.0;
    double curr = 1.0 + k - x;
    for (unsigned j = 2; j <= n; ++j) {
        const double next = ((2.0 * j - 1.0 + k - x) * curr - (j - 1.0 + k) * prev) / j;
        prev = curr;
        curr = next;
    }
    return curr;
}

/// (n+m)!/n!. The range is checked in log space before the product is
/// formed, so overflow is reported instead of returning inf.
inline double factorial_ratio(unsigned n, unsigned m) {
    double log_sum = 0.0;
    for (unsigned i = 1; i <= m; ++i) log_sum += std::log(static_cast<double>(n) + i);
    if (log_sum > std::log(std::numeric_limits<double>::max())) {
        throw std::overflow_error("factorial_ratio(" + std::to_string(n) + ", " +
                                  std::to_string(m) + ") exceeds the double range");
    }
    double product = 1.0;
    for (unsigned i = 1; i <= m; ++i) product *= static_cast<double>(n) + i;
    return product;
}

/// Coupling modulation gamma(t): either constant 1 or sech(t / 2 tau),
/// switched on at t_start. Times are in units of 1/lambda.
struct PulseProfile {
    enum class Kind { Constant, Sech };

    Kind kind = Kind::Constant;
    double tau = 1.0;
    double t_start = 0.0;

    static PulseProfile constant(double t_start = 0.0) { return {Kind::Constant, 1.0, t_start}; }

    static PulseProfile sech(double tau, double t_start) {
        PulseProfile p{Kind::Sech, tau, t_start};
        p.validate();
        return p;
    }

    void validate() const {
        if (kind == Kind::Sech && !(tau > 0.0 && std::isfinite(tau))) {
            throw std::invalid_argument("sech pulse width tau must be positive, got " +
                                        std::to_string(tau));
        }
        if (!std::isfinite(t_start)) throw std::invalid_argument("pulse t_start must be finite");
    }

    double gamma(double t) const {
        if (kind == Kind::Constant) return 1.0;
        return 1.0 / std::cosh(t / (2.0 * tau));
    }
};

inline const char* to_string(PulseProfile::Kind kind) {
    return kind == PulseProfile::Kind::Constant ? "constant" : "sech";
}

namespace detail {
// 4 tau arctan(tanh(t / 4 tau)): antiderivative of sech(t / 2 tau).
inline double sech_antiderivative(double tau, double t) {
    return 4.0 * tau * std::atan(std::tanh(t / (4.0 * tau)));
}
}  // namespace detail

/// Theta(t) = integral of gamma over [t_start, t].
inline double pulse_area(const PulseProfile& profile, double t) {
    if (!(t >= profile.t_start)) {
        throw std::domain_error("pulse_area: t = " + std::to_string(t) +
                                " precedes t_start = " + std::to_string(profile.t_start));
    }
    switch (profile.kind) {
        case PulseProfile::Kind::Constant:
            return t - profile.t_start;
        case PulseProfile::Kind::Sech:
            return detail::sech_antiderivative(profile.tau, t) -
                   detail::sech_antiderivative(profile.tau, profile.t_start);
    }
    return 0.0;
}

/// Area still to come after t for a sech profile (zero for constant, which
/// never saturates; callers should not ask).
inline double sech_residual_area(const PulseProfile& profile, double t) {
    return 4.0 * profile.tau * (std::numbers::pi / 4.0) - detail::sech_antiderivative(profile.tau, t);
}

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
struct SimpsonPanel {
    double a, fa, m, fm, b, fb, whole;
};

inline double simpson(double a, double fa, double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f, const SimpsonPanel& p,
                               double tol, int depth, int min_depth, int max_depth) {
    const double lm = 0.5 * (p.a + p.m);
    const double rm = 0.5 * (p.m + p.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(p.a, p.fa, flm, p.m, p.fm);
    const double right = simpson(p.m, p.fm, frm, p.b, p.fb);
    const double delta = left + right - p.whole;
    if (depth >= min_depth && std::abs(delta) <= 15.0 * tol) {
        // Richardson step
        return left + right + delta / 15.0;
    }
    if (depth >= max_depth) {
        throw QuadratureError("quad_adaptive: no convergence on [" + std::to_string(p.a) + ", " +
                              std::to_string(p.b) + "] after " + std::to_string(max_depth) +
                              " bisections");
    }
    return adaptive_simpson(f, {p.a, p.fa, lm, flm, p.m, p.fm, left}, 0.5 * tol, depth + 1,
                            min_depth, max_depth) +
           adaptive_simpson(f, {p.m, p.fm, rm, frm, p.b, p.fb, right}, 0.5 * tol, depth + 1,
                            min_depth, max_depth);
}
}  // namespace detail

/// Adaptive Simpson quadrature with Richardson extrapolation. Throws
/// QuadratureError when a panel still fails the error test at max_depth.
inline double quad_adaptive(const std::function<double(double)>& f, double a, double b,
                            double tol, int max_depth = 50) {
    if (!(tol > 0.0)) throw std::invalid_argument("quad_adaptive: tol must be positive");
    if (a == b) return 0.0;
    if (b < a) return -quad_adaptive(f, b, a, tol, max_depth);
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    // A few forced levels keep a narrow peak from slipping between the first nodes.
    constexpr int min_depth = 4;
    return detail::adaptive_simpson(f, {a, fa, m, fm, b, fb, detail::simpson(a, fa, fm, b, fb)},
                                    tol, 0, min_depth, max_depth);
}

}  // namespace ionlambda
