#pragma once

// Couplings of the two vibronic arms of the Lambda system.
//
// Arm 1 couples |2, n1, .> to |1, n1 + m1, .>, arm 2 couples |3, ., n2> to
// |2, ., n2 + m2>. The matrix element of an arm that starts from Fock number n
// is g(n) = gamma * E_m(n) * sqrt((n + m)! / n!), with the diagonal mode
// function
//
//   E_k(n) = -eps/2 * n!/(n + k)! * L_n^k(eta^2) * exp(-eta^2 / 2) [* eta^k].
//
// The i^k phase of the Lamb-Dicke expansion is dropped; the Laguerre sign is
// kept, so g(n) may be negative.

#include <cmath>
#include <stdexcept>
#include <string>

#include "numerics.hpp"

namespace ionlambda {

struct ModeParams {
    double eta = 0.202;       ///< Lamb-Dicke parameter
    double gamma = 1.0;       ///< coupling strength, units of lambda
    unsigned quanta = 1;      ///< multi-quantum order m
    double amplitude = 0.01;  ///< laser amplitude scale eps
    bool include_eta_power = false;

    void validate() const {
        if (!(eta > 0.0 && std::isfinite(eta))) {
            throw std::invalid_argument("eta must be positive, got " + std::to_string(eta));
        }
        if (!(gamma >= 0.0 && std::isfinite(gamma))) {
            throw std::invalid_argument("gamma must be non-negative, got " + std::to_string(gamma));
        }
        if (quanta < 1) throw std::invalid_argument("quanta must be at least 1");
        if (!std::isfinite(amplitude)) throw std::invalid_argument("amplitude must be finite");
    }

    friend bool operator==(const ModeParams&, const ModeParams&) = default;
};

/// Diagonal element E_k(n) of the nonlinear mode function.
inline double mode_coupling_eps(const ModeParams& mode, unsigned k, unsigned n) {
    const double x = mode.eta * mode.eta;
    double value = -0.5 * mode.amplitude / factorial_ratio(n, k) * laguerre_assoc(n, k, x) *
                   std::exp(-0.5 * x);
    if (mode.include_eta_power) value *= std::pow(mode.eta, static_cast<int>(k));
    return value;
}

/// Copy of `mode` with the amplitude chosen so that E_m(0) = 1.
inline ModeParams unit_normalized(ModeParams mode) {
    mode.amplitude = 1.0;
    const double e0 = mode_coupling_eps(mode, mode.quanta, 0);
    mode.amplitude = 1.0 / e0;
    return mode;
}

/// Matrix element g(n) of one arm between Fock number n and n + m.
inline double effective_coupling(const ModeParams& mode, unsigned n) {
    if (mode.gamma == 0.0) return 0.0;
    return mode.gamma * mode_coupling_eps(mode, mode.quanta, n) *
           std::sqrt(factorial_ratio(n, mode.quanta));
}

struct RabiData {
    double mu = 0.0;  ///< generalized Rabi frequency, sqrt(a^2 + b^2)
    double a = 0.0;   ///< arm-1 coupling
    double b = 0.0;   ///< arm-2 coupling

    static RabiData from_arms(double a, double b) { return {std::hypot(a, b), a, b}; }
};

inline RabiData rabi(const ModeParams& mode1, const ModeParams& mode2, unsigned n1, unsigned n2) {
    return RabiData::from_arms(effective_coupling(mode1, n1), effective_coupling(mode2, n2));
}

}  // namespace ionlambda
