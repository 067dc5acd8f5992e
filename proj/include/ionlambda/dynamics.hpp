#pragma once

// Initial states, evolution, and ion-field entanglement measures.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "basis.hpp"
#include "model.hpp"
#include "numerics.hpp"
#include "propagator.hpp"

namespace ionlambda {

struct FieldSpec {
    enum class Kind { Fock, Coherent };

    Kind kind = Kind::Fock;
    unsigned n = 0;         ///< Fock occupation
    double nbar = 0.0;      ///< coherent mean occupation, alpha = +sqrt(nbar)
    double tail_tol = 1e-10;

    static FieldSpec fock(unsigned n) { return {Kind::Fock, n, 0.0, 1e-10}; }
    static FieldSpec coherent(double nbar, double tail_tol = 1e-10) {
        if (!(nbar >= 0.0 && std::isfinite(nbar))) {
            throw std::invalid_argument("coherent nbar must be non-negative, got " +
                                        std::to_string(nbar));
        }
        return {Kind::Coherent, 0, nbar, tail_tol};
    }
};

namespace detail {
inline double log_poisson(double nbar, unsigned k) {
    if (nbar == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return -nbar + k * std::log(nbar) - std::lgamma(k + 1.0);
}
}  // namespace detail

/// Smallest N such that the occupation tail beyond N is below tail_tol
/// (coherent), or the occupation itself (Fock).
inline unsigned choose_cutoff(const FieldSpec& spec, double tail_tol) {
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) {
        throw std::invalid_argument("tail_tol must lie in (0, 1)");
    }
    if (spec.kind == FieldSpec::Kind::Fock) return spec.n;
    if (spec.nbar == 0.0) return 0;
    // Far enough out that the neglected remainder is negligible next to tail_tol.
    const auto kmax = static_cast<unsigned>(std::ceil(spec.nbar + 40.0 * std::sqrt(spec.nbar) + 60.0));
    std::vector<double> tail(kmax + 2, 0.0);
    for (unsigned k = kmax + 1; k-- > 0;) tail[k] = tail[k + 1] + std::exp(detail::log_poisson(spec.nbar, k));
    // tail[k] = P(X >= k); want P(X > N) = tail[N + 1] < tail_tol
    for (unsigned n = 0; n <= kmax; ++n) {
        if (tail[n + 1] < tail_tol) return n;
    }
    return kmax;
}

inline unsigned choose_cutoff(const FieldSpec& spec) { return choose_cutoff(spec, spec.tail_tol); }

/// Fock amplitudes of one mode on {0..cutoff}. Coherent states are truncated
/// at choose_cutoff(spec) and renormalized.
inline std::vector<cplx> field_amplitudes(const FieldSpec& spec, unsigned cutoff) {
    const unsigned needed = choose_cutoff(spec);
    if (cutoff < needed) {
        throw std::invalid_argument("field cutoff " + std::to_string(cutoff) +
                                    " is below the required " + std::to_string(needed));
    }
    std::vector<cplx> amps(cutoff + 1, cplx{0.0, 0.0});
    if (spec.kind == FieldSpec::Kind::Fock) {
        amps[spec.n] = 1.0;
        return amps;
    }
    double norm = 0.0;
    for (unsigned k = 0; k <= needed; ++k) {
        const double c = std::exp(0.5 * detail::log_poisson(spec.nbar, k));
        amps[k] = c;
        norm += c * c;
    }
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& a : amps) a *= scale;
    return amps;
}

using IonAmplitudes = std::array<cplx, 3>;

inline IonAmplitudes ion_level(Level level) {
    IonAmplitudes a{};
    a[index_of(level)] = 1.0;
    return a;
}

/// ion (x) field1 (x) field2, with the ion vector normalized.
inline JointState initial_joint(IonAmplitudes ion, const FieldSpec& f1, const FieldSpec& f2,
                                Cutoffs cutoffs) {
    double ion_norm = 0.0;
    for (const auto& a : ion) ion_norm += std::norm(a);
    if (!(ion_norm > 0.0) || !std::isfinite(ion_norm)) {
        throw std::invalid_argument("initial ion amplitudes cannot be normalized");
    }
    for (auto& a : ion) a /= std::sqrt(ion_norm);

    const auto a1 = field_amplitudes(f1, cutoffs.c1);
    const auto a2 = field_amplitudes(f2, cutoffs.c2);
    JointState psi(cutoffs);
    for (Level l : kLevels) {
        const cplx ci = ion[index_of(l)];
        if (ci == cplx{0.0, 0.0}) continue;
        for (unsigned n1 = 0; n1 <= cutoffs.c1; ++n1) {
            if (a1[n1] == cplx{0.0, 0.0}) continue;
            for (unsigned n2 = 0; n2 <= cutoffs.c2; ++n2) psi[{l, n1, n2}] = ci * a1[n1] * a2[n2];
        }
    }
    return psi;
}

/// Ion density matrix with both modes traced out.
inline Eigen::Matrix3cd reduce_ion(const JointState& state) {
    const std::size_t f = state.cutoffs().fock_dim();
    Eigen::Matrix3cd rho = Eigen::Matrix3cd::Zero();
    for (int i = 0; i < 3; ++i) {
        const cplx* ai = state.level_data(kLevels[i]);
        for (int j = i; j < 3; ++j) {
            const cplx* aj = state.level_data(kLevels[j]);
            cplx acc{0.0, 0.0};
            for (std::size_t k = 0; k < f; ++k) acc += ai[k] * std::conj(aj[k]);
            rho(i, j) = acc;
            rho(j, i) = std::conj(acc);
        }
    }
    return rho;
}

/// tr(rho_F^2) from the explicit two-mode reduced density matrix. Costs
/// O(fock_dim^2) memory; meant for checks, not for time series.
inline double field_purity(const JointState& state) {
    const auto f = static_cast<Eigen::Index>(state.cutoffs().fock_dim());
    Eigen::MatrixXcd cols(f, 3);
    for (int i = 0; i < 3; ++i) {
        cols.col(i) = Eigen::Map<const Eigen::VectorXcd>(state.level_data(kLevels[i]), f);
    }
    const Eigen::MatrixXcd rho_f = cols * cols.adjoint();
    // millions of terms: a double accumulator drifts by ~1e-12
    long double sum = 0.0L;
    for (Eigen::Index i = 0; i < rho_f.size(); ++i) sum += std::norm(rho_f.data()[i]);
    return static_cast<double>(sum);
}

inline double linear_entropy(const Eigen::Matrix3cd& rho) { return 1.0 - rho.squaredNorm(); }

inline double von_neumann_entropy(const Eigen::Matrix3cd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> eig(rho, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double lambda = eig.eigenvalues()(k);
        if (lambda > 0.0) s -= lambda * std::log(lambda);
    }
    return s;
}

/// Everything needed to produce one entropy curve.
struct Scenario {
    ModeParams mode1;
    ModeParams mode2;
    PulseProfile profile;
    IonAmplitudes ion = ion_level(Level::two);
    FieldSpec field1;
    FieldSpec field2;
    std::vector<double> times;
    std::optional<Cutoffs> cutoffs;  ///< derived from the fields when empty
};

/// Field cutoff plus the quanta margin so that every occupied |2> state keeps
/// its |1> partner.
inline Cutoffs scenario_cutoffs(const Scenario& sc) {
    if (sc.cutoffs) return *sc.cutoffs;
    return {choose_cutoff(sc.field1) + sc.mode1.quanta, choose_cutoff(sc.field2) + sc.mode2.quanta};
}

struct EntropySeries {
    std::vector<double> times;
    std::vector<double> s_linear;
    std::vector<double> s_vn;
    Scenario params;
};

/// Evaluates both entropies at every sample, always propagating the cached
/// initial state by the full area Theta(t).
inline EntropySeries entropy_series(const Scenario& sc) {
    sc.profile.validate();
    const Cutoffs cutoffs = scenario_cutoffs(sc);
    const auto decomposition =
        std::make_shared<const Decomposition>(decompose(sc.mode1, sc.mode2, cutoffs));
    const JointState psi0 = initial_joint(sc.ion, sc.field1, sc.field2, cutoffs);

    EntropySeries out;
    out.params = sc;
    out.params.cutoffs = cutoffs;
    out.times = sc.times;
    out.s_linear.reserve(sc.times.size());
    out.s_vn.reserve(sc.times.size());
    for (double t : sc.times) {
        const JointState psi = apply(assemble(decomposition, sc.profile, t), psi0);
        const Eigen::Matrix3cd rho = reduce_ion(psi);
        out.s_linear.push_back(linear_entropy(rho));
        out.s_vn.push_back(von_neumann_entropy(rho));
    }
    return out;
}

/// Evolved joint state at a single time.
inline JointState evolve(const Scenario& sc, double t) {
    const Cutoffs cutoffs = scenario_cutoffs(sc);
    const auto decomposition =
        std::make_shared<const Decomposition>(decompose(sc.mode1, sc.mode2, cutoffs));
    return apply(assemble(decomposition, sc.profile, t),
                 initial_joint(sc.ion, sc.field1, sc.field2, cutoffs));
}

struct PlateauReport {
    enum class Classification { SuddenDeath, LongLiving, Oscillatory };

    Classification classification = Classification::Oscillatory;
    double t_freeze = std::numeric_limits<double>::infinity();
    double s_frozen = std::numeric_limits<double>::quiet_NaN();
    double tail_variation = std::numeric_limits<double>::quiet_NaN();  ///< max - min on the tail
    double t_death = std::numeric_limits<double>::quiet_NaN();  ///< start of the final S < dead_eps run
    std::size_t tail_samples = 0;
    double gamma_eps = 1e-8;
    double dead_eps = 1e-3;
};

inline const char* to_string(PlateauReport::Classification c) {
    switch (c) {
        case PlateauReport::Classification::SuddenDeath: return "SuddenDeath";
        case PlateauReport::Classification::LongLiving: return "LongLiving";
        case PlateauReport::Classification::Oscillatory: return "Oscillatory";
    }
    return "?";
}

/// First time after which the coupling stays below gamma_eps.
inline double freeze_time(const PulseProfile& profile, double gamma_eps) {
    if (profile.kind == PulseProfile::Kind::Constant) return std::numeric_limits<double>::infinity();
    if (gamma_eps >= 1.0) return profile.t_start;
    return std::max(profile.t_start, 2.0 * profile.tau * std::acosh(1.0 / gamma_eps));
}

/// Classifies the linear entropy after the pulse has died out.
inline PlateauReport classify_tail(const EntropySeries& series, const PulseProfile& profile,
                                   double gamma_eps = 1e-8, double dead_eps = 1e-3) {
    PlateauReport r;
    r.gamma_eps = gamma_eps;
    r.dead_eps = dead_eps;
    if (profile.kind == PulseProfile::Kind::Constant) return r;

    r.t_freeze = freeze_time(profile, gamma_eps);
    const auto& t = series.times;
    const auto first = std::lower_bound(t.begin(), t.end(), r.t_freeze);
    if (first == t.end()) {
        throw std::runtime_error("classify_tail: series ends at t = " +
                                 (t.empty() ? std::string("(empty)") : std::to_string(t.back())) +
                                 " before the coupling freezes at t = " + std::to_string(r.t_freeze));
    }
    const auto begin = static_cast<std::size_t>(first - t.begin());
    const auto tail_first = series.s_linear.begin() + static_cast<std::ptrdiff_t>(begin);
    r.tail_samples = t.size() - begin;
    r.s_frozen = std::accumulate(tail_first, series.s_linear.end(), 0.0) / double(r.tail_samples);
    const auto [lo, hi] = std::minmax_element(tail_first, series.s_linear.end());
    r.tail_variation = *hi - *lo;

    if (r.s_frozen < dead_eps) {
        r.classification = PlateauReport::Classification::SuddenDeath;
        std::size_t i = series.s_linear.size();
        while (i > 0 && series.s_linear[i - 1] < dead_eps) --i;
        if (i < t.size()) r.t_death = t[i];
    } else {
        r.classification = PlateauReport::Classification::LongLiving;
    }
    return r;
}

}  // namespace ionlambda
