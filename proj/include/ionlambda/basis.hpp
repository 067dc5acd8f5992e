#pragma once

// Truncated joint basis |level, n1, n2> and pure states on it.

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ionlambda {

using cplx = std::complex<double>;

/// Electronic levels: |1> and |3> are the ground states, |2> the shared upper state.
enum class Level : int { one = 1, two = 2, three = 3 };

inline constexpr std::array<Level, 3> kLevels{Level::one, Level::two, Level::three};

inline constexpr int index_of(Level level) { return static_cast<int>(level) - 1; }

struct BasisIndex {
    Level level = Level::one;
    unsigned n1 = 0;
    unsigned n2 = 0;

    friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

inline std::string to_string(const BasisIndex& b) {
    return "|" + std::to_string(static_cast<int>(b.level)) + "," + std::to_string(b.n1) + "," +
           std::to_string(b.n2) + ">";
}

/// Largest retained Fock number per mode (inclusive).
struct Cutoffs {
    unsigned c1 = 0;
    unsigned c2 = 0;

    std::size_t fock_dim() const { return std::size_t(c1 + 1) * (c2 + 1); }
    std::size_t dim() const { return 3 * fock_dim(); }
    bool contains(unsigned n1, unsigned n2) const { return n1 <= c1 && n2 <= c2; }

    /// Flat position, level-major then n1 then n2.
    std::size_t flat(const BasisIndex& b) const {
        return std::size_t(index_of(b.level)) * fock_dim() + std::size_t(b.n1) * (c2 + 1) + b.n2;
    }

    BasisIndex unflat(std::size_t i) const {
        const std::size_t f = fock_dim();
        const auto rem = i % f;
        return {kLevels[i / f], static_cast<unsigned>(rem / (c2 + 1)),
                static_cast<unsigned>(rem % (c2 + 1))};
    }

    friend bool operator==(const Cutoffs&, const Cutoffs&) = default;
};

/// Pure state of ion x mode 1 x mode 2 on a truncated basis.
class JointState {
public:
    JointState() = default;
    explicit JointState(Cutoffs cutoffs)
        : cutoffs_(cutoffs), amplitudes_(cutoffs.dim(), cplx{0.0, 0.0}) {}
    JointState(Cutoffs cutoffs, std::vector<cplx> amplitudes)
        : cutoffs_(cutoffs), amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.size() != cutoffs_.dim()) {
            throw std::invalid_argument("JointState: amplitude count does not match cutoffs");
        }
    }

    const Cutoffs& cutoffs() const { return cutoffs_; }
    const std::vector<cplx>& amplitudes() const { return amplitudes_; }
    std::vector<cplx>& amplitudes() { return amplitudes_; }

    cplx& operator[](const BasisIndex& b) { return amplitudes_[cutoffs_.flat(b)]; }
    const cplx& operator[](const BasisIndex& b) const { return amplitudes_[cutoffs_.flat(b)]; }

    /// Contiguous amplitudes of one ion level, indexed n1 * (c2 + 1) + n2.
    const cplx* level_data(Level level) const {
        return amplitudes_.data() + std::size_t(index_of(level)) * cutoffs_.fock_dim();
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amplitudes_) s += std::norm(a);
        return s;
    }

private:
    Cutoffs cutoffs_{};
    std::vector<cplx> amplitudes_;
};

}  // namespace ionlambda
