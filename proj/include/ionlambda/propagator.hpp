#pragma once

// Exact propagator of the two-arm interaction on a truncated Fock space.
//
// The interaction only moves population inside small invariant subspaces:
//
//   Triplet T(n1, n2):  |1, n1+m1, n2+m2>, |2, n1, n2+m2>, |3, n1, n2>
//   Doublet D(n1, n2):  |1, n1+m1, n2>,    |2, n1, n2>           (n2 < m2)
//   Singlet:            |1, n1, n2>                              (n1 < m1)
//
// With a single shared modulation gamma(t) the Hamiltonian commutes with
// itself at different times, so each block is exp(-i h Theta) for the
// block's constant coupling matrix h and the pulse area Theta.

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "basis.hpp"
#include "model.hpp"
#include "numerics.hpp"

namespace ionlambda {

using BlockMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

struct Subspace {
    enum class Kind { Triplet, Doublet, Singlet };

    Kind kind = Kind::Singlet;
    std::vector<BasisIndex> members;  ///< in-range members, ordered by level
    RabiData rabi;
    bool clipped = false;  ///< a partner fell outside the cutoffs; evolves as identity
};

inline const char* to_string(Subspace::Kind kind) {
    switch (kind) {
        case Subspace::Kind::Triplet: return "triplet";
        case Subspace::Kind::Doublet: return "doublet";
        case Subspace::Kind::Singlet: return "singlet";
    }
    return "?";
}

class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Partition of the truncated basis into invariant subspaces.
struct Decomposition {
    Cutoffs cutoffs;
    std::vector<Subspace> subspaces;
    std::vector<std::size_t> owner;  ///< flat basis index -> subspace index

    bool is_clipped(const BasisIndex& b) const { return subspaces[owner[cutoffs.flat(b)]].clipped; }
};

inline Decomposition decompose(const ModeParams& mode1, const ModeParams& mode2, Cutoffs cutoffs) {
    mode1.validate();
    mode2.validate();
    const unsigned m1 = mode1.quanta;
    const unsigned m2 = mode2.quanta;
    if (cutoffs.c1 < m1 || cutoffs.c2 < m2) {
        throw TruncationError("cutoffs (" + std::to_string(cutoffs.c1) + ", " +
                              std::to_string(cutoffs.c2) + ") cannot hold any complete triplet for "
                              "quanta (" + std::to_string(m1) + ", " + std::to_string(m2) + ")");
    }

    Decomposition d;
    d.cutoffs = cutoffs;
    d.owner.assign(cutoffs.dim(), static_cast<std::size_t>(-1));

    auto add = [&](Subspace s) {
        for (const auto& b : s.members) d.owner[cutoffs.flat(b)] = d.subspaces.size();
        d.subspaces.push_back(std::move(s));
    };

    for (unsigned n1 = 0; n1 <= cutoffs.c1; ++n1) {
        for (unsigned n2 = 0; n2 <= cutoffs.c2; ++n2) {
            Subspace t{Subspace::Kind::Triplet, {}, rabi(mode1, mode2, n1, n2), false};
            const bool has2 = n2 + m2 <= cutoffs.c2;
            const bool has1 = has2 && n1 + m1 <= cutoffs.c1;
            if (has1) t.members.push_back({Level::one, n1 + m1, n2 + m2});
            if (has2) t.members.push_back({Level::two, n1, n2 + m2});
            t.members.push_back({Level::three, n1, n2});
            t.clipped = !has1;
            add(std::move(t));
        }
    }
    for (unsigned n1 = 0; n1 <= cutoffs.c1; ++n1) {
        for (unsigned n2 = 0; n2 < m2 && n2 <= cutoffs.c2; ++n2) {
            Subspace s{Subspace::Kind::Doublet, {},
                       RabiData::from_arms(effective_coupling(mode1, n1), 0.0), false};
            const bool has1 = n1 + m1 <= cutoffs.c1;
            if (has1) s.members.push_back({Level::one, n1 + m1, n2});
            s.members.push_back({Level::two, n1, n2});
            s.clipped = !has1;
            add(std::move(s));
        }
    }
    for (unsigned n1 = 0; n1 < m1 && n1 <= cutoffs.c1; ++n1) {
        for (unsigned n2 = 0; n2 <= cutoffs.c2; ++n2) {
            add({Subspace::Kind::Singlet, {{Level::one, n1, n2}}, {}, false});
        }
    }
    return d;
}

/// exp(-i h Theta) for h = a(|1><2| + |2><1|) + b(|2><3| + |3><2|), restricted
/// to the first `dim` levels (3: triplet, 2: doublet with b = 0, 1: singlet).
inline BlockMatrix block_analytic(const RabiData& r, double theta, int dim = 3) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("block_analytic: dim must be 1, 2 or 3");
    BlockMatrix u = BlockMatrix::Identity(dim, dim);
    if (dim == 1 || r.mu == 0.0 || theta == 0.0) return u;

    const double phase = r.mu * theta;
    const double s = std::sin(phase);
    const double c = std::cos(phase);
    const double cm1 = -2.0 * std::sin(0.5 * phase) * std::sin(0.5 * phase);  // cos - 1
    const double a = r.a / r.mu;
    const double b = dim == 3 ? r.b / r.mu : 0.0;
    const cplx mi{0.0, -1.0};

    u(0, 0) = 1.0 + a * a * cm1;
    u(1, 1) = c;
    u(0, 1) = u(1, 0) = mi * (a * s);
    if (dim == 3) {
        u(2, 2) = 1.0 + b * b * cm1;
        u(1, 2) = u(2, 1) = mi * (b * s);
        u(0, 2) = u(2, 0) = a * b * cm1;
    }
    return u;
}

struct PropagatorBlock {
    std::size_t subspace = 0;  ///< index into Decomposition::subspaces
    BlockMatrix matrix;
};

/// Block-diagonal evolution operator for one pulse area.
struct Propagator {
    std::shared_ptr<const Decomposition> decomposition;
    double theta = 0.0;
    std::vector<PropagatorBlock> blocks;

    const Cutoffs& cutoffs() const { return decomposition->cutoffs; }

    std::vector<std::size_t> clipped() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < decomposition->subspaces.size(); ++i) {
            if (decomposition->subspaces[i].clipped) out.push_back(i);
        }
        return out;
    }

    /// Per flat basis index: true when the state lies in an unclipped subspace.
    std::vector<bool> unclipped_mask() const {
        const auto& d = *decomposition;
        std::vector<bool> mask(d.owner.size());
        for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = !d.subspaces[d.owner[i]].clipped;
        return mask;
    }

    Eigen::MatrixXcd to_dense() const {
        const auto& d = *decomposition;
        const auto n = static_cast<Eigen::Index>(d.cutoffs.dim());
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(n, n);
        for (const auto& blk : blocks) {
            const auto& members = d.subspaces[blk.subspace].members;
            for (std::size_t i = 0; i < members.size(); ++i) {
                for (std::size_t j = 0; j < members.size(); ++j) {
                    u(static_cast<Eigen::Index>(d.cutoffs.flat(members[i])),
                      static_cast<Eigen::Index>(d.cutoffs.flat(members[j]))) =
                        blk.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                }
            }
        }
        return u;
    }
};

/// Propagator for a given pulse area.
inline Propagator assemble_area(std::shared_ptr<const Decomposition> decomposition, double theta) {
    Propagator p;
    p.theta = theta;
    const auto& subs = decomposition->subspaces;
    p.blocks.reserve(subs.size());
    for (std::size_t i = 0; i < subs.size(); ++i) {
        const auto& s = subs[i];
        const int dim = static_cast<int>(s.members.size());
        p.blocks.push_back({i, s.clipped ? BlockMatrix(BlockMatrix::Identity(dim, dim))
                                         : block_analytic(s.rabi, theta, dim)});
    }
    p.decomposition = std::move(decomposition);
    return p;
}

inline Propagator assemble(std::shared_ptr<const Decomposition> decomposition,
                           const PulseProfile& profile, double t) {
    return assemble_area(std::move(decomposition), pulse_area(profile, t));
}

/// Dense interaction matrix on the truncated space, couplings kept only where
/// both ends are retained.
inline Eigen::MatrixXcd interaction_matrix(const ModeParams& mode1, const ModeParams& mode2,
                                           Cutoffs cutoffs) {
    const auto n = static_cast<Eigen::Index>(cutoffs.dim());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    auto couple = [&](const BasisIndex& x, const BasisIndex& y, double g) {
        const auto i = static_cast<Eigen::Index>(cutoffs.flat(x));
        const auto j = static_cast<Eigen::Index>(cutoffs.flat(y));
        h(i, j) = g;
        h(j, i) = g;
    };
    for (unsigned n1 = 0; n1 <= cutoffs.c1; ++n1) {
        for (unsigned n2 = 0; n2 <= cutoffs.c2; ++n2) {
            const BasisIndex upper{Level::two, n1, n2};
            if (n1 + mode1.quanta <= cutoffs.c1) {
                couple({Level::one, n1 + mode1.quanta, n2}, upper, effective_coupling(mode1, n1));
            }
            if (n2 >= mode2.quanta) {
                const unsigned low = n2 - mode2.quanta;
                couple({Level::three, n1, low}, upper, effective_coupling(mode2, low));
            }
        }
    }
    return h;
}

/// exp(-i H Theta) by Hermitian eigendecomposition of the dense interaction.
inline Eigen::MatrixXcd expm_oracle(const ModeParams& mode1, const ModeParams& mode2,
                                    Cutoffs cutoffs, double theta) {
    constexpr std::size_t kMaxDim = 2000;
    if (cutoffs.dim() > kMaxDim) {
        throw std::invalid_argument("expm_oracle: dimension " + std::to_string(cutoffs.dim()) +
                                    " exceeds " + std::to_string(kMaxDim));
    }
    const Eigen::MatrixXcd h = interaction_matrix(mode1, mode2, cutoffs);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    if (eig.info() != Eigen::Success) throw std::runtime_error("expm_oracle: eigensolver failed");
    const Eigen::VectorXcd phases =
        (eig.eigenvalues().cast<cplx>() * cplx{0.0, -theta}).array().exp().matrix();
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

/// U |psi>, block by block. Amplitude in a clipped subspace is an error
/// because its evolution is not represented.
inline JointState apply(const Propagator& prop, const JointState& state) {
    const auto& d = *prop.decomposition;
    if (!(state.cutoffs() == d.cutoffs)) {
        throw std::invalid_argument("apply: state and propagator cutoffs differ");
    }
    JointState out(d.cutoffs);
    const auto& in = state.amplitudes();
    auto& dst = out.amplitudes();
    for (const auto& blk : prop.blocks) {
        const auto& s = d.subspaces[blk.subspace];
        if (s.clipped) {
            for (const auto& b : s.members) {
                const auto i = d.cutoffs.flat(b);
                if (in[i] != cplx{0.0, 0.0}) {
                    throw TruncationError("state has amplitude on " + to_string(b) +
                                          ", whose subspace is clipped by cutoffs (" +
                                          std::to_string(d.cutoffs.c1) + ", " +
                                          std::to_string(d.cutoffs.c2) + "); raise the cutoffs");
                }
                dst[i] = in[i];
            }
            continue;
        }
        const std::size_t k = s.members.size();
        std::size_t idx[3];
        cplx v[3];
        for (std::size_t i = 0; i < k; ++i) {
            idx[i] = d.cutoffs.flat(s.members[i]);
            v[i] = in[idx[i]];
        }
        for (std::size_t i = 0; i < k; ++i) {
            cplx acc{0.0, 0.0};
            for (std::size_t j = 0; j < k; ++j) {
                acc += blk.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * v[j];
            }
            dst[idx[i]] = acc;
        }
    }
    return out;
}

}  // namespace ionlambda
