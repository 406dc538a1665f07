// entanglement.hpp - two-soliton singlet configurations.
//
//   phi12(z1, z2) = [phi_L(-z1) (x) phi_R(z2) - phi_R(-z1) (x) phi_L(z2)] / sqrt(2)
//
// sampled at t = 0 as a 3x3 complex tensor on a (z1, z2) grid. Slot 1 is
// evaluated at the mirrored argument -z1, so its grid is the reflection of the
// constituents' support. The stochastic two-particle wave function sums N such
// configurations with independent random centres and phases per slot:
//
//   Psi_N = (hbar^2 N)^(-1/2) sum_j phi12_j
//
// Exchange antisymmetry: Psi_ab(z1, z2) = -Psi_ba(-z2, -z1), exact on the grid
// when both slots share one support (grid1 is the mirror image of grid2).

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "kerr/dispersion.hpp"
#include "kerr/numerics.hpp"
#include "kerr/vec.hpp"

namespace kerr {

struct SingletGridSpec {
    double half_width_in_sizes = 20.0;   // slot support, units of 1/k
    double points_per_inverse_k0 = 8.0;  // grid step = 1/(points * k0)
    std::size_t memory_cap = 40'000'000; // max complex entries (n1 * n2 * 9)
    unsigned threads = 1;
};

struct SlotGrid {
    UniformGrid base;  // field arguments: slot 2 samples base.node(j)
    bool mirrored = false;

    std::size_t size() const noexcept { return base.n; }
    // Field argument at index i (slot 1 is reversed so -argument is increasing).
    double argument(std::size_t i) const noexcept { return mirrored ? base.node(base.n - 1 - i) : base.node(i); }
    // Coordinate z of the slot at index i.
    double coordinate(std::size_t i) const noexcept { return mirrored ? -argument(i) : argument(i); }
};

struct SingletState {
    SlotGrid grid1;
    SlotGrid grid2;
    std::vector<cplx> values;  // ((i * n2 + j) * 3 + a) * 3 + b
    double hbar = 0.0;
    double nu = 0.0;
    // Constituent samples: slot 1 at -z1 (i.e. at grid1.argument(i)), slot 2 at z2.
    std::vector<CVec3> first1, second1, first2, second2;
    std::vector<CVec3> d_first1, d_second1, d_first2, d_second2;  // d/d(argument)
    cplx overlap{0.0, 0.0};  // <phi_first, phi_second> / hbar

    std::size_t n1() const noexcept { return grid1.size(); }
    std::size_t n2() const noexcept { return grid2.size(); }
    const cplx& value(std::size_t i, std::size_t j, int a, int b) const noexcept {
        return values[((i * n2() + j) * 3 + static_cast<std::size_t>(a)) * 3 + static_cast<std::size_t>(b)];
    }
};

// first/second are the constituents in the order of the formula above
// (normally left, right). They must share omega, X and the medium.
// Propagates Infeasible from the normalization; throws CapacityExceeded over
// the memory cap.
SingletState build_singlet(const SolitonParams& first, const SolitonParams& second,
                           const SingletGridSpec& spec = {});

// Double trapezoidal integral of sum_ab |phi12_ab|^2.
double singlet_norm(const SingletState& s);

struct SingletObservables {
    double total_spin_z = 0.0;
    double total_momentum_z = 0.0;
    double slot1_spin_z = 0.0;
    double slot2_spin_z = 0.0;
    double slot1_momentum_z = 0.0;
    double slot2_momentum_z = 0.0;
    // Slot-2 spin carried by each branch of the superposition.
    double slot2_spin_first_branch = 0.0;
    double slot2_spin_second_branch = 0.0;
};

// Expectations of S_z (x) 1 + 1 (x) S_z and P_z (x) 1 + 1 (x) P_z divided by
// hbar^2, so a product of hbar-normalized constituents yields classical units.
SingletObservables singlet_observables(const SingletState& s);

// max |Psi_ab(z1, z2) + Psi_ba(-z2, -z1)|; requires mirrored equal slot grids.
double exchange_defect(const SingletState& s);

// Little-endian: uint64 n1, n2, 9; then n1*n2*9 (re, im) float64 pairs in
// (i, j, 3a + b) order.
void write_tensor(const std::filesystem::path& path, std::size_t n1, std::size_t n2,
                  const std::vector<cplx>& values);

struct TwoParticleTrial {
    std::size_t index = 0;
    double center1 = 0.0;
    double phase1 = 0.0;
    double center2 = 0.0;
    double phase2 = 0.0;
};

struct TwoParticleEnsemble {
    std::size_t N = 0;
    std::uint64_t seed = 0;
    double hbar = 0.0;
    double nu = 0.0;
    SlotGrid grid1;
    SlotGrid grid2;
    std::vector<TwoParticleTrial> trials;
    std::vector<cplx> psi;
    double sigma_norm = 0.0;  // Monte Carlo scale of the cross terms in the norm

    std::size_t n1() const noexcept { return grid1.size(); }
    std::size_t n2() const noexcept { return grid2.size(); }
};

SingletGridSpec default_two_particle_spec();

TwoParticleEnsemble build_two_particle_ensemble(const SolitonParams& first, const SolitonParams& second,
                                                std::size_t N, std::uint64_t seed,
                                                const Interval& center_dist,
                                                const SingletGridSpec& spec = default_two_particle_spec());

double two_particle_norm(const TwoParticleEnsemble& ens);

}  // namespace kerr
