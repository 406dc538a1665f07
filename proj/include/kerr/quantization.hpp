// quantization.hpp - stochastic wave functions built from soliton trials.
//
// Each soliton defines the complex field
//
//   phi = (nu A_pot + (i/nu) pi) / sqrt(2),   pi = -eps(E) E,
//
// with nu fixed by int |phi|^2 dz = hbar. An ensemble of N independent trials
// (random centre, random phase) realizes
//
//   Psi_N(z) = (hbar N)^(-1/2) sum_j phi_j(z)
//
// whose coarse-grained density and operator averages are compared against
// trial counts and per-trial classical observables.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kerr/dispersion.hpp"
#include "kerr/numerics.hpp"
#include "kerr/vec.hpp"

namespace kerr {

// Point evaluations at t = 0.
CVec3 phi_at(const SolitonParams& p, double z, double nu) noexcept;
CVec3 phi_dz_at(const SolitonParams& p, double z, double nu) noexcept;

// Grid spacing min(1/(20k), 1/(20k0)).
double default_phi_step(const SolitonParams& p) noexcept;

// Grid of half-width `half_width_in_sizes / k` around the soliton centre.
UniformGrid phi_grid(const SolitonParams& p, double half_width_in_sizes = 45.0);

struct PhiField {
    UniformGrid grid;
    std::vector<CVec3> values;
    std::vector<CVec3> dz_values;
    double nu = 0.0;
    double hbar = 0.0;
};

// Throws GridTooSmall unless the grid covers 40/k on both sides of the centre.
PhiField phi_from_fields(const SolitonParams& p, const UniformGrid& grid, double nu);

double norm_integral(const PhiField& field);
// -i int phi^* x phi dz (real part; the imaginary part vanishes identically).
Vec3 spin_integral(const PhiField& field);
// Re int phi^* . (-i d_z phi) dz.
double momentum_integral(const PhiField& field);

struct NuSolution {
    double nu = 0.0;
    double I_A = 0.0;   // int |A_pot|^2 dz
    double I_pi = 0.0;  // int |pi|^2 dz
    double hbar = 0.0;
    double hbar_min = 0.0;  // sqrt(I_A I_pi)
    std::string root = "smaller";
};

// Solves (nu^2 I_A + I_pi / nu^2) / 2 = hbar for the smaller root
// nu^2 = (hbar - sqrt(hbar^2 - I_A I_pi)) / I_A.
// Throws Infeasible when hbar < sqrt(I_A I_pi), DomainError when A = 0.
NuSolution solve_nu(const SolitonParams& p, const UniformGrid& grid);

// sqrt(I_A I_pi) on the soliton's default grid.
double minimal_hbar(const SolitonParams& p);
// factor * minimal_hbar(p): the default simulation value of hbar.
double default_hbar(const SolitonParams& p, double factor = 1.05);

struct Trial {
    std::size_t index = 0;
    double center = 0.0;
    double phase = 0.0;
    Polarization polarization = Polarization::Right;
};

enum class PolarizationMix { Uniform, Alternating };

struct EnsembleConfig {
    std::size_t N = 1;
    Interval center_dist{-1.0, 1.0};
    std::uint64_t seed = 0;
    PolarizationMix mix = PolarizationMix::Uniform;
    double pad_in_sizes = 40.0;  // grid padding and per-trial support, in units of 1/k
    double max_step = 0.0;       // 0 selects default_phi_step
    unsigned threads = 1;
    bool with_derivative = true;
};

// Variance inputs for cross terms between two trials:
// w = int dDelta E_theta |<phi_0, M phi_Delta>|^2, averaged over the
// polarization pairs present in the ensemble.
struct PairStatistics {
    double norm = 0.0;
    double spin = 0.0;
    double momentum = 0.0;
};

// Mixed = right and left trials in equal proportion.
PairStatistics pair_statistics(const SolitonParams& p, double nu, bool mixed);

struct EnsembleWaveFunction {
    SolitonParams params;
    EnsembleConfig config;
    std::vector<Trial> trials;
    UniformGrid grid;
    std::vector<CVec3> psi;
    std::vector<CVec3> dpsi;
    std::vector<double> trial_spin;      // classical S_z of each trial
    std::vector<double> trial_momentum;  // classical P_z of each trial
    NuSolution nu;
    PairStatistics pairs;

    std::size_t N() const noexcept { return trials.size(); }
    double hbar() const noexcept { return params.medium.hbar; }
};

std::vector<Trial> draw_trials(const SolitonParams& p, const EnsembleConfig& config);

EnsembleWaveFunction build_ensemble(const SolitonParams& p, const EnsembleConfig& config);

// int |Psi_N|^2 dz.
double ensemble_norm(const EnsembleWaveFunction& ens);
// Monte Carlo standard deviation of ensemble_norm from random cross terms.
double ensemble_norm_sigma(const EnsembleWaveFunction& ens);

struct DensityEstimate {
    Interval interval{0.0, 1.0};
    double rho = 0.0;
    double count_fraction = 0.0;
    double soliton_size = 0.0;
    std::size_t count = 0;
    double rel_gap = 0.0;    // |rho - count_fraction| / count_fraction
    double sigma_rel = 0.0;  // statistical scale of rel_gap
    double alpha_fit = 0.0;  // max(0, rel_gap - 3 sigma_rel) |interval| / soliton_size

    bool within(double alpha_max) const noexcept {
        return rel_gap <= alpha_max * soliton_size / interval.length() + 3.0 * sigma_rel;
    }
};

// Throws IntervalTooNarrow when |interval| < 10/k, GridTooSmall when the
// interval leaves the ensemble grid.
DensityEstimate density_estimate(const EnsembleWaveFunction& ens, const Interval& interval);

enum class Observable { MomentumZ, SpinZ };

const char* to_string(Observable o) noexcept;

struct MeanValue {
    Observable observable = Observable::SpinZ;
    double ensemble_avg = 0.0;  // (1/N) sum_j A_j
    double operator_avg = 0.0;  // int Psi^* A_hat Psi dz
    double sigma = 0.0;         // Monte Carlo scale of the cross terms
    double volume_ratio = 0.0;  // soliton size / centre-distribution length

    bool within(double alpha_max) const noexcept;
};

MeanValue mean_value(const EnsembleWaveFunction& ens, Observable observable);

}  // namespace kerr
