// fields.hpp - analytic soliton fields and their field-equation checks.
//
// With phase phi = omega t - k0 (z - z0) + phase0 and envelope
// s = sech(k xi), T = tanh(k xi), xi = z - z0 - V t, a right-polarized soliton
// carries
//
//   E     = A s e_R
//   A_pot = (A/omega) s [e_L - lambda T e_R]                      (+ O(lambda^2))
//   B     = (A/omega) s [e_L (k0 - k lambda + 2 k lambda T^2)
//                        + e_R (k - lambda k0) T]                 (+ O(lambda^2))
//
// e_R = (cos phi, sin phi, 0), e_L = (-sin phi, cos phi, 0). The left-polarized
// soliton replaces e_R -> e'_L = (sin phi, cos phi, 0) and
// e_L -> e'_R = (cos phi, -sin phi, 0) in E and A_pot; its B is curl A_pot,
// which equals minus the substituted right-polarized B (the substitution is a
// reflection and flips the sense of the curl).

#pragma once

#include <cstddef>
#include <vector>

#include "kerr/dispersion.hpp"
#include "kerr/vec.hpp"

namespace kerr {

struct SpacetimePoint {
    double t = 0.0;
    double z = 0.0;
};

enum class PotentialOrder { Leading, FirstOrderLambda };

struct Basis {
    Vec3 e_R;
    Vec3 e_L;
    Vec3 e_R_prime;
    Vec3 e_L_prime;
};

struct FieldSample {
    Vec3 E;
    Vec3 B;
    Vec3 A_pot;
    PotentialOrder order = PotentialOrder::FirstOrderLambda;
};

double phase(const SolitonParams& p, SpacetimePoint pt) noexcept;
Basis basis_vectors(double phi) noexcept;

Vec3 electric_field(const SolitonParams& p, SpacetimePoint pt) noexcept;
Vec3 vector_potential(const SolitonParams& p, SpacetimePoint pt,
                      PotentialOrder order = PotentialOrder::FirstOrderLambda) noexcept;
Vec3 magnetic_field(const SolitonParams& p, SpacetimePoint pt) noexcept;
FieldSample sample_fields(const SolitonParams& p, SpacetimePoint pt,
                          PotentialOrder order = PotentialOrder::FirstOrderLambda) noexcept;

// Analytic spatial derivatives of E and of the first-order potential.
Vec3 electric_field_dz(const SolitonParams& p, SpacetimePoint pt) noexcept;
Vec3 vector_potential_dz(const SolitonParams& p, SpacetimePoint pt) noexcept;

// Default finite-difference steps: 1e-4 of the shortest length / time scale.
double default_space_step(const SolitonParams& p) noexcept;
double default_time_step(const SolitonParams& p) noexcept;

// Rectangular uniform (t, z) grid, both ends included.
struct SpacetimeGrid {
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t nt = 0;
    double z_lo = 0.0;
    double z_hi = 0.0;
    std::size_t nz = 0;

    double dt() const noexcept { return nt > 1 ? (t_hi - t_lo) / static_cast<double>(nt - 1) : 0.0; }
    double dz() const noexcept { return nz > 1 ? (z_hi - z_lo) / static_cast<double>(nz - 1) : 0.0; }
    SpacetimePoint node(std::size_t it, std::size_t iz) const noexcept {
        return {t_lo + static_cast<double>(it) * dt(), z_lo + static_cast<double>(iz) * dz()};
    }
    std::size_t size() const noexcept { return nt * nz; }

    // nt x nz grid with t in [0, t_span] and z centred on the soliton at t = 0.
    static SpacetimeGrid around(const SolitonParams& p, std::size_t nt, std::size_t nz,
                                double t_span, double z_span);
};

// Checks of the truncated series against A_pot = -int E dt and B = curl A_pot.
struct ConsistencyReport {
    double max_potential_residual = 0.0;  // max |E + d_t A_pot| / A
    double max_curl_residual = 0.0;       // max |B - curl A_pot| / max |B|
    double lambda2 = 0.0;
    std::size_t points = 0;
};

ConsistencyReport field_consistency(const SolitonParams& p, const SpacetimeGrid& grid);

// Defect of the nonlinear wave equation rot^2 E = -d_t^2 [eps(E) E] on the
// ansatz, normalized by the largest single-term magnitude on the grid.
struct ResidualReport {
    double max_rel_residual = 0.0;
    double rms_rel_residual = 0.0;
    double normalization = 0.0;
    double div_eps_E = 0.0;
    double div_B = 0.0;
    SpacetimeGrid grid;
};

// z span of an nz-node residual grid: 6/k, shrunk to keep dz <= 0.095/k0.
double residual_z_span(const SolitonParams& p, std::size_t nz) noexcept;

// Throws GridTooCoarse when dz > 1/(10 k0) or dt > 1/(10 omega), and
// GridTooSmall when the grid spans fewer than 3 envelope widths or 3 periods.
ResidualReport maxwell_residual(const SolitonParams& p, const SpacetimeGrid& grid);

struct FieldRow {
    double t;
    double z;
    FieldSample sample;
};

std::vector<FieldRow> sample_line(const SolitonParams& p, double t, double z_lo, double z_hi,
                                  std::size_t samples);

}  // namespace kerr
