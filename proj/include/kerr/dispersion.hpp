// dispersion.hpp - parameter algebra of the Kerr envelope soliton.
//
// A soliton E = e_R A sech(k(z - Vt)) in a medium eps = eps0 + eps1 |E|^2 is
// fixed by the dimensionless X = k^2 / (eps0 omega^2) and the carrier
// frequency omega. With Z = 3 A^2 eps1 / eps0:
//
//   Z          = 3X - 1 + sqrt(18 X^2 + 14 X)
//   eps0 V^2   = (X + 1) / (X + (1 + Z)^2)
//   k0^2       = eps0 omega^2 (1 + Z)^2 (X + 1) / (X + (1 + Z)^2)
//
// Admissible X satisfy Z >= 0, i.e. X >= X0 = (-10 + sqrt(109)) / 9.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kerr {

// c = 1 throughout.
struct Medium {
    double eps0 = 1.0;
    double eps1 = 1.0;
    double hbar = 1.0;

    void validate() const;
    double permittivity(double e_squared) const noexcept { return eps0 + eps1 * e_squared; }
};

enum class Polarization { Right, Left };

const char* to_string(Polarization p) noexcept;
Polarization polarization_from_string(const std::string& s);

struct SolitonParams {
    Medium medium;
    double X = 0.0;
    double Z = 0.0;
    double amplitude_A = 0.0;
    double velocity_V = 0.0;
    double k = 0.0;
    double k0 = 0.0;
    double omega = 0.0;
    double lambda = 0.0;  // k V / omega
    Polarization polarization = Polarization::Right;
    double center_z0 = 0.0;
    double global_phase = 0.0;

    SolitonParams with_polarization(Polarization p) const;
    SolitonParams with_center(double z0) const;
    SolitonParams with_phase(double phase) const;
    SolitonParams with_hbar(double hbar) const;

    // Soliton proper size 1/k.
    double proper_size() const noexcept { return 1.0 / k; }
};

// (-10 + sqrt(109)) / 9.
double x_min() noexcept;

// Z(X); exact zero at X = x_min(). Throws DomainError for X < x_min().
double z_of_x(double X);

SolitonParams solve_params(const Medium& medium, double X, double omega,
                           Polarization polarization = Polarization::Right);

struct Residuals789 {
    double eq7 = 0.0;  // eps0 (omega^2 - k^2 V^2) = k0^2 - k^2
    double eq8 = 0.0;  // eps1 A^2 (9 k^2 V^2 - omega^2) = 2 k^2 (eps0 V^2 - 1)
    double eq9 = 0.0;  // k0 = omega V (eps0 + 3 eps1 A^2)

    double max() const noexcept;
};

// Relative residuals |lhs - rhs| / max(|lhs|, |rhs|, eps_machine).
Residuals789 residuals_789(const SolitonParams& p);

// Warning text when the envelope condition k0 >> k is weak (k/k0 > 0.5).
std::optional<std::string> envelope_warning(const SolitonParams& p);

struct RangeRow {
    double X;
    double Z;
    double lambda2;
    double k2_over_k02;
    double eps0V2;
};

struct RangeScan {
    std::vector<RangeRow> rows;
    double lambda2_min = 0.0;
    double lambda2_max = 0.0;
    double k2_over_k02_min = 0.0;
    double k2_over_k02_max = 0.0;
};

RangeScan scan_ranges(const Medium& medium, std::span<const double> X_grid);

}  // namespace kerr
