#include "kerr/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "kerr/errors.hpp"

namespace kerr {

void Medium::validate() const {
    if (!(eps0 > 0.0) || !(eps1 > 0.0) || !(hbar > 0.0)) {
        throw DomainError(fmt::format(
            "medium requires eps0 > 0, eps1 > 0, hbar > 0 (got {}, {}, {})", eps0, eps1, hbar));
    }
}

const char* to_string(Polarization p) noexcept {
    return p == Polarization::Right ? "right" : "left";
}

Polarization polarization_from_string(const std::string& s) {
    if (s == "right" || s == "Right" || s == "R") return Polarization::Right;
    if (s == "left" || s == "Left" || s == "L") return Polarization::Left;
    throw std::invalid_argument("unknown polarization '" + s + "' (expected right|left)");
}

SolitonParams SolitonParams::with_polarization(Polarization p) const {
    SolitonParams out = *this;
    out.polarization = p;
    return out;
}

SolitonParams SolitonParams::with_center(double z0) const {
    SolitonParams out = *this;
    out.center_z0 = z0;
    return out;
}

SolitonParams SolitonParams::with_phase(double phase) const {
    SolitonParams out = *this;
    out.global_phase = phase;
    return out;
}

SolitonParams SolitonParams::with_hbar(double hbar) const {
    SolitonParams out = *this;
    out.medium.hbar = hbar;
    out.medium.validate();
    return out;
}

double x_min() noexcept { return (-10.0 + std::sqrt(109.0)) / 9.0; }

double z_of_x(double X) {
    const double x0 = x_min();
    if (!(X >= x0) || !std::isfinite(X)) {
        throw DomainError(fmt::format(
            "X = {} is below the minimal admissible value X0 = {:.6f} (amplitude would be imaginary)",
            X, x0));
    }
    const double root = std::sqrt(18.0 * X * X + 14.0 * X);
    if (X >= 1.0 / 3.0) return 3.0 * X - 1.0 + root;
    // 3X - 1 < 0 cancels against the root; use the rationalized form
    // (9X^2 + 20X - 1) / (root + 1 - 3X) with the quadratic in factored form.
    const double x1 = (-10.0 - std::sqrt(109.0)) / 9.0;
    return 9.0 * (X - x0) * (X - x1) / (root + 1.0 - 3.0 * X);
}

SolitonParams solve_params(const Medium& medium, double X, double omega, Polarization polarization) {
    medium.validate();
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw DomainError(fmt::format("omega must be positive, got {}", omega));
    }
    SolitonParams p;
    p.medium = medium;
    p.X = X;
    p.Z = z_of_x(X);
    p.omega = omega;
    p.polarization = polarization;
    const double one_z = 1.0 + p.Z;
    const double eps0V2 = (X + 1.0) / (X + one_z * one_z);
    p.velocity_V = std::sqrt(eps0V2 / medium.eps0);
    p.k = omega * std::sqrt(medium.eps0 * X);
    p.amplitude_A = std::sqrt(p.Z * medium.eps0 / (3.0 * medium.eps1));
    p.k0 = omega * one_z * std::sqrt(medium.eps0 * eps0V2);
    p.lambda = p.k * p.velocity_V / omega;
    return p;
}

double Residuals789::max() const noexcept { return std::max({eq7, eq8, eq9}); }

namespace {

double relative_gap(double lhs, double rhs) {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::epsilon()});
    return std::abs(lhs - rhs) / scale;
}

}  // namespace

Residuals789 residuals_789(const SolitonParams& p) {
    const auto& m = p.medium;
    const double A2 = p.amplitude_A * p.amplitude_A;
    const double k2 = p.k * p.k;
    const double V2 = p.velocity_V * p.velocity_V;
    const double w2 = p.omega * p.omega;
    Residuals789 r;
    r.eq7 = relative_gap(m.eps0 * (w2 - k2 * V2), p.k0 * p.k0 - k2);
    const double lhs8 = m.eps1 * A2 * (9.0 * k2 * V2 - w2);
    const double rhs8 = 2.0 * k2 * (m.eps0 * V2 - 1.0);
    // At A = 0 both sides vanish analytically; rhs8 is then pure roundoff.
    r.eq8 = (p.amplitude_A == 0.0 && std::abs(rhs8) <= 16.0 * std::numeric_limits<double>::epsilon() * 2.0 * k2)
                ? 0.0
                : relative_gap(lhs8, rhs8);
    r.eq9 = relative_gap(p.k0, p.omega * p.velocity_V * (m.eps0 + 3.0 * m.eps1 * A2));
    return r;
}

std::optional<std::string> envelope_warning(const SolitonParams& p) {
    const double ratio = p.k / p.k0;
    if (ratio > 0.5) {
        return fmt::format("k/k0 = {:.3f} > 0.5 at X = {}: envelope approximation k0 >> k is weak", ratio, p.X);
    }
    return std::nullopt;
}

RangeScan scan_ranges(const Medium& medium, std::span<const double> X_grid) {
    RangeScan scan;
    scan.rows.reserve(X_grid.size());
    for (double X : X_grid) {
        const SolitonParams p = solve_params(medium, X, 1.0);
        const double one_z = 1.0 + p.Z;
        RangeRow row;
        row.X = X;
        row.Z = p.Z;
        row.lambda2 = p.lambda * p.lambda;
        row.k2_over_k02 = (p.k * p.k) / (p.k0 * p.k0);
        row.eps0V2 = (X + 1.0) / (X + one_z * one_z);
        scan.rows.push_back(row);
    }
    if (!scan.rows.empty()) {
        auto by = [&](auto member) {
            auto [lo, hi] = std::minmax_element(scan.rows.begin(), scan.rows.end(),
                                                [&](const RangeRow& a, const RangeRow& b) { return a.*member < b.*member; });
            return std::pair{(*lo).*member, (*hi).*member};
        };
        std::tie(scan.lambda2_min, scan.lambda2_max) = by(&RangeRow::lambda2);
        std::tie(scan.k2_over_k02_min, scan.k2_over_k02_max) = by(&RangeRow::k2_over_k02);
    }
    return scan;
}

}  // namespace kerr
