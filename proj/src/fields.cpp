#include "kerr/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "kerr/errors.hpp"
#include "kerr/numerics.hpp"

namespace kerr {

namespace {

// Polarization frame (a, b): E ~ a, leading potential ~ b, with
// d(a)/d(phi) = b and d(b)/d(phi) = -a for both handednesses.
struct Frame {
    Vec3 a;
    Vec3 b;
};

Frame frame(const SolitonParams& p, double phi) noexcept {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    if (p.polarization == Polarization::Right) {
        return {Vec3(c, s, 0.0), Vec3(-s, c, 0.0)};
    }
    return {Vec3(s, c, 0.0), Vec3(c, -s, 0.0)};
}

struct Envelope {
    double sech;
    double tanh;
};

Envelope envelope(const SolitonParams& p, SpacetimePoint pt) noexcept {
    const double arg = p.k * (pt.z - p.center_z0 - p.velocity_V * pt.t);
    return {1.0 / std::cosh(arg), std::tanh(arg)};
}

double handedness(const SolitonParams& p) noexcept {
    return p.polarization == Polarization::Right ? 1.0 : -1.0;
}

}  // namespace

double phase(const SolitonParams& p, SpacetimePoint pt) noexcept {
    return p.omega * pt.t - p.k0 * (pt.z - p.center_z0) + p.global_phase;
}

Basis basis_vectors(double phi) noexcept {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return {Vec3(c, s, 0.0), Vec3(-s, c, 0.0), Vec3(c, -s, 0.0), Vec3(s, c, 0.0)};
}

Vec3 electric_field(const SolitonParams& p, SpacetimePoint pt) noexcept {
    const auto env = envelope(p, pt);
    return p.amplitude_A * env.sech * frame(p, phase(p, pt)).a;
}

Vec3 vector_potential(const SolitonParams& p, SpacetimePoint pt, PotentialOrder order) noexcept {
    const auto env = envelope(p, pt);
    const auto f = frame(p, phase(p, pt));
    const double scale = p.amplitude_A / p.omega * env.sech;
    Vec3 out = scale * f.b;
    if (order == PotentialOrder::FirstOrderLambda) out -= scale * p.lambda * env.tanh * f.a;
    return out;
}

Vec3 magnetic_field(const SolitonParams& p, SpacetimePoint pt) noexcept {
    const auto env = envelope(p, pt);
    const auto f = frame(p, phase(p, pt));
    const double scale = p.amplitude_A / p.omega * env.sech;
    const double kl = p.k * p.lambda;
    const double along_b = p.k0 - kl + 2.0 * kl * env.tanh * env.tanh;
    const double along_a = (p.k - p.lambda * p.k0) * env.tanh;
    return handedness(p) * scale * (along_b * f.b + along_a * f.a);
}

FieldSample sample_fields(const SolitonParams& p, SpacetimePoint pt, PotentialOrder order) noexcept {
    return {electric_field(p, pt), magnetic_field(p, pt), vector_potential(p, pt, order), order};
}

Vec3 electric_field_dz(const SolitonParams& p, SpacetimePoint pt) noexcept {
    const auto env = envelope(p, pt);
    const auto f = frame(p, phase(p, pt));
    const double s = env.sech;
    return p.amplitude_A * (-p.k * s * env.tanh * f.a - p.k0 * s * f.b);
}

Vec3 vector_potential_dz(const SolitonParams& p, SpacetimePoint pt) noexcept {
    const auto env = envelope(p, pt);
    const auto f = frame(p, phase(p, pt));
    const double s = env.sech;
    const double T = env.tanh;
    const double scale = p.amplitude_A / p.omega;
    const double along_b = -p.k * s * T + p.lambda * p.k0 * s * T;
    const double along_a = p.k0 * s + p.lambda * p.k * s * (T * T - s * s);
    return scale * (along_b * f.b + along_a * f.a);
}

double default_space_step(const SolitonParams& p) noexcept {
    return 1e-4 * std::min(1.0 / p.k, 1.0 / p.k0);
}

double default_time_step(const SolitonParams& p) noexcept {
    return 1e-4 * std::min(1.0 / p.omega, 1.0 / (p.k * p.velocity_V));
}

SpacetimeGrid SpacetimeGrid::around(const SolitonParams& p, std::size_t nt, std::size_t nz,
                                    double t_span, double z_span) {
    return {0.0, t_span, nt, p.center_z0 - 0.5 * z_span, p.center_z0 + 0.5 * z_span, nz};
}

ConsistencyReport field_consistency(const SolitonParams& p, const SpacetimeGrid& grid) {
    ConsistencyReport report;
    report.lambda2 = p.lambda * p.lambda;
    report.points = grid.size();
    if (p.amplitude_A == 0.0) return report;
    const double ht = default_time_step(p);
    const double hz = default_space_step(p);
    double max_pot = 0.0;
    double max_curl = 0.0;
    double max_b = 0.0;
    for (std::size_t it = 0; it < grid.nt; ++it) {
        for (std::size_t iz = 0; iz < grid.nz; ++iz) {
            const SpacetimePoint pt = grid.node(it, iz);
            const Vec3 E = electric_field(p, pt);
            const Vec3 B = magnetic_field(p, pt);
            const Vec3 ap = vector_potential(p, {pt.t + ht, pt.z});
            const Vec3 am = vector_potential(p, {pt.t - ht, pt.z});
            const Vec3 dt_a = (ap - am) / (2.0 * ht);
            const Vec3 zp = vector_potential(p, {pt.t, pt.z + hz});
            const Vec3 zm = vector_potential(p, {pt.t, pt.z - hz});
            const Vec3 dz_a = (zp - zm) / (2.0 * hz);
            const Vec3 curl(-dz_a.y(), dz_a.x(), 0.0);
            max_pot = std::max(max_pot, (E + dt_a).norm());
            max_curl = std::max(max_curl, (B - curl).norm());
            max_b = std::max(max_b, B.norm());
        }
    }
    report.max_potential_residual = max_pot / p.amplitude_A;
    report.max_curl_residual = max_b > 0.0 ? max_curl / max_b : 0.0;
    return report;
}

double residual_z_span(const SolitonParams& p, std::size_t nz) noexcept {
    const double cells = nz > 1 ? static_cast<double>(nz - 1) : 1.0;
    return std::min(6.0 / p.k, 0.95 * cells / (10.0 * p.k0));
}

ResidualReport maxwell_residual(const SolitonParams& p, const SpacetimeGrid& grid) {
    if (grid.nt < 2 || grid.nz < 2) throw GridTooSmall("residual grid needs at least 2x2 nodes");
    if (grid.dz() > 1.0 / (10.0 * p.k0) || grid.dt() > 1.0 / (10.0 * p.omega)) {
        throw GridTooCoarse(fmt::format(
            "grid spacing (dt = {:.4g}, dz = {:.4g}) exceeds the carrier limits 1/(10 omega) = {:.4g}, "
            "1/(10 k0) = {:.4g}",
            grid.dt(), grid.dz(), 1.0 / (10.0 * p.omega), 1.0 / (10.0 * p.k0)));
    }
    const double period = 2.0 * std::numbers::pi / p.omega;
    if (grid.z_hi - grid.z_lo < 3.0 / p.k || grid.t_hi - grid.t_lo < 3.0 * period) {
        throw GridTooSmall(fmt::format(
            "grid must span >= 3 envelope widths ({:.4g}) and >= 3 carrier periods ({:.4g})", 3.0 / p.k,
            3.0 * period));
    }

    // 5-point second differences, step 1e-2 of the fastest scale.
    const double hz = 1e-2 * std::min(1.0 / p.k, 1.0 / p.k0);
    const double ht = 1e-2 * std::min(1.0 / p.omega, 1.0 / (p.k * p.velocity_V));
    const auto& m = p.medium;
    auto eps_e = [&](SpacetimePoint pt) {
        const Vec3 E = electric_field(p, pt);
        return Vec3(m.permittivity(E.squaredNorm()) * E);
    };
    auto second = [](auto&& f, double h) {
        return Vec3((-f(-2.0 * h) + 16.0 * f(-h) - 30.0 * f(0.0) + 16.0 * f(h) - f(2.0 * h)) / (12.0 * h * h));
    };

    std::vector<double> residual(grid.size());
    double normalization = 0.0;
    double div_eps_e = 0.0;
    double div_b = 0.0;
    for (std::size_t it = 0; it < grid.nt; ++it) {
        for (std::size_t iz = 0; iz < grid.nz; ++iz) {
            const SpacetimePoint pt = grid.node(it, iz);
            // For transversal fields depending on z only, rot^2 E = -d_z^2 E.
            const Vec3 rot2 = -second([&](double d) { return electric_field(p, {pt.t, pt.z + d}); }, hz);
            const Vec3 rhs = -second([&](double d) { return eps_e({pt.t + d, pt.z}); }, ht);
            residual[it * grid.nz + iz] = (rot2 - rhs).norm();
            normalization = std::max({normalization, rot2.norm(), rhs.norm()});
            // div f = d_z f_z for fields without x, y dependence.
            const double dze = (eps_e({pt.t, pt.z + hz}).z() - eps_e({pt.t, pt.z - hz}).z()) / (2.0 * hz);
            const double dzb = (magnetic_field(p, {pt.t, pt.z + hz}).z() -
                                magnetic_field(p, {pt.t, pt.z - hz}).z()) / (2.0 * hz);
            div_eps_e = std::max(div_eps_e, std::abs(dze));
            div_b = std::max(div_b, std::abs(dzb));
        }
    }
    ResidualReport report;
    report.grid = grid;
    report.normalization = normalization;
    report.div_eps_E = div_eps_e;
    report.div_B = div_b;
    if (normalization == 0.0) return report;
    double max_r = 0.0;
    double sum_sq = 0.0;
    for (double r : residual) {
        max_r = std::max(max_r, r);
        sum_sq += r * r;
    }
    report.max_rel_residual = max_r / normalization;
    report.rms_rel_residual = std::sqrt(sum_sq / static_cast<double>(residual.size())) / normalization;
    return report;
}

std::vector<FieldRow> sample_line(const SolitonParams& p, double t, double z_lo, double z_hi,
                                  std::size_t samples) {
    std::vector<FieldRow> rows;
    rows.reserve(samples);
    const auto zs = linear_spaced(z_lo, z_hi, samples);
    for (double z : zs) rows.push_back({t, z, sample_fields(p, {t, z})});
    return rows;
}

}  // namespace kerr
