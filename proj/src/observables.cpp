#include "kerr/observables.hpp"

#include <cmath>

#include "kerr/fields.hpp"

namespace kerr {

namespace {

double relative(double value, double reference) {
    if (reference == 0.0) return value == 0.0 ? 0.0 : std::abs(value);
    return std::abs(value - reference) / std::abs(reference);
}

}  // namespace

Interval soliton_window(const SolitonParams& p, double t, double half_width_in_sizes) {
    return Interval::centered(p.center_z0 + p.velocity_V * t, half_width_in_sizes / p.k);
}

double lagrangian_density(const SolitonParams& p, double t, double z) {
    const Vec3 E = electric_field(p, {t, z});
    const Vec3 B = magnetic_field(p, {t, z});
    const double e2 = E.squaredNorm();
    const auto& m = p.medium;
    return 0.25 * (2.0 * m.eps0 * e2 + m.eps1 * e2 * e2 - 2.0 * B.squaredNorm());
}

double energy(const SolitonParams& p, const QuadratureSpec& spec, double t) {
    if (p.amplitude_A == 0.0) return 0.0;
    const auto& m = p.medium;
    auto density = [&](double z) {
        const double e2 = electric_field(p, {t, z}).squaredNorm();
        const double b2 = magnetic_field(p, {t, z}).squaredNorm();
        return 0.25 * (2.0 * m.eps0 * e2 + 3.0 * m.eps1 * e2 * e2 + 2.0 * b2);
    };
    return integrate(density, soliton_window(p, t), spec);
}

double energy_closed(const SolitonParams& p) {
    const double A2 = p.amplitude_A * p.amplitude_A;
    const auto& m = p.medium;
    const double bracket = m.eps0 + m.eps1 * A2 +
                           (3.0 * p.k0 * p.k0 - 4.0 * p.k * p.lambda + p.k * p.k) / (3.0 * p.omega * p.omega);
    return A2 / p.k * bracket;
}

Vec3 spin(const SolitonParams& p, const QuadratureSpec& spec, double t) {
    if (p.amplitude_A == 0.0) return Vec3::Zero();
    const auto& m = p.medium;
    const Interval window = soliton_window(p, t);
    Vec3 out;
    for (int c = 0; c < 3; ++c) {
        auto density = [&](double z) {
            const Vec3 E = electric_field(p, {t, z});
            const Vec3 A = vector_potential(p, {t, z});
            return m.permittivity(E.squaredNorm()) * E.cross(A)[c];
        };
        out[c] = integrate(density, window, spec);
    }
    return out;
}

double spin_z(const SolitonParams& p, const QuadratureSpec& spec, double t) {
    if (p.amplitude_A == 0.0) return 0.0;
    const auto& m = p.medium;
    auto density = [&](double z) {
        const Vec3 E = electric_field(p, {t, z});
        const Vec3 A = vector_potential(p, {t, z});
        return m.permittivity(E.squaredNorm()) * (E.x() * A.y() - E.y() * A.x());
    };
    return integrate(density, soliton_window(p, t), spec);
}

double spin_closed(const SolitonParams& p) {
    const double A2 = p.amplitude_A * p.amplitude_A;
    const auto& m = p.medium;
    const double s = 2.0 * A2 / (3.0 * p.k * p.omega) * (3.0 * m.eps0 + 2.0 * m.eps1 * A2);
    return p.polarization == Polarization::Right ? s : -s;
}

Vec3 momentum(const SolitonParams& p, const QuadratureSpec& spec, double t) {
    if (p.amplitude_A == 0.0) return Vec3::Zero();
    const auto& m = p.medium;
    auto density = [&](double z) {
        const Vec3 E = electric_field(p, {t, z});
        return m.permittivity(E.squaredNorm()) * E.dot(vector_potential_dz(p, {t, z}));
    };
    return Vec3(0.0, 0.0, integrate(density, soliton_window(p, t), spec));
}

Observables observables(const SolitonParams& p, const QuadratureSpec& spec, double t) {
    return {energy(p, spec, t), spin(p, spec, t), momentum(p, spec, t)};
}

ObservableRow observable_row(const SolitonParams& p, const QuadratureSpec& spec) {
    const Observables o = observables(p, spec);
    ObservableRow row;
    row.X = p.X;
    row.W_quad = o.W;
    row.W_closed = energy_closed(p);
    row.S_quad = o.S.z();
    row.S_closed = spin_closed(p);
    row.P_quad = o.P.z();
    row.k0S = p.k0 * std::abs(o.S.z());
    row.rel_dW = relative(row.W_quad, row.W_closed);
    row.rel_dS = relative(row.S_quad, row.S_closed);
    row.rel_dP = row.P_quad == 0.0 ? 0.0 : std::abs(row.P_quad - row.k0S) / std::abs(row.P_quad);
    return row;
}

}  // namespace kerr
