#include <doctest.h>

#include <cmath>

#include "kerr/dispersion.hpp"
#include "kerr/fields.hpp"
#include "kerr/observables.hpp"

using namespace kerr;

namespace {

constexpr double kSpinC = 5.0;
constexpr double kMomentumC = 5.0;

// Leading-order spin oracle: with E = A s e_R and A_pot = (A/omega) s e_L,
// int eps E x A = (A^2/omega) int (eps0 s^2 + eps1 A^2 s^4) dz
//               = (A^2/(k omega)) (2 eps0 + 4/3 eps1 A^2).
double spin_leading(const SolitonParams& p) {
    const double A2 = p.amplitude_A * p.amplitude_A;
    return A2 / (p.k * p.omega) * (2.0 * p.medium.eps0 + 4.0 / 3.0 * p.medium.eps1 * A2);
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("closed-form spin equals the sech-power oracle") {
    for (double X : {0.06, 0.2, 1.0}) {
        const SolitonParams p = solve_params(Medium{1.2, 0.8, 1.0}, X, 1.5);
        CHECK(spin_closed(p) == doctest::Approx(spin_leading(p)).epsilon(1e-14));
    }
}

TEST_CASE("quadrature spin and momentum match the closed forms within C lambda^2") {
    for (double X : {0.06, 0.1, 0.2, 0.5, 1.0}) {
        const SolitonParams p = solve_params(Medium{}, X, 1.0);
        const ObservableRow row = observable_row(p);
        const double l2 = p.lambda * p.lambda;
        CAPTURE(X);
        CHECK(row.rel_dS <= kSpinC * l2);
        CHECK(row.rel_dP <= kMomentumC * l2);
        CHECK(row.W_quad > 0.0);
        CHECK(std::isfinite(row.rel_dW));
    }
}

TEST_CASE("left spin is minus right spin") {
    for (double X : {0.06, 0.5}) {
        const SolitonParams r = solve_params(Medium{}, X, 1.0);
        const SolitonParams l = r.with_polarization(Polarization::Left);
        const double sr = spin_z(r), sl = spin_z(l);
        CHECK(std::abs(sr + sl) <= 1e-10 * std::abs(sr));
        CHECK(spin_closed(l) == -spin_closed(r));
        CHECK(momentum(l).z() == doctest::Approx(momentum(r).z()).epsilon(1e-10));
    }
}

TEST_CASE("spin points along the propagation axis") {
    const SolitonParams p = solve_params(Medium{}, 0.2, 1.0);
    const Vec3 s = spin(p);
    CHECK(std::abs(s.x()) < 1e-10 * std::abs(s.z()));
    CHECK(std::abs(s.y()) < 1e-10 * std::abs(s.z()));
    CHECK(s.z() == doctest::Approx(spin_z(p)).epsilon(1e-12));
}

TEST_CASE("observables are invariant under translation, phase and time") {
    const SolitonParams p = solve_params(Medium{}, 0.3, 1.0);
    const SolitonParams q = p.with_center(17.0).with_phase(2.1);
    const Observables a = observables(p);
    const Observables b = observables(q, {}, 3.5);
    CHECK(b.W == doctest::Approx(a.W).epsilon(1e-9));
    CHECK(b.S.z() == doctest::Approx(a.S.z()).epsilon(1e-9));
    CHECK(b.P.z() == doctest::Approx(a.P.z()).epsilon(1e-9));
}

TEST_CASE("zero amplitude soliton carries nothing") {
    const SolitonParams p = solve_params(Medium{}, x_min(), 1.0);
    const Observables o = observables(p);
    CHECK(o.W == 0.0);
    CHECK(o.S.norm() == 0.0);
    CHECK(o.P.norm() == 0.0);
    CHECK(energy_closed(p) == 0.0);
}

TEST_CASE("lagrangian density at the peak") {
    const SolitonParams p = solve_params(Medium{}, 0.2, 1.0);
    const double z = p.center_z0;
    const Vec3 E = electric_field(p, {0.0, z});
    const Vec3 B = magnetic_field(p, {0.0, z});
    const double want = 0.25 * (2.0 * E.squaredNorm() + E.squaredNorm() * E.squaredNorm() - 2.0 * B.squaredNorm());
    CHECK(lagrangian_density(p, 0.0, z) == doctest::Approx(want));
}

TEST_CASE("soliton window follows the moving centre") {
    const SolitonParams p = solve_params(Medium{}, 0.2, 1.0).with_center(2.0);
    const Interval w = soliton_window(p, 10.0);
    CHECK(w.midpoint() == doctest::Approx(2.0 + 10.0 * p.velocity_V));
    CHECK(w.length() == doctest::Approx(80.0 / p.k));
}

}
