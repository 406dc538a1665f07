#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kerr/dispersion.hpp"
#include "kerr/errors.hpp"
#include "kerr/fields.hpp"
#include "kerr/numerics.hpp"

using namespace kerr;

namespace {

constexpr double kFieldC = 2.0;

SolitonParams soliton(double X, Polarization pol = Polarization::Right) {
    return solve_params(Medium{}, X, 1.0, pol).with_center(0.3).with_phase(0.4);
}

SpacetimeGrid square_grid(const SolitonParams& p, std::size_t n = 400) {
    return SpacetimeGrid::around(p, n, n, 3.2 * 2.0 * std::numbers::pi / p.omega, residual_z_span(p, n));
}

}  // namespace

TEST_SUITE("fields") {

TEST_CASE("basis vectors are orthonormal and rotate with the phase") {
    const Basis b = basis_vectors(0.9);
    CHECK(b.e_R.dot(b.e_L) == doctest::Approx(0.0));
    CHECK(b.e_R.norm() == doctest::Approx(1.0));
    CHECK(b.e_L_prime.dot(b.e_R_prime) == doctest::Approx(0.0));
    const double h = 1e-6;
    const Basis up = basis_vectors(0.9 + h), dn = basis_vectors(0.9 - h);
    CHECK(((up.e_R - dn.e_R) / (2 * h) - b.e_L).norm() < 1e-9);
    CHECK(((up.e_L - dn.e_L) / (2 * h) + b.e_R).norm() < 1e-9);
    CHECK(((up.e_L_prime - dn.e_L_prime) / (2 * h) - b.e_R_prime).norm() < 1e-9);
    CHECK(((up.e_R_prime - dn.e_R_prime) / (2 * h) + b.e_L_prime).norm() < 1e-9);
}

TEST_CASE("electric field is the transverse sech envelope") {
    const SolitonParams p = soliton(0.2);
    for (double z : {-3.0, 0.3, 2.0}) {
        const SpacetimePoint pt{0.7, z};
        const Vec3 E = electric_field(p, pt);
        const double xi = z - p.center_z0 - p.velocity_V * pt.t;
        CHECK(E.norm() == doctest::Approx(p.amplitude_A / std::cosh(p.k * xi)).epsilon(1e-14));
        CHECK(E.z() == 0.0);
    }
}

TEST_CASE("left polarization transposes the field components") {
    const SolitonParams r = soliton(0.2);
    const SolitonParams l = r.with_polarization(Polarization::Left);
    for (double z : {-1.0, 0.5, 4.0}) {
        const Vec3 Er = electric_field(r, {0.2, z});
        const Vec3 El = electric_field(l, {0.2, z});
        CHECK(El.x() == doctest::Approx(Er.y()).epsilon(1e-14));
        CHECK(El.y() == doctest::Approx(Er.x()).epsilon(1e-14));
    }
}

TEST_CASE("analytic z derivatives agree with finite differences") {
    for (Polarization pol : {Polarization::Right, Polarization::Left}) {
        const SolitonParams p = soliton(0.3, pol);
        for (double z : {-2.0, 0.1, 1.7}) {
            const SpacetimePoint pt{0.5, z};
            const Vec3 dE = electric_field_dz(p, pt);
            const Vec3 dA = vector_potential_dz(p, pt);
            for (int c = 0; c < 2; ++c) {
                const double fdE = derivative5([&](double s) { return electric_field(p, {0.5, s})[c]; }, z, 1, 1e-3);
                const double fdA = derivative5([&](double s) { return vector_potential(p, {0.5, s})[c]; }, z, 1, 1e-3);
                CHECK(std::abs(dE[c] - fdE) < 1e-10);
                CHECK(std::abs(dA[c] - fdA) < 1e-10);
            }
        }
    }
}

TEST_CASE("potential and curl consistency scale with lambda squared") {
    for (double X : {0.06, 0.2, 1.0}) {
        for (Polarization pol : {Polarization::Right, Polarization::Left}) {
            const SolitonParams p = soliton(X, pol);
            const ConsistencyReport r = field_consistency(p, square_grid(p, 120));
            CAPTURE(X);
            CHECK(r.lambda2 == doctest::Approx(p.lambda * p.lambda));
            CHECK(r.max_potential_residual <= kFieldC * r.lambda2);
            CHECK(r.max_curl_residual <= kFieldC * r.lambda2);
        }
    }
}

TEST_CASE("leading-order potential misses the lambda correction") {
    const SolitonParams p = soliton(0.2);
    const SpacetimePoint pt{0.0, 1.5};
    const Vec3 full = vector_potential(p, pt);
    const Vec3 lead = vector_potential(p, pt, PotentialOrder::Leading);
    const Vec3 E = electric_field(p, pt);
    // the correction is -lambda T (A/omega) s along E / |E|
    const double T = std::tanh(p.k * (pt.z - p.center_z0));
    CHECK(((full - lead) + p.lambda * T / p.omega * E).norm() < 1e-14);
}

TEST_CASE("wave-equation residual grows with lambda^2 k/k0 and refuses bad grids") {
    const SolitonParams small = soliton(0.06);
    const SolitonParams large = soliton(1.0);
    const double r_small = maxwell_residual(small, square_grid(small, 300)).max_rel_residual;
    const double r_large = maxwell_residual(large, square_grid(large, 300)).max_rel_residual;
    CHECK(r_small < r_large);

    const SpacetimeGrid coarse = SpacetimeGrid::around(small, 20, 20, 20.0, 20.0 / small.k);
    CHECK_THROWS_AS(maxwell_residual(small, coarse), GridTooCoarse);
    const SpacetimeGrid narrow = SpacetimeGrid::around(small, 400, 400, 20.0, 1.0 / small.k);
    CHECK_THROWS_AS(maxwell_residual(small, narrow), GridTooSmall);
}

TEST_CASE("zero amplitude at X0 gives identically zero fields") {
    const SolitonParams p = solve_params(Medium{}, x_min(), 1.0);
    const FieldSample s = sample_fields(p, {0.3, 1.0});
    CHECK(s.E.norm() == 0.0);
    CHECK(s.B.norm() == 0.0);
    CHECK(s.A_pot.norm() == 0.0);
}

TEST_CASE("line sampling returns the requested number of rows") {
    const SolitonParams p = soliton(0.2);
    const auto rows = sample_line(p, 0.0, -5.0, 5.0, 101);
    REQUIRE(rows.size() == 101);
    CHECK(rows.front().z == -5.0);
    CHECK(rows.back().z == doctest::Approx(5.0));
}

}
