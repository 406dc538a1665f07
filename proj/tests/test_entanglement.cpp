#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "kerr/dispersion.hpp"
#include "kerr/entanglement.hpp"
#include "kerr/errors.hpp"
#include "kerr/observables.hpp"
#include "kerr/quantization.hpp"

using namespace kerr;

namespace {

constexpr double kSingletC = 5.0;

struct Pair {
    SolitonParams left;
    SolitonParams right;
};

Pair constituents(double X) {
    SolitonParams r = solve_params(Medium{}, X, 1.0);
    r = r.with_hbar(default_hbar(r));
    return {r.with_polarization(Polarization::Left), r};
}

double max_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const cplx& c : v) m = std::max(m, std::abs(c));
    return m;
}

}  // namespace

TEST_SUITE("entanglement") {

TEST_CASE("self pairing vanishes identically") {
    const Pair c = constituents(0.2);
    const SingletState s = build_singlet(c.right, c.right);
    CHECK(max_abs(s.values) == 0.0);
}

TEST_CASE("swapping the constituents negates every entry") {
    const Pair c = constituents(0.2);
    const SingletState a = build_singlet(c.left, c.right);
    const SingletState b = build_singlet(c.right, c.left);
    REQUIRE(a.values.size() == b.values.size());
    bool negated = true;
    for (std::size_t i = 0; i < a.values.size(); ++i) negated = negated && a.values[i] == -b.values[i];
    CHECK(negated);
}

TEST_CASE("exchange antisymmetry is exact on the grid") {
    for (double X : {0.06, 0.5}) {
        const Pair c = constituents(X);
        CHECK(exchange_defect(build_singlet(c.left, c.right)) == 0.0);
    }
}

TEST_CASE("norm equals hbar^2 minus the squared overlap") {
    for (double X : {0.06, 0.2, 1.0}) {
        const Pair c = constituents(X);
        const SingletState s = build_singlet(c.left, c.right);
        const double norm = singlet_norm(s) / (s.hbar * s.hbar);
        CAPTURE(X);
        CHECK(norm == doctest::Approx(1.0 - std::norm(s.overlap)).epsilon(1e-8));
        CHECK(std::abs(norm - 1.0) <= 10.0 * c.right.k / c.right.k0);
    }
}

TEST_CASE("norm is stable under padding, common translation and common phase") {
    const Pair c = constituents(1.0);
    const double base = singlet_norm(build_singlet(c.left, c.right));
    SingletGridSpec wide;
    wide.half_width_in_sizes = 40.0;
    CHECK(std::abs(singlet_norm(build_singlet(c.left, c.right, wide)) / base - 1.0) < 1e-10);
    const double moved = singlet_norm(build_singlet(c.left.with_center(13.0), c.right.with_center(13.0)));
    CHECK(std::abs(moved / base - 1.0) < 1e-13);
    // a common complex phase leaves every |entry| unchanged
    SingletState rotated = build_singlet(c.left, c.right);
    for (cplx& v : rotated.values) v *= std::polar(1.0, 0.7);
    CHECK(std::abs(singlet_norm(rotated) / base - 1.0) < 1e-13);
}

TEST_CASE("a common carrier phase moves the norm only through the overlap") {
    // L and R rotate in opposite senses under a carrier phase shift, so the
    // overlap, not the norm, is what changes.
    const Pair c = constituents(1.0);
    for (double theta : {0.0, 0.7, 2.0}) {
        const SingletState s = build_singlet(c.left.with_phase(theta), c.right.with_phase(theta));
        const double norm = singlet_norm(s) / (s.hbar * s.hbar);
        CAPTURE(theta);
        CHECK(norm == doctest::Approx(1.0 - std::norm(s.overlap)).epsilon(1e-8));
        CHECK(std::abs(norm - 1.0) <= 10.0 * c.right.k / c.right.k0);
    }
}

TEST_CASE("zero field singlet has zero norm") {
    const SolitonParams r = solve_params(Medium{}, x_min(), 1.0);
    const SingletState s = build_singlet(r.with_polarization(Polarization::Left), r);
    CHECK(singlet_norm(s) == 0.0);
}

TEST_CASE("total spin and momentum vanish across an X scan") {
    for (double X : {0.06, 0.1, 0.2, 0.5, 1.0}) {
        const Pair c = constituents(X);
        const SingletState s = build_singlet(c.left, c.right);
        const SingletObservables o = singlet_observables(s);
        const double S = std::abs(spin_z(c.right));
        const double l2 = c.right.lambda * c.right.lambda;
        CAPTURE(X);
        CHECK(std::abs(o.total_spin_z) / S <= kSingletC * l2 + 1e-10);
        CHECK(std::abs(o.total_momentum_z) / (c.right.k0 * S) <= kSingletC * l2 + 1e-10);
        // slot 1 is mirrored and carries the opposite momentum
        const double P = momentum(c.right).z();
        CHECK(o.slot2_momentum_z == doctest::Approx(P).epsilon(1e-8));
        CHECK(o.slot1_momentum_z == doctest::Approx(-P).epsilon(1e-8));
    }
}

TEST_CASE("slot-2 spin splits into half of each constituent spin") {
    const Pair c = constituents(0.2);
    const SingletObservables o = singlet_observables(build_singlet(c.left, c.right));
    const double S = spin_z(c.right);
    CHECK(o.slot2_spin_first_branch == doctest::Approx(0.5 * S).epsilon(1e-8));
    CHECK(o.slot2_spin_second_branch == doctest::Approx(-0.5 * S).epsilon(1e-8));
    CHECK(std::abs(o.slot2_spin_z - (o.slot2_spin_first_branch + o.slot2_spin_second_branch)) < 1e-8 * std::abs(S));
}

TEST_CASE("builder enforces the memory cap and shared parameters") {
    const Pair c = constituents(0.2);
    SingletGridSpec tiny;
    tiny.memory_cap = 1000;
    CHECK_THROWS_AS(build_singlet(c.left, c.right, tiny), CapacityExceeded);
    const SolitonParams other = solve_params(Medium{}, 0.3, 1.0).with_hbar(c.right.medium.hbar);
    CHECK_THROWS_AS(build_singlet(c.left, other), DomainError);
    SolitonParams low = c.right.with_hbar(0.1 * c.right.medium.hbar);
    CHECK_THROWS_AS(build_singlet(low.with_polarization(Polarization::Left), low), Infeasible);
}

TEST_CASE("parallel assembly matches serial bit for bit") {
    const Pair c = constituents(0.5);
    SingletGridSpec par;
    par.threads = 3;
    CHECK(build_singlet(c.left, c.right).values == build_singlet(c.left, c.right, par).values);
}

TEST_CASE("tensor dump layout") {
    const std::vector<cplx> values{{1.0, -2.0}, {0.5, 3.25}};
    const auto path = std::filesystem::temp_directory_path() / "kerr_tensor_test.bin";
    write_tensor(path, 1, 1, values);
    std::ifstream in(path, std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
    REQUIRE(bytes.size() == 3 * 8 + 2 * 16);
    auto u64 = [&](std::size_t off) {
        std::uint64_t v = 0;
        for (int b = 7; b >= 0; --b) v = (v << 8) | bytes[off + static_cast<std::size_t>(b)];
        return v;
    };
    CHECK(u64(0) == 1);
    CHECK(u64(8) == 1);
    CHECK(u64(16) == 9);
    CHECK(std::bit_cast<double>(u64(24)) == 1.0);
    CHECK(std::bit_cast<double>(u64(32)) == -2.0);
    CHECK(std::bit_cast<double>(u64(48)) == 3.25);
    std::filesystem::remove(path);
}

TEST_CASE("two-particle ensemble scaling and determinism") {
    const Pair c = constituents(1.0);
    const Interval dist(0.0, 60.0 / c.right.k);
    SUBCASE("single configuration: norm is 1 - Re(<L1,R1><R2,L2>)/hbar^2") {
        const TwoParticleEnsemble e = build_two_particle_ensemble(c.left, c.right, 1, 4, dist);
        const auto& t = e.trials[0];
        auto overlap = [&](double centre, double phase) {
            return build_singlet(c.left.with_center(centre).with_phase(phase),
                                 c.right.with_center(centre).with_phase(phase))
                .overlap;
        };
        const cplx o1 = overlap(t.center1, t.phase1);
        const cplx o2 = overlap(t.center2, t.phase2);
        const double want = 1.0 - (o1 * std::conj(o2)).real();
        CHECK(two_particle_norm(e) == doctest::Approx(want).epsilon(1e-6));
        CHECK(std::abs(two_particle_norm(e) - 1.0) <= 10.0 * c.right.k / c.right.k0);
    }
    SUBCASE("same seed, any thread count") {
        SingletGridSpec spec = default_two_particle_spec();
        const TwoParticleEnsemble a = build_two_particle_ensemble(c.left, c.right, 20, 4, dist, spec);
        spec.threads = 3;
        const TwoParticleEnsemble b = build_two_particle_ensemble(c.left, c.right, 20, 4, dist, spec);
        CHECK(a.psi == b.psi);
        const TwoParticleEnsemble d = build_two_particle_ensemble(c.left, c.right, 20, 5, dist, spec);
        CHECK(a.psi != d.psi);
    }
    SUBCASE("slots draw independent centres") {
        const TwoParticleEnsemble e = build_two_particle_ensemble(c.left, c.right, 3, 8, dist);
        for (const auto& t : e.trials) CHECK(t.center1 != t.center2);
    }
    SUBCASE("moderate N stays within the Monte Carlo bound") {
        const TwoParticleEnsemble e = build_two_particle_ensemble(c.left, c.right, 100, 6, dist);
        CHECK(std::abs(two_particle_norm(e) - 1.0) <= 5.0 / std::sqrt(100.0));
    }
}

}
