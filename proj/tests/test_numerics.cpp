#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "kerr/errors.hpp"
#include "kerr/numerics.hpp"

using namespace kerr;

TEST_SUITE("numerics") {

TEST_CASE("interval rejects empty or reversed bounds") {
    CHECK_THROWS_AS(Interval(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Interval(2.0, 1.0), std::invalid_argument);
    const Interval i = Interval::centered(3.0, 2.0);
    CHECK(i.lo() == 1.0);
    CHECK(i.hi() == 5.0);
    CHECK(i.contains(Interval(2.0, 4.0)));
    CHECK_FALSE(i.contains(6.0));
}

TEST_CASE("quadrature matches closed-form antiderivatives") {
    // int sech^2 = tanh
    const double a = -3.0, b = 7.5;
    const double sech2 = integrate([](double x) { return 1.0 / (std::cosh(x) * std::cosh(x)); }, {a, b});
    CHECK(sech2 == doctest::Approx(std::tanh(b) - std::tanh(a)).epsilon(1e-12));

    // int sech^4 = tanh - tanh^3/3
    auto F4 = [](double x) { return std::tanh(x) - std::pow(std::tanh(x), 3) / 3.0; };
    const double sech4 = integrate([](double x) { return std::pow(std::cosh(x), -4); }, {a, b});
    CHECK(sech4 == doctest::Approx(F4(b) - F4(a)).epsilon(1e-12));

    // int exp(-x^2) = sqrt(pi)/2 erf
    const double gauss = integrate([](double x) { return std::exp(-x * x); }, {-0.5, 4.0});
    CHECK(gauss == doctest::Approx(0.5 * std::sqrt(std::numbers::pi) * (std::erf(4.0) - std::erf(-0.5))).epsilon(1e-12));

    // polynomial: exact for the Kronrod rule
    const double cubic = integrate([](double x) { return x * x * x - 2.0 * x; }, {0.0, 2.0});
    CHECK(cubic == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("oscillatory sech integrand against its Fourier transform") {
    // int_R cos(a x) sech(x) dx = pi sech(pi a / 2)
    for (double a : {1.0, 4.0, 12.0}) {
        const double got = integrate([a](double x) { return std::cos(a * x) / std::cosh(x); }, {-45.0, 45.0});
        const double want = std::numbers::pi / std::cosh(0.5 * std::numbers::pi * a);
        CHECK(std::abs(got - want) < 1e-11);
    }
}

TEST_CASE("quadrature reports subdivision exhaustion") {
    QuadratureSpec tight{1e-15, 1e-15, 5};
    CHECK_THROWS_AS(integrate([](double x) { return 1.0 / std::sqrt(std::abs(x) + 1e-12); }, {-1.0, 1.0}, tight),
                    SubdivisionLimit);
}

TEST_CASE("finite differences converge at their nominal orders") {
    auto f = [](double x) { return std::sin(2.0 * x); };
    const double x = 0.7;
    const double d1 = 2.0 * std::cos(2.0 * x);
    const double d2 = -4.0 * std::sin(2.0 * x);
    const double e3a = std::abs(derivative(f, x, 1, 1e-2) - d1);
    const double e3b = std::abs(derivative(f, x, 1, 5e-3) - d1);
    CHECK(e3a / e3b == doctest::Approx(4.0).epsilon(0.01));
    const double e5a = std::abs(derivative5(f, x, 1, 4e-2) - d1);
    const double e5b = std::abs(derivative5(f, x, 1, 2e-2) - d1);
    CHECK(e5a / e5b == doctest::Approx(16.0).epsilon(0.02));
    CHECK(derivative(f, x, 2, 1e-3) == doctest::Approx(d2).epsilon(1e-5));
    CHECK(derivative5(f, x, 2, 1e-2) == doctest::Approx(d2).epsilon(1e-8));
    CHECK_THROWS(derivative(f, x, 3, 1e-3));
}

TEST_CASE("splitmix64 reproduces the reference sequence") {
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
    CHECK(splitmix64(0x9E3779B97F4A7C15ULL) == 0x6E789E6AA1B965F4ULL);
}

TEST_CASE("random streams are pure functions of their key") {
    const RandomStream s{42, 7, 0};
    CHECK(s.bits() == RandomStream{42, 7, 0}.bits());
    CHECK(s.bits() != RandomStream{42, 8, 0}.bits());
    CHECK(s.bits() != RandomStream{43, 7, 0}.bits());
    CHECK(s.bits() != s.advanced().bits());

    std::set<std::uint64_t> seen;
    for (std::uint64_t j = 0; j < 1000; ++j) seen.insert(RandomStream{1, j, 0}.bits());
    CHECK(seen.size() == 1000);
}

TEST_CASE("uniform draws stay in range and have the right mean") {
    RandomStream s{9, 0, 0};
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const Draw d = uniform(s, -2.0, 3.0);
        CHECK(d.value >= -2.0);
        CHECK(d.value < 3.0);
        sum += d.value;
        s = d.next;
    }
    // mean 0.5, standard error 5/sqrt(12 n)
    CHECK(std::abs(sum / n - 0.5) < 4.0 * 5.0 / std::sqrt(12.0 * n));
    CHECK(uniform(s, 1.5, 1.5).value == 1.5);
    CHECK_THROWS(uniform(s, 2.0, 1.0));
}

TEST_CASE("uniform grid covering and index ranges") {
    const UniformGrid g = UniformGrid::covering(-1.0, 2.0, 0.07);
    CHECK(g.lo == -1.0);
    CHECK(g.hi() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(g.step <= 0.07);
    const auto [i0, i1] = g.index_range(0.0, 1.0);
    CHECK(g.node(i0) >= 0.0);
    CHECK(g.node(i0 - 1) < 0.0);
    CHECK(g.node(i1 - 1) <= 1.0);
    CHECK(g.node(i1) > 1.0);
    CHECK(g.index_range(5.0, 6.0).first == g.index_range(5.0, 6.0).second);
}

TEST_CASE("trapezoid is exact for linear data") {
    std::vector<double> v;
    for (int i = 0; i <= 10; ++i) v.push_back(3.0 + 0.5 * i);
    // f(x) = 3 + 5x on [0, 1], step 0.1
    CHECK(trapezoid(v, 0.1) == doctest::Approx(5.5).epsilon(1e-14));
}

TEST_CASE("parallel blocks visit every index exactly once") {
    for (unsigned threads : {1u, 2u, 3u, 7u, 0u}) {
        std::vector<int> hits(1001, 0);
        parallel_for_blocks(hits.size(), threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) ++hits[i];
        });
        for (int h : hits) REQUIRE(h == 1);
    }
    int calls = 0;
    parallel_for_blocks(0, 4, [&](std::size_t, std::size_t) { ++calls; });
    CHECK(calls == 0);
}

TEST_CASE("spaced sequences include both endpoints") {
    const auto l = log_spaced(0.01, 100.0, 5);
    REQUIRE(l.size() == 5);
    CHECK(l.front() == 0.01);
    CHECK(l.back() == 100.0);
    CHECK(l[2] == doctest::Approx(1.0).epsilon(1e-14));
    const auto lin = linear_spaced(-1.0, 1.0, 3);
    CHECK(lin[1] == doctest::Approx(0.0));
    CHECK(lin.back() == 1.0);
}

}
