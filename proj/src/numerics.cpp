#include "kerr/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "kerr/errors.hpp"

namespace kerr {

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw std::invalid_argument(fmt::format("Interval requires finite lo < hi, got [{}, {}]", lo, hi));
    }
}

void QuadratureSpec::validate() const {
    if (abs_tol < 0.0 || rel_tol < 0.0 || (abs_tol == 0.0 && rel_tol == 0.0)) {
        throw std::invalid_argument("QuadratureSpec needs a positive abs_tol or rel_tol");
    }
    if (max_subdivisions <= 0) {
        throw std::invalid_argument("QuadratureSpec.max_subdivisions must be positive");
    }
}

namespace {

// Kronrod 15-point nodes/weights with the embedded 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const RealFunction& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

double integrate(const RealFunction& f, const Interval& window, const QuadratureSpec& spec) {
    spec.validate();
    std::priority_queue<Panel> panels;
    Panel first = gauss_kronrod(f, window.lo(), window.hi());
    double total = first.value;
    double error = first.error;
    panels.push(first);
    int count = 1;
    // Panels whose error is at roundoff level cannot be refined further.
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon();
    while (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (count >= spec.max_subdivisions) {
            throw SubdivisionLimit(fmt::format(
                "quadrature on [{}, {}] stopped at {} panels with error estimate {:.3e}",
                window.lo(), window.hi(), count, error));
        }
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = gauss_kronrod(f, worst.a, mid);
        Panel right = gauss_kronrod(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
        if (error <= roundoff * std::abs(total)) break;
    }
    // Re-sum from scratch so the result does not carry incremental drift.
    double sum = 0.0;
    std::vector<Panel> all;
    all.reserve(panels.size());
    while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (const auto& p : all) sum += p.value;
    if (!std::isfinite(sum)) {
        throw std::domain_error("integrand is not finite on the window");
    }
    return sum;
}

double derivative(const RealFunction& f, double x, int order, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("derivative step must be positive");
    switch (order) {
        case 1:
            return (f(x + step) - f(x - step)) / (2.0 * step);
        case 2:
            return (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step);
        default:
            throw std::invalid_argument("derivative order must be 1 or 2");
    }
}

double derivative5(const RealFunction& f, double x, int order, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("derivative step must be positive");
    const double fm2 = f(x - 2.0 * step);
    const double fm1 = f(x - step);
    const double fp1 = f(x + step);
    const double fp2 = f(x + 2.0 * step);
    switch (order) {
        case 1:
            return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * step);
        case 2:
            return (-fm2 + 16.0 * fm1 - 30.0 * f(x) + 16.0 * fp1 - fp2) / (12.0 * step * step);
        default:
            throw std::invalid_argument("derivative order must be 1 or 2");
    }
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t RandomStream::bits() const noexcept {
    // Key derivation: each (seed, stream) pair gets its own splitmix64 sequence
    // position, and the counter walks along it.
    const std::uint64_t key = splitmix64(seed ^ splitmix64(stream_index * 0xD1B54A32D192ED03ULL + 1));
    return splitmix64(key + counter * 0x9E3779B97F4A7C15ULL);
}

Draw uniform(const RandomStream& stream, double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("uniform requires lo <= hi");
    const double u = static_cast<double>(stream.bits() >> 11) * 0x1.0p-53;
    double value = lo + (hi - lo) * u;
    if (lo < hi && value >= hi) value = std::nextafter(hi, lo);
    return {value, stream.advanced()};
}

UniformGrid UniformGrid::covering(double a, double b, double max_step) {
    if (!(b > a) || !(max_step > 0.0)) {
        throw std::invalid_argument("UniformGrid::covering needs b > a and max_step > 0");
    }
    const auto intervals = static_cast<std::size_t>(std::ceil((b - a) / max_step));
    const std::size_t m = std::max<std::size_t>(intervals, 1);
    return {a, (b - a) / static_cast<double>(m), m + 1};
}

std::pair<std::size_t, std::size_t> UniformGrid::index_range(double a, double b) const noexcept {
    if (n == 0 || b < lo || a > hi()) return {0, 0};
    const double first = std::ceil((a - lo) / step);
    const double last = std::floor((b - lo) / step);
    const auto i0 = static_cast<std::size_t>(std::max(first, 0.0));
    const auto i1 = static_cast<std::size_t>(std::min(last, static_cast<double>(n - 1))) + 1;
    return {i0, std::max(i0, i1)};
}

double trapezoid(std::span<const double> values, double step) {
    if (values.size() < 2) return 0.0;
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
    return sum * step;
}

void parallel_for_blocks(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
        if (n == 1 && lo > 0.0) return {lo};
        throw std::invalid_argument("log_spaced needs 0 < lo < hi and n >= 2");
    }
    std::vector<double> out(n);
    const double ratio = std::log(hi / lo);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linear_spaced(double lo, double hi, std::size_t n) {
    if (n == 1) return {lo};
    if (!(hi > lo) || n < 2) throw std::invalid_argument("linear_spaced needs lo < hi and n >= 2");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    out.back() = hi;
    return out;
}

}  // namespace kerr
