// numerics.hpp - numerical kernels shared by the soliton modules.
//
//   * adaptive Gauss-Kronrod (7/15) quadrature on a finite interval
//   * central finite differences
//   * a counter-based random stream keyed by (seed, stream_index)
//   * uniform grids with trapezoidal sums
//   * a block-parallel loop whose output never depends on the worker count

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kerr {

// Closed finite interval [lo, hi] with lo < hi.
class Interval {
public:
    Interval(double lo, double hi);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double length() const noexcept { return hi_ - lo_; }
    double midpoint() const noexcept { return 0.5 * (lo_ + hi_); }
    bool contains(double x) const noexcept { return x >= lo_ && x <= hi_; }
    bool contains(const Interval& other) const noexcept {
        return other.lo_ >= lo_ && other.hi_ <= hi_;
    }

    static Interval centered(double center, double half_width) {
        return Interval(center - half_width, center + half_width);
    }

private:
    double lo_;
    double hi_;
};

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 4000;

    void validate() const;
};

using RealFunction = std::function<double(double)>;

// Adaptive quadrature; throws SubdivisionLimit when the tolerance
// max(abs_tol, rel_tol*|I|) is not met within spec.max_subdivisions panels.
double integrate(const RealFunction& f, const Interval& window, const QuadratureSpec& spec = {});

// Central difference of order 1 or 2 with the 3-point stencil
// {x-h, x, x+h}. Truncation error O(h^2).
double derivative(const RealFunction& f, double x, int order, double step);

// 5-point central stencil {x-2h, ..., x+2h}. Truncation error O(h^4).
double derivative5(const RealFunction& f, double x, int order, double step);

// Immutable token of a counter-based generator. Drawing returns a new token.
struct RandomStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_index = 0;
    std::uint64_t counter = 0;

    RandomStream advanced() const noexcept { return {seed, stream_index, counter + 1}; }
    std::uint64_t bits() const noexcept;
};

struct Draw {
    double value;
    RandomStream next;
};

// Uniform draw in [lo, hi); returns lo when lo == hi.
Draw uniform(const RandomStream& stream, double lo, double hi);

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Uniform grid: node(i) = lo + i*step, i in [0, n).
struct UniformGrid {
    double lo = 0.0;
    double step = 1.0;
    std::size_t n = 0;

    double node(std::size_t i) const noexcept { return lo + static_cast<double>(i) * step; }
    double hi() const noexcept { return node(n == 0 ? 0 : n - 1); }
    double span() const noexcept { return hi() - lo; }

    // Smallest grid with spacing <= max_step whose nodes cover [a, b].
    static UniformGrid covering(double a, double b, double max_step);

    // Index range [first, last) of nodes inside [a, b].
    std::pair<std::size_t, std::size_t> index_range(double a, double b) const noexcept;
};

// Trapezoidal rule over all nodes of the grid.
double trapezoid(std::span<const double> values, double step);

// Runs body(begin, end) on contiguous blocks of [0, n). Each index is
// handled by one worker only, so results written per-index are identical for
// every thread count. threads == 0 means hardware concurrency.
void parallel_for_blocks(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t, std::size_t)>& body);

// Log-spaced (geometric) and linear grids including both endpoints.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);
std::vector<double> linear_spaced(double lo, double hi, std::size_t n);

}  // namespace kerr
