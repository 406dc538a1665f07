#include "kerr/entanglement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "kerr/errors.hpp"
#include "kerr/quantization.hpp"

namespace kerr {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const cplx kI{0.0, 1.0};

void require_compatible(const SolitonParams& a, const SolitonParams& b) {
    const bool same = a.X == b.X && a.omega == b.omega && a.medium.eps0 == b.medium.eps0 &&
                      a.medium.eps1 == b.medium.eps1 && a.medium.hbar == b.medium.hbar;
    if (!same) throw DomainError("singlet constituents must share X, omega and the medium");
}

double grid_step(const SolitonParams& p, const SingletGridSpec& spec) {
    return 1.0 / (spec.points_per_inverse_k0 * p.k0);
}

void require_capacity(std::size_t n1, std::size_t n2, const SingletGridSpec& spec) {
    const double entries = 9.0 * static_cast<double>(n1) * static_cast<double>(n2);
    if (entries > static_cast<double>(spec.memory_cap)) {
        throw CapacityExceeded(fmt::format(
            "singlet tensor needs {} x {} x 9 = {:.3g} complex entries, above the cap of {}", n1, n2,
            entries, spec.memory_cap));
    }
}

double shared_nu(const SolitonParams& first) {
    const SolitonParams ref = first.with_center(0.0).with_phase(0.0);
    return solve_nu(ref, phi_grid(ref)).nu;
}

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

// -i (u^* x v)_z
cplx spin_z_pair(const CVec3& u, const CVec3& v) {
    return -kI * (std::conj(u.x()) * v.y() - std::conj(u.y()) * v.x());
}

}  // namespace

SingletState build_singlet(const SolitonParams& first, const SolitonParams& second, const SingletGridSpec& spec) {
    require_compatible(first, second);
    SingletState s;
    s.hbar = first.medium.hbar;
    s.nu = first.amplitude_A > 0.0 ? shared_nu(first) : 1.0;

    const double center = 0.5 * (first.center_z0 + second.center_z0);
    const double half = spec.half_width_in_sizes / first.k + 0.5 * std::abs(first.center_z0 - second.center_z0);
    const UniformGrid base = UniformGrid::covering(center - half, center + half, grid_step(first, spec));
    s.grid1 = {base, true};
    s.grid2 = {base, false};
    const std::size_t n1 = s.n1();
    const std::size_t n2 = s.n2();
    require_capacity(n1, n2, spec);

    auto sample = [&](const SlotGrid& g, const SolitonParams& p, std::vector<CVec3>& v, std::vector<CVec3>& dv) {
        v.resize(g.size());
        dv.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            v[i] = phi_at(p, g.argument(i), s.nu);
            dv[i] = phi_dz_at(p, g.argument(i), s.nu);
        }
    };
    sample(s.grid1, first, s.first1, s.d_first1);
    sample(s.grid1, second, s.second1, s.d_second1);
    sample(s.grid2, first, s.first2, s.d_first2);
    sample(s.grid2, second, s.second2, s.d_second2);

    cplx overlap = 0.0;
    for (std::size_t j = 0; j < n2; ++j) overlap += trapezoid_weight(j, n2) * s.first2[j].dot(s.second2[j]);
    s.overlap = overlap * base.step / s.hbar;

    s.values.assign(9 * n1 * n2, cplx{});
    parallel_for_blocks(n1, spec.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t j = 0; j < n2; ++j) {
                cplx* out = &s.values[(i * n2 + j) * 9];
                for (int a = 0; a < 3; ++a) {
                    for (int b = 0; b < 3; ++b) {
                        out[a * 3 + b] =
                            kInvSqrt2 * (s.first1[i][a] * s.second2[j][b] - s.second1[i][a] * s.first2[j][b]);
                    }
                }
            }
        }
    });
    return s;
}

double singlet_norm(const SingletState& s) {
    if (s.values.empty()) throw GridTooSmall("singlet state has no samples");
    const std::size_t n1 = s.n1();
    const std::size_t n2 = s.n2();
    double total = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n2; ++j) {
            const cplx* v = &s.values[(i * n2 + j) * 9];
            double cell = 0.0;
            for (int c = 0; c < 9; ++c) cell += std::norm(v[c]);
            row += trapezoid_weight(j, n2) * cell;
        }
        total += trapezoid_weight(i, n1) * row;
    }
    return total * s.grid1.base.step * s.grid2.base.step;
}

SingletObservables singlet_observables(const SingletState& s) {
    const std::size_t n1 = s.n1();
    const std::size_t n2 = s.n2();
    double spin1 = 0.0, spin2 = 0.0, mom1 = 0.0, mom2 = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const double w = trapezoid_weight(i, n1) * trapezoid_weight(j, n2);
            const cplx* v = &s.values[(i * n2 + j) * 9];
            auto psi = [&](int a, int b) { return v[a * 3 + b]; };
            // Slot-wise derivatives from the constituents; d/dz1 of f(-z1) is -f'(-z1).
            auto d1 = [&](int a, int b) {
                return kInvSqrt2 * (-s.d_first1[i][a] * s.second2[j][b] + s.d_second1[i][a] * s.first2[j][b]);
            };
            auto d2 = [&](int a, int b) {
                return kInvSqrt2 * (s.first1[i][a] * s.d_second2[j][b] - s.second1[i][a] * s.d_first2[j][b]);
            };
            cplx sp1 = 0.0, sp2 = 0.0, mo1 = 0.0, mo2 = 0.0;
            for (int b = 0; b < 3; ++b) {
                sp1 += -kI * (std::conj(psi(0, b)) * psi(1, b) - std::conj(psi(1, b)) * psi(0, b));
                sp2 += -kI * (std::conj(psi(b, 0)) * psi(b, 1) - std::conj(psi(b, 1)) * psi(b, 0));
            }
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    mo1 += std::conj(psi(a, b)) * (-kI) * d1(a, b);
                    mo2 += std::conj(psi(a, b)) * (-kI) * d2(a, b);
                }
            }
            spin1 += w * sp1.real();
            spin2 += w * sp2.real();
            mom1 += w * mo1.real();
            mom2 += w * mo2.real();
        }
    }
    // (1/hbar^2) * hbar * integral: operators carry one factor of hbar.
    const double scale = s.grid1.base.step * s.grid2.base.step / s.hbar;
    SingletObservables o;
    o.slot1_spin_z = spin1 * scale;
    o.slot2_spin_z = spin2 * scale;
    o.slot1_momentum_z = mom1 * scale;
    o.slot2_momentum_z = mom2 * scale;
    o.total_spin_z = o.slot1_spin_z + o.slot2_spin_z;
    o.total_momentum_z = o.slot1_momentum_z + o.slot2_momentum_z;

    // Branch bookkeeping from the 1D constituents: branch weight 1/2 times
    // the slot-2 constituent spin times the slot-1 constituent norm / hbar.
    auto integral = [&](auto&& f) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < n2; ++j) acc += trapezoid_weight(j, n2) * f(j);
        return acc * s.grid2.base.step;
    };
    const double norm_first1 = integral([&](std::size_t i) { return cplx(s.first1[i].squaredNorm()); }).real();
    const double norm_second1 = integral([&](std::size_t i) { return cplx(s.second1[i].squaredNorm()); }).real();
    const double spin_second2 = integral([&](std::size_t j) { return spin_z_pair(s.second2[j], s.second2[j]); }).real();
    const double spin_first2 = integral([&](std::size_t j) { return spin_z_pair(s.first2[j], s.first2[j]); }).real();
    o.slot2_spin_first_branch = 0.5 * spin_second2 * norm_first1 / s.hbar;
    o.slot2_spin_second_branch = 0.5 * spin_first2 * norm_second1 / s.hbar;
    return o;
}

double exchange_defect(const SingletState& s) {
    const std::size_t n = s.n1();
    if (n != s.n2() || s.grid1.base.lo != s.grid2.base.lo || s.grid1.base.step != s.grid2.base.step) {
        throw DomainError("exchange check needs mirrored slot grids over one support");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    const cplx sum = s.value(i, j, a, b) + s.value(n - 1 - j, n - 1 - i, b, a);
                    worst = std::max(worst, std::abs(sum));
                }
            }
        }
    }
    return worst;
}

void write_tensor(const std::filesystem::path& path, std::size_t n1, std::size_t n2, const std::vector<cplx>& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + path.string());
    auto put_u64 = [&](std::uint64_t v) {
        unsigned char bytes[8];
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(v >> (8 * b));
        out.write(reinterpret_cast<const char*>(bytes), 8);
    };
    auto put_f64 = [&](double d) { put_u64(std::bit_cast<std::uint64_t>(d)); };
    put_u64(n1);
    put_u64(n2);
    put_u64(9);
    for (const cplx& v : values) {
        put_f64(v.real());
        put_f64(v.imag());
    }
    if (!out) throw std::ios_base::failure("write failed for " + path.string());
}

SingletGridSpec default_two_particle_spec() {
    SingletGridSpec spec;
    spec.half_width_in_sizes = 15.0;
    spec.points_per_inverse_k0 = 5.0;
    return spec;
}

TwoParticleEnsemble build_two_particle_ensemble(const SolitonParams& first, const SolitonParams& second,
                                                std::size_t N, std::uint64_t seed, const Interval& center_dist,
                                                const SingletGridSpec& spec) {
    require_compatible(first, second);
    if (N < 1) throw DomainError("two-particle ensemble needs N >= 1");
    TwoParticleEnsemble ens;
    ens.N = N;
    ens.seed = seed;
    ens.hbar = first.medium.hbar;
    ens.nu = shared_nu(first);

    const double pad = spec.half_width_in_sizes / first.k;
    const UniformGrid base = UniformGrid::covering(center_dist.lo() - pad, center_dist.hi() + pad, grid_step(first, spec));
    ens.grid1 = {base, true};
    ens.grid2 = {base, false};
    const std::size_t n1 = ens.n1();
    const std::size_t n2 = ens.n2();
    require_capacity(n1, n2, spec);

    ens.trials.resize(N);
    for (std::size_t j = 0; j < N; ++j) {
        RandomStream stream{seed, j, 0};
        const Draw c1 = uniform(stream, center_dist.lo(), center_dist.hi());
        const Draw t1 = uniform(c1.next, 0.0, 2.0 * std::numbers::pi);
        const Draw c2 = uniform(t1.next, center_dist.lo(), center_dist.hi());
        const Draw t2 = uniform(c2.next, 0.0, 2.0 * std::numbers::pi);
        ens.trials[j] = {j, c1.value, t1.value, c2.value, t2.value};
    }

    // Per-trial constituent samples over each slot's support. Slot-1 indices
    // run over reversed arguments, so the argument window maps to a reversed
    // index window.
    struct Slots {
        std::size_t i0, i1, j0, j1;
        std::vector<CVec3> first1, second1, first2, second2;
    };
    std::vector<Slots> slots(N);
    parallel_for_blocks(N, spec.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const auto& tr = ens.trials[t];
            Slots& sl = slots[t];
            const auto [a0, a1] = base.index_range(tr.center1 - pad, tr.center1 + pad);
            sl.i0 = n1 - a1;
            sl.i1 = n1 - a0;
            std::tie(sl.j0, sl.j1) = base.index_range(tr.center2 - pad, tr.center2 + pad);
            const SolitonParams f1 = first.with_center(tr.center1).with_phase(tr.phase1);
            const SolitonParams s1 = second.with_center(tr.center1).with_phase(tr.phase1);
            const SolitonParams f2 = first.with_center(tr.center2).with_phase(tr.phase2);
            const SolitonParams s2 = second.with_center(tr.center2).with_phase(tr.phase2);
            for (std::size_t i = sl.i0; i < sl.i1; ++i) {
                sl.first1.push_back(phi_at(f1, ens.grid1.argument(i), ens.nu));
                sl.second1.push_back(phi_at(s1, ens.grid1.argument(i), ens.nu));
            }
            for (std::size_t j = sl.j0; j < sl.j1; ++j) {
                sl.first2.push_back(phi_at(f2, ens.grid2.argument(j), ens.nu));
                sl.second2.push_back(phi_at(s2, ens.grid2.argument(j), ens.nu));
            }
        }
    });

    ens.psi.assign(9 * n1 * n2, cplx{});
    const double scale = kInvSqrt2 / std::sqrt(ens.hbar * ens.hbar * static_cast<double>(N));
    parallel_for_blocks(n1, spec.threads, [&](std::size_t begin, std::size_t end) {
        for (const Slots& sl : slots) {
            const std::size_t r0 = std::max(begin, sl.i0);
            const std::size_t r1 = std::min(end, sl.i1);
            for (std::size_t i = r0; i < r1; ++i) {
                const CVec3& f1 = sl.first1[i - sl.i0];
                const CVec3& s1 = sl.second1[i - sl.i0];
                for (std::size_t j = sl.j0; j < sl.j1; ++j) {
                    const CVec3& f2 = sl.first2[j - sl.j0];
                    const CVec3& s2 = sl.second2[j - sl.j0];
                    cplx* out = &ens.psi[(i * n2 + j) * 9];
                    for (int a = 0; a < 3; ++a) {
                        for (int b = 0; b < 3; ++b) out[a * 3 + b] += f1[a] * s2[b] - s1[a] * f2[b];
                    }
                }
            }
        }
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t c = 0; c < 9 * n2; ++c) ens.psi[i * n2 * 9 + c] *= scale;
        }
    });

    const PairStatistics pairs = pair_statistics(first, ens.nu, false);
    ens.sigma_norm = pairs.norm / (ens.hbar * ens.hbar * center_dist.length());
    return ens;
}

double two_particle_norm(const TwoParticleEnsemble& ens) {
    const std::size_t n1 = ens.n1();
    const std::size_t n2 = ens.n2();
    double total = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n2; ++j) {
            const cplx* v = &ens.psi[(i * n2 + j) * 9];
            double cell = 0.0;
            for (int c = 0; c < 9; ++c) cell += std::norm(v[c]);
            row += trapezoid_weight(j, n2) * cell;
        }
        total += trapezoid_weight(i, n1) * row;
    }
    return total * ens.grid1.base.step * ens.grid2.base.step;
}

}  // namespace kerr
