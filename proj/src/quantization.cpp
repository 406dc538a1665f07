#include "kerr/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include <fmt/format.h>

#include "kerr/errors.hpp"
#include "kerr/fields.hpp"
#include "kerr/observables.hpp"

namespace kerr {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const cplx kI{0.0, 1.0};

// Support of a single trial is [c - pad/k, c + pad/k].
constexpr double kSupportSizes = 40.0;

CVec3 combine(const Vec3& a_part, const Vec3& pi_part, double nu) {
    CVec3 out;
    for (int c = 0; c < 3; ++c) out[c] = kInvSqrt2 * cplx(nu * a_part[c], pi_part[c] / nu);
    return out;
}

double spin_z_density(const CVec3& v) {
    // -i (v^* x v)_z
    const cplx cz = std::conj(v.x()) * v.y() - std::conj(v.y()) * v.x();
    return (-kI * cz).real();
}

}  // namespace

CVec3 phi_at(const SolitonParams& p, double z, double nu) noexcept {
    const SpacetimePoint pt{0.0, z};
    const Vec3 E = electric_field(p, pt);
    const Vec3 pi = -p.medium.permittivity(E.squaredNorm()) * E;
    return combine(vector_potential(p, pt), pi, nu);
}

CVec3 phi_dz_at(const SolitonParams& p, double z, double nu) noexcept {
    const SpacetimePoint pt{0.0, z};
    const Vec3 E = electric_field(p, pt);
    const Vec3 dE = electric_field_dz(p, pt);
    const double eps = p.medium.permittivity(E.squaredNorm());
    const Vec3 dpi = -(eps * dE + 2.0 * p.medium.eps1 * E.dot(dE) * E);
    return combine(vector_potential_dz(p, pt), dpi, nu);
}

double default_phi_step(const SolitonParams& p) noexcept {
    return std::min(1.0 / (20.0 * p.k), 1.0 / (20.0 * p.k0));
}

UniformGrid phi_grid(const SolitonParams& p, double half_width_in_sizes) {
    const double h = half_width_in_sizes / p.k;
    return UniformGrid::covering(p.center_z0 - h, p.center_z0 + h, default_phi_step(p));
}

namespace {

void require_coverage(const SolitonParams& p, const UniformGrid& grid) {
    const double need = kSupportSizes / p.k;
    if (grid.n < 2 || grid.lo > p.center_z0 - need || grid.hi() < p.center_z0 + need) {
        throw GridTooSmall(fmt::format(
            "grid [{:.6g}, {:.6g}] must cover [{:.6g}, {:.6g}] (40/k around the centre)", grid.lo,
            grid.hi(), p.center_z0 - need, p.center_z0 + need));
    }
}

double trapezoid_of(const UniformGrid& grid, auto&& f) {
    std::vector<double> v(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) v[i] = f(i);
    return trapezoid(v, grid.step);
}

}  // namespace

PhiField phi_from_fields(const SolitonParams& p, const UniformGrid& grid, double nu) {
    if (!(nu > 0.0)) throw DomainError("nu must be positive");
    require_coverage(p, grid);
    PhiField field;
    field.grid = grid;
    field.nu = nu;
    field.hbar = p.medium.hbar;
    field.values.resize(grid.n);
    field.dz_values.resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        field.values[i] = phi_at(p, grid.node(i), nu);
        field.dz_values[i] = phi_dz_at(p, grid.node(i), nu);
    }
    return field;
}

double norm_integral(const PhiField& field) {
    return trapezoid_of(field.grid, [&](std::size_t i) { return field.values[i].squaredNorm(); });
}

Vec3 spin_integral(const PhiField& field) {
    Vec3 out;
    for (int c = 0; c < 3; ++c) {
        out[c] = trapezoid_of(field.grid, [&](std::size_t i) {
            const CVec3& v = field.values[i];
            // Written out: Eigen's cross on complex operands conjugates them.
            const int a = (c + 1) % 3, b = (c + 2) % 3;
            const cplx cross = std::conj(v[a]) * v[b] - std::conj(v[b]) * v[a];
            return (-kI * cross).real();
        });
    }
    return out;
}

double momentum_integral(const PhiField& field) {
    return trapezoid_of(field.grid, [&](std::size_t i) {
        return (-kI * field.values[i].dot(field.dz_values[i])).real();
    });
}

namespace {

std::pair<double, double> normalization_integrals(const SolitonParams& p, const UniformGrid& grid) {
    const double I_A = trapezoid_of(grid, [&](std::size_t i) {
        return vector_potential(p, {0.0, grid.node(i)}).squaredNorm();
    });
    const double I_pi = trapezoid_of(grid, [&](std::size_t i) {
        const Vec3 E = electric_field(p, {0.0, grid.node(i)});
        const double eps = p.medium.permittivity(E.squaredNorm());
        return eps * eps * E.squaredNorm();
    });
    return {I_A, I_pi};
}

}  // namespace

NuSolution solve_nu(const SolitonParams& p, const UniformGrid& grid) {
    if (!(p.amplitude_A > 0.0)) throw DomainError("normalization needs a soliton with A > 0");
    require_coverage(p, grid);
    NuSolution sol;
    sol.hbar = p.medium.hbar;
    std::tie(sol.I_A, sol.I_pi) = normalization_integrals(p, grid);
    sol.hbar_min = std::sqrt(sol.I_A * sol.I_pi);
    double disc = sol.hbar * sol.hbar - sol.I_A * sol.I_pi;
    // hbar at the bound itself: the discriminant is zero up to rounding.
    if (disc < 0.0 && -disc <= 8.0 * std::numeric_limits<double>::epsilon() * sol.hbar * sol.hbar) disc = 0.0;
    if (disc < 0.0) {
        throw Infeasible(fmt::format("no real nu: hbar = {:.17g} is below the feasibility bound "
                                     "sqrt(I_A*I_pi) = {:.17g}",
                                     sol.hbar, sol.hbar_min),
                         sol.hbar_min);
    }
    // Smaller root, written without cancellation: (hbar - sqrt(d)) / I_A = I_pi / (hbar + sqrt(d)).
    sol.nu = std::sqrt(sol.I_pi / (sol.hbar + std::sqrt(disc)));
    return sol;
}

double minimal_hbar(const SolitonParams& p) {
    if (!(p.amplitude_A > 0.0)) throw DomainError("normalization needs a soliton with A > 0");
    const auto [I_A, I_pi] = normalization_integrals(p, phi_grid(p));
    return std::sqrt(I_A * I_pi);
}

double default_hbar(const SolitonParams& p, double factor) { return factor * minimal_hbar(p); }

const char* to_string(Observable o) noexcept { return o == Observable::SpinZ ? "SpinZ" : "MomentumZ"; }

std::vector<Trial> draw_trials(const SolitonParams& p, const EnsembleConfig& config) {
    std::vector<Trial> trials(config.N);
    for (std::size_t j = 0; j < config.N; ++j) {
        const RandomStream stream{config.seed, j, 0};
        const Draw center = uniform(stream, config.center_dist.lo(), config.center_dist.hi());
        const Draw phase = uniform(center.next, 0.0, 2.0 * std::numbers::pi);
        Polarization pol = p.polarization;
        if (config.mix == PolarizationMix::Alternating) {
            pol = (j % 2 == 0) ? Polarization::Right : Polarization::Left;
        }
        trials[j] = {j, center.value, phase.value, pol};
    }
    return trials;
}

namespace {

SolitonParams trial_params(const SolitonParams& p, const Trial& t) {
    return p.with_polarization(t.polarization).with_center(t.center).with_phase(t.phase);
}

}  // namespace

// E_theta |<phi_a(0), M phi_b(Delta, theta)>|^2 integrated over Delta.
PairStatistics pair_statistics(const SolitonParams& p, double nu, bool mixed) {
    const double reach = 30.0 / p.k;
    const double support = kSupportSizes / p.k;
    const UniformGrid grid = UniformGrid::covering(-support - reach, support + reach, default_phi_step(p));
    const std::vector<double> shifts = linear_spaced(-reach, reach, 241);
    const double dshift = shifts[1] - shifts[0];

    std::vector<Polarization> pols{Polarization::Right};
    if (mixed) pols.push_back(Polarization::Left);
    const double weight = 1.0 / static_cast<double>(pols.size() * pols.size());

    PairStatistics stats;
    for (Polarization pa : pols) {
        const SolitonParams ref = p.with_polarization(pa).with_center(0.0).with_phase(0.0);
        std::vector<CVec3> v0(grid.n);
        for (std::size_t i = 0; i < grid.n; ++i) v0[i] = phi_at(ref, grid.node(i), nu);
        for (Polarization pb : pols) {
            std::vector<double> wn(shifts.size()), ws(shifts.size()), wm(shifts.size());
            for (std::size_t s = 0; s < shifts.size(); ++s) {
                double acc_n = 0.0, acc_s = 0.0, acc_m = 0.0;
                for (double theta : {0.0, 0.5 * std::numbers::pi}) {
                    const SolitonParams q = p.with_polarization(pb).with_center(shifts[s]).with_phase(theta);
                    cplx cn = 0.0, cs = 0.0, cm = 0.0;
                    const auto [i0, i1] = grid.index_range(shifts[s] - support, shifts[s] + support);
                    for (std::size_t i = i0; i < i1; ++i) {
                        const double z = grid.node(i);
                        const CVec3 v = phi_at(q, z, nu);
                        const CVec3 dv = phi_dz_at(q, z, nu);
                        const CVec3& u = v0[i];
                        cn += u.dot(v);  // Eigen dot conjugates the left operand
                        cs += -kI * (std::conj(u.x()) * v.y() - std::conj(u.y()) * v.x());
                        cm += -kI * u.dot(dv);
                    }
                    cn *= grid.step;
                    cs *= grid.step;
                    cm *= grid.step;
                    acc_n += 0.5 * std::norm(cn);
                    acc_s += 0.5 * std::norm(cs);
                    acc_m += 0.5 * std::norm(cm);
                }
                wn[s] = acc_n;
                ws[s] = acc_s;
                wm[s] = acc_m;
            }
            stats.norm += weight * trapezoid(wn, dshift);
            stats.spin += weight * trapezoid(ws, dshift);
            stats.momentum += weight * trapezoid(wm, dshift);
        }
    }
    return stats;
}

EnsembleWaveFunction build_ensemble(const SolitonParams& p, const EnsembleConfig& config) {
    if (config.N < 1) throw DomainError("ensemble needs N >= 1");
    if (config.center_dist.length() < 10.0 / p.k) {
        throw IntervalTooNarrow(fmt::format("centre distribution length {:.6g} < 10/k = {:.6g}",
                                            config.center_dist.length(), 10.0 / p.k));
    }
    EnsembleWaveFunction ens;
    ens.params = p;
    ens.config = config;
    ens.trials = draw_trials(p, config);

    // nu depends only on the soliton shape; all trials are translated and
    // phase-shifted copies of the reference soliton.
    const SolitonParams ref = p.with_center(0.0).with_phase(0.0);
    ens.nu = solve_nu(ref, phi_grid(ref));
    const double nu = ens.nu.nu;

    const double pad = config.pad_in_sizes / p.k;
    const double step = config.max_step > 0.0 ? config.max_step : default_phi_step(p);
    ens.grid = UniformGrid::covering(config.center_dist.lo() - pad, config.center_dist.hi() + pad, step);
    const UniformGrid& grid = ens.grid;

    std::vector<std::pair<std::size_t, std::size_t>> support(ens.trials.size());
    for (const Trial& t : ens.trials) support[t.index] = grid.index_range(t.center - pad, t.center + pad);

    ens.psi.assign(grid.n, CVec3::Zero());
    if (config.with_derivative) ens.dpsi.assign(grid.n, CVec3::Zero());
    const double scale = 1.0 / std::sqrt(ens.hbar() * static_cast<double>(config.N));

    // Each node accumulates its trials in index order whatever the partition.
    parallel_for_blocks(grid.n, config.threads, [&](std::size_t begin, std::size_t end) {
        for (const Trial& t : ens.trials) {
            const std::size_t i0 = std::max(begin, support[t.index].first);
            const std::size_t i1 = std::min(end, support[t.index].second);
            if (i0 >= i1) continue;
            const SolitonParams q = trial_params(p, t);
            for (std::size_t i = i0; i < i1; ++i) {
                const double z = grid.node(i);
                ens.psi[i] += phi_at(q, z, nu);
                if (config.with_derivative) ens.dpsi[i] += phi_dz_at(q, z, nu);
            }
        }
        for (std::size_t i = begin; i < end; ++i) {
            ens.psi[i] *= scale;
            if (config.with_derivative) ens.dpsi[i] *= scale;
        }
    });

    // Classical S_z and P_z do not depend on centre or phase, so one
    // quadrature per polarization serves every trial.
    const SolitonParams right = ref.with_polarization(Polarization::Right);
    const SolitonParams left = ref.with_polarization(Polarization::Left);
    const double spin_lr[2] = {spin_z(right), spin_z(left)};
    const double mom_lr[2] = {momentum(right).z(), momentum(left).z()};
    ens.trial_spin.resize(config.N);
    ens.trial_momentum.resize(config.N);
    for (const Trial& t : ens.trials) {
        const int side = t.polarization == Polarization::Right ? 0 : 1;
        ens.trial_spin[t.index] = spin_lr[side];
        ens.trial_momentum[t.index] = mom_lr[side];
    }

    ens.pairs = pair_statistics(p, nu, config.mix == PolarizationMix::Alternating);
    return ens;
}

double ensemble_norm(const EnsembleWaveFunction& ens) {
    return trapezoid_of(ens.grid, [&](std::size_t i) { return ens.psi[i].squaredNorm(); });
}

namespace {

double cross_sigma(const EnsembleWaveFunction& ens, double w) {
    const double n = static_cast<double>(ens.N());
    return std::sqrt((n - 1.0) / n * w / ens.config.center_dist.length());
}

}  // namespace

double ensemble_norm_sigma(const EnsembleWaveFunction& ens) {
    return cross_sigma(ens, ens.pairs.norm) / ens.hbar();
}

DensityEstimate density_estimate(const EnsembleWaveFunction& ens, const Interval& interval) {
    const double size = ens.params.proper_size();
    if (interval.length() < 10.0 * size * (1.0 - 1e-12)) {
        throw IntervalTooNarrow(fmt::format("interval length {:.6g} < 10 soliton sizes ({:.6g})",
                                            interval.length(), 10.0 * size));
    }
    const UniformGrid& g = ens.grid;
    if (interval.lo() < g.lo || interval.hi() > g.hi()) {
        throw GridTooSmall("density interval leaves the ensemble grid");
    }
    auto density = [&](std::size_t i) { return ens.psi[i].squaredNorm(); };
    const auto [i0, i1] = g.index_range(interval.lo(), interval.hi());
    double integral = 0.0;
    for (std::size_t i = i0; i + 1 < i1; ++i) integral += 0.5 * g.step * (density(i) + density(i + 1));
    // End slivers by linear interpolation towards the neighbouring node.
    auto sliver = [&](std::size_t inside, std::size_t outside, double edge) {
        const double frac = std::abs(edge - g.node(inside)) / g.step;
        const double edge_value = density(inside) + frac * (density(outside) - density(inside));
        return 0.5 * frac * g.step * (density(inside) + edge_value);
    };
    if (i0 > 0) integral += sliver(i0, i0 - 1, interval.lo());
    if (i1 < g.n) integral += sliver(i1 - 1, i1, interval.hi());

    DensityEstimate est{interval};
    est.soliton_size = size;
    est.rho = integral / interval.length();
    est.count = static_cast<std::size_t>(std::count_if(
        ens.trials.begin(), ens.trials.end(), [&](const Trial& t) { return interval.contains(t.center); }));
    const double n = static_cast<double>(ens.N());
    est.count_fraction = static_cast<double>(est.count) / (n * interval.length());
    est.rel_gap = est.count_fraction > 0.0 ? std::abs(est.rho - est.count_fraction) / est.count_fraction
                                           : std::abs(est.rho) * interval.length();
    const double hbar2 = ens.hbar() * ens.hbar();
    est.sigma_rel = std::sqrt(n * ens.pairs.norm /
                              (hbar2 * ens.config.center_dist.length() * std::max<double>(1.0, static_cast<double>(est.count))));
    est.alpha_fit = std::max(0.0, est.rel_gap - 3.0 * est.sigma_rel) * interval.length() / size;
    return est;
}

bool MeanValue::within(double alpha_max) const noexcept {
    return std::abs(ensemble_avg - operator_avg) <=
           alpha_max * volume_ratio * std::abs(ensemble_avg) + 3.0 * sigma;
}

MeanValue mean_value(const EnsembleWaveFunction& ens, Observable observable) {
    MeanValue mv;
    mv.observable = observable;
    mv.volume_ratio = ens.params.proper_size() / ens.config.center_dist.length();
    const auto& samples = observable == Observable::SpinZ ? ens.trial_spin : ens.trial_momentum;
    double sum = 0.0;
    for (double v : samples) sum += v;
    mv.ensemble_avg = sum / static_cast<double>(ens.N());

    const double hbar = ens.hbar();
    if (observable == Observable::SpinZ) {
        mv.operator_avg = hbar * trapezoid_of(ens.grid, [&](std::size_t i) { return spin_z_density(ens.psi[i]); });
        mv.sigma = cross_sigma(ens, ens.pairs.spin);
    } else {
        if (ens.dpsi.empty()) throw DomainError("momentum average needs an ensemble built with derivatives");
        mv.operator_avg = hbar * trapezoid_of(ens.grid, [&](std::size_t i) {
            return (-kI * ens.psi[i].dot(ens.dpsi[i])).real();
        });
        mv.sigma = cross_sigma(ens, ens.pairs.momentum);
    }
    return mv;
}

}  // namespace kerr
