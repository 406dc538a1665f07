#include "kerr/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "kerr/dispersion.hpp"
#include "kerr/entanglement.hpp"
#include "kerr/errors.hpp"
#include "kerr/fields.hpp"
#include "kerr/io.hpp"
#include "kerr/observables.hpp"
#include "kerr/quantization.hpp"

namespace kerr {

using nlohmann::json;
namespace fs = std::filesystem;

json to_json(const RunConfig& c) {
    json j;
    j["medium"] = {{"eps0", c.eps0}, {"eps1", c.eps1}, {"hbar", c.hbar ? json(*c.hbar) : json(nullptr)}};
    j["X"] = c.X;
    j["X_grid"] = c.X_grid;
    j["omega"] = c.omega;
    j["polarization"] = c.polarization;
    j["seed"] = c.seed;
    j["N"] = c.N;
    j["output_dir"] = c.output_dir;
    j["format"] = c.format;
    j["threads"] = c.threads;
    j["fields"] = {{"t", c.t}, {"z_half_width", c.z_half_width}, {"samples", c.samples},
                   {"grid_nt", c.grid_nt}, {"grid_nz", c.grid_nz}};
    j["ensemble"] = {{"center_length", c.center_length}, {"intervals", c.intervals}, {"mix", c.mix},
                     {"profile_points", c.profile_points}};
    j["singlet"] = {{"dump_tensor", c.dump_tensor}, {"two_particle_N", c.two_particle_N},
                    {"two_particle_length", c.two_particle_length}};
    return j;
}

namespace {

template <class T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace

RunConfig config_from_json(const json& input) {
    const json& j = input.contains("config") ? input.at("config") : input;
    if (!j.is_object()) throw DomainError("config must be a JSON object");
    RunConfig c;
    if (j.contains("medium")) {
        const json& m = j.at("medium");
        take(m, "eps0", c.eps0);
        take(m, "eps1", c.eps1);
        if (m.contains("hbar") && !m.at("hbar").is_null()) c.hbar = m.at("hbar").get<double>();
    }
    take(j, "X", c.X);
    take(j, "X_grid", c.X_grid);
    take(j, "omega", c.omega);
    take(j, "polarization", c.polarization);
    take(j, "seed", c.seed);
    take(j, "N", c.N);
    take(j, "output_dir", c.output_dir);
    take(j, "format", c.format);
    take(j, "threads", c.threads);
    if (j.contains("fields")) {
        const json& f = j.at("fields");
        take(f, "t", c.t);
        take(f, "z_half_width", c.z_half_width);
        take(f, "samples", c.samples);
        take(f, "grid_nt", c.grid_nt);
        take(f, "grid_nz", c.grid_nz);
    }
    if (j.contains("ensemble")) {
        const json& e = j.at("ensemble");
        take(e, "center_length", c.center_length);
        take(e, "intervals", c.intervals);
        take(e, "mix", c.mix);
        take(e, "profile_points", c.profile_points);
    }
    if (j.contains("singlet")) {
        const json& s = j.at("singlet");
        take(s, "dump_tensor", c.dump_tensor);
        take(s, "two_particle_N", c.two_particle_N);
        take(s, "two_particle_length", c.two_particle_length);
    }
    return c;
}

std::vector<double> parse_x_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t colon = spec.find(':', start);
        parts.push_back(spec.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    auto number = [&](const std::string& s) {
        if (s == "X0" || s == "x0") return x_min();
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw DomainError("bad number '" + s + "' in X grid '" + spec + "'");
        return v;
    };
    auto count = [&](const std::string& s) {
        const double v = number(s);
        if (v < 1.0 || v != std::floor(v)) throw DomainError("X grid needs a positive integer count, got " + s);
        return static_cast<std::size_t>(v);
    };
    auto is_spacing = [](const std::string& s) { return s == "log" || s == "lin"; };

    double lo = 0.0, hi = 1000.0;
    std::size_t n = 0;
    std::string spacing = "log";
    if (parts.size() == 3 && is_spacing(parts[2])) {
        lo = number(parts[0]);
        n = count(parts[1]);
        spacing = parts[2];
    } else if (parts.size() == 3 || (parts.size() == 4 && is_spacing(parts[3]))) {
        lo = number(parts[0]);
        hi = number(parts[1]);
        n = count(parts[2]);
        if (parts.size() == 4) spacing = parts[3];
    } else {
        throw DomainError("X grid '" + spec + "' must be LO:HI:N[:log|lin] or LO:N:log|lin");
    }
    if (n > 1 && !(hi > lo)) throw DomainError("X grid needs HI > LO");
    if (n == 1) return {lo};
    return spacing == "log" ? log_spaced(lo, hi, n) : linear_spaced(lo, hi, n);
}

namespace {

struct Context {
    RunConfig config;
    json config_json;
    std::string config_hash;
    fs::path out;

    Medium medium() const {
        Medium m{config.eps0, config.eps1, config.hbar.value_or(1.0)};
        m.validate();
        return m;
    }
    SolitonParams params() const {
        return solve_params(medium(), config.X, config.omega, polarization_from_string(config.polarization));
    }
    // Soliton with the configured or default action quantum.
    SolitonParams quantized_params() const {
        const SolitonParams p = params();
        return config.hbar ? p : p.with_hbar(default_hbar(p));
    }
    std::vector<double> x_values() const {
        return config.X_grid.empty() ? std::vector<double>{config.X} : parse_x_grid(config.X_grid);
    }
    bool json_format() const { return config.format == "json"; }

    json report() const {
        json j;
        j["provenance"] = {{"seed", config.seed}, {"config_hash", config_hash}, {"tool_version", kToolVersion}};
        j["config"] = config_json;
        return j;
    }
    void emit(const std::string& name, const json& j) const { write_file(out / name, j.dump(2) + "\n"); }
    void emit_text(const std::string& name, const std::string& text) const { write_file(out / name, text); }
};

json grid_json(const UniformGrid& g) { return {{"lo", g.lo}, {"step", g.step}, {"n", g.n}}; }

int cmd_dispersion(const Context& ctx) {
    const Medium m = ctx.medium();
    const std::vector<double> xs = ctx.x_values();
    const RangeScan scan = scan_ranges(m, xs);
    double worst = 0.0;
    std::size_t warnings = 0;
    for (double X : xs) {
        const SolitonParams p = solve_params(m, X, ctx.config.omega);
        worst = std::max(worst, residuals_789(p).max());
        if (envelope_warning(p)) ++warnings;
    }
    if (ctx.json_format()) {
        json j = ctx.report();
        json rows = json::array();
        for (const RangeRow& r : scan.rows) {
            rows.push_back({{"X", r.X}, {"Z", r.Z}, {"lambda2", r.lambda2}, {"k2_over_k02", r.k2_over_k02},
                            {"eps0V2", r.eps0V2}});
        }
        j["rows"] = rows;
        ctx.emit("dispersion.json", j);
    } else {
        ctx.emit_text("dispersion.csv", dispersion_csv(scan.rows));
    }
    json s = ctx.report();
    s["X0"] = x_min();
    s["rows"] = scan.rows.size();
    s["lambda2_min"] = scan.lambda2_min;
    s["lambda2_max"] = scan.lambda2_max;
    s["k2_over_k02_min"] = scan.k2_over_k02_min;
    s["k2_over_k02_max"] = scan.k2_over_k02_max;
    s["lambda2_reference_lower"] = 1.0 / 27.0;
    s["lambda2_below_reference"] = scan.lambda2_min < 1.0 / 27.0;
    s["max_rel_residual"] = worst;
    s["envelope_warnings"] = warnings;
    ctx.emit("dispersion_summary.json", s);
    fmt::print("dispersion: {} rows, max residual {:.3g}, lambda2 in [{:.6g}, {:.6g}], k2/k02 in [{:.6g}, {:.6g}]\n",
               scan.rows.size(), worst, scan.lambda2_min, scan.lambda2_max, scan.k2_over_k02_min,
               scan.k2_over_k02_max);
    return 0;
}

int cmd_fields(const Context& ctx) {
    const RunConfig& c = ctx.config;
    if (c.samples < 100) throw DomainError(fmt::format("--samples must be >= 100, got {}", c.samples));
    if (c.grid_nt < 3 || c.grid_nz < 3) throw DomainError("residual grid needs at least 3 x 3 nodes");
    const SolitonParams p = ctx.params();
    if (auto w = envelope_warning(p)) fmt::print(stderr, "warning: {}\n", *w);

    const double centre = p.center_z0 + p.velocity_V * c.t;
    const double half = c.z_half_width / p.k;
    const std::vector<FieldRow> rows = sample_line(p, c.t, centre - half, centre + half, c.samples);
    if (ctx.json_format()) {
        json j = ctx.report();
        json arr = json::array();
        for (const FieldRow& r : rows) {
            const FieldSample& s = r.sample;
            arr.push_back({r.t, r.z, s.E.x(), s.E.y(), s.B.x(), s.B.y(), s.A_pot.x(), s.A_pot.y()});
        }
        j["columns"] = {"t", "z", "Ex", "Ey", "Bx", "By", "Ax", "Ay"};
        j["rows"] = arr;
        ctx.emit("fields.json", j);
    } else {
        ctx.emit_text("fields.csv", fields_csv(rows));
    }

    const SpacetimeGrid grid = SpacetimeGrid::around(p, c.grid_nt, c.grid_nz, 3.2 * 2.0 * std::numbers::pi / p.omega,
                                                     residual_z_span(p, c.grid_nz));
    const ResidualReport res = maxwell_residual(p, grid);
    const ConsistencyReport cons = field_consistency(p, grid);
    json r = ctx.report();
    r["max_rel_residual"] = res.max_rel_residual;
    r["rms_rel_residual"] = res.rms_rel_residual;
    r["normalization"] = res.normalization;
    r["div_eps_E"] = res.div_eps_E;
    r["div_B"] = res.div_B;
    r["grid_spec"] = {{"t_lo", grid.t_lo}, {"t_hi", grid.t_hi}, {"nt", grid.nt},
                      {"z_lo", grid.z_lo}, {"z_hi", grid.z_hi}, {"nz", grid.nz}};
    r["potential_residual"] = cons.max_potential_residual;
    r["curl_residual"] = cons.max_curl_residual;
    r["lambda2"] = cons.lambda2;
    ctx.emit("residuals.json", r);
    fmt::print("fields: {} samples, wave-equation residual max {:.3g} rms {:.3g}\n", rows.size(),
               res.max_rel_residual, res.rms_rel_residual);
    return 0;
}

int cmd_observables(const Context& ctx) {
    const Medium m = ctx.medium();
    const Polarization pol = polarization_from_string(ctx.config.polarization);
    std::vector<ObservableRow> rows;
    double worst_S = 0.0, worst_P = 0.0, worst_W = 0.0;
    for (double X : ctx.x_values()) {
        const SolitonParams p = solve_params(m, X, ctx.config.omega, pol);
        rows.push_back(observable_row(p));
        const double l2 = p.lambda * p.lambda;
        worst_S = std::max(worst_S, rows.back().rel_dS / l2);
        worst_P = std::max(worst_P, rows.back().rel_dP / l2);
        worst_W = std::max(worst_W, rows.back().rel_dW);
    }
    json s = ctx.report();
    s["max_rel_dS_over_lambda2"] = worst_S;
    s["max_rel_dP_over_lambda2"] = worst_P;
    s["max_rel_dW"] = worst_W;
    if (ctx.json_format()) {
        json arr = json::array();
        for (const ObservableRow& r : rows) {
            arr.push_back({{"X", r.X}, {"W_quad", r.W_quad}, {"W_closed", r.W_closed}, {"S_quad", r.S_quad},
                           {"S_closed", r.S_closed}, {"P_quad", r.P_quad}, {"k0S", r.k0S},
                           {"rel_dW", r.rel_dW}, {"rel_dS", r.rel_dS}, {"rel_dP", r.rel_dP}});
        }
        s["rows"] = arr;
        ctx.emit("observables.json", s);
    } else {
        ctx.emit_text("observables.csv", observables_csv(rows));
        ctx.emit("observables_summary.json", s);
    }
    fmt::print("observables: {} rows, max rel dS/lambda2 {:.3g}, max rel dP/lambda2 {:.3g}, max rel dW {:.3g}\n",
               rows.size(), worst_S, worst_P, worst_W);
    return 0;
}

int cmd_ensemble(const Context& ctx) {
    const RunConfig& c = ctx.config;
    const SolitonParams p = ctx.quantized_params();
    if (c.mix != "uniform" && c.mix != "alternating") throw DomainError("--mix must be uniform or alternating");
    EnsembleConfig ec;
    ec.N = c.N;
    ec.seed = c.seed;
    ec.threads = c.threads;
    ec.mix = c.mix == "alternating" ? PolarizationMix::Alternating : PolarizationMix::Uniform;
    const double length = (c.center_length > 0.0 ? c.center_length : 2.0 * static_cast<double>(c.N)) / p.k;
    ec.center_dist = Interval(0.0, length);
    const EnsembleWaveFunction ens = build_ensemble(p, ec);

    json j = ctx.report();
    j["seed"] = c.seed;
    j["N"] = c.N;
    j["hbar"] = ens.hbar();
    j["nu"] = ens.nu.nu;
    j["nu_root"] = ens.nu.root;
    j["hbar_min"] = ens.nu.hbar_min;
    j["center_dist"] = {{"lo", 0.0}, {"hi", length}};
    j["norm_psi"] = ensemble_norm(ens);
    j["norm_sigma"] = ensemble_norm_sigma(ens);
    json density = json::array();
    for (double w : c.intervals) {
        const double half = 0.5 * w / p.k;
        const DensityEstimate d = density_estimate(ens, Interval::centered(0.5 * length, half));
        density.push_back({{"lo", d.interval.lo()}, {"hi", d.interval.hi()}, {"rho", d.rho},
                           {"count_fraction", d.count_fraction}, {"count", d.count}, {"rel_gap", d.rel_gap},
                           {"sigma_rel", d.sigma_rel}, {"alpha_fit", d.alpha_fit}});
    }
    j["density"] = density;
    json means = json::array();
    for (Observable o : {Observable::SpinZ, Observable::MomentumZ}) {
        const MeanValue mv = mean_value(ens, o);
        means.push_back({{"observable", to_string(o)}, {"ensemble_avg", mv.ensemble_avg},
                         {"operator_avg", mv.operator_avg}, {"sigma", mv.sigma}});
    }
    j["means"] = means;
    ctx.emit("ensemble.json", j);

    if (c.profile_points > 0) {
        const std::size_t stride = std::max<std::size_t>(1, ens.grid.n / c.profile_points);
        std::string csv = "z,density\n";
        for (std::size_t i = 0; i < ens.grid.n; i += stride) {
            csv += fmt::format("{:.17g},{:.17g}\n", ens.grid.node(i), ens.psi[i].squaredNorm());
        }
        ctx.emit_text("ensemble_profile.csv", csv);
    }
    fmt::print("ensemble: N = {}, norm {:.6f} (sigma {:.3g}), hbar {:.6g}, nu {:.6g}\n", c.N,
               j["norm_psi"].get<double>(), j["norm_sigma"].get<double>(), ens.hbar(), ens.nu.nu);
    return 0;
}

int cmd_singlet(const Context& ctx) {
    const RunConfig& c = ctx.config;
    const SolitonParams right = ctx.quantized_params().with_polarization(Polarization::Right);
    const SolitonParams left = right.with_polarization(Polarization::Left);
    SingletGridSpec spec;
    spec.threads = c.threads;
    const SingletState s = build_singlet(left, right, spec);
    const SingletObservables o = singlet_observables(s);
    const double hbar2 = s.hbar * s.hbar;

    json j = ctx.report();
    j["norm_over_hbar2"] = singlet_norm(s) / hbar2;
    j["total_spin_z"] = o.total_spin_z;
    j["total_momentum_z"] = o.total_momentum_z;
    j["overlap_LR"] = std::abs(s.overlap);
    j["slot1_spin_z"] = o.slot1_spin_z;
    j["slot2_spin_z"] = o.slot2_spin_z;
    j["slot1_momentum_z"] = o.slot1_momentum_z;
    j["slot2_momentum_z"] = o.slot2_momentum_z;
    j["exchange_defect"] = exchange_defect(s);
    j["hbar"] = s.hbar;
    j["nu"] = s.nu;
    j["grid"] = {{"slot1", grid_json(s.grid1.base)}, {"slot2", grid_json(s.grid2.base)},
                 {"slot1_mirrored", true}, {"entries", 9 * s.n1() * s.n2()}};
    if (c.two_particle_N > 0) {
        const Interval dist(0.0, c.two_particle_length / right.k);
        SingletGridSpec tspec = default_two_particle_spec();
        tspec.threads = c.threads;
        const TwoParticleEnsemble ens = build_two_particle_ensemble(left, right, c.two_particle_N, c.seed, dist, tspec);
        j["two_particle"] = {{"N", ens.N}, {"seed", ens.seed}, {"norm", two_particle_norm(ens)},
                             {"sigma_norm", ens.sigma_norm}, {"slot_draws", "independent"},
                             {"grid", grid_json(ens.grid2.base)}};
    }
    ctx.emit("singlet.json", j);
    if (c.dump_tensor) write_tensor(ctx.out / "singlet_tensor.bin", s.n1(), s.n2(), s.values);
    fmt::print("singlet: norm/hbar^2 {:.12g}, total spin {:.3g}, total momentum {:.3g}, |<L,R>|/hbar {:.3g}\n",
               j["norm_over_hbar2"].get<double>(), o.total_spin_z, o.total_momentum_z, std::abs(s.overlap));
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Kerr-medium envelope solitons: dispersion, fields, observables, stochastic ensembles, singlets"};
    app.require_subcommand(1);
    app.fallthrough();

    std::vector<std::function<void(RunConfig&)>> overrides;
    auto flag = [&](CLI::App& where, const std::string& name, auto& store, auto member, const std::string& help) {
        CLI::Option* opt = where.add_option(name, store, help);
        overrides.push_back([opt, &store, member](RunConfig& c) {
            if (opt->count() > 0) c.*member = store;
        });
        return opt;
    };

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file, or a previous JSON output to rerun")->check(CLI::ExistingFile);
    std::uint64_t seed = 0;
    std::string output_dir, format, X_grid, polarization, mix;
    unsigned threads = 1;
    double X = 0, omega = 0, eps0 = 0, eps1 = 0, hbar = 0, t = 0, z_half = 0, center_length = 0, tp_length = 0;
    std::size_t N = 0, samples = 0, nt = 0, nz = 0, tp_N = 0, profile = 0;
    std::vector<double> intervals;
    flag(app, "--seed", seed, &RunConfig::seed, "64-bit seed of the counter-based random stream");
    flag(app, "--output-dir", output_dir, &RunConfig::output_dir, "output directory (fallback: KSL_OUTPUT_DIR, then .)");
    flag(app, "--format", format, &RunConfig::format, "table format")->check(CLI::IsMember({"csv", "json"}));
    flag(app, "--threads", threads, &RunConfig::threads, "worker cap (0 = all cores); results do not depend on it");
    flag(app, "--X", X, &RunConfig::X, "X = k^2/(eps0 omega^2), must be >= X0 = (-10+sqrt(109))/9");
    flag(app, "--X-grid", X_grid, &RunConfig::X_grid, "scan LO:HI:N[:log|lin] or LO:N:log|lin (HI = 1000); LO may be X0");
    flag(app, "--omega", omega, &RunConfig::omega, "carrier frequency");
    flag(app, "--eps0", eps0, &RunConfig::eps0, "linear permittivity");
    flag(app, "--eps1", eps1, &RunConfig::eps1, "Kerr coefficient in eps = eps0 + eps1 |E|^2");
    flag(app, "--polarization", polarization, &RunConfig::polarization, "right or left (left: e_R -> e'_L, e_L -> e'_R)")
        ->check(CLI::IsMember({"right", "left"}));
    CLI::Option* hbar_opt = app.add_option("--hbar", hbar, "action quantum (default: 1.05 sqrt(I_A I_pi))");

    CLI::App* disp = app.add_subcommand(
        "dispersion",
        "Z(X) = 3X - 1 + sqrt(18X^2 + 14X), eps0 V^2 = (X+1)/(X+(1+Z)^2), k0 = omega (1+Z) sqrt(eps0 eps0V^2); "
        "checks the three dispersion identities and scans the lambda^2 and k^2/k0^2 ranges");
    CLI::App* fields = app.add_subcommand(
        "fields",
        "samples E = A sech(k xi) e_R, the first-order vector potential and B = curl A along z; "
        "reports the residual of rot rot E = -d_t^2 (eps E) on a (t, z) grid");
    flag(*fields, "--t", t, &RunConfig::t, "sampling time");
    flag(*fields, "--z-half-width", z_half, &RunConfig::z_half_width, "sampled half-width in units of 1/k");
    flag(*fields, "--samples", samples, &RunConfig::samples, "number of z samples (>= 100)");
    flag(*fields, "--grid-nt", nt, &RunConfig::grid_nt, "residual grid time nodes");
    flag(*fields, "--grid-nz", nz, &RunConfig::grid_nz, "residual grid space nodes");
    CLI::App* obs = app.add_subcommand(
        "observables",
        "quadratures of W = 1/4 int (2 eps0 E^2 + 3 eps1 E^4 + 2 B^2), S = int eps E x A, P = int eps E . d_z A, "
        "against W ~ (A^2/k)[...], S ~ 2A^2(3 eps0 + 2 eps1 A^2)/(3 k omega) and P = k0 S");
    CLI::App* ens = app.add_subcommand(
        "ensemble",
        "phi = (nu A + i pi/nu)/sqrt(2) with int |phi|^2 = hbar, Psi_N = (hbar N)^(-1/2) sum_j phi_j; "
        "reports the norm, coarse-grained density against trial counts, and spin/momentum averages");
    flag(*ens, "--N", N, &RunConfig::N, "number of trials");
    flag(*ens, "--center-length", center_length, &RunConfig::center_length,
         "length of the uniform centre distribution in units of 1/k (0 = 2N)");
    flag(*ens, "--intervals", intervals, &RunConfig::intervals, "density interval lengths in units of 1/k");
    flag(*ens, "--mix", mix, &RunConfig::mix, "uniform (one polarization) or alternating right/left")
        ->check(CLI::IsMember({"uniform", "alternating"}));
    flag(*ens, "--profile-points", profile, &RunConfig::profile_points, "approximate rows of the |Psi|^2 profile (0 = none)");
    CLI::App* sing = app.add_subcommand(
        "singlet",
        "phi12 = [phi_L(-z1) (x) phi_R(z2) - phi_R(-z1) (x) phi_L(z2)]/sqrt(2): norm, total spin and momentum, "
        "exchange antisymmetry; optional two-particle ensemble (hbar^2 N)^(-1/2) sum_j phi12_j");
    bool dump = false;
    CLI::Option* dump_opt = sing->add_flag("--dump-tensor", dump, "write singlet_tensor.bin (LE u64 n1, n2, 9; then re, im float64)");
    flag(*sing, "--two-particle-N", tp_N, &RunConfig::two_particle_N, "trials of the two-particle ensemble (0 = skip)");
    flag(*sing, "--two-particle-length", tp_length, &RunConfig::two_particle_length,
         "centre distribution length in units of 1/k");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        Context ctx;
        RunConfig& c = ctx.config;
        if (const char* env = std::getenv("KSL_OUTPUT_DIR"); env && *env) c.output_dir = env;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::ios_base::failure("cannot read " + config_path);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw DomainError(std::string("config is not valid JSON: ") + e.what());
            }
            const std::string fallback = c.output_dir;
            c = config_from_json(j);
            const json& body = j.contains("config") ? j.at("config") : j;
            if (!body.contains("output_dir")) c.output_dir = fallback;
        }
        for (auto& apply : overrides) apply(c);
        if (hbar_opt->count() > 0) c.hbar = hbar;
        if (dump_opt->count() > 0) c.dump_tensor = dump;

        ctx.config_json = to_json(c);
        ctx.config_hash = fmt::format("{:016x}", fnv1a64(ctx.config_json.dump()));
        ctx.out = c.output_dir;
        fs::create_directories(ctx.out);

        if (disp->parsed()) return cmd_dispersion(ctx);
        if (fields->parsed()) return cmd_fields(ctx);
        if (obs->parsed()) return cmd_observables(ctx);
        if (ens->parsed()) return cmd_ensemble(ctx);
        if (sing->parsed()) return cmd_singlet(ctx);
        return 2;
    } catch (const std::ios_base::failure& e) {
        fmt::print(stderr, "I/O error: {}\n", e.what());
        return 1;
    } catch (const fs::filesystem_error& e) {
        fmt::print(stderr, "I/O error: {}\n", e.what());
        return 1;
    } catch (const Infeasible& e) {
        fmt::print(stderr, "error: {} (minimal hbar {:.17g})\n", e.what(), e.minimal_hbar());
        return 2;
    } catch (const Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    } catch (const json::exception& e) {
        fmt::print(stderr, "error: bad config value: {}\n", e.what());
        return 2;
    }
}

}  // namespace kerr
