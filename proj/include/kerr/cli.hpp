// cli.hpp - batch front end.
//
// Subcommands dispersion, fields, observables, ensemble and singlet read a
// RunConfig (JSON file plus flag overrides) and write CSV/JSON artifacts into
// output_dir. Exit codes: 0 success, 1 I/O failure, 2 invalid input or domain
// error.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kerr {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
    double eps0 = 1.0;
    double eps1 = 1.0;
    std::optional<double> hbar;  // unset: 1.05 x the feasibility bound
    double X = 0.2;
    std::string X_grid;          // LO:HI:N[:log|lin] or LO:N:log|lin; overrides X for scans
    double omega = 1.0;
    std::string polarization = "right";
    std::uint64_t seed = 0;
    std::size_t N = 10000;
    std::string output_dir = ".";
    std::string format = "csv";
    unsigned threads = 1;

    // fields
    double t = 0.0;
    double z_half_width = 10.0;  // units of 1/k
    std::size_t samples = 1000;
    std::size_t grid_nt = 400;
    std::size_t grid_nz = 400;

    // ensemble
    double center_length = 0.0;  // units of 1/k; 0 selects 2N
    std::vector<double> intervals{10.0, 30.0, 100.0};  // units of 1/k
    std::string mix = "uniform";
    std::size_t profile_points = 2000;

    // singlet
    bool dump_tensor = false;
    std::size_t two_particle_N = 0;
    double two_particle_length = 90.0;  // units of 1/k
};

nlohmann::json to_json(const RunConfig& c);
// Accepts a plain config object or a command output carrying a "config" key.
RunConfig config_from_json(const nlohmann::json& j);

// Parses "LO:HI:N[:log|lin]" or "LO:N:log|lin" (HI = 1000). LO may be "X0".
std::vector<double> parse_x_grid(const std::string& spec);

int run_cli(int argc, char** argv);

}  // namespace kerr
