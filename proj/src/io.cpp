#include "kerr/io.hpp"

#include <fstream>

#include <fmt/format.h>

namespace kerr {

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string dispersion_csv(std::span<const RangeRow> rows) {
    std::string out = "X,Z,lambda2,k2_over_k02,eps0V2\n";
    for (const RangeRow& r : rows) {
        out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.X, r.Z, r.lambda2, r.k2_over_k02,
                           r.eps0V2);
    }
    return out;
}

std::string fields_csv(std::span<const FieldRow> rows) {
    std::string out = "t,z,Ex,Ey,Bx,By,Ax,Ay\n";
    for (const FieldRow& r : rows) {
        const FieldSample& s = r.sample;
        out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.t, r.z,
                           s.E.x(), s.E.y(), s.B.x(), s.B.y(), s.A_pot.x(), s.A_pot.y());
    }
    return out;
}

std::string observables_csv(std::span<const ObservableRow> rows) {
    std::string out = "X,W_quad,W_closed,S_quad,S_closed,P_quad,k0S,rel_dW,rel_dS,rel_dP\n";
    for (const ObservableRow& r : rows) {
        out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                           r.X, r.W_quad, r.W_closed, r.S_quad, r.S_closed, r.P_quad, r.k0S, r.rel_dW,
                           r.rel_dS, r.rel_dP);
    }
    return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::ios_base::failure("write failed for " + path.string());
}

}  // namespace kerr
