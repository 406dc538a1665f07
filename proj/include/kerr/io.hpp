// io.hpp - CSV tables and file output.
//
// Numbers are written with 17 significant digits so that every double
// survives a text round trip.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "kerr/dispersion.hpp"
#include "kerr/fields.hpp"
#include "kerr/observables.hpp"

namespace kerr {

std::string format_number(double x);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

std::string dispersion_csv(std::span<const RangeRow> rows);
std::string fields_csv(std::span<const FieldRow> rows);
std::string observables_csv(std::span<const ObservableRow> rows);

// Writes the whole file; throws std::ios_base::failure on error.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace kerr
