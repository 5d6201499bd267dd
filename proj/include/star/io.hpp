#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "star/metrics.hpp"
#include "star/solver.hpp"
#include "star/tensor.hpp"

namespace star {

// HTC cube files: "HTC1", then n1, n2, n3 as little-endian uint32, then
// n1·n2·n3 little-endian IEEE-754 float32 samples in Cube storage order.
inline constexpr std::size_t kHtcHeaderBytes = 16;

Cube read_cube(const std::filesystem::path& path);
void write_cube(const std::filesystem::path& path, const Cube& c);

std::string encode_cube(const Cube& c);
Cube decode_cube(std::string_view bytes);

// Schedule documents (JSON):
//   { "model": "star" | "star_s",
//     "stages": [ { "lambda", "gamma1", "gamma2", "beta", "mu", "lipschitz",
//                   "dictionaries": { "d1": [[..], ..], "d2": .., "d3": .. } } ] }
// "mu" may be omitted for star; "dictionaries" is optional; matrices are
// arrays of rows.
Schedule parse_schedule(std::string_view text);
Schedule load_schedule(const std::filesystem::path& path);
std::string schedule_to_json(const Schedule& s);
void save_schedule(const std::filesystem::path& path, const Schedule& s);

/// { "iterations", "residuals": [..], "objective": [..], "wall_ms", ... }
std::string report_to_json(const SolveReport& r);
/// One-line record: {"psnr":..,"ssim":..,"sam":..,"ergas":..,...}
std::string metrics_to_json(const MetricReport& m);

}  // namespace star
