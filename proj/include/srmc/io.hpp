#pragma once

// Signal files (.f64 raw little-endian binary64, or single-column CSV) and
// the JSON forms of sensing specs, coding configs and side information.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "srmc/coding.hpp"
#include "srmc/sensing.hpp"
#include "srmc/signal.hpp"

namespace srmc::io {

std::vector<double> read_f64(const std::filesystem::path& p);
void write_f64(const std::filesystem::path& p, std::span<const double> v);

/// One value per line; blank lines and lines starting with '#' are skipped,
/// as is a first line that does not parse as a number (a header).
std::vector<double> read_csv_column(const std::filesystem::path& p);
void write_csv_column(const std::filesystem::path& p, std::span<const double> v);

/// Dispatches on extension: ".csv" is text, anything else raw binary64.
Signal read_signal(const std::filesystem::path& p);
void write_signal(const std::filesystem::path& p, std::span<const double> v);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p);
void write_bytes(const std::filesystem::path& p, std::span<const std::uint8_t> b);

nlohmann::json read_json(const std::filesystem::path& p);
void write_json(const std::filesystem::path& p, const nlohmann::json& j);

/// {mode, transform, n, m, selection, seed}; transform may be omitted for RC.
SensingSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SensingSpec& s);

/// {quantizer: {kind, levels | step, delta_sat, tol}, coder, prediction,
///  model, topk, rho_window, t_star}; every key optional.
CodingConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CodingConfig& c);

nlohmann::json to_json(const SideInfo& s);

}  // namespace srmc::io
