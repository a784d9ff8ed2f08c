#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "qcc/analysis.hpp"
#include "qcc/grid.hpp"

namespace qcc {

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t seed = 14695981039346656037ULL);
std::string hex64(std::uint64_t v);
/// FNV-1a of a file's bytes.
std::uint64_t file_checksum(const std::filesystem::path& path);

/// Columns t, meanX, meanP, centralX2..4, centralP2..4, crossXP, energy,
/// 17 significant digits.
void write_moments_csv(const std::filesystem::path& path, std::span<const MomentRecord> series);
MomentSeries read_moments_csv(const std::filesystem::path& path);

struct SnapshotHeader {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t x_count = 0;
  double p_min = 0.0;
  double p_max = 0.0;
  std::size_t p_count = 0;
  double time = 0.0;
  std::string backend;
  std::string config_digest;
  std::string checksum;  // FNV-1a of the payload bytes
};

struct Snapshot {
  SnapshotHeader header;
  PhaseField field;
};

/// Text header terminated by a line "end", then nx*np little-endian
/// doubles in PhaseField order.
void write_snapshot(const std::filesystem::path& path, const PhaseField& field,
                    const std::string& backend, const std::string& config_digest);
/// Throws NumericalError when the payload does not match the header.
Snapshot read_snapshot(const std::filesystem::path& path);

/// gnuplot-style "x p f" table, one block per x node separated by blank
/// lines, with a comment header giving a 4 hbar reference box.
void write_contour_text(const std::filesystem::path& path, const PhaseField& field, double hbar);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qcc
