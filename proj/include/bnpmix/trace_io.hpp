#pragma once

#include <filesystem>
#include <vector>

#include "bnpmix/sampler.hpp"

namespace bnpmix {

inline constexpr int kTraceFormatVersion = 1;

/// Newline-delimited JSON: a header line {"format": "bnpmix-trace", ...}
/// followed by one {iter, k_occupied, w_sorted, alpha_bar, loglik} per record.
void write_trace(const std::filesystem::path& path, const Trace& trace);
/// Companion file: header line then one {iter, weights, locations} per snapshot.
void write_mixing_measures(const std::filesystem::path& path, const Trace& trace);

/// Reads a trace file (records only); see read_mixing_measures for snapshots.
Trace read_trace(const std::filesystem::path& path);
void read_mixing_measures(const std::filesystem::path& path, Trace& trace);

/// Columns x1..xd, component (0-based, -1 unknown).
void write_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace bnpmix
