#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "crossdecode/types.hpp"

namespace crossdecode {

// EPO1 epoch container, all fields little-endian:
//
//   "EPO1" | u32 version=1 | u32 n_trials | u32 n_channels | u32 n_samples | f64 fs
//   u16 K | K x (u16 len, UTF-8 name) | u16 len, UTF-8 paradigm | f64 relatedness (NaN = absent)
//   n_trials x u16 label
//   n_trials x n_channels x n_samples f32 samples, trial-major then channel-major
//
// Samples are stored as f32 and widened to f64 on read, so only datasets whose
// samples are exactly representable in f32 survive a write/read cycle bit for bit.

inline constexpr std::uint32_t kEpo1Version = 1;

std::vector<std::uint8_t> encode_epo1(const LabeledDataset& dataset);
/// Throws FormatError naming the byte offset of the first violation.
LabeledDataset decode_epo1(std::span<const std::uint8_t> bytes);

void write_epo1(const LabeledDataset& dataset, const std::filesystem::path& path);
LabeledDataset read_epo1(const std::filesystem::path& path);

/// Exact byte count of the encoded form.
std::uint64_t epo1_size(const LabeledDataset& dataset);

/// Rounds every sample to the nearest f32, the precision EPO1 stores.
Epoch round_to_f32(const Epoch& epoch);

}  // namespace crossdecode
