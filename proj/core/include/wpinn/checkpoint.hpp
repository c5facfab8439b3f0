#pragma once

// Flat binary network checkpoints.
//
// Layout (little-endian):
//   "WPINNNET" magic, u32 version (1)
//   u32 count of widths, then that many u32 widths
//   u8 activation tag per hidden layer (0 = relu3, 1 = sigmoid)
//   u8 head tag (0 = linear, 1 = bounded), f64 lo, f64 hi
//   per layer: f64 weights in row-major order, then f64 biases

#include <filesystem>
#include <string>

#include "wpinn/mlp.hpp"

namespace wpinn {

std::string serialize(const MlpParams& params);
MlpParams deserialize(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const MlpParams& params);
MlpParams load_checkpoint(const std::filesystem::path& path);

}  // namespace wpinn
