#pragma once

#include <string>

#include "entroscale/toy_diffusion.hpp"

namespace entroscale::diffusion {

// Little-endian binary checkpoint, version 1:
//   magic "ENTROTOY" (8 bytes)
//   u32 version
//   u32 patch, d_model, d_key, d_ff, n_layers, d_sin
//   u32 diffusion steps; f64 beta_start, beta_end
//   u64 training step; u64 train_token_count
//   u32 site count; u64 per-site train token count
//   u32 tensor count; per tensor u32 rows, u32 cols
//   tensor data, f64 row-major, concatenated in parameter flatten order
// Vectors are stored as 1 x len tensors. Optimizer state and the loss history
// are not part of the file; a checkpoint is an inference artifact.
void save_checkpoint(const std::string& path, const TrainState& state);

// Throws IoError when the file cannot be read, CheckpointError on a bad
// magic, unsupported version, or any structural mismatch.
TrainState load_checkpoint(const std::string& path);

} // namespace entroscale::diffusion
