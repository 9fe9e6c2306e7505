// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_NNET_CHECKPOINT_H_
#define IAEC_NNET_CHECKPOINT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "iaec/nnet/tcn.h"
#include "json.hpp"

namespace iaec {

struct CheckpointMeta {
  int epoch = 0;
  double dev_metric = 0.0;
  std::string rng_state;  // textual mt19937_64 state
  uint64_t master_seed = 0;
  std::vector<std::string> labels;
  nlohmann::json train_config = nlohmann::json::object();
};

// Little-endian binary container:
//   "IAECCKPT" u32 version
//   u64 n, n bytes of JSON (model config and metadata)
//   u32 count, then per tensor: u32 name length, name, u32 rows, u32 cols,
//     rows*cols IEEE doubles        (parameters, then again for buffers)
//   i32 epoch, f64 dev_metric
void SaveCheckpoint(const std::filesystem::path& path, const Tcn& model,
                    const CheckpointMeta& meta);
Tcn LoadCheckpoint(const std::filesystem::path& path,
                   CheckpointMeta* meta = nullptr);

}  // namespace iaec

#endif  // IAEC_NNET_CHECKPOINT_H_
