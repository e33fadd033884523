#pragma once

#include <cstdint>
#include <string>

#include "finsent/model.hpp"

namespace finsent::model_io {

// Content hashes of the inputs a model was trained against. Zero means
// "not applicable" (e.g. no embeddings file under the ablation).
struct ModelMeta {
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t vocab_hash = 0;
    std::uint64_t embeddings_file_hash = 0;
    std::uint64_t affective_file_hash = 0;
    std::uint64_t valence_file_hash = 0;
};

struct ModelFile {
    model::ModelConfig config;
    model::Vocabulary vocab;
    model::ModelParameters params;
    ModelMeta meta;
};

// Binary container, all integers and 64-bit IEEE doubles little-endian:
//   magic "FSNT", u32 format version,
//   meta (six u64 fields),
//   u32 config JSON length + bytes,
//   u64 vocabulary size + per token (u32 length + bytes),
//   u32 tensor count + per tensor (u32 name length + bytes,
//       u32 rank, u64 dims..., f64 data).
// Tensors appear in ModelParameters::for_each order.
inline constexpr std::uint32_t kFormatVersion = 1;

void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

}  // namespace finsent::model_io
