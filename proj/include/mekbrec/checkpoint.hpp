#pragma once

#include <optional>
#include <string>

#include "mekbrec/encoder.hpp"

namespace mekb {

struct Checkpoint {
  EncoderConfig config;
  EncoderParams params;
  std::optional<ItemTower> tower;
};

// Binary container, all integers and doubles little-endian:
//   "MEKBCKPT" u32 version
//   u64 len, JSON encoder config
//   u64 tensor count, then per tensor: u64 len, name, u64 rows, u64 cols, f64[rows*cols] row-major
//   u64 item count, then per item: u64 len, item id   (rows of "item_embeddings")
std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
// Throws InputError when unreadable, ParseError (line 0) on a malformed container.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mekb
