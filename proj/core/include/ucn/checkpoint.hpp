#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ucn {

/// Named flat tensor stored as little-endian f64.
struct TensorEntry {
  std::string name;
  std::vector<int64_t> shape;
  std::vector<double> data;

  int64_t elems() const;
};

/// Versioned manifest plus flat parameter arrays; round-trips bit-exactly.
struct Checkpoint {
  int version = 1;
  std::string kind;  // "ddpg" | "marl" | "scheduler"
  std::map<std::string, std::string> meta_str;
  std::map<std::string, int64_t> meta_int;
  std::vector<TensorEntry> tensors;

  const TensorEntry& tensor(const std::string& name) const;  // throws
  bool has_tensor(const std::string& name) const;
  int64_t meta(const std::string& key) const;  // throws on missing
  std::vector<int> meta_int_list(const std::string& key) const;
  void set_meta_int_list(const std::string& key, const std::vector<int>& v);
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file);

/// Throws CheckpointError on bad magic, unsupported version, truncation or
/// checksum mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& file);

uint64_t fnv1a64(const void* data, std::size_t n, uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace ucn
