#include "ucn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ucn/errors.hpp"

namespace ucn {

namespace {

constexpr char kMagic[8] = {'U', 'C', 'N', 'C', 'K', 'P', 'T', '1'};

void put_u64_le(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32_le(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint64_t get_u64_le(const unsigned char* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
  return v;
}

uint32_t get_u32_le(const unsigned char* p) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

uint64_t fnv1a64(const void* data, std::size_t n, uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

int64_t TensorEntry::elems() const {
  int64_t n = 1;
  for (int64_t s : shape) n *= s;
  return n;
}

const TensorEntry& Checkpoint::tensor(const std::string& name) const {
  for (const TensorEntry& t : tensors)
    if (t.name == name) return t;
  throw CheckpointError("checkpoint has no tensor '" + name + "'");
}

bool Checkpoint::has_tensor(const std::string& name) const {
  for (const TensorEntry& t : tensors)
    if (t.name == name) return true;
  return false;
}

int64_t Checkpoint::meta(const std::string& key) const {
  auto it = meta_int.find(key);
  if (it == meta_int.end())
    throw CheckpointError("checkpoint missing meta key '" + key + "'");
  return it->second;
}

std::vector<int> Checkpoint::meta_int_list(const std::string& key) const {
  auto it = meta_str.find(key);
  if (it == meta_str.end())
    throw CheckpointError("checkpoint missing meta key '" + key + "'");
  std::vector<int> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoi(item));
  return out;
}

void Checkpoint::set_meta_int_list(const std::string& key,
                                   const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  meta_str[key] = s;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file) {
  nlohmann::json manifest;
  manifest["version"] = ckpt.version;
  manifest["kind"] = ckpt.kind;
  manifest["meta_str"] = ckpt.meta_str;
  manifest["meta_int"] = ckpt.meta_int;
  nlohmann::json tensors = nlohmann::json::array();
  for (const TensorEntry& t : ckpt.tensors) {
    if (static_cast<int64_t>(t.data.size()) != t.elems())
      throw CheckpointError("tensor '" + t.name + "' shape/data mismatch");
    tensors.push_back({{"name", t.name}, {"shape", t.shape}});
  }
  manifest["tensors"] = tensors;
  std::string mtext = manifest.dump();

  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32_le(out, static_cast<uint32_t>(mtext.size()));
  out += mtext;
  for (const TensorEntry& t : ckpt.tensors)
    for (double d : t.data) put_u64_le(out, std::bit_cast<uint64_t>(d));
  put_u64_le(out, fnv1a64(out.data(), out.size()));

  std::ofstream f(file, std::ios::binary | std::ios::trunc);
  if (!f) throw CheckpointError("cannot write checkpoint: " + file.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw CheckpointError("short write: " + file.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream f(file, std::ios::binary);
  if (!f) throw CheckpointError("cannot open checkpoint: " + file.string());
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());

  if (bytes.size() < sizeof(kMagic) + 4 + 8 ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw CheckpointError("bad checkpoint magic: " + file.string());

  uint64_t stored = get_u64_le(p + bytes.size() - 8);
  uint64_t actual = fnv1a64(bytes.data(), bytes.size() - 8);
  if (stored != actual)
    throw CheckpointError("checkpoint checksum mismatch: " + file.string());

  std::size_t off = sizeof(kMagic);
  uint32_t mlen = get_u32_le(p + off);
  off += 4;
  if (off + mlen + 8 > bytes.size())
    throw CheckpointError("truncated checkpoint manifest: " + file.string());

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.substr(off, mlen));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint manifest: ") + e.what());
  }
  off += mlen;

  Checkpoint ckpt;
  ckpt.version = manifest.at("version").get<int>();
  if (ckpt.version != 1)
    throw CheckpointError("unsupported checkpoint version " +
                          std::to_string(ckpt.version));
  ckpt.kind = manifest.at("kind").get<std::string>();
  ckpt.meta_str = manifest.at("meta_str").get<std::map<std::string, std::string>>();
  ckpt.meta_int = manifest.at("meta_int").get<std::map<std::string, int64_t>>();

  for (const auto& jt : manifest.at("tensors")) {
    TensorEntry t;
    t.name = jt.at("name").get<std::string>();
    t.shape = jt.at("shape").get<std::vector<int64_t>>();
    int64_t n = t.elems();
    if (off + static_cast<std::size_t>(n) * 8 + 8 > bytes.size())
      throw CheckpointError("truncated checkpoint payload: " + file.string());
    t.data.resize(static_cast<std::size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      t.data[static_cast<std::size_t>(i)] =
          std::bit_cast<double>(get_u64_le(p + off));
      off += 8;
    }
    ckpt.tensors.push_back(std::move(t));
  }
  if (off + 8 != bytes.size())
    throw CheckpointError("trailing bytes in checkpoint: " + file.string());
  return ckpt;
}

}  // namespace ucn
