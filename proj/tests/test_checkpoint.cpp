#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "ucn/checkpoint.hpp"
#include "ucn/errors.hpp"
#include "ucn/rng.hpp"

using namespace ucn;
namespace fs = std::filesystem;

namespace {

Checkpoint sample_checkpoint() {
  Checkpoint ckpt;
  ckpt.kind = "ddpg";
  ckpt.meta_int["state_dim"] = 9;
  ckpt.meta_int["steps"] = 12345;
  ckpt.meta_str["note"] = "fixture";
  TensorEntry t1;
  t1.name = "actor";
  t1.shape = {2, 3};
  t1.data = {1.0, -2.5, 3.25, 0.0, 1e-300, -0.125};
  TensorEntry t2;
  t2.name = "critic";
  t2.shape = {4};
  t2.data = {4.0, 5.0, 6.0, 7.0};
  ckpt.tensors = {t1, t2};
  return ckpt;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ucn_test_" + std::to_string(splitmix64(
                              std::chrono::steady_clock::now().time_since_epoch().count())));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("checkpoint round-trips bit-exactly") {
  TempDir dir;
  Checkpoint ckpt = sample_checkpoint();
  fs::path f1 = dir.path / "a.ckpt";
  fs::path f2 = dir.path / "b.ckpt";
  save_checkpoint(ckpt, f1);
  Checkpoint back = load_checkpoint(f1);
  CHECK(back.kind == "ddpg");
  CHECK(back.meta("steps") == 12345);
  CHECK(back.meta_str.at("note") == "fixture");
  REQUIRE(back.tensors.size() == 2);
  CHECK(back.tensor("actor").shape == std::vector<int64_t>{2, 3});
  CHECK(back.tensor("actor").data == ckpt.tensor("actor").data);
  save_checkpoint(back, f2);
  CHECK(read_bytes(f1) == read_bytes(f2));
}

TEST_CASE("corrupted payload fails the checksum") {
  TempDir dir;
  fs::path f = dir.path / "c.ckpt";
  save_checkpoint(sample_checkpoint(), f);
  std::string bytes = read_bytes(f);
  bytes[bytes.size() / 2] ^= 0x40;
  std::ofstream(f, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  try {
    load_checkpoint(f);
    FAIL("expected CheckpointError");
  } catch (const CheckpointError& e) {
    CHECK(std::string(e.what()).find("checksum") != std::string::npos);
  }
}

TEST_CASE("bad magic and truncation are rejected") {
  TempDir dir;
  fs::path f = dir.path / "m.ckpt";
  std::ofstream(f, std::ios::binary) << "NOTACKPTxxxxxxxxxxxx";
  CHECK_THROWS_AS(load_checkpoint(f), CheckpointError);

  fs::path t = dir.path / "t.ckpt";
  save_checkpoint(sample_checkpoint(), t);
  std::string bytes = read_bytes(t);
  bytes.resize(bytes.size() / 2);
  std::ofstream(t, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  CHECK_THROWS_AS(load_checkpoint(t), CheckpointError);
}

TEST_CASE("missing file and missing tensors throw") {
  TempDir dir;
  CHECK_THROWS_AS(load_checkpoint(dir.path / "nope.ckpt"), CheckpointError);
  Checkpoint ckpt = sample_checkpoint();
  CHECK_THROWS_AS(ckpt.tensor("ghost"), CheckpointError);
  CHECK_THROWS_AS(ckpt.meta("ghost"), CheckpointError);
}

TEST_CASE("meta int lists round-trip") {
  Checkpoint ckpt;
  ckpt.set_meta_int_list("hidden", {64, 64, 32});
  CHECK(ckpt.meta_int_list("hidden") == std::vector<int>{64, 64, 32});
}
