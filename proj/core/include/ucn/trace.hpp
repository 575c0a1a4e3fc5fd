#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ucn/world.hpp"

namespace ucn {

/// JSONL trace stream: one `{"schema":1}` header line, then one record per
/// slot with the per-UAV snapshot, served count and fired events.
class TraceWriter {
 public:
  explicit TraceWriter(const std::filesystem::path& file, std::string copy_tag = "");
  void slot_record(const WorldState& state, int served_count,
                   const std::vector<std::string>& events_fired);
  void close();

 private:
  std::ofstream out_;
  std::string copy_tag_;
};

/// Minimal CSV emitter with a fixed header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file,
            const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  static std::string num(double v);
  static std::string num(int64_t v);
  void close();

 private:
  std::ofstream out_;
  std::size_t columns_;
};

/// Training-curve point shared by every trainer.
struct CurvePoint {
  int episode = 0;
  double episode_return = 0.0;
  double loss = 0.0;
};

void write_curve_csv(const std::filesystem::path& file,
                     const std::vector<CurvePoint>& curve);

}  // namespace ucn
