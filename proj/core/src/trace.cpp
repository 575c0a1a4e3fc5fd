#include "ucn/trace.hpp"

#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ucn {

TraceWriter::TraceWriter(const std::filesystem::path& file, std::string copy_tag)
    : out_(file), copy_tag_(std::move(copy_tag)) {
  if (!out_) throw std::runtime_error("cannot open trace file: " + file.string());
  out_ << "{\"schema\":1}\n";
}

void TraceWriter::slot_record(const WorldState& state, int served_count,
                              const std::vector<std::string>& events_fired) {
  nlohmann::json rec;
  rec["slot"] = state.clock.slot_index;
  if (!copy_tag_.empty()) rec["copy"] = copy_tag_;
  nlohmann::json uavs = nlohmann::json::array();
  for (const Uav& u : state.uavs) {
    uavs.push_back({{"id", u.id},
                    {"x", u.position.x},
                    {"y", u.position.y},
                    {"z", u.position.z},
                    {"battery", u.battery},
                    {"status", to_string(u.status)}});
  }
  rec["uavs"] = std::move(uavs);
  rec["served_count"] = served_count;
  std::string fired;
  for (std::size_t i = 0; i < events_fired.size(); ++i) {
    if (i) fired += ",";
    fired += events_fired[i];
  }
  rec["event_fired"] = fired;
  out_ << rec.dump() << "\n";
}

void TraceWriter::close() { out_.close(); }

CsvWriter::CsvWriter(const std::filesystem::path& file,
                     const std::vector<std::string>& columns)
    : out_(file), columns_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot open csv file: " + file.string());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ << ",";
    out_ << columns[i];
  }
  out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw std::runtime_error("csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ",";
    out_ << cells[i];
  }
  out_ << "\n";
}

std::string CsvWriter::num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvWriter::num(int64_t v) { return std::to_string(v); }

void CsvWriter::close() { out_.close(); }

void write_curve_csv(const std::filesystem::path& file,
                     const std::vector<CurvePoint>& curve) {
  CsvWriter csv(file, {"episode", "return", "loss"});
  for (const CurvePoint& p : curve)
    csv.row({CsvWriter::num(static_cast<int64_t>(p.episode)),
             CsvWriter::num(p.episode_return), CsvWriter::num(p.loss)});
}

}  // namespace ucn
