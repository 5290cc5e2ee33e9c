#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "glb/stats.hpp"

namespace glb {

enum class ReportFormat { Json, Csv };

struct RunReport {
  std::string benchmark;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  nlohmann::ordered_json result = nlohmann::ordered_json::object();
  double elapsed_s = 0;
  std::optional<double> teps;              // bc only
  std::optional<double> nodes_per_second;  // uts only
  std::vector<WorkerStats> per_place;
  Dispersion workload;      // processing_s
  Dispersion workload_cpu;  // processing_cpu_s

  std::size_t places() const noexcept { return per_place.size(); }
};

inline nlohmann::ordered_json to_json(const WorkerStats& s) {
  return {
      {"place", s.place},
      {"processing_s", s.processing_s},
      {"processing_cpu_s", s.processing_cpu_s},
      {"distributing_s", s.distributing_s},
      {"random_requests_sent", s.random_requests_sent},
      {"random_requests_received", s.random_requests_received},
      {"lifeline_requests_sent", s.lifeline_requests_sent},
      {"lifeline_requests_received", s.lifeline_requests_received},
      {"random_steals_perpetrated", s.random_steals_perpetrated},
      {"lifeline_steals_perpetrated", s.lifeline_steals_perpetrated},
      {"items_seeded", s.items_seeded},
      {"items_spawned", s.items_spawned},
      {"items_sent", s.items_sent},
      {"items_received", s.items_received},
      {"items_processed", s.items_processed},
      {"items_left", s.items_left},
  };
}

inline WorkerStats worker_stats_from_json(const nlohmann::ordered_json& j) {
  WorkerStats s;
  s.place = j.at("place").get<std::size_t>();
  s.processing_s = j.at("processing_s").get<double>();
  s.processing_cpu_s = j.at("processing_cpu_s").get<double>();
  s.distributing_s = j.at("distributing_s").get<double>();
  s.random_requests_sent = j.at("random_requests_sent").get<std::uint64_t>();
  s.random_requests_received = j.at("random_requests_received").get<std::uint64_t>();
  s.lifeline_requests_sent = j.at("lifeline_requests_sent").get<std::uint64_t>();
  s.lifeline_requests_received = j.at("lifeline_requests_received").get<std::uint64_t>();
  s.random_steals_perpetrated = j.at("random_steals_perpetrated").get<std::uint64_t>();
  s.lifeline_steals_perpetrated = j.at("lifeline_steals_perpetrated").get<std::uint64_t>();
  s.items_seeded = j.at("items_seeded").get<std::uint64_t>();
  s.items_spawned = j.at("items_spawned").get<std::uint64_t>();
  s.items_sent = j.at("items_sent").get<std::uint64_t>();
  s.items_received = j.at("items_received").get<std::uint64_t>();
  s.items_processed = j.at("items_processed").get<std::uint64_t>();
  s.items_left = j.at("items_left").get<std::uint64_t>();
  return s;
}

inline nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["benchmark"] = r.benchmark;
  j["params"] = r.params;
  j["result"] = r.result;
  j["elapsed_s"] = r.elapsed_s;
  j["teps"] = r.teps ? nlohmann::ordered_json(*r.teps) : nlohmann::ordered_json(nullptr);
  if (r.nodes_per_second) j["nodes_per_second"] = *r.nodes_per_second;
  j["places"] = r.places();
  auto rows = nlohmann::ordered_json::array();
  for (const auto& s : r.per_place) rows.push_back(to_json(s));
  j["per_place"] = std::move(rows);
  j["workload_mean_s"] = r.workload.mean;
  j["workload_stddev_s"] = r.workload.stddev;
  j["workload_cpu_mean_s"] = r.workload_cpu.mean;
  j["workload_cpu_stddev_s"] = r.workload_cpu.stddev;
  return j;
}

inline RunReport report_from_json(const nlohmann::ordered_json& j) {
  RunReport r;
  r.benchmark = j.at("benchmark").get<std::string>();
  r.params = j.at("params");
  r.result = j.at("result");
  r.elapsed_s = j.at("elapsed_s").get<double>();
  if (!j.at("teps").is_null()) r.teps = j.at("teps").get<double>();
  if (j.contains("nodes_per_second")) r.nodes_per_second = j.at("nodes_per_second").get<double>();
  for (const auto& row : j.at("per_place")) r.per_place.push_back(worker_stats_from_json(row));
  if (r.per_place.size() != j.at("places").get<std::size_t>()) throw std::runtime_error("report: places mismatch");
  r.workload.mean = j.at("workload_mean_s").get<double>();
  r.workload.stddev = j.at("workload_stddev_s").get<double>();
  r.workload_cpu.mean = j.value("workload_cpu_mean_s", 0.0);
  r.workload_cpu.stddev = j.value("workload_cpu_stddev_s", 0.0);
  return r;
}

/// JSON is a single document; CSV is a header, one row per place and a
/// trailing "total" row that also carries the workload mean/stddev.
inline std::string emit_report(const RunReport& r, ReportFormat format) {
  if (format == ReportFormat::Json) return to_json(r).dump(2) + "\n";

  std::ostringstream os;
  os.precision(17);
  const auto header = to_json(WorkerStats{});
  bool first = true;
  for (const auto& [key, _] : header.items()) {
    os << (first ? "" : ",") << key;
    first = false;
  }
  os << ",workload_mean_s,workload_stddev_s\n";
  auto row = [&](const nlohmann::ordered_json& j, const std::string& label, const std::string& tail) {
    bool f = true;
    for (const auto& [key, value] : j.items()) {
      os << (f ? "" : ",");
      if (key == "place" && !label.empty())
        os << label;
      else if (value.is_number_float())
        os << value.get<double>();
      else
        os << value.dump();
      f = false;
    }
    os << "," << tail << "\n";
  };
  WorkerStats total = aggregate_stats(r.per_place).totals;
  for (const auto& s : r.per_place) row(to_json(s), "", ",");
  std::ostringstream tail;
  tail.precision(17);
  tail << r.workload.mean << "," << r.workload.stddev;
  row(to_json(total), "total", tail.str());
  return os.str();
}

}  // namespace glb
