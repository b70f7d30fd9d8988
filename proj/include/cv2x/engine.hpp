#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cv2x/metrics.hpp"
#include "cv2x/scenario.hpp"

namespace cv2x {

struct TxLogEntry {
  Subframe subframe = 0;
  VehicleId sender = 0;
  int subchannel = 0;
  int width = 1;
  bool reservation = false;
};

struct RunOptions {
  // Receives every transmission in order; used for replay checks.
  std::function<void(const TxLogEntry&)> on_transmission;
  // When set, one row per TB reception is written here.
  std::filesystem::path debug_receptions;
};

struct RunCounters {
  std::int64_t packets_generated = 0;
  std::int64_t packets_dropped = 0;
  std::int64_t tb_transmissions = 0;
  std::int64_t reservation_signals = 0;
  std::int64_t selection_fallbacks = 0;
  std::int64_t coexistence_moves = 0;
  std::int64_t coexistence_all_claimed = 0;
};

struct CbrSample {
  Subframe subframe = 0;
  VehicleId vehicle = 0;
  double pssch = 0.0;
  double pscch = 0.0;
};

struct RunResult {
  ScenarioConfig config;
  int vehicles = 0;
  std::vector<int> vehicle_class;
  DistanceBins pdr;
  std::vector<DistanceBins> pdr_by_class;
  std::vector<CbrSample> cbr;
  std::vector<GrantRecord> grants;
  OccupancyReport occupancy;
  RunCounters counters;
};

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

// Writes the CSV bundle and manifest; throws IoError on failure.
void write_results(const RunResult& result, const std::filesystem::path& dir);

inline const std::vector<std::string>& result_files() {
  static const std::vector<std::string> files{"pdr_by_distance.csv", "cbr_timeseries.csv",
                                              "grants.csv", "occupancy.csv", "run_manifest.json"};
  return files;
}

}  // namespace cv2x
