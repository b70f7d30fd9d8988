#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cv2x/mobility.hpp"
#include "cv2x/phy.hpp"
#include "cv2x/resources.hpp"
#include "cv2x/sbsps.hpp"
#include "cv2x/traffic.hpp"
#include "json.hpp"

namespace cv2x {

enum class SchedulerKind { sbsps, random, counter, str };

struct SchedulerVariant {
  SchedulerKind kind = SchedulerKind::sbsps;
  SpsConfig sps;
};

// Resolves a variant name (sbsps, sbsps-no-rssi, sbsps-sw100, ..., random, counter, str).
SchedulerVariant resolve_variant(const std::string& name, const SpsConfig& base);
const std::vector<std::string>& variant_names();

struct TrafficClass {
  std::string name;
  TrafficKind model = TrafficKind::periodic;
  std::string scheduler = "sbsps";
  double fraction = 1.0;
};

struct MetricsConfig {
  double bin_width_m = 25.0;
  double max_distance_m = 700.0;
  double cbr_threshold_dbm = -90.0;
  int cbr_interval_ms = 100;
};

struct ScenarioConfig {
  std::uint64_t master_seed = 1;
  double duration_s = 40.0;
  double warmup_s = 10.0;
  double density = 0.12;
  RoadGeometry road;
  ChannelLayout layout;
  int mcs = 6;
  std::vector<TbSizeEntry> tb_size_table = TbSizeTable::defaults().entries();
  PhyConfig phy;
  SpsConfig sps;
  TrafficModel traffic;
  MobilityConfig mobility;
  std::vector<TrafficClass> traffic_classes = {TrafficClass{"all", TrafficKind::periodic, "sbsps", 1.0}};
  bool coexistence_fix = false;
  int str_window_ms = 50;
  MetricsConfig metrics;
  std::string out_dir = "results";

  Subframe total_subframes() const;
  Subframe warmup_subframes() const;
};

void validate_scenario(const ScenarioConfig& cfg);

// Both throw ConfigError naming the offending field; unknown keys are rejected.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

// Vehicle index -> traffic class index; largest-remainder counts, shuffled positions.
std::vector<int> assign_classes(int vehicles, const std::vector<TrafficClass>& classes,
                                RngStream& rng);

}  // namespace cv2x
