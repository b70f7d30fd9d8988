#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cv2x/scenario.hpp"

namespace cv2x {

struct SweepSpec {
  ScenarioConfig base;
  std::vector<double> densities;
  std::vector<std::string> schedulers;
  std::vector<std::string> traffic_models;
  std::vector<std::uint64_t> seeds;
};

struct SweepJob {
  std::string name;
  ScenarioConfig config;
};

// {"base": {...} | "base_file": "...", "densities": [...], "schedulers": [...],
//  "traffic_models": [...], "seeds": [...]}; empty lists keep the base value.
SweepSpec load_sweep(const std::filesystem::path& path);
SweepSpec sweep_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

std::vector<SweepJob> expand_sweep(const SweepSpec& spec);

struct SweepReport {
  int completed = 0;
  std::vector<std::string> failures;
};

// Runs every job in out_dir/<job name>/ on up to `workers` threads.
SweepReport run_sweep(const std::vector<SweepJob>& jobs, const std::filesystem::path& out_dir,
                      int workers, const std::function<void(const SweepJob&)>& on_done = {});

}  // namespace cv2x
