#include "cv2x/sweep.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "cv2x/engine.hpp"

namespace cv2x {

using nlohmann::json;

SweepSpec sweep_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("<root>", "expected an object");
  static const std::set<std::string> known{"base", "base_file", "densities", "schedulers",
                                           "traffic_models", "seeds"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ConfigError(it.key(), "unknown field");
  SweepSpec s;
  if (j.contains("base") == j.contains("base_file"))
    throw ConfigError("base", "exactly one of base and base_file is required");
  if (j.contains("base")) {
    s.base = scenario_from_json(j["base"]);
  } else {
    if (!j["base_file"].is_string()) throw ConfigError("base_file", "expected a string");
    std::filesystem::path p = j["base_file"].get<std::string>();
    s.base = load_scenario(p.is_absolute() ? p : base_dir / p);
  }
  auto list = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) throw ConfigError(key, "expected an array");
    using T = typename std::decay_t<decltype(out)>::value_type;
    try {
      for (const auto& v : j[key]) out.push_back(v.get<T>());
    } catch (const json::exception&) {
      throw ConfigError(key, "element of the wrong type");
    }
  };
  list("densities", s.densities);
  list("schedulers", s.schedulers);
  list("traffic_models", s.traffic_models);
  list("seeds", s.seeds);
  for (const auto& name : s.schedulers) {
    try {
      resolve_variant(name, s.base.sps);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("schedulers", e.what());
    }
  }
  for (const auto& name : s.traffic_models) {
    try {
      traffic_kind_from(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("traffic_models", e.what());
    }
  }
  return s;
}

SweepSpec load_sweep(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read sweep file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return sweep_from_json(j, path.parent_path());
}

std::vector<SweepJob> expand_sweep(const SweepSpec& spec) {
  const auto& b = spec.base;
  const std::vector<double> densities = spec.densities.empty() ? std::vector{b.density} : spec.densities;
  const std::vector<std::uint64_t> seeds = spec.seeds.empty() ? std::vector{b.master_seed} : spec.seeds;
  std::vector<std::string> scheds = spec.schedulers;
  if (scheds.empty()) scheds.push_back("");
  std::vector<std::string> models = spec.traffic_models;
  if (models.empty()) models.push_back("");

  std::vector<SweepJob> jobs;
  for (double d : densities)
    for (const auto& m : models)
      for (const auto& s : scheds)
        for (auto seed : seeds) {
          SweepJob job;
          job.config = b;
          job.config.density = d;
          job.config.master_seed = seed;
          for (auto& tc : job.config.traffic_classes) {
            if (!m.empty()) tc.model = traffic_kind_from(m);
            if (!s.empty()) tc.scheduler = s;
          }
          std::ostringstream name;
          name << "d" << d;
          if (!m.empty()) name << "_" << m;
          if (!s.empty()) name << "_" << s;
          name << "_s" << seed;
          job.name = name.str();
          validate_scenario(job.config);
          jobs.push_back(std::move(job));
        }
  return jobs;
}

SweepReport run_sweep(const std::vector<SweepJob>& jobs, const std::filesystem::path& out_dir,
                      int workers, const std::function<void(const SweepJob&)>& on_done) {
  SweepReport report;
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const SweepJob& job = jobs[i];
      try {
        const RunResult r = run_scenario(job.config);
        write_results(r, out_dir / job.name);
        std::lock_guard lock(mu);
        ++report.completed;
        if (on_done) on_done(job);
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        report.failures.push_back(job.name + ": " + e.what());
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return report;
}

}  // namespace cv2x
