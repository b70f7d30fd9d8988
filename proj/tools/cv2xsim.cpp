#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "cv2x/engine.hpp"
#include "cv2x/sweep.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kIoError = 2;

void print_summary(const cv2x::RunResult& r) {
  const auto near = r.pdr.total_below(300.0);
  double pssch = 0, pscch = 0;
  for (const auto& s : r.cbr) {
    pssch += s.pssch;
    pscch += s.pscch;
  }
  const double n = r.cbr.empty() ? 1.0 : static_cast<double>(r.cbr.size());
  std::cout << "vehicles=" << r.vehicles << " tb_tx=" << r.counters.tb_transmissions
            << " pdr_0_300m=" << (near.attempted ? double(near.decoded) / near.attempted : 0.0)
            << " cbr_pssch=" << pssch / n << " cbr_pscch=" << pscch / n << '\n';
  for (const auto& row : cv2x::grant_summary(r.grants, 1))
    std::cout << "grants model=" << row.model << " n=" << row.grants << " length=" << row.mean_length
              << "+-" << row.sd_length << " used=" << row.mean_used << "+-" << row.sd_used
              << " broken=" << row.broken_pct << "%\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C-V2X Mode 4 sidelink simulator"};
  app.require_subcommand(1);

  std::string scenario_path, sweep_path, out_dir;
  std::uint64_t seed = 0;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool debug_receptions = false;

  auto* run = app.add_subcommand("run", "run one scenario file");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override master_seed");
  run->add_option("--out-dir", out_dir, "output directory (default: outputs.out_dir)");
  run->add_flag("--debug-receptions", debug_receptions, "write receptions.csv");

  auto* sweep = app.add_subcommand("sweep", "run the cartesian product of a sweep file");
  sweep->add_option("sweep", sweep_path, "sweep JSON file")->required();
  sweep->add_option("--out-dir", out_dir, "output root (default: base outputs.out_dir)");
  sweep->add_option("--workers", workers, "parallel runs")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("scenario", scenario_path, "scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*validate) {
      cv2x::load_scenario(scenario_path);
      std::cout << "ok\n";
      return kOk;
    }
    if (*run) {
      auto cfg = cv2x::load_scenario(scenario_path);
      if (*seed_opt) cfg.master_seed = seed;
      const std::filesystem::path dir = out_dir.empty() ? cfg.out_dir : out_dir;
      cv2x::RunOptions opt;
      if (debug_receptions) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw cv2x::IoError("cannot create " + dir.string());
        opt.debug_receptions = dir / "receptions.csv";
      }
      const auto result = cv2x::run_scenario(cfg, opt);
      cv2x::write_results(result, dir);
      print_summary(result);
      return kOk;
    }
    const auto spec = cv2x::load_sweep(sweep_path);
    const auto jobs = cv2x::expand_sweep(spec);
    const std::filesystem::path dir = out_dir.empty() ? spec.base.out_dir : out_dir;
    std::mutex mu;
    const auto report = cv2x::run_sweep(jobs, dir, workers, [&](const cv2x::SweepJob& j) {
      std::lock_guard lock(mu);
      std::cout << "done " << j.name << '\n';
    });
    for (const auto& f : report.failures) std::cerr << "failed " << f << '\n';
    return report.failures.empty() ? kOk : kIoError;
  } catch (const cv2x::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const cv2x::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoError;
  }
}
