// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any selected one fails.
#include <unistd.h>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cv2x/engine.hpp"
#include "cv2x/phy.hpp"
#include "cv2x/sbsps.hpp"
#include "cv2x/sweep.hpp"
#include "cv2x/traffic.hpp"
#include "support/csr_oracle.hpp"

namespace fs = std::filesystem;
using namespace cv2x;

namespace {

// Desk-scale run shape shared by every simulation-backed criterion.
constexpr double kDensity = 0.12;
constexpr double kSparseDensity = 0.06;
constexpr double kDurationS = 40.0;
constexpr double kWarmupS = 10.0;
const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};
constexpr int kMajority = 3;
constexpr double kNearRangeM = 300.0;

// Tolerances.
constexpr double kPeriodicLenLo = 9.5, kPeriodicLenHi = 10.5;
constexpr double kThreegppBrokenLo = 82.0, kThreegppBrokenHi = 92.0;
constexpr double kThreegppTxLo = 3.7, kThreegppTxHi = 4.7;
constexpr double kEtsiBrokenLo = 95.0, kEtsiBrokenHi = 100.0;
constexpr double kEtsiTxLo = 1.0, kEtsiTxHi = 1.3;
constexpr long kArrivalDraws = 10'000'000;
constexpr double kArrivalBelow200 = 0.95;
constexpr double kArrivalMeanLo = 92.0, kArrivalMeanHi = 100.0;
constexpr double kCamTolerance = 0.15;
constexpr double kCbrGapPp = 3.0;
constexpr double kPscchRelative = 1.05;
constexpr int kOracleInstances = 1000;
constexpr double kPowerRelErr = 1e-9;
constexpr double kOccupancySumTol = 0.01;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- CSV access

using Row = std::map<std::string, std::string>;

std::vector<Row> read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) header.push_back(cell);
  }
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    Row r;
    std::size_t i = 0;
    for (std::string cell; std::getline(ss, cell, ','); ++i)
      if (i < header.size()) r[header[i]] = cell;
    rows.push_back(std::move(r));
  }
  return rows;
}

double num(const Row& r, const std::string& key) { return std::stod(r.at(key)); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double mean_column(const fs::path& csv, const std::string& col) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& r : read_csv(csv)) {
    sum += num(r, col);
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

double near_pdr(const fs::path& csv) {
  double att = 0, dec = 0;
  for (const auto& r : read_csv(csv)) {
    if (num(r, "bin_lo_m") >= kNearRangeM) continue;
    att += num(r, "attempted");
    dec += num(r, "decoded");
  }
  return att > 0 ? dec / att : 0.0;
}

// ---------------------------------------------------------------- run cache

class Runs {
 public:
  Runs(fs::path root, int workers) : root_(std::move(root)), workers_(workers) {
    fs::remove_all(root_);
    fs::create_directories(root_);
  }

  // Runs any job not yet on disk and returns the directory of each.
  std::vector<fs::path> ensure(const std::vector<SweepJob>& jobs) {
    std::vector<SweepJob> missing;
    for (const auto& j : jobs)
      if (!done_.count(j.name)) missing.push_back(j);
    if (!missing.empty()) {
      const auto t0 = std::chrono::steady_clock::now();
      std::cerr << "  running " << missing.size() << " scenario(s)..." << std::endl;
      const auto report = run_sweep(missing, root_, workers_);
      if (!report.failures.empty()) throw std::runtime_error("run failed: " + report.failures.front());
      for (const auto& j : missing) done_.insert(j.name);
      const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cerr << "  done in " << fmt("%.1f", secs) << " s" << std::endl;
    }
    std::vector<fs::path> dirs;
    for (const auto& j : jobs) dirs.push_back(root_ / j.name);
    return dirs;
  }

  std::vector<fs::path> all() const {
    std::vector<fs::path> out;
    for (const auto& n : done_) out.push_back(root_ / n);
    return out;
  }

  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  int workers_;
  std::set<std::string> done_;
};

ScenarioConfig desk(std::uint64_t seed) {
  ScenarioConfig c;
  c.master_seed = seed;
  c.density = kDensity;
  c.duration_s = kDurationS;
  c.warmup_s = kWarmupS;
  return c;
}

std::vector<SweepJob> single_class(const std::string& model, const std::string& scheduler) {
  std::vector<SweepJob> jobs;
  for (auto s : kSeeds) {
    auto c = desk(s);
    c.traffic_classes = {{"all", traffic_kind_from(model), scheduler, 1.0}};
    jobs.push_back({model + "_" + scheduler + "_s" + std::to_string(s), c});
  }
  return jobs;
}

std::vector<SweepJob> mixed(bool fix) {
  std::vector<SweepJob> jobs;
  for (auto s : kSeeds) {
    auto c = desk(s);
    c.traffic_classes = {{"periodic", TrafficKind::periodic, "sbsps", 0.5},
                         {"aperiodic", TrafficKind::threegpp, "str", 0.5}};
    c.coexistence_fix = fix;
    jobs.push_back({std::string("mixed_fix") + (fix ? "on" : "off") + "_s" + std::to_string(s), c});
  }
  return jobs;
}

// ---------------------------------------------------------------- grant table

struct GrantStats {
  std::size_t grants = 0, broken = 0, used_ne_length = 0;
  double length_sum = 0, used_sum = 0;
  int used_max = 0, used_min = 1 << 30;
  double broken_pct() const { return grants ? 100.0 * static_cast<double>(broken) / static_cast<double>(grants) : 0; }
  double mean_length() const { return grants ? length_sum / static_cast<double>(grants) : 0; }
  double mean_used() const { return grants ? used_sum / static_cast<double>(grants) : 0; }
};

GrantStats grant_stats(const std::vector<fs::path>& dirs) {
  GrantStats g;
  for (const auto& d : dirs)
    for (const auto& r : read_csv(d / "grants.csv")) {
      const int len = std::stoi(r.at("length"));
      const int used = std::stoi(r.at("used"));
      ++g.grants;
      g.broken += r.at("broken") == "1";
      g.used_ne_length += used != len;
      g.length_sum += len;
      g.used_sum += used;
      g.used_max = std::max(g.used_max, used);
      g.used_min = std::min(g.used_min, used);
    }
  return g;
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

// ---------------------------------------------------------------- criteria

Verdict periodic_grants(Runs& runs) {
  const auto g = grant_stats(runs.ensure(single_class("periodic", "sbsps")));
  const bool ok = g.grants > 0 && g.broken == 0 && g.used_ne_length == 0 &&
                  within(g.mean_length(), kPeriodicLenLo, kPeriodicLenHi);
  return {ok, fmt("grants=%zu broken=%.2f%% mean_used=%.3f mean_length=%.3f", g.grants, g.broken_pct(),
                  g.mean_used(), g.mean_length())};
}

Verdict single_slot_grants(Runs& runs) {
  const auto g = grant_stats(runs.ensure(single_class("single_slot", "sbsps")));
  const bool ok = g.grants > 0 && g.broken == g.grants && g.used_min == 1 && g.used_max == 1;
  return {ok, fmt("grants=%zu broken=%.2f%% mean_used=%.4f", g.grants, g.broken_pct(), g.mean_used())};
}

Verdict aperiodic_grants(Runs& runs, const std::string& model, double blo, double bhi, double tlo,
                         double thi) {
  const auto g = grant_stats(runs.ensure(single_class(model, "sbsps")));
  const bool ok = g.grants > 0 && within(g.broken_pct(), blo, bhi) && within(g.mean_used(), tlo, thi);
  return {ok, fmt("grants=%zu broken=%.2f%% mean_used=%.3f", g.grants, g.broken_pct(), g.mean_used())};
}

Verdict threegpp_inter_arrival(Runs&) {
  TrafficModel m;
  m.kind = TrafficKind::threegpp;
  RngStream rng(1, "acceptance_arrivals");
  Subframe last = 0;
  long below = 0;
  double sum = 0;
  for (long i = 0; i < kArrivalDraws; ++i) {
    const Subframe next = threegpp_next_arrival(last, m, rng);
    const auto gap = next - last;
    below += gap < 200;
    sum += static_cast<double>(gap);
    last = next;
  }
  const double p = static_cast<double>(below) / kArrivalDraws;
  const double mean = sum / kArrivalDraws;
  return {p >= kArrivalBelow200 && within(mean, kArrivalMeanLo, kArrivalMeanHi),
          fmt("P(<200ms)=%.4f mean=%.2f ms", p, mean)};
}

// Mean CAM interval from traffic and mobility alone, over every vehicle on the ring.
double etsi_mean_interval(double density) {
  ScenarioConfig cfg;
  cfg.density = density;
  TrafficModel model = cfg.traffic;
  model.kind = TrafficKind::etsi;
  RngStream placement(7, "placement");
  const double speed = target_speed_mps(density, model.position_threshold_m);
  auto states = place_vehicles(density, cfg.road, speed, placement);
  std::vector<RngStream> mob, traf;
  std::vector<TrafficGenerator> gens;
  for (std::size_t i = 0; i < states.size(); ++i) {
    mob.emplace_back(7, "mobility/" + std::to_string(i));
    traf.emplace_back(7, "traffic/" + std::to_string(i));
  }
  for (std::size_t i = 0; i < states.size(); ++i) gens.emplace_back(model, 0, traf[i]);
  std::vector<Subframe> last(states.size(), -1);
  double gap_sum = 0;
  long gaps = 0;
  constexpr Subframe kWarm = 2000, kEnd = 32000;
  for (Subframe t = 0; t < kEnd; ++t) {
    for (std::size_t i = 0; i < states.size(); ++i) {
      mobility_step(states[i], 0.001, cfg.road, cfg.mobility, mob[i]);
      if (!gens[i].next_packet(states[i], t, traf[i])) continue;
      if (last[i] >= kWarm) {
        gap_sum += static_cast<double>(t - last[i]);
        ++gaps;
      }
      last[i] = t;
    }
  }
  return gaps ? gap_sum / static_cast<double>(gaps) : 0.0;
}

Verdict etsi_calibration(Runs&) {
  const std::vector<std::pair<double, double>> targets{{0.06, 122}, {0.12, 250}, {0.2, 384}, {0.3, 610}};
  bool ok = true;
  std::string detail;
  for (const auto& [beta, want] : targets) {
    const double got = etsi_mean_interval(beta);
    const double rel = (got - want) / want;
    ok &= std::fabs(rel) <= kCamTolerance;
    detail += fmt("%sb=%.2f: %.1f ms (target %.0f, %+.1f%%)", detail.empty() ? "" : "; ", beta, got, want,
                  100 * rel);
  }
  return {ok, detail};
}

// Drives the SB-SPS MAC with two packets Δ apart, the grant's first slot d subframes after
// the first packet, using the engine's serve-then-ingest order. True if packet 2 goes out on
// the original grant.
bool survives(int delta, int d, const SpsConfig& cfg) {
  constexpr Subframe t0 = 1000;
  SensingRecord rec(3, 1001);
  for (Subframe t = 0; t <= t0; ++t) rec.begin_subframe(t, false);
  ChannelLayout layout;
  RngStream rng(static_cast<std::uint64_t>(delta * 1000 + d), "grant_bound");
  SpsState st;
  TransportBlock tb{1, 190, 16, t0};
  on_packet_arrival(st, 1, tb, t0, rec, cfg, layout, 1, rng);
  Grant& g = *st.grant;
  g.csr.first.subframe = t0 + d;
  g.next_slot = t0 + d;
  g.rrc_remaining = g.allocated = 15;
  const Subframe second = t0 + delta;
  for (Subframe t = t0 + 1; t <= second + 2 * cfg.rri_ms; ++t) {
    if (st.grant && st.grant->next_slot == t) {
      auto out = on_reserved_slot(*st.grant, st.queued, cfg, rng);
      if (out.transmitted && out.transmitted->origin_time == second) return true;
      if (st.grant->state != GrantState::active) return false;
    }
    if (t == second) {
      TransportBlock b = tb;
      b.origin_time = second;
      on_packet_arrival(st, 1, b, t, rec, cfg, layout, 1, rng);
    }
  }
  return false;
}

Verdict grant_bound(Runs&) {
  SpsConfig cfg;
  cfg.keep_probability = 0.0;
  const int rri = cfg.rri_ms;
  std::vector<std::string> mismatches;
  int checked = 0;
  for (int delta = 1; delta <= 3 * rri; ++delta) {
    int kept = 0;
    for (int d = cfg.selection_t1_ms; d <= rri; ++d) kept += survives(delta, d, cfg);
    const int phases = rri - cfg.selection_t1_ms + 1;
    const std::string got = kept == phases ? "maintained" : kept == 0 ? "broken" : "conditional";
    const std::string want = delta <= rri ? "maintained" : delta <= 2 * rri - 2 ? "conditional" : "broken";
    ++checked;
    if (got != want)
      mismatches.push_back(fmt("%d: %s (%d/%d phases) expected %s", delta, got.c_str(), kept, phases,
                               want.c_str()));
  }
  std::string detail = fmt("inter-arrivals checked=%d mismatches=%zu", checked, mismatches.size());
  for (const auto& m : mismatches) detail += "; " + m;
  return {mismatches.empty(), detail};
}

Verdict cbr_ordering(Runs& runs) {
  std::map<std::string, double> mean;
  for (const std::string m : {"periodic", "threegpp", "etsi"}) {
    double sum = 0;
    for (const auto& d : runs.ensure(single_class(m, "sbsps"))) sum += mean_column(d / "cbr_timeseries.csv", "pssch_cbr");
    mean[m] = sum / static_cast<double>(kSeeds.size());
  }
  const double g1 = 100 * (mean["periodic"] - mean["threegpp"]);
  const double g2 = 100 * (mean["threegpp"] - mean["etsi"]);
  return {g1 >= kCbrGapPp && g2 >= kCbrGapPp,
          fmt("CBR periodic=%.4f 3gpp=%.4f etsi=%.4f gaps=%.2f/%.2f pp", mean["periodic"], mean["threegpp"],
              mean["etsi"], g1, g2)};
}

Verdict pscch_str_vs_counter(Runs& runs) {
  double str = 0, counter = 0;
  for (const auto& d : runs.ensure(single_class("etsi", "str"))) str += mean_column(d / "cbr_timeseries.csv", "pscch_cbr");
  for (const auto& d : runs.ensure(single_class("etsi", "counter")))
    counter += mean_column(d / "cbr_timeseries.csv", "pscch_cbr");
  return {counter > 0 && str >= kPscchRelative * counter,
          fmt("PSCCH CBR str=%.4f counter=%.4f ratio=%.3f", str / kSeeds.size(), counter / kSeeds.size(),
              counter > 0 ? str / counter : 0.0)};
}

Verdict oracle_equivalence(Runs&) {
  std::mt19937_64 gen(31337);
  int mismatches = 0, first_bad = -1;
  for (int trial = 0; trial < kOracleInstances; ++trial) {
    const auto in = cv2x::testing::random_instance(gen);
    const auto rec = in.build();
    ChannelLayout layout;
    layout.num_subchannels = in.num_subchannels;
    RngStream rng(static_cast<std::uint64_t>(trial), "acceptance_select");
    CsrSelection got;
    const Csr chosen = select_csr(rec, in.now, in.cfg, layout, in.width, rng, &got);
    const auto want = cv2x::testing::oracle_filter(in);
    auto a = got.after_exclusion, b = want.after_exclusion;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    bool ok = got.candidates == want.candidates && a == b && got.threshold_dbm == want.threshold_dbm &&
              got.escalations == want.escalations &&
              cv2x::testing::check_survivors(want, got.survivors).empty();
    const auto& pool = got.survivors.empty() ? got.candidates : got.survivors;
    ok &= std::find(pool.begin(), pool.end(), chosen) != pool.end();
    if (!ok) {
      ++mismatches;
      if (first_bad < 0) first_bad = trial;
    }
  }
  return {mismatches == 0, fmt("instances=%d mismatches=%d first=%d", kOracleInstances, mismatches, first_bad)};
}

Verdict loss_conservation(Runs& runs) {
  if (runs.all().empty()) runs.ensure(single_class("periodic", "sbsps"));
  long files = 0, bins = 0, bad = 0;
  for (const auto& dir : runs.all())
    for (const auto& e : fs::directory_iterator(dir)) {
      const auto name = e.path().filename().string();
      if (name.rfind("pdr_by_distance", 0) != 0) continue;
      ++files;
      for (const auto& r : read_csv(e.path())) {
        ++bins;
        const double att = num(r, "attempted"), dec = num(r, "decoded");
        const double causes = num(r, "hd") + num(r, "sen") + num(r, "pro") + num(r, "col");
        bool ok = att == dec + causes;
        for (const char* k : {"attempted", "decoded", "hd", "sen", "pro", "col"}) ok &= num(r, k) >= 0;
        bad += !ok;
      }
    }
  return {files > 0 && bad == 0, fmt("runs=%zu files=%ld bins=%ld violations=%ld", runs.all().size(), files, bins, bad)};
}

Verdict power_conservation(Runs&) {
  PhyConfig cfg;
  double worst = 0;
  long cases = 0;
  for (double dist : {1.0, 10.0, 37.5, 100.0, 333.0, 700.0, 1000.0})
    for (double shadow : {-6.0, 0.0, 2.5, 9.0})
      for (int n = 1; n <= 100; ++n) {
        const auto link = make_link(cfg, 0, 1, dist, shadow);
        const auto p = received_power(cfg, link, n);
        double sum = 0;
        for (int rb = 0; rb < n; ++rb) sum += p.psd_per_rb;
        const double total = dbm_to_mw(cfg.tx_power_dbm - pathloss_db(dist, cfg) - shadow);
        worst = std::max(worst, std::fabs(sum - total) / total);
        ++cases;
      }
  return {worst < kPowerRelErr, fmt("splits=%ld max_rel_err=%.3g", cases, worst)};
}

struct OccupancyPct {
  double free = 0, occupied = 0, reserved_unused = 0;
  double sum() const { return free + occupied + reserved_unused; }
};

OccupancyPct read_occupancy(const fs::path& dir) {
  OccupancyPct o;
  for (const auto& r : read_csv(dir / "occupancy.csv")) {
    const auto& cls = r.at("class");
    (cls == "free" ? o.free : cls == "occupied" ? o.occupied : o.reserved_unused) = num(r, "pct");
  }
  return o;
}

Verdict occupancy(Runs& runs) {
  std::vector<SweepJob> jobs;
  for (const std::string m : {"periodic", "threegpp", "etsi", "single_slot"})
    for (auto& j : single_class(m, "sbsps")) jobs.push_back(j);
  const auto dirs = runs.ensure(jobs);
  double worst = 0;
  int single_ok = 0, single_runs = 0;
  OccupancyPct single;
  for (const auto& d : dirs) {
    const auto o = read_occupancy(d);
    worst = std::max(worst, std::fabs(o.sum() - 100.0));
    if (d.filename().string().rfind("single_slot", 0) == 0) {
      ++single_runs;
      single_ok += o.reserved_unused > o.occupied;
      single.reserved_unused += o.reserved_unused / kSeeds.size();
      single.occupied += o.occupied / kSeeds.size();
      single.free += o.free / kSeeds.size();
    }
  }
  // Reported for context only; the verdict uses the shared desk density.
  auto sparse = single_class("single_slot", "sbsps");
  for (auto& j : sparse) {
    j.config.density = kSparseDensity;
    j.name = "sparse_" + j.name;
  }
  OccupancyPct low;
  for (const auto& d : runs.ensure(sparse)) {
    const auto o = read_occupancy(d);
    worst = std::max(worst, std::fabs(o.sum() - 100.0));
    low.reserved_unused += o.reserved_unused / kSeeds.size();
    low.occupied += o.occupied / kSeeds.size();
  }
  return {worst <= kOccupancySumTol && single_ok == single_runs && single_runs > 0,
          fmt("max|sum-100|=%.2g; single_slot b=%.2f reserved_unused=%.2f%% occupied=%.2f%% free=%.2f%% "
              "(%d/%d runs); b=%.2f reserved_unused=%.2f%% occupied=%.2f%%",
              worst, kDensity, single.reserved_unused, single.occupied, single.free, single_ok, single_runs,
              kSparseDensity, low.reserved_unused, low.occupied)};
}

Verdict etsi_pdr_ordering(Runs& runs) {
  const auto rnd = runs.ensure(single_class("etsi", "random"));
  const auto sps = runs.ensure(single_class("etsi", "sbsps"));
  const auto str = runs.ensure(single_class("etsi", "str"));
  int a = 0, b = 0;
  double mr = 0, ms = 0, mt = 0;
  for (std::size_t i = 0; i < kSeeds.size(); ++i) {
    const double pr = near_pdr(rnd[i] / "pdr_by_distance.csv");
    const double ps = near_pdr(sps[i] / "pdr_by_distance.csv");
    const double pt = near_pdr(str[i] / "pdr_by_distance.csv");
    a += pr > ps;
    b += pt >= pr;
    mr += pr;
    ms += ps;
    mt += pt;
  }
  const double n = static_cast<double>(kSeeds.size());
  return {a >= kMajority && b >= kMajority,
          fmt("PDR<300m random=%.4f sbsps=%.4f str=%.4f; random>sbsps %d/5, str>=random %d/5", mr / n, ms / n,
              mt / n, a, b)};
}

Verdict coexistence(Runs& runs) {
  const auto on = runs.ensure(mixed(true));
  const auto off = runs.ensure(mixed(false));
  std::string detail;
  bool ok = true;
  for (const std::string cls : {"periodic", "aperiodic"}) {
    int wins = 0;
    double son = 0, soff = 0;
    for (std::size_t i = 0; i < kSeeds.size(); ++i) {
      const double pon = near_pdr(on[i] / ("pdr_by_distance_" + cls + ".csv"));
      const double poff = near_pdr(off[i] / ("pdr_by_distance_" + cls + ".csv"));
      wins += pon > poff;
      son += pon;
      soff += poff;
    }
    ok &= wins >= kMajority;
    const double n = static_cast<double>(kSeeds.size());
    detail += fmt("%s%s PDR<300m on=%.4f off=%.4f (%d/5)", detail.empty() ? "" : "; ", cls.c_str(), son / n,
                  soff / n, wins);
  }
  return {ok, detail};
}

Verdict determinism(Runs& runs) {
  auto job = single_class("etsi", "str").front();
  const auto first = runs.ensure({job}).front();
  const auto again = runs.root() / "determinism_rerun";
  write_results(run_scenario(job.config), again);
  std::vector<std::string> differ;
  int compared = 0;
  for (const auto& e : fs::directory_iterator(first)) {
    const auto name = e.path().filename();
    ++compared;
    if (!fs::exists(again / name) || slurp(e.path()) != slurp(again / name)) differ.push_back(name.string());
  }
  std::string detail = fmt("files compared=%d differing=%zu", compared, differ.size());
  for (const auto& d : differ) detail += " " + d;
  return {differ.empty() && compared > 0, detail};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Verdict(Runs&)> check;
};

std::vector<Criterion> criteria() {
  return {
      {1, "periodic grants never break", periodic_grants},
      {2, "single-slot grants carry one transmission", single_slot_grants},
      {3, "3GPP aperiodic grant breaking",
       [](Runs& r) {
         return aperiodic_grants(r, "threegpp", kThreegppBrokenLo, kThreegppBrokenHi, kThreegppTxLo, kThreegppTxHi);
       }},
      {4, "ETSI grant breaking",
       [](Runs& r) { return aperiodic_grants(r, "etsi", kEtsiBrokenLo, kEtsiBrokenHi, kEtsiTxLo, kEtsiTxHi); }},
      {5, "3GPP inter-arrival distribution", threegpp_inter_arrival},
      {6, "ETSI CAM interval calibration", etsi_calibration},
      {7, "grant maintenance bound, exhaustive phase sweep", grant_bound},
      {8, "CBR ordering periodic > 3GPP > ETSI", cbr_ordering},
      {9, "PSCCH CBR under STR exceeds counter", pscch_str_vs_counter},
      {10, "CSR filter matches brute-force oracle", oracle_equivalence},
      {11, "loss attribution conserved on every run", loss_conservation},
      {12, "power conserved across RB splits", power_conservation},
      {13, "occupancy classes partition the grid", occupancy},
      {14, "ETSI PDR ordering random > SB-SPS, STR >= random", etsi_pdr_ordering},
      {15, "coexistence fix raises PDR of both classes", coexistence},
      {16, "identical seed gives byte-identical output", determinism},
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cv2x acceptance suite"};
  std::vector<int> only, skip;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string work_dir = (fs::temp_directory_path() / "cv2x_acceptance").string();
  bool keep = false;
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--skip", skip, "Skip these criteria")->delimiter(',');
  app.add_option("--workers", workers, "Parallel scenario runs")->check(CLI::PositiveNumber);
  app.add_option("--work-dir", work_dir, "Scratch directory for run outputs");
  app.add_flag("--keep", keep, "Keep run outputs");
  CLI11_PARSE(app, argc, argv);

  auto selected = [&](int id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) return false;
    return std::find(skip.begin(), skip.end(), id) == skip.end();
  };

  Runs runs(fs::path(work_dir) / std::to_string(::getpid()), workers);
  std::map<int, std::pair<const Criterion*, Verdict>> results;
  const auto all = criteria();
  std::vector<const Criterion*> order;
  for (const auto& c : all)
    if (selected(c.id) && c.id != 11) order.push_back(&c);
  // Conservation inspects every run the other criteria produced, so it goes last.
  for (const auto& c : all)
    if (selected(c.id) && c.id == 11) order.push_back(&c);

  for (const auto* c : order) {
    std::cerr << "criterion " << c->id << ": " << c->title << std::endl;
    Verdict v;
    try {
      v = c->check(runs);
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::cerr << "  " << (v.pass ? "PASS" : "FAIL") << std::endl;
    results[c->id] = {c, v};
  }

  int failed = 0;
  for (const auto& [id, r] : results) {
    failed += !r.second.pass;
    std::cout << (r.second.pass ? "PASS" : "FAIL") << "  " << id << "  " << r.first->title << "  ["
              << r.second.detail << "]\n";
  }
  std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " criteria passed"
            << std::endl;
  if (!keep) fs::remove_all(runs.root());
  return failed == 0 ? 0 : 1;
}
