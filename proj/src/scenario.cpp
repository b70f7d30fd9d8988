#include "cv2x/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

namespace cv2x {

using nlohmann::json;

namespace {

class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void get(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      out = v->get<double>();
    }
  }
  void get(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
      out = v->get<int>();
    }
  }
  void get(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || v->get<std::int64_t>() < 0)
        throw ConfigError(field(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void get(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string pathloss_name(PathlossModel m) {
  return m == PathlossModel::log_distance ? "log-distance" : "winner-b1";
}

void parse_phy(Obj& o, PhyConfig& p) {
  o.get("tx_power_dbm", p.tx_power_dbm);
  o.get("noise_figure_db", p.noise_figure_db);
  o.get("thermal_noise_density_dbm_hz", p.thermal_noise_density_dbm_hz);
  o.get("shadowing_sigma_los_db", p.shadowing_sigma_los_db);
  o.get("sensing_threshold_dbm", p.sensing_threshold_dbm);
  o.get("carrier_ghz", p.carrier_ghz);
  o.get("min_distance_m", p.min_distance_m);
  o.get("rb_bandwidth_hz", p.rb_bandwidth_hz);
  o.get("res_per_rb", p.res_per_rb);
  std::string model = pathloss_name(p.pathloss_model);
  o.get("pathloss_model", model);
  if (model == "log-distance") p.pathloss_model = PathlossModel::log_distance;
  else if (model == "winner-b1") p.pathloss_model = PathlossModel::winner_b1;
  else throw ConfigError(o.field("pathloss_model"), "expected log-distance or winner-b1");
  if (const json* ld = o.find("log_distance")) {
    Obj s(*ld, o.field("log_distance"));
    s.get("pl0_db", p.log_distance.pl0_db);
    s.get("d0_m", p.log_distance.d0_m);
    s.get("exponent", p.log_distance.exponent);
    s.finish();
  }
  if (const json* wb = o.find("winner_b1"); wb && !wb->is_null()) {
    Obj s(*wb, o.field("winner_b1"));
    WinnerB1Params w;
    for (auto [key, dst] : {std::pair{"a1", &w.a1}, {"b1", &w.b1}, {"c1", &w.c1},
                            {"breakpoint_m", &w.breakpoint_m}, {"a2", &w.a2}, {"b2", &w.b2},
                            {"c2", &w.c2}}) {
      if (!s.find(key)) throw ConfigError(s.field(key), "required for winner-b1");
      s.get(key, *dst);
    }
    s.finish();
    p.winner_b1 = w;
  }
  std::string mode = p.bler_mode == BlerMode::logistic ? "logistic" : "threshold";
  o.get("bler_mode", mode);
  if (mode == "logistic") p.bler_mode = BlerMode::logistic;
  else if (mode == "threshold") p.bler_mode = BlerMode::threshold;
  else throw ConfigError(o.field("bler_mode"), "expected logistic or threshold");
  if (const json* curves = o.find("bler_curves")) {
    if (!curves->is_array()) throw ConfigError(o.field("bler_curves"), "expected an array");
    p.bler_curves.clear();
    for (std::size_t i = 0; i < curves->size(); ++i) {
      Obj c((*curves)[i], o.field("bler_curves") + "[" + std::to_string(i) + "]");
      int mcs = -1;
      BlerCurve curve;
      c.get("mcs", mcs);
      c.get("s50_db", curve.s50_db);
      c.get("k_per_db", curve.k_per_db);
      c.finish();
      if (mcs < 0) throw ConfigError(c.field("mcs"), "required");
      p.bler_curves[mcs] = curve;
    }
  }
}

void parse_sps(Obj& o, SpsConfig& s) {
  o.get("rri_ms", s.rri_ms);
  o.get("rrc_min", s.rrc_min);
  o.get("rrc_max", s.rrc_max);
  o.get("keep_probability", s.keep_probability);
  o.get("rsrp_threshold_dbm", s.rsrp_threshold_dbm);
  o.get("rssi_keep_fraction", s.rssi_keep_fraction);
  o.get("min_candidate_fraction", s.min_candidate_fraction);
  o.get("sensing_window_ms", s.sensing_window_ms);
  o.get("selection_t1_ms", s.selection_t1_ms);
  o.get("rssi_filtering_enabled", s.rssi_filtering_enabled);
  o.get("grant_breaking_enabled", s.grant_breaking_enabled);
  o.get("reselect_after_skips", s.reselect_after_skips);
  o.get("half_duplex_exclusion", s.half_duplex_exclusion);
}

void parse_traffic(Obj& o, TrafficModel& t) {
  o.get("period_ms", t.period_ms);
  o.get("base_ms", t.base_ms);
  o.get("exp_mean_ms", t.exp_mean_ms);
  o.get("heading_threshold_deg", t.heading_threshold_deg);
  o.get("position_threshold_m", t.position_threshold_m);
  o.get("speed_threshold_mps", t.speed_threshold_mps);
  o.get("max_gap_ms", t.max_gap_ms);
  o.get("payload_bytes", t.payload_bytes);
}

}  // namespace

const std::vector<std::string>& variant_names() {
  static const std::vector<std::string> names{"sbsps",       "sbsps-no-rssi", "sbsps-sw100",
                                              "sbsps-sw200", "sbsps-sw500",   "sbsps-no-break",
                                              "random",      "counter",       "str"};
  return names;
}

SchedulerVariant resolve_variant(const std::string& name, const SpsConfig& base) {
  SchedulerVariant v{SchedulerKind::sbsps, base};
  if (name == "sbsps") return v;
  if (name == "sbsps-no-rssi") {
    v.sps.rssi_filtering_enabled = false;
  } else if (name == "sbsps-sw100") {
    v.sps.sensing_window_ms = 100;
  } else if (name == "sbsps-sw200") {
    v.sps.sensing_window_ms = 200;
  } else if (name == "sbsps-sw500") {
    v.sps.sensing_window_ms = 500;
  } else if (name == "sbsps-no-break") {
    v.sps.grant_breaking_enabled = false;
  } else if (name == "random") {
    v.kind = SchedulerKind::random;
  } else if (name == "counter") {
    v.kind = SchedulerKind::counter;
  } else if (name == "str") {
    v.kind = SchedulerKind::str;
  } else {
    throw std::invalid_argument("unknown scheduler variant '" + name + "'");
  }
  return v;
}

Subframe ScenarioConfig::total_subframes() const {
  return static_cast<Subframe>(std::llround(duration_s * 1000.0));
}

Subframe ScenarioConfig::warmup_subframes() const {
  return static_cast<Subframe>(std::llround(warmup_s * 1000.0));
}

void validate_scenario(const ScenarioConfig& c) {
  if (!(c.duration_s > 0.0)) throw ConfigError("duration_s", "must be positive");
  if (!(c.warmup_s >= 0.0)) throw ConfigError("warmup_s", "must be non-negative");
  if (c.warmup_subframes() >= c.total_subframes())
    throw ConfigError("warmup_s", "must be shorter than duration_s");
  if (!(c.density > 0.0)) throw ConfigError("density", "must be positive");
  validate_road(c.road);
  if (std::lround(c.density * c.road.length_m) < 1)
    throw ConfigError("density", "places no vehicle on the road");
  validate_layout(c.layout);
  validate_phy(c.phy);
  validate_sps(c.sps);
  validate_traffic(c.traffic);
  validate_mobility(c.mobility);

  const TbSizeTable table(c.tb_size_table);
  if (!table.contains(c.traffic.payload_bytes, c.mcs))
    throw ConfigError("tb_size_table", "no entry for payload " +
                                           std::to_string(c.traffic.payload_bytes) +
                                           " bytes at MCS " + std::to_string(c.mcs));
  const int rbs = rb_count_for(c.traffic.payload_bytes, c.mcs, c.layout, table);
  if (rbs > c.layout.rbs_per_subchannel * c.layout.num_subchannels)
    throw ConfigError("layout", "transmission does not fit the layout");
  if (!c.phy.bler_curves.count(c.mcs))
    throw ConfigError("phy.bler_curves", "no BLER curve for MCS " + std::to_string(c.mcs));

  if (c.traffic_classes.empty())
    throw ConfigError("traffic_classes", "at least one class is required");
  std::set<std::string> names;
  double total = 0.0;
  for (std::size_t i = 0; i < c.traffic_classes.size(); ++i) {
    const auto& tc = c.traffic_classes[i];
    const std::string f = "traffic_classes[" + std::to_string(i) + "]";
    if (tc.name.empty() || !names.insert(tc.name).second)
      throw ConfigError(f + ".name", "must be non-empty and unique");
    for (char ch : tc.name)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
        throw ConfigError(f + ".name", "only letters, digits, '_' and '-' are allowed");
    if (!(tc.fraction >= 0.0 && tc.fraction <= 1.0))
      throw ConfigError(f + ".fraction", "must lie in [0, 1]");
    try {
      validate_sps(resolve_variant(tc.scheduler, c.sps).sps, f + ".scheduler");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(f + ".scheduler", e.what());
    }
    total += tc.fraction;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw ConfigError("traffic_classes", "fractions must sum to 1");
  if (c.str_window_ms < 1) throw ConfigError("str_window_ms", "must be positive");
  if (!(c.metrics.bin_width_m > 0.0)) throw ConfigError("metrics.bin_width_m", "must be positive");
  if (!(c.metrics.max_distance_m > 0.0))
    throw ConfigError("metrics.max_distance_m", "must be positive");
  if (!std::isfinite(c.metrics.cbr_threshold_dbm))
    throw ConfigError("metrics.cbr_threshold_dbm", "must be finite");
  if (c.metrics.cbr_interval_ms < 1)
    throw ConfigError("metrics.cbr_interval_ms", "must be positive");
}

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig c;
  Obj o(j, "");
  o.get("master_seed", c.master_seed);
  o.get("duration_s", c.duration_s);
  o.get("warmup_s", c.warmup_s);
  o.get("density", c.density);
  o.get("mcs", c.mcs);
  o.get("str_window_ms", c.str_window_ms);
  if (const json* v = o.find("coexistence_fix")) {
    if (v->is_boolean()) c.coexistence_fix = v->get<bool>();
    else if (v->is_string() && (*v == "on" || *v == "off")) c.coexistence_fix = *v == "on";
    else throw ConfigError("coexistence_fix", "expected on, off, true or false");
  }
  if (const json* v = o.find("road")) {
    Obj s(*v, "road");
    s.get("length_m", c.road.length_m);
    s.get("lanes_per_direction", c.road.lanes_per_direction);
    s.get("lane_width_m", c.road.lane_width_m);
    s.finish();
  }
  if (const json* v = o.find("layout")) {
    Obj s(*v, "layout");
    s.get("bandwidth_mhz", c.layout.bandwidth_mhz);
    s.get("num_subchannels", c.layout.num_subchannels);
    s.get("rbs_per_subchannel", c.layout.rbs_per_subchannel);
    s.get("sci_rb_count", c.layout.sci_rb_count);
    std::string adj = "adjacent";
    s.get("adjacency", adj);
    if (adj == "adjacent") c.layout.adjacency = Adjacency::adjacent;
    else if (adj == "nonadjacent") c.layout.adjacency = Adjacency::nonadjacent;
    else throw ConfigError("layout.adjacency", "expected adjacent or nonadjacent");
    s.finish();
  }
  if (const json* v = o.find("tb_size_table")) {
    if (!v->is_array()) throw ConfigError("tb_size_table", "expected an array");
    c.tb_size_table.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      Obj s((*v)[i], "tb_size_table[" + std::to_string(i) + "]");
      TbSizeEntry e;
      s.get("payload_bytes", e.payload_bytes);
      s.get("mcs", e.mcs);
      s.get("data_rbs", e.data_rbs);
      s.finish();
      c.tb_size_table.push_back(e);
    }
  }
  if (const json* v = o.find("phy")) {
    Obj s(*v, "phy");
    parse_phy(s, c.phy);
    s.finish();
  }
  if (const json* v = o.find("sps")) {
    Obj s(*v, "sps");
    parse_sps(s, c.sps);
    s.finish();
  }
  if (const json* v = o.find("traffic")) {
    Obj s(*v, "traffic");
    parse_traffic(s, c.traffic);
    s.finish();
  }
  if (const json* v = o.find("mobility")) {
    Obj s(*v, "mobility");
    if (const json* ts = s.find("target_speed_mps"); ts && !ts->is_null()) {
      if (!ts->is_number()) throw ConfigError("mobility.target_speed_mps", "expected a number");
      c.mobility.target_speed_mps = ts->get<double>();
    }
    s.get("jitter_bound_mps", c.mobility.jitter_bound_mps);
    s.get("jitter_sigma_mps", c.mobility.jitter_sigma_mps);
    s.get("reversion_per_s", c.mobility.reversion_per_s);
    s.finish();
  }
  if (const json* v = o.find("traffic_classes")) {
    if (!v->is_array()) throw ConfigError("traffic_classes", "expected an array");
    c.traffic_classes.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string f = "traffic_classes[" + std::to_string(i) + "]";
      Obj s((*v)[i], f);
      TrafficClass tc;
      std::string model = "periodic";
      s.get("name", tc.name);
      s.get("model", model);
      s.get("scheduler", tc.scheduler);
      s.get("fraction", tc.fraction);
      s.finish();
      try {
        tc.model = traffic_kind_from(model);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(f + ".model", e.what());
      }
      c.traffic_classes.push_back(tc);
    }
  }
  if (const json* v = o.find("metrics")) {
    Obj s(*v, "metrics");
    s.get("bin_width_m", c.metrics.bin_width_m);
    s.get("max_distance_m", c.metrics.max_distance_m);
    s.get("cbr_threshold_dbm", c.metrics.cbr_threshold_dbm);
    s.get("cbr_interval_ms", c.metrics.cbr_interval_ms);
    s.finish();
  }
  if (const json* v = o.find("outputs")) {
    Obj s(*v, "outputs");
    s.get("out_dir", c.out_dir);
    s.finish();
  }
  o.finish();
  validate_scenario(c);
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scenario file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["master_seed"] = c.master_seed;
  j["duration_s"] = c.duration_s;
  j["warmup_s"] = c.warmup_s;
  j["density"] = c.density;
  j["mcs"] = c.mcs;
  j["str_window_ms"] = c.str_window_ms;
  j["coexistence_fix"] = c.coexistence_fix ? "on" : "off";
  j["road"] = {{"length_m", c.road.length_m},
               {"lanes_per_direction", c.road.lanes_per_direction},
               {"lane_width_m", c.road.lane_width_m}};
  j["layout"] = {{"bandwidth_mhz", c.layout.bandwidth_mhz},
                 {"num_subchannels", c.layout.num_subchannels},
                 {"rbs_per_subchannel", c.layout.rbs_per_subchannel},
                 {"adjacency", c.layout.adjacency == Adjacency::adjacent ? "adjacent" : "nonadjacent"},
                 {"sci_rb_count", c.layout.sci_rb_count}};
  j["tb_size_table"] = json::array();
  for (const auto& e : c.tb_size_table)
    j["tb_size_table"].push_back(
        {{"payload_bytes", e.payload_bytes}, {"mcs", e.mcs}, {"data_rbs", e.data_rbs}});
  const auto& p = c.phy;
  json phy = {{"tx_power_dbm", p.tx_power_dbm},
              {"noise_figure_db", p.noise_figure_db},
              {"thermal_noise_density_dbm_hz", p.thermal_noise_density_dbm_hz},
              {"shadowing_sigma_los_db", p.shadowing_sigma_los_db},
              {"sensing_threshold_dbm", p.sensing_threshold_dbm},
              {"carrier_ghz", p.carrier_ghz},
              {"min_distance_m", p.min_distance_m},
              {"rb_bandwidth_hz", p.rb_bandwidth_hz},
              {"res_per_rb", p.res_per_rb},
              {"pathloss_model", pathloss_name(p.pathloss_model)},
              {"log_distance",
               {{"pl0_db", p.log_distance.pl0_db},
                {"d0_m", p.log_distance.d0_m},
                {"exponent", p.log_distance.exponent}}},
              {"bler_mode", p.bler_mode == BlerMode::logistic ? "logistic" : "threshold"}};
  if (p.winner_b1) {
    const auto& w = *p.winner_b1;
    phy["winner_b1"] = {{"a1", w.a1}, {"b1", w.b1}, {"c1", w.c1}, {"breakpoint_m", w.breakpoint_m},
                        {"a2", w.a2}, {"b2", w.b2}, {"c2", w.c2}};
  }
  phy["bler_curves"] = json::array();
  for (const auto& [mcs, curve] : p.bler_curves)
    phy["bler_curves"].push_back({{"mcs", mcs}, {"s50_db", curve.s50_db}, {"k_per_db", curve.k_per_db}});
  j["phy"] = phy;
  const auto& s = c.sps;
  j["sps"] = {{"rri_ms", s.rri_ms},
              {"rrc_min", s.rrc_min},
              {"rrc_max", s.rrc_max},
              {"keep_probability", s.keep_probability},
              {"rsrp_threshold_dbm", s.rsrp_threshold_dbm},
              {"rssi_keep_fraction", s.rssi_keep_fraction},
              {"min_candidate_fraction", s.min_candidate_fraction},
              {"sensing_window_ms", s.sensing_window_ms},
              {"selection_t1_ms", s.selection_t1_ms},
              {"rssi_filtering_enabled", s.rssi_filtering_enabled},
              {"grant_breaking_enabled", s.grant_breaking_enabled},
              {"reselect_after_skips", s.reselect_after_skips},
              {"half_duplex_exclusion", s.half_duplex_exclusion}};
  const auto& t = c.traffic;
  j["traffic"] = {{"period_ms", t.period_ms},
                  {"base_ms", t.base_ms},
                  {"exp_mean_ms", t.exp_mean_ms},
                  {"heading_threshold_deg", t.heading_threshold_deg},
                  {"position_threshold_m", t.position_threshold_m},
                  {"speed_threshold_mps", t.speed_threshold_mps},
                  {"max_gap_ms", t.max_gap_ms},
                  {"payload_bytes", t.payload_bytes}};
  j["mobility"] = {{"target_speed_mps", c.mobility.target_speed_mps
                                            ? json(*c.mobility.target_speed_mps)
                                            : json(nullptr)},
                   {"jitter_bound_mps", c.mobility.jitter_bound_mps},
                   {"jitter_sigma_mps", c.mobility.jitter_sigma_mps},
                   {"reversion_per_s", c.mobility.reversion_per_s}};
  j["traffic_classes"] = json::array();
  for (const auto& tc : c.traffic_classes)
    j["traffic_classes"].push_back({{"name", tc.name},
                                    {"model", to_string(tc.model)},
                                    {"scheduler", tc.scheduler},
                                    {"fraction", tc.fraction}});
  j["metrics"] = {{"bin_width_m", c.metrics.bin_width_m},
                  {"max_distance_m", c.metrics.max_distance_m},
                  {"cbr_threshold_dbm", c.metrics.cbr_threshold_dbm},
                  {"cbr_interval_ms", c.metrics.cbr_interval_ms}};
  j["outputs"] = {{"out_dir", c.out_dir}};
  return j;
}

std::vector<int> assign_classes(int vehicles, const std::vector<TrafficClass>& classes,
                                RngStream& rng) {
  CV2X_EXPECTS(!classes.empty() && vehicles >= 0);
  const std::size_t k = classes.size();
  std::vector<int> counts(k);
  std::vector<std::pair<double, std::size_t>> rema;
  int assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double exact = classes[i].fraction * vehicles;
    counts[i] = static_cast<int>(std::floor(exact));
    assigned += counts[i];
    rema.emplace_back(exact - counts[i], i);
  }
  std::stable_sort(rema.begin(), rema.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < vehicles; ++r, ++assigned) ++counts[rema[r % k].second];
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(vehicles));
  for (std::size_t i = 0; i < k; ++i) out.insert(out.end(), counts[i], static_cast<int>(i));
  std::shuffle(out.begin(), out.end(), rng.engine());
  return out;
}

}  // namespace cv2x
