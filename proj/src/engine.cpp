#include "cv2x/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "cv2x/aperiodic.hpp"
#include "cv2x/schedulers.hpp"

namespace cv2x {
namespace {

constexpr double kLn10Over10 = 2.302585092994045684 / 10.0;

struct Vehicle {
  VehicleState state;
  int cls = 0;
  std::unique_ptr<TrafficGenerator> traffic;
  std::unique_ptr<Scheduler> mac;
  SensingRecord sensing;
  ReservationLedger ledger;
  RngStream rng_mobility, rng_traffic, rng_mac, rng_phy;

  Vehicle(std::uint64_t seed, VehicleId id, int nsc, int capacity)
      : sensing(nsc, capacity),
        rng_mobility(seed, "mobility/" + std::to_string(id)),
        rng_traffic(seed, "traffic/" + std::to_string(id)),
        rng_mac(seed, "mac-selection/" + std::to_string(id)),
        rng_phy(seed, "shadowing/" + std::to_string(id)) {}
};

struct Transmission {
  VehicleId sender = 0;
  Csr csr;
  int rb_first = 0;
  int rb_count = 0;
  Sci sci;
  bool reservation = false;
  bool has_tb = false;
};

class Simulation final : public MacSink {
 public:
  Simulation(const ScenarioConfig& cfg, const RunOptions& opt)
      : cfg_(cfg),
        opt_(opt),
        total_(cfg.total_subframes()),
        warmup_(cfg.warmup_subframes()),
        occupancy_(cfg.warmup_subframes(), cfg.total_subframes(), cfg.layout.num_subchannels) {
    result_.config = cfg;
    result_.pdr = DistanceBins(cfg.metrics.bin_width_m, cfg.metrics.max_distance_m);
    for (std::size_t i = 0; i < cfg.traffic_classes.size(); ++i)
      result_.pdr_by_class.emplace_back(cfg.metrics.bin_width_m, cfg.metrics.max_distance_m);

    const TbSizeTable table(cfg.tb_size_table);
    rb_count_ = rb_count_for(cfg.traffic.payload_bytes, cfg.mcs, cfg.layout, table);
    width_ = csr_width_for(rb_count_, cfg.layout);
    noise_rb_mw_ = noise_per_rb_mw(cfg.phy);
    tx_mw_ = dbm_to_mw(cfg.phy.tx_power_dbm);

    RngStream placement(cfg.master_seed, "placement");
    const double speed = cfg.mobility.target_speed_mps.value_or(
        target_speed_mps(cfg.density, cfg.traffic.position_threshold_m));
    auto states = place_vehicles(cfg.density, cfg.road, speed, placement);
    const auto classes =
        assign_classes(static_cast<int>(states.size()), cfg.traffic_classes, placement);

    int capacity = std::max(cfg.sps.sensing_window_ms, 100);
    for (const auto& tc : cfg.traffic_classes)
      capacity = std::max(capacity, resolve_variant(tc.scheduler, cfg.sps).sps.sensing_window_ms);

    for (std::size_t i = 0; i < states.size(); ++i) {
      auto v = std::make_unique<Vehicle>(cfg.master_seed, static_cast<VehicleId>(i),
                                         cfg.layout.num_subchannels, capacity);
      v->state = states[i];
      v->cls = classes[i];
      const TrafficClass& tc = cfg.traffic_classes[static_cast<std::size_t>(v->cls)];
      TrafficModel model = cfg.traffic;
      model.kind = tc.model;
      v->traffic = std::make_unique<TrafficGenerator>(model, 0, v->rng_traffic);
      const SchedulerVariant variant = resolve_variant(tc.scheduler, cfg.sps);
      SchedulerParams sp;
      sp.layout = cfg.layout;
      sp.sps = variant.sps;
      sp.width = width_;
      sp.mcs = cfg.mcs;
      sp.str_window = cfg.str_window_ms;
      sp.single_use = tc.model == TrafficKind::single_slot;
      sp.coexistence_fix = cfg.coexistence_fix;
      v->mac = make_scheduler(variant.kind, sp);
      vehicles_.push_back(std::move(v));
    }
    result_.vehicles = static_cast<int>(vehicles_.size());
    result_.vehicle_class = classes;
    transmitting_.assign(vehicles_.size(), 0);
    tx_of_.assign(vehicles_.size(), -1);
    rb_total_.assign(static_cast<std::size_t>(cfg.layout.total_rbs()), 0.0);

    if (!opt_.debug_receptions.empty()) {
      debug_.open(opt_.debug_receptions);
      if (!debug_) throw IoError("cannot write " + opt_.debug_receptions.string());
      debug_ << "subframe,tx,rx,distance_m,sinr_db,verdict,cause\n";
    }

    loop_.set(Phase::mobility, [this](Subframe t) { phase_mobility(t); });
    loop_.set(Phase::traffic, [this](Subframe t) { phase_traffic(t); });
    loop_.set(Phase::mac, [this](Subframe t) { phase_mac(t); });
    loop_.set(Phase::phy_transmit, [this](Subframe t) { phase_transmit(t); });
    loop_.set(Phase::receive, [this](Subframe t) { phase_receive(t); });
    loop_.set(Phase::metrics, [this](Subframe t) { phase_metrics(t); });
  }

  RunResult run() {
    while (loop_.clock().now() < total_) loop_.advance();
    result_.occupancy = occupancy_report(occupancy_);
    return std::move(result_);
  }

  void grant_ended(const Grant& g) override {
    if (g.created_at < warmup_) return;
    const auto& tc = cfg_.traffic_classes[static_cast<std::size_t>(vehicles_[g.owner]->cls)];
    result_.grants.push_back(
        GrantRecord{to_string(tc.model), g.allocated, g.used, g.state == GrantState::broken});
  }
  void reserved_unused(const Csr& cell) override {
    for (int sc = cell.first.subchannel; sc < cell.first.subchannel + cell.width; ++sc)
      occupancy_.mark_reserved_unused(cell.first.subframe, sc);
  }
  void packet_dropped() override {
    if (measuring_) ++result_.counters.packets_dropped;
  }
  void selection_fallback() override {
    if (measuring_) ++result_.counters.selection_fallbacks;
  }
  void coexistence_moved(bool all_claimed) override {
    if (!measuring_) return;
    ++(all_claimed ? result_.counters.coexistence_all_claimed : result_.counters.coexistence_moves);
  }

 private:
  void phase_mobility(Subframe t) {
    measuring_ = t >= warmup_;
    for (auto& v : vehicles_) mobility_step(v->state, 0.001, cfg_.road, cfg_.mobility, v->rng_mobility);
  }

  void phase_traffic(Subframe t) {
    arrivals_.assign(vehicles_.size(), std::nullopt);
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      auto& v = *vehicles_[i];
      arrivals_[i] = v.traffic->next_packet(v.state, t, v.rng_traffic);
      if (arrivals_[i]) {
        arrivals_[i]->rb_count = rb_count_;
        if (measuring_) ++result_.counters.packets_generated;
      }
    }
  }

  void phase_mac(Subframe t) {
    planned_.assign(vehicles_.size(), std::nullopt);
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      auto& v = *vehicles_[i];
      v.ledger.expire(t);
      const MacContext ctx{t, static_cast<VehicleId>(i), v.sensing, v.ledger, v.rng_mac, *this};
      planned_[i] = v.mac->step(ctx, arrivals_[i]);
    }
  }

  void phase_transmit(Subframe t) {
    txs_.clear();
    std::fill(transmitting_.begin(), transmitting_.end(), 0);
    std::fill(tx_of_.begin(), tx_of_.end(), -1);
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      if (!planned_[i]) continue;
      const PlannedTx& p = *planned_[i];
      Transmission tx;
      tx.sender = static_cast<VehicleId>(i);
      tx.csr = p.csr;
      tx.sci = p.sci;
      tx.reservation = p.reservation;
      tx.has_tb = p.tb.has_value();
      tx.rb_first = cfg_.layout.first_rb(p.csr.first.subchannel);
      tx.rb_count = p.reservation ? cfg_.layout.sci_rb_count : rb_count_;
      transmitting_[i] = 1;
      tx_of_[i] = static_cast<int>(txs_.size());
      txs_.push_back(tx);
      if (measuring_) ++(tx.has_tb ? result_.counters.tb_transmissions
                                   : result_.counters.reservation_signals);
      if (opt_.on_transmission)
        opt_.on_transmission(TxLogEntry{t, tx.sender, p.csr.first.subchannel, p.csr.width, p.reservation});
    }
  }

  void record_outcome(Subframe t, const Transmission& tx, VehicleId rx, const ReceptionOutcome& o) {
    result_.pdr.record_reception(o);
    result_.pdr_by_class[static_cast<std::size_t>(vehicles_[tx.sender]->cls)].record_reception(o);
    if (debug_.is_open()) {
      static constexpr const char* kCause[] = {"none", "hd", "sen", "pro", "col"};
      debug_ << t << ',' << tx.sender << ',' << rx << ',' << o.distance_m << ',' << o.sinr_mean_db
             << ',' << (o.decoded ? "decoded" : "lost") << ',' << kCause[static_cast<int>(o.cause)]
             << '\n';
    }
  }

  void phase_receive(Subframe t) {
    const PhyConfig& phy = cfg_.phy;
    const ChannelLayout& lay = cfg_.layout;
    const double thr_mw = dbm_to_mw(phy.sensing_threshold_dbm);
    power_.resize(txs_.size());
    for (std::size_t r = 0; r < vehicles_.size(); ++r) {
      Vehicle& rx = *vehicles_[r];
      const bool own = transmitting_[r] != 0;
      rx.sensing.begin_subframe(t, own);
      if (t % 100 == 0) rx.sensing.evict(t);
      if (txs_.empty()) continue;
      if (own) {
        if (!measuring_) continue;
        for (const auto& tx : txs_) {
          if (tx.sender == static_cast<VehicleId>(r) || !tx.has_tb) continue;
          ReceptionOutcome o;
          o.cause = LossCause::hd;
          o.distance_m = distance_m(vehicles_[tx.sender]->state, rx.state, cfg_.road);
          record_outcome(t, tx, static_cast<VehicleId>(r), o);
        }
        continue;
      }

      std::fill(rb_total_.begin(), rb_total_.end(), 0.0);
      for (std::size_t j = 0; j < txs_.size(); ++j) {
        const auto& tx = txs_[j];
        auto& pw = power_[j];
        pw.distance = distance_m(vehicles_[tx.sender]->state, rx.state, cfg_.road);
        const double shadow = rx.rng_phy.normal(0.0, phy.shadowing_sigma_los_db);
        pw.total_mw = tx_mw_ * pathloss_gain(pw.distance, phy) * std::exp(-kLn10Over10 * shadow);
        pw.per_rb = pw.total_mw / tx.rb_count;
        for (int rb = tx.rb_first; rb < tx.rb_first + tx.rb_count; ++rb)
          rb_total_[static_cast<std::size_t>(rb)] += pw.per_rb;
      }

      for (std::size_t j = 0; j < txs_.size(); ++j) {
        const auto& tx = txs_[j];
        const auto& pw = power_[j];
        ReceptionOutcome o;
        o.distance_m = pw.distance;
        if (pw.total_mw < thr_mw) {
          o.cause = LossCause::sen;
          o.sinr_mean_db = mw_to_dbm(pw.per_rb / noise_rb_mw_);
        } else {
          double acc = 0.0;
          for (int rb = tx.rb_first; rb < tx.rb_first + tx.rb_count; ++rb) {
            const double interference =
                std::max(0.0, rb_total_[static_cast<std::size_t>(rb)] - pw.per_rb);
            acc += pw.per_rb / (interference + noise_rb_mw_);
          }
          DecodeContext dc;
          dc.rx_power_total_dbm = mw_to_dbm(pw.total_mw);
          dc.snr_db = mw_to_dbm(pw.per_rb / noise_rb_mw_);
          dc.sinr_mean_db = mw_to_dbm(acc / tx.rb_count);
          dc.distance_m = pw.distance;
          dc.mcs = tx.sci.mcs;
          o = decode(phy, dc, rx.rng_phy);
        }
        if (tx.has_tb && measuring_) record_outcome(t, tx, static_cast<VehicleId>(r), o);
        if (!o.decoded) continue;
        if (tx.reservation) {
          rx.ledger.claim(tx.sci.resource, tx.sender);
        } else if (tx.sci.rri_ms > 0) {
          rx.sensing.record_sci(SciObservation{t, tx.sender, tx.sci.rri_ms, tx.csr,
                                               mw_to_dbm(pw.per_rb / phy.res_per_rb)});
        }
      }

      for (int sc = 0; sc < lay.num_subchannels; ++sc) {
        const int lo = lay.first_rb(sc);
        const int hi = lo + lay.rbs_per_subchannel;
        bool sensed = false;
        for (std::size_t j = 0; j < txs_.size() && !sensed; ++j) {
          const auto& tx = txs_[j];
          sensed = tx.rb_first < hi && lo < tx.rb_first + tx.rb_count && power_[j].total_mw >= thr_mw;
        }
        if (!sensed) continue;
        double pscch = 0.0, pssch = 0.0;
        for (int rb = lo; rb < hi; ++rb) {
          const double p = rb_total_[static_cast<std::size_t>(rb)] + noise_rb_mw_;
          (rb < lo + lay.sci_rb_count ? pscch : pssch) += p;
        }
        rx.sensing.record_rssi(t, sc, pssch, pscch);
      }
    }
  }

  void phase_metrics(Subframe t) {
    if (!measuring_) return;
    for (const auto& tx : txs_)
      if (tx.has_tb)
        for (int sc = tx.csr.first.subchannel; sc < tx.csr.first.subchannel + tx.csr.width; ++sc)
          occupancy_.mark_occupied(t, sc);
    const int interval = cfg_.metrics.cbr_interval_ms;
    if ((t - warmup_ + 1) % interval != 0) return;
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      const auto& s = vehicles_[i]->sensing;
      const auto a = cbr(s, t, CbrChannel::pssch, cfg_.metrics.cbr_threshold_dbm);
      const auto b = cbr(s, t, CbrChannel::pscch, cfg_.metrics.cbr_threshold_dbm);
      if (a && b) result_.cbr.push_back(CbrSample{t, static_cast<VehicleId>(i), *a, *b});
    }
  }

  struct Power {
    double distance = 0, total_mw = 0, per_rb = 0;
  };

  const ScenarioConfig& cfg_;
  const RunOptions& opt_;
  Subframe total_, warmup_;
  bool measuring_ = false;
  int rb_count_ = 0, width_ = 1;
  double noise_rb_mw_ = 0, tx_mw_ = 0;
  SubframeLoop loop_;
  std::vector<std::unique_ptr<Vehicle>> vehicles_;
  std::vector<std::optional<TransportBlock>> arrivals_;
  std::vector<std::optional<PlannedTx>> planned_;
  std::vector<Transmission> txs_;
  std::vector<char> transmitting_;
  std::vector<int> tx_of_;
  std::vector<double> rb_total_;
  std::vector<Power> power_;
  OccupancyLedger occupancy_;
  RunResult result_;
  std::ofstream debug_;
};

void write_bins(const DistanceBins& bins, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "bin_lo_m,attempted,decoded,hd,sen,pro,col\n";
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const auto& b = bins.bin(i);
    out << bins.bin_lo_m(i) << ',' << b.attempted << ',' << b.decoded << ',' << b.hd << ','
        << b.sen << ',' << b.pro << ',' << b.col << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  validate_scenario(config);
  Simulation sim(config, options);
  return sim.run();
}

void write_results(const RunResult& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  write_bins(r.pdr, dir / "pdr_by_distance.csv");
  if (r.config.traffic_classes.size() > 1)
    for (std::size_t i = 0; i < r.config.traffic_classes.size(); ++i)
      write_bins(r.pdr_by_class[i],
                 dir / ("pdr_by_distance_" + r.config.traffic_classes[i].name + ".csv"));

  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    out << std::fixed;
    return out;
  };
  {
    auto out = open("cbr_timeseries.csv");
    out << "subframe,vehicle,pssch_cbr,pscch_cbr\n" << std::setprecision(4);
    for (const auto& s : r.cbr)
      out << s.subframe << ',' << s.vehicle << ',' << s.pssch << ',' << s.pscch << '\n';
    if (!out) throw IoError("write failed for cbr_timeseries.csv");
  }
  {
    auto out = open("grants.csv");
    out << "model,length,used,broken\n";
    for (const auto& g : r.grants)
      out << g.model << ',' << g.length << ',' << g.used << ',' << (g.broken ? 1 : 0) << '\n';
    if (!out) throw IoError("write failed for grants.csv");
  }
  {
    auto out = open("occupancy.csv");
    const auto& o = r.occupancy;
    out << "class,count,pct\n" << std::setprecision(10);
    out << "free," << o.free << ',' << o.free_pct << '\n';
    out << "occupied," << o.occupied << ',' << o.occupied_pct << '\n';
    out << "reserved_unused," << o.reserved_unused << ',' << o.reserved_unused_pct << '\n';
    if (!out) throw IoError("write failed for occupancy.csv");
  }
  {
    nlohmann::json m;
    m["master_seed"] = r.config.master_seed;
    m["config"] = scenario_to_json(r.config);
    m["vehicles"] = r.vehicles;
    nlohmann::json counts = nlohmann::json::object();
    for (std::size_t i = 0; i < r.config.traffic_classes.size(); ++i)
      counts[r.config.traffic_classes[i].name] =
          std::count(r.vehicle_class.begin(), r.vehicle_class.end(), static_cast<int>(i));
    m["vehicles_per_class"] = counts;
    const auto& c = r.counters;
    m["counters"] = {{"packets_generated", c.packets_generated},
                     {"packets_dropped", c.packets_dropped},
                     {"tb_transmissions", c.tb_transmissions},
                     {"reservation_signals", c.reservation_signals},
                     {"selection_fallbacks", c.selection_fallbacks},
                     {"coexistence_moves", c.coexistence_moves},
                     {"coexistence_all_claimed", c.coexistence_all_claimed}};
    m["files"] = result_files();
    auto out = open("run_manifest.json");
    out << m.dump(2) << '\n';
    if (!out) throw IoError("write failed for run_manifest.json");
  }
}

}  // namespace cv2x
