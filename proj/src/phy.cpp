#include "cv2x/phy.hpp"

#include <algorithm>

namespace cv2x {

void validate_phy(const PhyConfig& cfg) {
  if (!(cfg.tx_power_dbm >= 10.0 && cfg.tx_power_dbm <= 23.0))
    throw ConfigError("phy.tx_power_dbm", "must lie in [10, 23]");
  if (!std::isfinite(cfg.sensing_threshold_dbm))
    throw ConfigError("phy.sensing_threshold_dbm", "must be finite");
  if (!(cfg.shadowing_sigma_los_db >= 0.0))
    throw ConfigError("phy.shadowing_sigma_los_db", "must be non-negative");
  if (!(cfg.min_distance_m > 0.0)) throw ConfigError("phy.min_distance_m", "must be positive");
  if (!(cfg.carrier_ghz > 0.0)) throw ConfigError("phy.carrier_ghz", "must be positive");
  if (cfg.pathloss_model == PathlossModel::log_distance) {
    if (!(cfg.log_distance.d0_m > 0.0))
      throw ConfigError("phy.log_distance.d0_m", "must be positive");
    if (!(cfg.log_distance.exponent > 0.0))
      throw ConfigError("phy.log_distance.exponent", "must be positive");
  } else if (!cfg.winner_b1) {
    throw ConfigError("phy.winner_b1", "coefficients are required for the winner-b1 model");
  }
  for (const auto& [mcs, curve] : cfg.bler_curves)
    if (!(curve.k_per_db > 0.0))
      throw ConfigError("phy.bler_curves.mcs" + std::to_string(mcs) + ".k_per_db",
                        "must be positive");
}

double pathloss_gain(double distance_m, const PhyConfig& cfg) {
  if (cfg.pathloss_model != PathlossModel::log_distance)
    return std::pow(10.0, -pathloss_db(distance_m, cfg) / 10.0);
  const auto& p = cfg.log_distance;
  const double d = std::max(distance_m, cfg.min_distance_m);
  return std::pow(10.0, -p.pl0_db / 10.0) * std::pow(d / p.d0_m, -p.exponent);
}

double pathloss_db(double distance_m, const PhyConfig& cfg) {
  const double d = std::max(distance_m, cfg.min_distance_m);
  if (cfg.pathloss_model == PathlossModel::log_distance) {
    const auto& p = cfg.log_distance;
    return p.pl0_db + 10.0 * p.exponent * std::log10(d / p.d0_m);
  }
  const auto& w = *cfg.winner_b1;
  const double f = std::log10(cfg.carrier_ghz / 5.0);
  if (d <= w.breakpoint_m) return w.a1 * std::log10(d) + w.b1 + w.c1 * f;
  return w.a2 * std::log10(d) + w.b2 + w.c2 * f;
}

LinkSample make_link(const PhyConfig& cfg, VehicleId tx, VehicleId rx, double distance_m,
                     double shadowing_db) {
  LinkSample l;
  l.tx = tx;
  l.rx = rx;
  l.distance_m = distance_m;
  l.pathloss_db = pathloss_db(distance_m, cfg);
  l.shadowing_db = shadowing_db;
  l.rx_power_total_dbm = cfg.tx_power_dbm - l.pathloss_db - l.shadowing_db;
  return l;
}

RbPower received_power(const PhyConfig&, const LinkSample& link, int rb_count) {
  CV2X_EXPECTS(rb_count >= 1);
  return RbPower{dbm_to_mw(link.rx_power_total_dbm) / rb_count, rb_count};
}

double pssch_rsrp_dbm(const RbPower& rb, int res_per_rb) {
  return mw_to_dbm(rb.psd_per_rb / res_per_rb);
}

double noise_per_rb_mw(const PhyConfig& cfg) {
  return dbm_to_mw(cfg.thermal_noise_density_dbm_hz + 10.0 * std::log10(cfg.rb_bandwidth_hz) +
                   cfg.noise_figure_db);
}

double s_rssi_dbm(const PhyConfig& cfg, std::span<const double> rb_power_mw) {
  CV2X_EXPECTS(!rb_power_mw.empty());
  const double n = noise_per_rb_mw(cfg);
  double sum = 0.0;
  for (double p : rb_power_mw) sum += std::max(p, 0.0) + n;
  return mw_to_dbm(sum);
}

double sinr_mean_db(std::span<const double> signal_rb_mw, std::span<const double> interference_rb_mw,
                    double noise_rb_mw) {
  CV2X_EXPECTS(!signal_rb_mw.empty() && signal_rb_mw.size() == interference_rb_mw.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < signal_rb_mw.size(); ++i)
    acc += signal_rb_mw[i] / (std::max(interference_rb_mw[i], 0.0) + noise_rb_mw);
  return mw_to_dbm(acc / static_cast<double>(signal_rb_mw.size()));
}

double bler(const PhyConfig& cfg, double sinr_db, int mcs) {
  auto it = cfg.bler_curves.find(mcs);
  if (it == cfg.bler_curves.end())
    throw ConfigError("phy.bler_curves", "no BLER curve for MCS " + std::to_string(mcs));
  const BlerCurve& c = it->second;
  if (cfg.bler_mode == BlerMode::threshold) {
    if (sinr_db < c.s50_db) return 1.0;
    return sinr_db == c.s50_db ? 0.5 : 0.0;
  }
  const double x = c.k_per_db * (sinr_db - c.s50_db);
  if (x > 700.0) return 0.0;
  return 1.0 / (1.0 + std::exp(x));
}

namespace {

template <typename Draw1, typename Draw2>
ReceptionOutcome decode_with(const PhyConfig& cfg, const DecodeContext& ctx, Draw1 u1, Draw2 u2) {
  ReceptionOutcome out;
  out.sinr_mean_db = ctx.sinr_mean_db;
  out.distance_m = ctx.distance_m;
  if (ctx.rx_transmitting) {
    out.cause = LossCause::hd;
  } else if (ctx.rx_power_total_dbm < cfg.sensing_threshold_dbm) {
    out.cause = LossCause::sen;
  } else if (u1() < bler(cfg, ctx.snr_db, ctx.mcs)) {
    out.cause = LossCause::pro;
  } else if (u2() < bler(cfg, ctx.sinr_mean_db, ctx.mcs)) {
    out.cause = LossCause::col;
  } else {
    out.decoded = true;
  }
  return out;
}

}  // namespace

ReceptionOutcome decode(const PhyConfig& cfg, const DecodeContext& ctx, double u1, double u2) {
  return decode_with(cfg, ctx, [u1] { return u1; }, [u2] { return u2; });
}

ReceptionOutcome decode(const PhyConfig& cfg, const DecodeContext& ctx, RngStream& rng) {
  auto draw = [&rng] { return rng.uniform01(); };
  return decode_with(cfg, ctx, draw, draw);
}

}  // namespace cv2x
