#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <span>

#include "cv2x/core.hpp"

namespace cv2x {

enum class PathlossModel { log_distance, winner_b1 };
enum class BlerMode { logistic, threshold };

struct LogDistanceParams {
  double pl0_db = 47.86;
  double d0_m = 1.0;
  double exponent = 2.75;
};

// PL = a*log10(d) + b + c*log10(fc/5 GHz), with a second coefficient set past the breakpoint.
struct WinnerB1Params {
  double a1 = 0, b1 = 0, c1 = 0;
  double breakpoint_m = 0;
  double a2 = 0, b2 = 0, c2 = 0;
};

struct BlerCurve {
  double s50_db = 0.0;
  double k_per_db = 2.0;
};

struct PhyConfig {
  double tx_power_dbm = 23.0;
  double noise_figure_db = 9.0;
  double thermal_noise_density_dbm_hz = -174.0;
  double shadowing_sigma_los_db = std::sqrt(3.0);
  double sensing_threshold_dbm = -90.5;
  double carrier_ghz = 5.9;
  PathlossModel pathloss_model = PathlossModel::log_distance;
  LogDistanceParams log_distance;
  std::optional<WinnerB1Params> winner_b1;
  double min_distance_m = 1.0;
  double rb_bandwidth_hz = 180e3;
  int res_per_rb = 12;
  BlerMode bler_mode = BlerMode::logistic;
  std::map<int, BlerCurve> bler_curves = {{6, {1.5, 2.0}}, {7, {2.5, 2.0}}, {9, {5.5, 2.0}}};
};

void validate_phy(const PhyConfig& cfg);

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

double pathloss_db(double distance_m, const PhyConfig& cfg);
// Linear counterpart of pathloss_db (received/transmitted power ratio).
double pathloss_gain(double distance_m, const PhyConfig& cfg);

struct LinkSample {
  VehicleId tx = 0;
  VehicleId rx = 0;
  double distance_m = 0.0;
  double pathloss_db = 0.0;
  double shadowing_db = 0.0;
  double rx_power_total_dbm = 0.0;
};

LinkSample make_link(const PhyConfig& cfg, VehicleId tx, VehicleId rx, double distance_m,
                     double shadowing_db);

struct RbPower {
  double psd_per_rb = 0.0;  // mW over one RB
  int rb_count = 1;

  double total_mw() const { return psd_per_rb * rb_count; }
  double per_hz_mw(double rb_bandwidth_hz) const { return psd_per_rb / rb_bandwidth_hz; }
};

RbPower received_power(const PhyConfig& cfg, const LinkSample& link, int rb_count);

double pssch_rsrp_dbm(const RbPower& rb, int res_per_rb = 12);

double noise_per_rb_mw(const PhyConfig& cfg);

// rb_power_mw holds the summed co-channel power on each measured RB, noise excluded.
double s_rssi_dbm(const PhyConfig& cfg, std::span<const double> rb_power_mw);

double sinr_mean_db(std::span<const double> signal_rb_mw, std::span<const double> interference_rb_mw,
                    double noise_rb_mw);

double bler(const PhyConfig& cfg, double sinr_db, int mcs);

enum class LossCause { none, hd, sen, pro, col };

struct ReceptionOutcome {
  bool decoded = false;
  LossCause cause = LossCause::none;
  double sinr_mean_db = 0.0;
  double distance_m = 0.0;
};

struct DecodeContext {
  bool rx_transmitting = false;
  double rx_power_total_dbm = 0.0;
  double snr_db = 0.0;
  double sinr_mean_db = 0.0;
  double distance_m = 0.0;
  int mcs = 0;
};

ReceptionOutcome decode(const PhyConfig& cfg, const DecodeContext& ctx, double u1, double u2);
// Draws u1 only when the PRO test is reached and u2 only when the COL test is.
ReceptionOutcome decode(const PhyConfig& cfg, const DecodeContext& ctx, RngStream& rng);

}  // namespace cv2x
