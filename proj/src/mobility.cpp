#include "cv2x/mobility.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace cv2x {

void validate_road(const RoadGeometry& road) {
  if (!(road.length_m > 0.0)) throw ConfigError("road.length_m", "must be positive");
  if (road.lanes_per_direction < 1)
    throw ConfigError("road.lanes_per_direction", "must be positive");
  if (!(road.lane_width_m > 0.0)) throw ConfigError("road.lane_width_m", "must be positive");
}

void validate_mobility(const MobilityConfig& cfg) {
  if (cfg.target_speed_mps && !(*cfg.target_speed_mps >= 0.0))
    throw ConfigError("mobility.target_speed_mps", "must be non-negative");
  if (!(cfg.jitter_bound_mps >= 0.0))
    throw ConfigError("mobility.jitter_bound_mps", "must be non-negative");
  if (!(cfg.jitter_sigma_mps >= 0.0))
    throw ConfigError("mobility.jitter_sigma_mps", "must be non-negative");
  if (!(cfg.reversion_per_s >= 0.0))
    throw ConfigError("mobility.reversion_per_s", "must be non-negative");
}

int VehicleState::direction() const { return heading_deg < 90.0 ? 1 : -1; }

double target_cam_interval_ms(double density) {
  static constexpr std::array<std::pair<double, double>, 4> kPoints{
      {{0.06, 122.0}, {0.12, 250.0}, {0.2, 384.0}, {0.3, 610.0}}};
  if (density <= kPoints.front().first) return kPoints.front().second;
  if (density >= kPoints.back().first) return kPoints.back().second;
  for (std::size_t i = 1; i < kPoints.size(); ++i) {
    const auto [x1, y1] = kPoints[i];
    if (density <= x1) {
      const auto [x0, y0] = kPoints[i - 1];
      return y0 + (y1 - y0) * (density - x0) / (x1 - x0);
    }
  }
  return kPoints.back().second;
}

double target_speed_mps(double density, double position_threshold_m) {
  return position_threshold_m / (target_cam_interval_ms(density) / 1000.0);
}

std::vector<VehicleState> place_vehicles(double density, const RoadGeometry& road,
                                         double speed_mps, RngStream& rng) {
  CV2X_EXPECTS(density > 0.0);
  const auto n = static_cast<int>(std::lround(density * road.length_m));
  std::vector<VehicleState> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    VehicleState v;
    v.id = i;
    v.lane = static_cast<int>(rng.uniform_int(0, road.lanes() - 1));
    v.position_m = rng.uniform01() * road.length_m;
    v.heading_deg = v.lane < road.lanes_per_direction ? 0.0 : 180.0;
    v.speed_mps = speed_mps;
    v.target_speed_mps = speed_mps;
    v.last_cam = CamSnapshot{0.0, speed_mps, v.heading_deg, 0};
    out.push_back(v);
  }
  return out;
}

void mobility_step(VehicleState& v, double dt_s, const RoadGeometry& road,
                   const MobilityConfig& cfg, RngStream& rng) {
  double dev = v.speed_mps - v.target_speed_mps;
  if (cfg.jitter_sigma_mps > 0.0 || cfg.reversion_per_s > 0.0) {
    dev += -cfg.reversion_per_s * dev * dt_s + cfg.jitter_sigma_mps * std::sqrt(dt_s) * rng.normal(0.0, 1.0);
    dev = std::clamp(dev, -cfg.jitter_bound_mps, cfg.jitter_bound_mps);
  }
  v.speed_mps = std::max(0.0, v.target_speed_mps + dev);
  const double step = v.speed_mps * dt_s;
  v.odometer_m += step;
  v.position_m = std::fmod(v.position_m + v.direction() * step, road.length_m);
  if (v.position_m < 0.0) v.position_m += road.length_m;
}

double distance_m(const VehicleState& a, const VehicleState& b, const RoadGeometry& road) {
  double dx = std::fabs(a.position_m - b.position_m);
  dx = std::min(dx, road.length_m - dx);
  const double dy = (a.lane - b.lane) * road.lane_width_m;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace cv2x
