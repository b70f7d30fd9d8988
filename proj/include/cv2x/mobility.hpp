#pragma once

#include <optional>
#include <vector>

#include "cv2x/core.hpp"

namespace cv2x {

struct RoadGeometry {
  double length_m = 2000.0;
  int lanes_per_direction = 3;
  double lane_width_m = 4.0;

  int lanes() const { return 2 * lanes_per_direction; }
};

struct MobilityConfig {
  std::optional<double> target_speed_mps;  // overrides the density calibration
  double jitter_bound_mps = 0.2;
  double jitter_sigma_mps = 0.1;  // per sqrt(second)
  double reversion_per_s = 0.5;
};

void validate_road(const RoadGeometry& road);
void validate_mobility(const MobilityConfig& cfg);

struct CamSnapshot {
  double odometer_m = 0.0;
  double speed_mps = 0.0;
  double heading_deg = 0.0;
  Subframe time = 0;
};

struct VehicleState {
  VehicleId id = 0;
  double position_m = 0.0;
  double odometer_m = 0.0;
  int lane = 0;
  double speed_mps = 0.0;
  double target_speed_mps = 0.0;
  double heading_deg = 0.0;
  CamSnapshot last_cam;

  int direction() const;
};

// Mean CAM interval the ETSI rules should produce at a density (piecewise linear).
double target_cam_interval_ms(double density_veh_per_m);
double target_speed_mps(double density_veh_per_m, double position_threshold_m = 4.0);

std::vector<VehicleState> place_vehicles(double density_veh_per_m, const RoadGeometry& road,
                                         double speed_mps, RngStream& rng);

void mobility_step(VehicleState& v, double dt_s, const RoadGeometry& road,
                   const MobilityConfig& cfg, RngStream& rng);

// Shortest distance on the ring, lanes laterally offset.
double distance_m(const VehicleState& a, const VehicleState& b, const RoadGeometry& road);

}  // namespace cv2x
