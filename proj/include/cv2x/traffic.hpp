#pragma once

#include <optional>
#include <string>

#include "cv2x/mobility.hpp"
#include "cv2x/resources.hpp"

namespace cv2x {

enum class TrafficKind { periodic, threegpp, etsi, single_slot };

std::string to_string(TrafficKind kind);
TrafficKind traffic_kind_from(const std::string& name);  // throws std::invalid_argument

struct TrafficModel {
  TrafficKind kind = TrafficKind::periodic;
  int period_ms = 100;
  int base_ms = 50;
  double exp_mean_ms = 50.0;
  double heading_threshold_deg = 4.0;
  double position_threshold_m = 4.0;
  double speed_threshold_mps = 0.5;
  int max_gap_ms = 1000;
  int payload_bytes = 190;
};

void validate_traffic(const TrafficModel& model, const std::string& prefix = "traffic");

class TrafficGenerator {
 public:
  // The first packet lands at a random phase so vehicles are not synchronised.
  TrafficGenerator(const TrafficModel& model, Subframe start, RngStream& rng);

  std::optional<TransportBlock> next_packet(VehicleState& v, Subframe now, RngStream& rng);

  const TrafficModel& model() const { return model_; }
  Subframe last_emission() const { return last_; }

 private:
  TransportBlock emit(VehicleState& v, Subframe now);

  TrafficModel model_;
  Subframe next_due_ = 0;
  Subframe last_ = -1;
};

// Next 3GPP aperiodic arrival: base plus an exponential tail, floored to whole subframes.
Subframe threegpp_next_arrival(Subframe last, const TrafficModel& model, RngStream& rng);

}  // namespace cv2x
