#include "cv2x/traffic.hpp"

#include <cmath>
#include <stdexcept>

namespace cv2x {

std::string to_string(TrafficKind kind) {
  switch (kind) {
    case TrafficKind::periodic: return "periodic";
    case TrafficKind::threegpp: return "threegpp";
    case TrafficKind::etsi: return "etsi";
    case TrafficKind::single_slot: return "single_slot";
  }
  return "?";
}

TrafficKind traffic_kind_from(const std::string& name) {
  if (name == "periodic") return TrafficKind::periodic;
  if (name == "threegpp") return TrafficKind::threegpp;
  if (name == "etsi") return TrafficKind::etsi;
  if (name == "single_slot") return TrafficKind::single_slot;
  throw std::invalid_argument("unknown traffic model '" + name + "'");
}

void validate_traffic(const TrafficModel& m, const std::string& prefix) {
  if (m.period_ms < 1) throw ConfigError(prefix + ".period_ms", "must be positive");
  if (m.base_ms < 1) throw ConfigError(prefix + ".base_ms", "must be positive");
  if (!(m.exp_mean_ms > 0.0)) throw ConfigError(prefix + ".exp_mean_ms", "must be positive");
  if (!(m.heading_threshold_deg > 0.0))
    throw ConfigError(prefix + ".heading_threshold_deg", "must be positive");
  if (!(m.position_threshold_m > 0.0))
    throw ConfigError(prefix + ".position_threshold_m", "must be positive");
  if (!(m.speed_threshold_mps > 0.0))
    throw ConfigError(prefix + ".speed_threshold_mps", "must be positive");
  if (m.max_gap_ms < 1) throw ConfigError(prefix + ".max_gap_ms", "must be positive");
  if (m.payload_bytes < 1) throw ConfigError(prefix + ".payload_bytes", "must be positive");
}

Subframe threegpp_next_arrival(Subframe last, const TrafficModel& model, RngStream& rng) {
  return last + model.base_ms + static_cast<Subframe>(std::floor(rng.exponential(model.exp_mean_ms)));
}

TrafficGenerator::TrafficGenerator(const TrafficModel& model, Subframe start, RngStream& rng)
    : model_(model) {
  switch (model_.kind) {
    case TrafficKind::periodic:
    case TrafficKind::single_slot:
      next_due_ = start + rng.uniform_int(0, model_.period_ms - 1);
      break;
    case TrafficKind::threegpp:
      next_due_ = start + rng.uniform_int(0, model_.base_ms + static_cast<int>(model_.exp_mean_ms) - 1);
      break;
    case TrafficKind::etsi:
      next_due_ = start + rng.uniform_int(0, model_.max_gap_ms - 1);
      break;
  }
}

TransportBlock TrafficGenerator::emit(VehicleState& v, Subframe now) {
  last_ = now;
  v.last_cam = CamSnapshot{v.odometer_m, v.speed_mps, v.heading_deg, now};
  TransportBlock tb;
  tb.sender = v.id;
  tb.payload_bytes = model_.payload_bytes;
  tb.origin_time = now;
  return tb;
}

std::optional<TransportBlock> TrafficGenerator::next_packet(VehicleState& v, Subframe now,
                                                            RngStream& rng) {
  if (now < next_due_) return std::nullopt;
  switch (model_.kind) {
    case TrafficKind::periodic:
    case TrafficKind::single_slot:
      next_due_ = now + model_.period_ms;
      return emit(v, now);
    case TrafficKind::threegpp:
      next_due_ = threegpp_next_arrival(now, model_, rng);
      return emit(v, now);
    case TrafficKind::etsi: {
      if (last_ < 0) {
        next_due_ = now + 1;
        return emit(v, now);
      }
      next_due_ = now + 1;
      const auto& c = v.last_cam;
      double dh = std::fabs(v.heading_deg - c.heading_deg);
      if (dh > 180.0) dh = 360.0 - dh;
      constexpr double eps = 1e-9;
      const bool trigger = dh > model_.heading_threshold_deg ||
                           v.odometer_m - c.odometer_m >= model_.position_threshold_m - eps ||
                           std::fabs(v.speed_mps - c.speed_mps) > model_.speed_threshold_mps ||
                           now - c.time >= model_.max_gap_ms;
      if (!trigger) return std::nullopt;
      return emit(v, now);
    }
  }
  return std::nullopt;
}

}  // namespace cv2x
