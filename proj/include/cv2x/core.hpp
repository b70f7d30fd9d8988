#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cv2x {

using Subframe = std::int64_t;
using VehicleId = std::int32_t;

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid scenario input; field() names the offending key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CV2X_EXPECTS(cond)                                                  \
  do {                                                                      \
    if (!(cond)) throw ::cv2x::ContractViolation("precondition: " #cond);   \
  } while (0)

class SimClock {
 public:
  Subframe now() const { return now_; }
  Subframe advance() { return ++now_; }

 private:
  Subframe now_ = 0;
};

std::uint64_t stream_seed(std::uint64_t master_seed, std::string_view stream_id);

// Independent generator per concern, keyed by name so unrelated streams never shift.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string stream_id);

  const std::string& id() const { return id_; }
  std::mt19937_64& engine() { return engine_; }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double uniform01();
  double normal(double mean, double stddev);
  double exponential(double mean);

 private:
  std::string id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

std::int64_t draw_uniform_int(RngStream& stream, std::int64_t lo, std::int64_t hi);

enum class Phase { mobility, traffic, mac, phy_transmit, receive, metrics };
inline constexpr std::array<Phase, 6> kPhaseOrder = {Phase::mobility, Phase::traffic,
                                                     Phase::mac,      Phase::phy_transmit,
                                                     Phase::receive,  Phase::metrics};

// Fixed-order subframe loop; each hook sees the subframe being executed.
class SubframeLoop {
 public:
  using Hook = std::function<void(Subframe)>;

  void set(Phase phase, Hook hook);
  Subframe advance();
  const SimClock& clock() const { return clock_; }

 private:
  SimClock clock_;
  std::array<Hook, 6> hooks_{};
};

}  // namespace cv2x
