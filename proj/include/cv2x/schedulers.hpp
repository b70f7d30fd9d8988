#pragma once

#include <memory>
#include <optional>

#include "cv2x/aperiodic.hpp"
#include "cv2x/sbsps.hpp"
#include "cv2x/scenario.hpp"

namespace cv2x {

struct PlannedTx {
  Csr csr;
  Sci sci;
  bool reservation = false;
  std::optional<TransportBlock> tb;
};

class MacSink {
 public:
  virtual ~MacSink() = default;
  virtual void grant_ended(const Grant& grant) = 0;
  virtual void reserved_unused(const Csr& cell) = 0;
  virtual void packet_dropped() = 0;
  virtual void selection_fallback() = 0;
  virtual void coexistence_moved(bool all_claimed) = 0;
};

struct MacContext {
  Subframe now;
  VehicleId self;
  const SensingRecord& sensing;
  const ReservationLedger& ledger;
  RngStream& rng;
  MacSink& sink;
};

struct SchedulerParams {
  ChannelLayout layout;
  SpsConfig sps;
  int width = 1;
  int mcs = 6;
  int str_window = 50;
  bool single_use = false;
  bool coexistence_fix = false;
};

// Per-vehicle MAC. step() runs once per subframe: it first serves what is due now,
// then ingests the packet generated this subframe.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual std::optional<PlannedTx> step(const MacContext& ctx,
                                        const std::optional<TransportBlock>& arrival) = 0;
};

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind, const SchedulerParams& params);

}  // namespace cv2x
