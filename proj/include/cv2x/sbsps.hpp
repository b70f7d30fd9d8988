#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cv2x/resources.hpp"
#include "cv2x/sensing.hpp"

namespace cv2x {

struct SpsConfig {
  int rri_ms = 100;
  int rrc_min = 5;
  int rrc_max = 15;
  double keep_probability = 0.0;
  double rsrp_threshold_dbm = -126.0;
  double rssi_keep_fraction = 0.2;
  double min_candidate_fraction = 0.2;
  int sensing_window_ms = 1000;
  int selection_t1_ms = 1;
  bool rssi_filtering_enabled = true;
  bool grant_breaking_enabled = true;
  int reselect_after_skips = 1;
  bool half_duplex_exclusion = true;
};

void validate_sps(const SpsConfig& cfg, const std::string& prefix = "sps");

// A decoded SCI group (same sender, resource and phase) extrapolated into a window.
struct ProjectedReservation {
  Subframe subframe = 0;
  int subchannel = 0;
  int width = 1;
  VehicleId sender = 0;
  double avg_rsrp_dbm = 0.0;
};

std::vector<ProjectedReservation> project_reservations(const SensingRecord& record, Subframe now,
                                                       int sensing_window_ms, Subframe from,
                                                       Subframe to);

// Cells of [from, to] covered by a projection whose average RSRP exceeds threshold_dbm.
// Row-major: (t - from) * num_subchannels + subchannel.
std::vector<char> projected_busy(const SensingRecord& record, Subframe now, int sensing_window_ms,
                                 Subframe from, Subframe to, double threshold_dbm);

inline constexpr double kUnmeasured = -std::numeric_limits<double>::infinity();

struct CsrSelection {
  std::vector<Csr> candidates;
  std::vector<Csr> after_exclusion;
  std::vector<Csr> survivors;
  double threshold_dbm = 0.0;
  int escalations = 0;
  bool fallback = false;
  Csr chosen;
};

// Steps 1-4. tie_rng shuffles equal-RSSI candidates; nullptr keeps enumeration order.
CsrSelection filter_csrs(const SensingRecord& record, Subframe now, const SpsConfig& cfg,
                         const ChannelLayout& layout, int width, RngStream* tie_rng);

// Mean linear PSSCH S-RSSI at y - k*rri inside the sensing window; kUnmeasured if no sample.
double average_rssi_dbm(const SensingRecord& record, Subframe now, const SpsConfig& cfg,
                        const Csr& csr);

Csr select_csr(const SensingRecord& record, Subframe now, const SpsConfig& cfg,
               const ChannelLayout& layout, int width, RngStream& rng,
               CsrSelection* detail = nullptr);

enum class GrantState { active, broken, completed };

struct Grant {
  VehicleId owner = 0;
  Csr csr;
  int rri_ms = 100;
  int rrc_remaining = 0;
  int allocated = 0;
  int used = 0;
  int consecutive_skips = 0;
  Subframe created_at = 0;
  Subframe next_slot = 0;
  GrantState state = GrantState::active;
  bool first_transmission_pending = true;
  std::vector<Csr> survivors;
};

struct SpsState {
  std::optional<Grant> grant;
  std::optional<TransportBlock> queued;
};

struct ArrivalAction {
  bool grant_created = false;
  bool dropped_older = false;
  bool selection_fallback = false;
};

ArrivalAction on_packet_arrival(SpsState& state, VehicleId owner, const TransportBlock& tb,
                                Subframe now, const SensingRecord& record, const SpsConfig& cfg,
                                const ChannelLayout& layout, int width, RngStream& rng);

struct SlotOutcome {
  std::optional<TransportBlock> transmitted;
  // Reserved cells this slot left unused (skipped slot, plus remaining recurrences on a break).
  std::vector<Subframe> unused_slots;
  std::optional<Grant> ended;
};

// single_use forces a break right after the first transmission.
SlotOutcome on_reserved_slot(Grant& grant, std::optional<TransportBlock>& queued,
                             const SpsConfig& cfg, RngStream& rng, bool single_use = false);

enum class GrantFate { maintained, conditional, broken };

GrantFate grant_maintenance_bound(int inter_arrival_subframes, int rri);

}  // namespace cv2x
