#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cv2x/resources.hpp"
#include "cv2x/sbsps.hpp"
#include "cv2x/sensing.hpp"

namespace cv2x {

// Data slots announced by decoded reservation signals; first decoded claim wins.
class ReservationLedger {
 public:
  bool claim(const ResourceId& cell, VehicleId owner);
  bool claim(const Csr& csr, VehicleId owner);
  bool claimed(const ResourceId& cell) const { return entries_.count(cell) != 0; }
  bool claimed(const Csr& csr) const;
  std::optional<VehicleId> owner(const ResourceId& cell) const;
  void expire(Subframe now);
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<ResourceId, VehicleId> entries_;
};

Csr random_schedule(Subframe now, const ChannelLayout& layout, int width, RngStream& rng,
                    int horizon = 100);

struct CounterState {
  int remaining = 0;
  std::optional<TransportBlock> pending_tb;
};

inline constexpr int kCounterMax = 40;

CounterState counter_start(const TransportBlock& tb, RngStream& rng);

// One subframe of the counter mechanism. Returns the subchannel to transmit on now.
std::optional<int> counter_step(CounterState& state, std::span<const int> free_subchannels,
                                RngStream& rng);

// Subchannels of subframe `now` not projected-reserved at the given threshold.
std::vector<int> free_subchannels(const SensingRecord& record, Subframe now,
                                  const SpsConfig& cfg);

enum class StrPhase { idle, listening, reserved };

struct StrState {
  StrPhase phase = StrPhase::idle;
  ResourceId reservation_slot;
  Csr data_slot;
  Subframe arrival = 0;
  int window_len_subframes = 50;
  std::optional<TransportBlock> tb;

  Subframe window1_end() const { return arrival + window_len_subframes; }
  Subframe window2_start() const { return window1_end() + 1; }
  Subframe window2_end() const { return arrival + 2 * window_len_subframes; }
};

struct StrDraw {
  bool fallback = false;
  bool redrawn = false;
};

StrState str_on_arrival(const TransportBlock& tb, Subframe now, const ReservationLedger& ledger,
                        const SensingRecord& sensing, const SpsConfig& cfg,
                        const ChannelLayout& layout, int window_len, RngStream& rng,
                        StrDraw* info = nullptr);

// Listening check; redraws the reservation slot over the rest of window 1 if it is claimed.
void str_listen(StrState& state, Subframe now, const ReservationLedger& ledger,
                const SensingRecord& sensing, const SpsConfig& cfg, const ChannelLayout& layout,
                RngStream& rng, StrDraw* info = nullptr);

struct StrReservation {
  Sci sci;
  Csr data_slot;
};

StrReservation str_on_reservation_subframe(StrState& state, Subframe now,
                                           const ReservationLedger& ledger,
                                           const SensingRecord& sensing, const SpsConfig& cfg,
                                           const ChannelLayout& layout, int width, int mcs,
                                           RngStream& rng, StrDraw* info = nullptr);

Csr sps_coexistence_defer(std::span<const Csr> survivors, const Csr& chosen,
                          const ReservationLedger& ledger, Subframe transmit_time,
                          RngStream& rng, bool* all_claimed = nullptr);

}  // namespace cv2x
