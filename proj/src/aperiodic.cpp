#include "cv2x/aperiodic.hpp"

#include <algorithm>

namespace cv2x {

bool ReservationLedger::claim(const ResourceId& cell, VehicleId owner) {
  return entries_.emplace(cell, owner).second;
}

bool ReservationLedger::claim(const Csr& csr, VehicleId owner) {
  bool any = false;
  for (int sc = csr.first.subchannel; sc < csr.first.subchannel + csr.width; ++sc)
    any |= claim(ResourceId{csr.first.subframe, sc}, owner);
  return any;
}

bool ReservationLedger::claimed(const Csr& csr) const {
  for (int sc = csr.first.subchannel; sc < csr.first.subchannel + csr.width; ++sc)
    if (claimed(ResourceId{csr.first.subframe, sc})) return true;
  return false;
}

std::optional<VehicleId> ReservationLedger::owner(const ResourceId& cell) const {
  auto it = entries_.find(cell);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ReservationLedger::expire(Subframe now) {
  while (!entries_.empty() && entries_.begin()->first.subframe < now)
    entries_.erase(entries_.begin());
}

Csr random_schedule(Subframe now, const ChannelLayout& layout, int width, RngStream& rng,
                    int horizon) {
  CV2X_EXPECTS(width >= 1 && width <= layout.num_subchannels && horizon >= 1);
  const Subframe t = now + rng.uniform_int(1, horizon);
  const int sc = static_cast<int>(rng.uniform_int(0, layout.num_subchannels - width));
  return Csr{{t, sc}, width};
}

CounterState counter_start(const TransportBlock& tb, RngStream& rng) {
  return CounterState{static_cast<int>(rng.uniform_int(1, kCounterMax)), tb};
}

std::optional<int> counter_step(CounterState& state, std::span<const int> free_subchannels,
                                RngStream& rng) {
  if (!state.pending_tb) return std::nullopt;
  if (state.remaining == 0) {
    if (free_subchannels.empty()) return std::nullopt;
    return free_subchannels[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(free_subchannels.size()) - 1))];
  }
  state.remaining = std::max(0, state.remaining - static_cast<int>(free_subchannels.size()));
  return std::nullopt;
}

std::vector<int> free_subchannels(const SensingRecord& record, Subframe now,
                                  const SpsConfig& cfg) {
  const auto busy =
      projected_busy(record, now, cfg.sensing_window_ms, now, now, cfg.rsrp_threshold_dbm);
  std::vector<int> out;
  for (int sc = 0; sc < record.num_subchannels(); ++sc)
    if (!busy[static_cast<std::size_t>(sc)]) out.push_back(sc);
  return out;
}

namespace {

// Uniform pick over cells of [from, to] (width-wide CSRs) that are neither ledger-claimed
// nor projected-reserved; falls back to all cells of the range.
Csr draw_free(Subframe now, Subframe from, Subframe to, int width, const ReservationLedger& ledger,
              const SensingRecord& sensing, const SpsConfig& cfg, const ChannelLayout& layout,
              RngStream& rng, bool* fallback) {
  CV2X_EXPECTS(from <= to);
  const int nsc = layout.num_subchannels;
  const auto busy =
      projected_busy(sensing, now, cfg.sensing_window_ms, from, to, cfg.rsrp_threshold_dbm);
  const auto all = enumerate_csrs(layout, from, to, width);
  std::vector<Csr> open;
  for (const Csr& c : all) {
    if (ledger.claimed(c)) continue;
    bool reserved = false;
    for (int sc = c.first.subchannel; sc < c.first.subchannel + c.width; ++sc)
      reserved |= busy[static_cast<std::size_t>((c.first.subframe - from) * nsc + sc)] != 0;
    if (!reserved) open.push_back(c);
  }
  const auto& pool = open.empty() ? all : open;
  if (fallback) *fallback = open.empty();
  return pool[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
}

}  // namespace

StrState str_on_arrival(const TransportBlock& tb, Subframe now, const ReservationLedger& ledger,
                        const SensingRecord& sensing, const SpsConfig& cfg,
                        const ChannelLayout& layout, int window_len, RngStream& rng,
                        StrDraw* info) {
  CV2X_EXPECTS(window_len >= 1);
  StrState s;
  s.arrival = now;
  s.window_len_subframes = window_len;
  s.tb = tb;
  bool fb = false;
  s.reservation_slot =
      draw_free(now, now + 1, s.window1_end(), 1, ledger, sensing, cfg, layout, rng, &fb).first;
  s.phase = StrPhase::listening;
  if (info) *info = StrDraw{fb, false};
  return s;
}

void str_listen(StrState& state, Subframe now, const ReservationLedger& ledger,
                const SensingRecord& sensing, const SpsConfig& cfg, const ChannelLayout& layout,
                RngStream& rng, StrDraw* info) {
  CV2X_EXPECTS(state.phase == StrPhase::listening);
  if (info) *info = StrDraw{};
  if (!ledger.claimed(state.reservation_slot)) return;
  const Subframe from = std::max(now, state.arrival + 1);
  if (from > state.window1_end()) return;
  bool fb = false;
  state.reservation_slot =
      draw_free(now, from, state.window1_end(), 1, ledger, sensing, cfg, layout, rng, &fb).first;
  if (info) *info = StrDraw{fb, true};
}

StrReservation str_on_reservation_subframe(StrState& state, Subframe now,
                                           const ReservationLedger& ledger,
                                           const SensingRecord& sensing, const SpsConfig& cfg,
                                           const ChannelLayout& layout, int width, int mcs,
                                           RngStream& rng, StrDraw* info) {
  CV2X_EXPECTS(state.phase == StrPhase::listening && now == state.reservation_slot.subframe);
  bool fb = false;
  state.data_slot = draw_free(now, state.window2_start(), state.window2_end(), width, ledger,
                              sensing, cfg, layout, rng, &fb);
  state.phase = StrPhase::reserved;
  if (info) *info = StrDraw{fb, false};
  StrReservation r;
  r.data_slot = state.data_slot;
  r.sci.sender = state.tb ? state.tb->sender : 0;
  r.sci.rri_ms = 0;
  r.sci.resource = state.data_slot;
  r.sci.mcs = mcs;
  r.sci.reservation_flag = true;
  return r;
}

Csr sps_coexistence_defer(std::span<const Csr> survivors, const Csr& chosen,
                          const ReservationLedger& ledger, Subframe transmit_time,
                          RngStream& rng, bool* all_claimed) {
  if (all_claimed) *all_claimed = false;
  if (!ledger.claimed(chosen)) return chosen;
  std::vector<Csr> open;
  for (const Csr& c : survivors)
    if (c.first.subframe >= transmit_time && c != chosen && !ledger.claimed(c)) open.push_back(c);
  if (open.empty()) {
    if (all_claimed) *all_claimed = true;
    return chosen;
  }
  return open[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(open.size()) - 1))];
}

}  // namespace cv2x
