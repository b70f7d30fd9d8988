#include "cv2x/schedulers.hpp"

#include <algorithm>

namespace cv2x {
namespace {

Sci data_sci(VehicleId self, const Csr& csr, int rri, int mcs) {
  return Sci{self, rri, csr, mcs, false};
}

class SpsScheduler final : public Scheduler {
 public:
  explicit SpsScheduler(const SchedulerParams& p) : p_(p) {}

  std::optional<PlannedTx> step(const MacContext& ctx,
                                const std::optional<TransportBlock>& arrival) override {
    std::optional<PlannedTx> out;
    if (state_.grant && state_.grant->state == GrantState::active &&
        state_.grant->next_slot == ctx.now) {
      Grant& g = *state_.grant;
      bool due = true;
      if (p_.coexistence_fix && g.first_transmission_pending && state_.queued) {
        bool all_claimed = false;
        const Csr here{{ctx.now, g.csr.first.subchannel}, g.csr.width};
        const Csr alt =
            sps_coexistence_defer(g.survivors, here, ctx.ledger, ctx.now, ctx.rng, &all_claimed);
        if (alt != here || all_claimed) ctx.sink.coexistence_moved(all_claimed);
        if (alt != here) {
          g.csr = alt;
          g.next_slot = alt.first.subframe;
          due = alt.first.subframe == ctx.now;
        }
      }
      if (due) serve(ctx, out);
    }
    if (arrival) {
      const auto action = on_packet_arrival(state_, ctx.self, *arrival, ctx.now, ctx.sensing, p_.sps,
                                            p_.layout, p_.width, ctx.rng);
      if (action.dropped_older) ctx.sink.packet_dropped();
      if (action.selection_fallback) ctx.sink.selection_fallback();
    }
    return out;
  }

 private:
  void serve(const MacContext& ctx, std::optional<PlannedTx>& out) {
    Grant& g = *state_.grant;
    const int sc = g.csr.first.subchannel;
    SlotOutcome r = on_reserved_slot(g, state_.queued, p_.sps, ctx.rng, p_.single_use);
    if (r.transmitted) {
      const Csr here{{ctx.now, sc}, g.csr.width};
      out = PlannedTx{here, data_sci(ctx.self, here, g.rri_ms, p_.mcs), false, r.transmitted};
    }
    for (Subframe t : r.unused_slots) ctx.sink.reserved_unused(Csr{{t, sc}, g.csr.width});
    if (r.ended) ctx.sink.grant_ended(*r.ended);
    if (g.state != GrantState::active) state_.grant.reset();
  }

  SchedulerParams p_;
  SpsState state_;
};

class RandomScheduler final : public Scheduler {
 public:
  explicit RandomScheduler(const SchedulerParams& p) : p_(p) {}

  std::optional<PlannedTx> step(const MacContext& ctx,
                                const std::optional<TransportBlock>& arrival) override {
    std::optional<PlannedTx> out;
    if (pending_ && slot_.first.subframe == ctx.now) {
      out = PlannedTx{slot_, data_sci(ctx.self, slot_, 0, p_.mcs), false, pending_};
      pending_.reset();
    }
    if (arrival) {
      if (pending_) {
        ctx.sink.packet_dropped();
      } else {
        slot_ = random_schedule(ctx.now, p_.layout, p_.width, ctx.rng, p_.sps.rri_ms);
      }
      pending_ = arrival;
    }
    return out;
  }

 private:
  SchedulerParams p_;
  std::optional<TransportBlock> pending_;
  Csr slot_;
};

class CounterScheduler final : public Scheduler {
 public:
  explicit CounterScheduler(const SchedulerParams& p) : p_(p) {}

  std::optional<PlannedTx> step(const MacContext& ctx,
                                const std::optional<TransportBlock>& arrival) override {
    std::optional<PlannedTx> out;
    if (state_.pending_tb) {
      const auto free_sc = free_subchannels(ctx.sensing, ctx.now, p_.sps);
      std::vector<int> offsets;
      for (int c = 0; c + p_.width <= p_.layout.num_subchannels; ++c) {
        bool ok = true;
        for (int sc = c; sc < c + p_.width; ++sc)
          ok &= std::find(free_sc.begin(), free_sc.end(), sc) != free_sc.end();
        if (ok) offsets.push_back(c);
      }
      if (auto sc = counter_step(state_, offsets, ctx.rng)) {
        const Csr here{{ctx.now, *sc}, p_.width};
        out = PlannedTx{here, data_sci(ctx.self, here, 0, p_.mcs), false, state_.pending_tb};
        state_.pending_tb.reset();
      }
    }
    if (arrival) {
      if (state_.pending_tb) {
        ctx.sink.packet_dropped();
        state_.pending_tb = arrival;
      } else {
        state_ = counter_start(*arrival, ctx.rng);
      }
    }
    return out;
  }

 private:
  SchedulerParams p_;
  CounterState state_;
};

class StrScheduler final : public Scheduler {
 public:
  explicit StrScheduler(const SchedulerParams& p) : p_(p) {}

  std::optional<PlannedTx> step(const MacContext& ctx,
                                const std::optional<TransportBlock>& arrival) override {
    std::optional<PlannedTx> out;
    StrDraw info;
    if (state_.phase == StrPhase::listening) {
      str_listen(state_, ctx.now, ctx.ledger, ctx.sensing, p_.sps, p_.layout, ctx.rng, &info);
      if (info.fallback) ctx.sink.selection_fallback();
      if (state_.reservation_slot.subframe == ctx.now) {
        const StrReservation r = str_on_reservation_subframe(
            state_, ctx.now, ctx.ledger, ctx.sensing, p_.sps, p_.layout, p_.width, p_.mcs, ctx.rng,
            &info);
        if (info.fallback) ctx.sink.selection_fallback();
        out = PlannedTx{Csr{state_.reservation_slot, 1}, r.sci, true, std::nullopt};
        out->sci.sender = ctx.self;
      }
    } else if (state_.phase == StrPhase::reserved && state_.data_slot.first.subframe == ctx.now) {
      out = PlannedTx{state_.data_slot, data_sci(ctx.self, state_.data_slot, 0, p_.mcs), false,
                      state_.tb};
      state_ = StrState{};
    }
    if (arrival) {
      if (state_.phase != StrPhase::idle) {
        ctx.sink.packet_dropped();
        state_.tb = arrival;
      } else {
        state_ = str_on_arrival(*arrival, ctx.now, ctx.ledger, ctx.sensing, p_.sps, p_.layout,
                                p_.str_window, ctx.rng, &info);
        if (info.fallback) ctx.sink.selection_fallback();
      }
    }
    return out;
  }

 private:
  SchedulerParams p_;
  StrState state_;
};

}  // namespace

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind, const SchedulerParams& params) {
  switch (kind) {
    case SchedulerKind::sbsps: return std::make_unique<SpsScheduler>(params);
    case SchedulerKind::random: return std::make_unique<RandomScheduler>(params);
    case SchedulerKind::counter: return std::make_unique<CounterScheduler>(params);
    case SchedulerKind::str: return std::make_unique<StrScheduler>(params);
  }
  return nullptr;
}

}  // namespace cv2x
