#include "cv2x/sbsps.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "cv2x/phy.hpp"

namespace cv2x {

void validate_sps(const SpsConfig& cfg, const std::string& prefix) {
  if (cfg.rri_ms < 1) throw ConfigError(prefix + ".rri_ms", "must be positive");
  if (cfg.rrc_min < 1) throw ConfigError(prefix + ".rrc_min", "must be positive");
  if (cfg.rrc_min > cfg.rrc_max) throw ConfigError(prefix + ".rrc_max", "must be >= rrc_min");
  if (!(cfg.keep_probability >= 0.0 && cfg.keep_probability <= 0.8))
    throw ConfigError(prefix + ".keep_probability", "must lie in [0, 0.8]");
  if (!std::isfinite(cfg.rsrp_threshold_dbm))
    throw ConfigError(prefix + ".rsrp_threshold_dbm", "must be finite");
  if (!(cfg.rssi_keep_fraction > 0.0 && cfg.rssi_keep_fraction <= 1.0))
    throw ConfigError(prefix + ".rssi_keep_fraction", "must lie in (0, 1]");
  if (!(cfg.min_candidate_fraction >= 0.0 && cfg.min_candidate_fraction <= 1.0))
    throw ConfigError(prefix + ".min_candidate_fraction", "must lie in [0, 1]");
  if (cfg.sensing_window_ms < 1)
    throw ConfigError(prefix + ".sensing_window_ms", "must be positive");
  if (cfg.selection_t1_ms < 1 || cfg.selection_t1_ms > 4)
    throw ConfigError(prefix + ".selection_t1_ms", "must lie in [1, 4]");
  if (cfg.selection_t1_ms > cfg.rri_ms)
    throw ConfigError(prefix + ".selection_t1_ms", "must not exceed rri_ms");
  if (cfg.reselect_after_skips < 1)
    throw ConfigError(prefix + ".reselect_after_skips", "must be positive");
}

std::vector<ProjectedReservation> project_reservations(const SensingRecord& record, Subframe now,
                                                       int sensing_window_ms, Subframe from,
                                                       Subframe to) {
  struct Group {
    double sum_mw = 0.0;
    int n = 0;
    Subframe latest = 0;
  };
  using Key = std::tuple<VehicleId, int, int, int, Subframe>;
  std::map<Key, Group> groups;
  const Subframe oldest = now - sensing_window_ms;
  for (const SciObservation& s : record.scis()) {
    if (s.subframe < oldest || s.subframe >= now) continue;
    Key key{s.sender, s.resource.first.subchannel, s.resource.width, s.rri_ms,
            s.subframe % s.rri_ms};
    Group& g = groups[key];
    g.sum_mw += dbm_to_mw(s.pssch_rsrp_dbm);
    ++g.n;
    g.latest = std::max(g.latest, s.subframe);
  }
  std::vector<ProjectedReservation> out;
  for (const auto& [key, g] : groups) {
    const auto& [sender, sc, width, rri, residue] = key;
    const double avg = mw_to_dbm(g.sum_mw / g.n);
    Subframe k = std::max<Subframe>(1, (from - g.latest + rri - 1) / rri);
    for (Subframe y = g.latest + k * rri; y <= to; y += rri)
      out.push_back({y, sc, width, sender, avg});
  }
  return out;
}

std::vector<char> projected_busy(const SensingRecord& record, Subframe now, int sensing_window_ms,
                                 Subframe from, Subframe to, double threshold_dbm) {
  const int nsc = record.num_subchannels();
  std::vector<char> busy(static_cast<std::size_t>((to - from + 1) * nsc), 0);
  for (const auto& p : project_reservations(record, now, sensing_window_ms, from, to)) {
    if (!(p.avg_rsrp_dbm > threshold_dbm)) continue;
    for (int sc = p.subchannel; sc < p.subchannel + p.width && sc < nsc; ++sc)
      busy[static_cast<std::size_t>((p.subframe - from) * nsc + sc)] = 1;
  }
  return busy;
}

double average_rssi_dbm(const SensingRecord& record, Subframe now, const SpsConfig& cfg,
                        const Csr& csr) {
  const Subframe oldest = now - cfg.sensing_window_ms;
  double sum = 0.0;
  int n = 0;
  for (Subframe t = csr.first.subframe - cfg.rri_ms; t >= oldest; t -= cfg.rri_ms) {
    if (t >= now) continue;
    for (int sc = csr.first.subchannel; sc < csr.first.subchannel + csr.width; ++sc) {
      if (!record.measured(t, sc)) continue;
      sum += record.pssch_rssi_mw(t, sc);
      ++n;
    }
  }
  return n == 0 ? kUnmeasured : mw_to_dbm(sum / n);
}

CsrSelection filter_csrs(const SensingRecord& record, Subframe now, const SpsConfig& cfg,
                         const ChannelLayout& layout, int width, RngStream* tie_rng) {
  CsrSelection sel;
  const Subframe from = now + cfg.selection_t1_ms;
  const Subframe to = now + cfg.rri_ms;
  sel.candidates = enumerate_csrs(layout, from, to, width);
  const std::size_t total = sel.candidates.size();
  sel.threshold_dbm = cfg.rsrp_threshold_dbm;
  if (total == 0) return sel;

  const int nsc = layout.num_subchannels;
  const std::size_t span = static_cast<std::size_t>(to - from + 1);
  std::vector<double> cell_max(span * nsc, kUnmeasured);
  for (const auto& p : project_reservations(record, now, cfg.sensing_window_ms, from, to))
    for (int sc = p.subchannel; sc < p.subchannel + p.width && sc < nsc; ++sc) {
      double& m = cell_max[static_cast<std::size_t>(p.subframe - from) * nsc + sc];
      m = std::max(m, p.avg_rsrp_dbm);
    }

  std::vector<char> hd(span, 0);
  if (cfg.half_duplex_exclusion) {
    for (Subframe z = now - cfg.sensing_window_ms; z < now; ++z) {
      if (!record.own_transmission(z)) continue;
      for (Subframe y = z + cfg.rri_ms; y <= to; y += cfg.rri_ms)
        if (y >= from) hd[static_cast<std::size_t>(y - from)] = 1;
    }
  }

  std::vector<double> csr_max(total, kUnmeasured);
  double max_recorded = kUnmeasured;
  for (std::size_t i = 0; i < total; ++i) {
    const Csr& c = sel.candidates[i];
    for (int sc = c.first.subchannel; sc < c.first.subchannel + c.width; ++sc)
      csr_max[i] = std::max(
          csr_max[i], cell_max[static_cast<std::size_t>(c.first.subframe - from) * nsc + sc]);
    max_recorded = std::max(max_recorded, csr_max[i]);
  }

  const auto need = static_cast<std::size_t>(
      std::ceil(cfg.min_candidate_fraction * static_cast<double>(total) - 1e-9));
  auto count_at = [&](double th) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < total; ++i)
      if (!hd[static_cast<std::size_t>(sel.candidates[i].first.subframe - from)] &&
          !(csr_max[i] > th))
        ++n;
    return n;
  };
  while (count_at(sel.threshold_dbm) < need && sel.threshold_dbm < max_recorded) {
    sel.threshold_dbm += 3.0;
    ++sel.escalations;
  }
  for (std::size_t i = 0; i < total; ++i)
    if (!hd[static_cast<std::size_t>(sel.candidates[i].first.subframe - from)] &&
        !(csr_max[i] > sel.threshold_dbm))
      sel.after_exclusion.push_back(sel.candidates[i]);

  const auto keep = static_cast<std::size_t>(
      std::ceil(cfg.rssi_keep_fraction * static_cast<double>(total) - 1e-9));
  if (!cfg.rssi_filtering_enabled || sel.after_exclusion.size() <= keep) {
    sel.survivors = sel.after_exclusion;
    return sel;
  }
  std::vector<std::pair<double, Csr>> ranked;
  ranked.reserve(sel.after_exclusion.size());
  for (const Csr& c : sel.after_exclusion)
    ranked.emplace_back(average_rssi_dbm(record, now, cfg, c), c);
  if (tie_rng) std::shuffle(ranked.begin(), ranked.end(), tie_rng->engine());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < keep; ++i) sel.survivors.push_back(ranked[i].second);
  return sel;
}

Csr select_csr(const SensingRecord& record, Subframe now, const SpsConfig& cfg,
               const ChannelLayout& layout, int width, RngStream& rng, CsrSelection* detail) {
  CsrSelection sel = filter_csrs(record, now, cfg, layout, width, &rng);
  CV2X_EXPECTS(!sel.candidates.empty());
  if (sel.survivors.empty()) {
    sel.fallback = true;
    sel.chosen = sel.candidates[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(sel.candidates.size()) - 1))];
  } else {
    sel.chosen = sel.survivors[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(sel.survivors.size()) - 1))];
  }
  const Csr chosen = sel.chosen;
  if (detail) *detail = std::move(sel);
  return chosen;
}

ArrivalAction on_packet_arrival(SpsState& state, VehicleId owner, const TransportBlock& tb,
                                Subframe now, const SensingRecord& record, const SpsConfig& cfg,
                                const ChannelLayout& layout, int width, RngStream& rng) {
  ArrivalAction action;
  if (state.grant && state.grant->state == GrantState::active) {
    action.dropped_older = state.queued.has_value();
    state.queued = tb;
    return action;
  }
  CsrSelection sel;
  const Csr csr = select_csr(record, now, cfg, layout, width, rng, &sel);
  Grant g;
  g.owner = owner;
  g.csr = csr;
  g.rri_ms = cfg.rri_ms;
  g.rrc_remaining = static_cast<int>(rng.uniform_int(cfg.rrc_min, cfg.rrc_max));
  g.allocated = g.rrc_remaining;
  g.created_at = now;
  g.next_slot = csr.first.subframe;
  g.survivors = std::move(sel.survivors);
  state.grant = std::move(g);
  state.queued = tb;
  action.grant_created = true;
  action.selection_fallback = sel.fallback;
  return action;
}

SlotOutcome on_reserved_slot(Grant& grant, std::optional<TransportBlock>& queued,
                             const SpsConfig& cfg, RngStream& rng, bool single_use) {
  CV2X_EXPECTS(grant.state == GrantState::active);
  SlotOutcome out;
  const Subframe slot = grant.next_slot;
  auto mark_rest = [&](Subframe first_unused) {
    for (int k = 0; k < grant.rrc_remaining; ++k)
      out.unused_slots.push_back(first_unused + static_cast<Subframe>(k) * grant.rri_ms);
  };

  if (queued) {
    out.transmitted = std::move(queued);
    queued.reset();
    ++grant.used;
    --grant.rrc_remaining;
    grant.consecutive_skips = 0;
    grant.first_transmission_pending = false;
    if (single_use) {
      mark_rest(slot + grant.rri_ms);
      grant.state = GrantState::broken;
      out.ended = grant;
      return out;
    }
  } else {
    ++grant.consecutive_skips;
    if (cfg.grant_breaking_enabled && grant.consecutive_skips >= cfg.reselect_after_skips) {
      mark_rest(slot);
      grant.state = GrantState::broken;
      out.ended = grant;
      return out;
    }
    out.unused_slots.push_back(slot);
    --grant.rrc_remaining;
  }

  if (grant.rrc_remaining == 0) {
    grant.state = GrantState::completed;
    out.ended = grant;
    if (cfg.keep_probability > 0.0 && rng.uniform01() < cfg.keep_probability) {
      Grant renewed = grant;
      renewed.state = GrantState::active;
      renewed.rrc_remaining = static_cast<int>(rng.uniform_int(cfg.rrc_min, cfg.rrc_max));
      renewed.allocated = renewed.rrc_remaining;
      renewed.used = 0;
      renewed.consecutive_skips = 0;
      renewed.created_at = slot;
      renewed.first_transmission_pending = false;
      renewed.survivors.clear();
      renewed.next_slot = slot + grant.rri_ms;
      grant = std::move(renewed);
    }
    return out;
  }
  grant.next_slot = slot + grant.rri_ms;
  return out;
}

GrantFate grant_maintenance_bound(int inter_arrival_subframes, int rri) {
  CV2X_EXPECTS(inter_arrival_subframes >= 1 && rri >= 1);
  if (inter_arrival_subframes <= rri) return GrantFate::maintained;
  if (inter_arrival_subframes <= 2 * rri - 2) return GrantFate::conditional;
  return GrantFate::broken;
}

}  // namespace cv2x
