#include "cv2x/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cv2x {

DistanceBins::DistanceBins(double bin_width_m, double max_distance_m) : width_(bin_width_m) {
  CV2X_EXPECTS(bin_width_m > 0.0 && max_distance_m > 0.0);
  const auto n = static_cast<std::size_t>(std::ceil(max_distance_m / bin_width_m - 1e-9));
  bins_.resize(n + 1);
}

void DistanceBins::record_reception(const ReceptionOutcome& o) {
  auto i = static_cast<std::size_t>(std::max(0.0, o.distance_m) / width_);
  i = std::min(i, bins_.size() - 1);
  BinCounts& b = bins_[i];
  ++b.attempted;
  if (o.decoded) {
    ++b.decoded;
    return;
  }
  switch (o.cause) {
    case LossCause::hd: ++b.hd; break;
    case LossCause::sen: ++b.sen; break;
    case LossCause::pro: ++b.pro; break;
    case LossCause::col: ++b.col; break;
    case LossCause::none: throw ContractViolation("lost reception without a cause");
  }
}

BinCounts DistanceBins::total_below(double distance_m) const {
  BinCounts t;
  for (std::size_t i = 0; i + 1 < bins_.size() && bin_lo_m(i) + width_ <= distance_m + 1e-9; ++i) {
    const auto& b = bins_[i];
    t.attempted += b.attempted;
    t.decoded += b.decoded;
    t.hd += b.hd;
    t.sen += b.sen;
    t.pro += b.pro;
    t.col += b.col;
  }
  return t;
}

std::optional<double> cbr(const SensingRecord& record, Subframe now, CbrChannel channel,
                          double threshold_dbm, int history) {
  if (now + 1 < history || record.capacity() < history) return std::nullopt;
  const double thr_mw = dbm_to_mw(threshold_dbm);
  const int nsc = record.num_subchannels();
  int busy = 0;
  for (Subframe t = now - history + 1; t <= now; ++t)
    for (int sc = 0; sc < nsc; ++sc) {
      if (!record.measured(t, sc)) continue;
      const double mw = channel == CbrChannel::pssch ? record.pssch_rssi_mw(t, sc)
                                                     : record.pscch_rssi_mw(t, sc);
      if (mw > thr_mw) ++busy;
    }
  return static_cast<double>(busy) / (static_cast<double>(history) * nsc);
}

OccupancyLedger::OccupancyLedger(Subframe start, Subframe end, int num_subchannels)
    : start_(start), end_(end), nsc_(num_subchannels) {
  CV2X_EXPECTS(start <= end && num_subchannels >= 1);
  cells_.assign(static_cast<std::size_t>((end - start) * num_subchannels), CellClass::free);
}

void OccupancyLedger::mark_occupied(Subframe t, int sc) {
  if (!inside(t)) return;
  cells_[static_cast<std::size_t>((t - start_) * nsc_ + sc)] = CellClass::occupied;
}

void OccupancyLedger::mark_reserved_unused(Subframe t, int sc) {
  if (!inside(t)) return;
  auto& c = cells_[static_cast<std::size_t>((t - start_) * nsc_ + sc)];
  if (c == CellClass::free) c = CellClass::reserved_unused;
}

CellClass OccupancyLedger::at(Subframe t, int sc) const {
  CV2X_EXPECTS(inside(t) && sc >= 0 && sc < nsc_);
  return cells_[static_cast<std::size_t>((t - start_) * nsc_ + sc)];
}

OccupancyReport occupancy_report(const OccupancyLedger& ledger) {
  OccupancyReport r;
  for (Subframe t = ledger.start(); t < ledger.end(); ++t)
    for (int sc = 0; sc < ledger.num_subchannels(); ++sc) switch (ledger.at(t, sc)) {
        case CellClass::free: ++r.free; break;
        case CellClass::occupied: ++r.occupied; break;
        case CellClass::reserved_unused: ++r.reserved_unused; break;
      }
  const double n = static_cast<double>(r.free + r.occupied + r.reserved_unused);
  if (n == 0) {
    r.free_pct = 100.0;
    return r;
  }
  r.free_pct = 100.0 * r.free / n;
  r.occupied_pct = 100.0 * r.occupied / n;
  r.reserved_unused_pct = 100.0 * r.reserved_unused / n;
  return r;
}

std::vector<GrantSummaryRow> grant_summary(const std::vector<GrantRecord>& stats,
                                           std::size_t min_grants) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const GrantRecord*>> by_model;
  for (const auto& g : stats) {
    auto [it, fresh] = by_model.try_emplace(g.model);
    if (fresh) order.push_back(g.model);
    it->second.push_back(&g);
  }
  std::vector<GrantSummaryRow> rows;
  for (const auto& model : order) {
    const auto& gs = by_model[model];
    if (gs.size() < min_grants) continue;
    GrantSummaryRow r;
    r.model = model;
    r.grants = gs.size();
    const double n = static_cast<double>(gs.size());
    double sl = 0, su = 0, broken = 0;
    for (const auto* g : gs) {
      sl += g->length;
      su += g->used;
      broken += g->broken ? 1 : 0;
    }
    r.mean_length = sl / n;
    r.mean_used = su / n;
    double vl = 0, vu = 0;
    for (const auto* g : gs) {
      vl += (g->length - r.mean_length) * (g->length - r.mean_length);
      vu += (g->used - r.mean_used) * (g->used - r.mean_used);
    }
    r.sd_length = n > 1 ? std::sqrt(vl / (n - 1)) : 0.0;
    r.sd_used = n > 1 ? std::sqrt(vu / (n - 1)) : 0.0;
    r.broken_pct = 100.0 * broken / n;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace cv2x
