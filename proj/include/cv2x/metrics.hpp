#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cv2x/phy.hpp"
#include "cv2x/sbsps.hpp"
#include "cv2x/sensing.hpp"

namespace cv2x {

struct BinCounts {
  std::int64_t attempted = 0;
  std::int64_t decoded = 0;
  std::int64_t hd = 0;
  std::int64_t sen = 0;
  std::int64_t pro = 0;
  std::int64_t col = 0;

  std::int64_t losses() const { return hd + sen + pro + col; }
};

// The last bin is an overflow bin starting at max_distance_m.
class DistanceBins {
 public:
  explicit DistanceBins(double bin_width_m = 25.0, double max_distance_m = 700.0);

  void record_reception(const ReceptionOutcome& outcome);

  double bin_width_m() const { return width_; }
  std::size_t size() const { return bins_.size(); }
  double bin_lo_m(std::size_t i) const { return static_cast<double>(i) * width_; }
  const BinCounts& bin(std::size_t i) const { return bins_[i]; }
  BinCounts total_below(double distance_m) const;

 private:
  double width_;
  std::vector<BinCounts> bins_;
};

enum class CbrChannel { pssch, pscch };

// Fraction of cells in subframes (now - history, now] with recorded S-RSSI above threshold.
std::optional<double> cbr(const SensingRecord& record, Subframe now, CbrChannel channel,
                          double threshold_dbm = -90.0, int history = 100);

enum class CellClass : std::uint8_t { free = 0, reserved_unused = 1, occupied = 2 };

class OccupancyLedger {
 public:
  OccupancyLedger(Subframe start, Subframe end, int num_subchannels);

  void mark_occupied(Subframe t, int subchannel);
  void mark_reserved_unused(Subframe t, int subchannel);
  CellClass at(Subframe t, int subchannel) const;

  Subframe start() const { return start_; }
  Subframe end() const { return end_; }
  int num_subchannels() const { return nsc_; }

 private:
  bool inside(Subframe t) const { return t >= start_ && t < end_; }
  Subframe start_, end_;
  int nsc_;
  std::vector<CellClass> cells_;
};

struct OccupancyReport {
  std::int64_t free = 0, occupied = 0, reserved_unused = 0;
  double free_pct = 0, occupied_pct = 0, reserved_unused_pct = 0;
};

OccupancyReport occupancy_report(const OccupancyLedger& ledger);

struct GrantRecord {
  std::string model;
  int length = 0;
  int used = 0;
  bool broken = false;
};

struct GrantSummaryRow {
  std::string model;
  std::size_t grants = 0;
  double mean_length = 0, sd_length = 0;
  double mean_used = 0, sd_used = 0;
  double broken_pct = 0;
};

// One row per model in first-seen order. Models with fewer than min_grants are omitted.
std::vector<GrantSummaryRow> grant_summary(const std::vector<GrantRecord>& stats,
                                           std::size_t min_grants = 100);

}  // namespace cv2x
