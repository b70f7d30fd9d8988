#pragma once

#include <deque>
#include <vector>

#include "cv2x/resources.hpp"

namespace cv2x {

struct SciObservation {
  Subframe subframe = 0;
  VehicleId sender = 0;
  int rri_ms = 0;
  Csr resource;
  double pssch_rsrp_dbm = 0.0;
};

// Per-vehicle history of what its receiver measured. Only reservation-bearing SCIs
// (rri > 0) are kept since nothing else projects into a selection window.
class SensingRecord {
 public:
  SensingRecord(int num_subchannels, int capacity_subframes);

  int num_subchannels() const { return num_subchannels_; }
  int capacity() const { return capacity_; }

  // Opens subframe t for writing; clears any stale ring slot.
  void begin_subframe(Subframe t, bool own_transmission);
  void record_rssi(Subframe t, int subchannel, double pssch_mw, double pscch_mw);
  void record_sci(const SciObservation& sci);
  void evict(Subframe now);

  bool covers(Subframe t) const;
  bool own_transmission(Subframe t) const;
  bool measured(Subframe t, int subchannel) const;
  double pssch_rssi_mw(Subframe t, int subchannel) const;
  double pscch_rssi_mw(Subframe t, int subchannel) const;

  const std::deque<SciObservation>& scis() const { return scis_; }

 private:
  struct Cell {
    double pssch_mw = 0.0;
    double pscch_mw = 0.0;
    bool measured = false;
  };
  std::size_t slot(Subframe t) const { return static_cast<std::size_t>(t % capacity_); }

  int num_subchannels_;
  int capacity_;
  std::vector<Subframe> stamp_;
  std::vector<char> own_tx_;
  std::vector<Cell> cells_;
  std::deque<SciObservation> scis_;
};

}  // namespace cv2x
