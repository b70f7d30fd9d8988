#include "cv2x/sensing.hpp"

namespace cv2x {

SensingRecord::SensingRecord(int num_subchannels, int capacity_subframes)
    : num_subchannels_(num_subchannels),
      capacity_(capacity_subframes),
      stamp_(static_cast<std::size_t>(capacity_subframes), -1),
      own_tx_(static_cast<std::size_t>(capacity_subframes), 0),
      cells_(static_cast<std::size_t>(capacity_subframes * num_subchannels)) {
  CV2X_EXPECTS(num_subchannels >= 1 && capacity_subframes >= 1);
}

void SensingRecord::begin_subframe(Subframe t, bool own_transmission) {
  CV2X_EXPECTS(t >= 0);
  const std::size_t s = slot(t);
  stamp_[s] = t;
  own_tx_[s] = own_transmission ? 1 : 0;
  for (int sc = 0; sc < num_subchannels_; ++sc) cells_[s * num_subchannels_ + sc] = Cell{};
}

void SensingRecord::record_rssi(Subframe t, int subchannel, double pssch_mw, double pscch_mw) {
  CV2X_EXPECTS(covers(t) && subchannel >= 0 && subchannel < num_subchannels_);
  CV2X_EXPECTS(!own_transmission(t));
  cells_[slot(t) * num_subchannels_ + subchannel] = Cell{pssch_mw, pscch_mw, true};
}

void SensingRecord::record_sci(const SciObservation& sci) {
  CV2X_EXPECTS(sci.rri_ms > 0);
  CV2X_EXPECTS(scis_.empty() || scis_.back().subframe <= sci.subframe);
  scis_.push_back(sci);
}

void SensingRecord::evict(Subframe now) {
  while (!scis_.empty() && scis_.front().subframe < now - capacity_) scis_.pop_front();
}

bool SensingRecord::covers(Subframe t) const { return t >= 0 && stamp_[slot(t)] == t; }

bool SensingRecord::own_transmission(Subframe t) const { return covers(t) && own_tx_[slot(t)]; }

bool SensingRecord::measured(Subframe t, int subchannel) const {
  return covers(t) && cells_[slot(t) * num_subchannels_ + subchannel].measured;
}

double SensingRecord::pssch_rssi_mw(Subframe t, int subchannel) const {
  return measured(t, subchannel) ? cells_[slot(t) * num_subchannels_ + subchannel].pssch_mw : 0.0;
}

double SensingRecord::pscch_rssi_mw(Subframe t, int subchannel) const {
  return measured(t, subchannel) ? cells_[slot(t) * num_subchannels_ + subchannel].pscch_mw : 0.0;
}

}  // namespace cv2x
