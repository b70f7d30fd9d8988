#pragma once

#include <compare>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "cv2x/core.hpp"

namespace cv2x {

enum class Adjacency { adjacent, nonadjacent };

struct ChannelLayout {
  int bandwidth_mhz = 10;
  int num_subchannels = 3;
  int rbs_per_subchannel = 16;
  Adjacency adjacency = Adjacency::adjacent;
  int sci_rb_count = 2;

  int total_rbs() const { return bandwidth_mhz == 20 ? 100 : 50; }
  int first_rb(int subchannel) const { return subchannel * rbs_per_subchannel; }
};

// Throws ConfigError for layouts the simulator cannot represent.
void validate_layout(const ChannelLayout& layout);

struct ResourceId {
  Subframe subframe = 0;
  int subchannel = 0;

  auto operator<=>(const ResourceId&) const = default;
};

struct Csr {
  ResourceId first;
  int width = 1;

  bool covers(int subchannel) const {
    return subchannel >= first.subchannel && subchannel < first.subchannel + width;
  }
  bool overlaps(int subchannel, int other_width) const {
    return subchannel < first.subchannel + width && first.subchannel < subchannel + other_width;
  }
  auto operator<=>(const Csr&) const = default;
};

struct Sci {
  VehicleId sender = 0;
  int rri_ms = 0;
  Csr resource;
  int mcs = 0;
  bool reservation_flag = false;
};

struct TransportBlock {
  VehicleId sender = 0;
  int payload_bytes = 0;
  int rb_count = 0;
  Subframe origin_time = 0;
};

// Returns an empty list when width exceeds the layout.
std::vector<Csr> enumerate_csrs(const ChannelLayout& layout, Subframe window_start,
                                Subframe window_end, int width);

struct TbSizeEntry {
  int payload_bytes = 0;
  int mcs = 0;
  int data_rbs = 0;
};

class TbSizeTable {
 public:
  TbSizeTable() = default;
  explicit TbSizeTable(std::vector<TbSizeEntry> entries);

  static TbSizeTable defaults();

  bool contains(int payload_bytes, int mcs) const;
  int data_rbs(int payload_bytes, int mcs) const;
  const std::vector<TbSizeEntry>& entries() const { return entries_; }

 private:
  std::vector<TbSizeEntry> entries_;
  std::map<std::pair<int, int>, int> index_;
};

// Total RBs for one transmission, SCI RBs included.
int rb_count_for(int payload_bytes, int mcs, const ChannelLayout& layout, const TbSizeTable& table);

// Subchannels spanned by a transmission of rb_count RBs.
int csr_width_for(int rb_count, const ChannelLayout& layout);

}  // namespace cv2x
