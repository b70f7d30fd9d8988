#include "cv2x/resources.hpp"

#include <iostream>

namespace cv2x {

void validate_layout(const ChannelLayout& layout) {
  if (layout.bandwidth_mhz != 10 && layout.bandwidth_mhz != 20)
    throw ConfigError("layout.bandwidth_mhz", "must be 10 or 20");
  if (layout.num_subchannels < 1)
    throw ConfigError("layout.num_subchannels", "must be positive");
  if (layout.rbs_per_subchannel < 1)
    throw ConfigError("layout.rbs_per_subchannel", "must be positive");
  if (layout.adjacency != Adjacency::adjacent)
    throw ConfigError("layout.adjacency", "only adjacent PSCCH+PSSCH is supported");
  if (layout.sci_rb_count != 2) throw ConfigError("layout.sci_rb_count", "must be 2");
  if (layout.rbs_per_subchannel <= layout.sci_rb_count)
    throw ConfigError("layout.rbs_per_subchannel", "must exceed sci_rb_count");
  if (layout.num_subchannels * layout.rbs_per_subchannel > layout.total_rbs())
    throw ConfigError("layout.num_subchannels",
                      "num_subchannels x rbs_per_subchannel exceeds the channel's RBs");
}

std::vector<Csr> enumerate_csrs(const ChannelLayout& layout, Subframe window_start,
                                Subframe window_end, int width) {
  CV2X_EXPECTS(window_start <= window_end);
  std::vector<Csr> out;
  if (width < 1 || width > layout.num_subchannels) {
    std::cerr << "enumerate_csrs: width " << width << " does not fit "
              << layout.num_subchannels << " subchannels\n";
    return out;
  }
  const int offsets = layout.num_subchannels - width + 1;
  out.reserve(static_cast<std::size_t>((window_end - window_start + 1) * offsets));
  for (Subframe t = window_start; t <= window_end; ++t)
    for (int sc = 0; sc < offsets; ++sc) out.push_back(Csr{{t, sc}, width});
  return out;
}

TbSizeTable::TbSizeTable(std::vector<TbSizeEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    const std::string field = "tb_size_table[" + std::to_string(i) + "]";
    if (e.payload_bytes <= 0) throw ConfigError(field + ".payload_bytes", "must be positive");
    if (e.data_rbs <= 0) throw ConfigError(field + ".data_rbs", "must be positive");
    if (!index_.emplace(std::pair{e.payload_bytes, e.mcs}, e.data_rbs).second)
      throw ConfigError(field, "duplicate (payload_bytes, mcs) entry");
  }
}

TbSizeTable TbSizeTable::defaults() {
  return TbSizeTable({{190, 6, 14}, {190, 7, 12}, {190, 9, 10}});
}

bool TbSizeTable::contains(int payload_bytes, int mcs) const {
  return index_.count({payload_bytes, mcs}) != 0;
}

int TbSizeTable::data_rbs(int payload_bytes, int mcs) const {
  auto it = index_.find({payload_bytes, mcs});
  if (it == index_.end())
    throw ConfigError("tb_size_table", "no entry for payload " + std::to_string(payload_bytes) +
                                           " bytes at MCS " + std::to_string(mcs));
  return it->second;
}

int rb_count_for(int payload_bytes, int mcs, const ChannelLayout& layout,
                 const TbSizeTable& table) {
  if (payload_bytes <= 0) throw ConfigError("payload_bytes", "must be positive");
  const int total = table.data_rbs(payload_bytes, mcs) + layout.sci_rb_count;
  if (total > layout.num_subchannels * layout.rbs_per_subchannel)
    throw ConfigError("tb_size_table", "transmission of " + std::to_string(total) +
                                           " RBs does not fit the channel layout");
  return total;
}

int csr_width_for(int rb_count, const ChannelLayout& layout) {
  CV2X_EXPECTS(rb_count >= 1);
  return (rb_count + layout.rbs_per_subchannel - 1) / layout.rbs_per_subchannel;
}

}  // namespace cv2x
