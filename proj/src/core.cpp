#include "cv2x/core.hpp"

namespace cv2x {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t master_seed, std::string_view stream_id) {
  return splitmix64(splitmix64(master_seed) ^ fnv1a(stream_id));
}

RngStream::RngStream(std::uint64_t master_seed, std::string stream_id)
    : id_(std::move(stream_id)), engine_(stream_seed(master_seed, id_)) {}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  CV2X_EXPECTS(lo <= hi);
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
}

double RngStream::uniform01() { return unit_(engine_); }

double RngStream::normal(double mean, double stddev) {
  return mean + stddev * normal_(engine_);
}

double RngStream::exponential(double mean) {
  CV2X_EXPECTS(mean > 0.0);
  return std::exponential_distribution<double>(1.0 / mean)(engine_);
}

std::int64_t draw_uniform_int(RngStream& stream, std::int64_t lo, std::int64_t hi) {
  return stream.uniform_int(lo, hi);
}

void SubframeLoop::set(Phase phase, Hook hook) {
  hooks_[static_cast<std::size_t>(phase)] = std::move(hook);
}

Subframe SubframeLoop::advance() {
  const Subframe t = clock_.now();
  for (Phase p : kPhaseOrder) {
    auto& hook = hooks_[static_cast<std::size_t>(p)];
    if (hook) hook(t);
  }
  return clock_.advance();
}

}  // namespace cv2x
