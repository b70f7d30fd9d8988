#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cv2x/mobility.hpp"
#include "cv2x/traffic.hpp"

namespace cv2x {
namespace {

MobilityConfig steady() {
  MobilityConfig m;
  m.jitter_bound_mps = 0;
  m.jitter_sigma_mps = 0;
  m.reversion_per_s = 0;
  return m;
}

std::vector<Subframe> arrivals(TrafficModel model, VehicleState v, const MobilityConfig& mob,
                               Subframe until, std::uint64_t seed = 1) {
  RoadGeometry road;
  RngStream traffic(seed, "traffic"), motion(seed, "mobility");
  TrafficGenerator gen(model, 0, traffic);
  std::vector<Subframe> out;
  for (Subframe t = 0; t < until; ++t) {
    mobility_step(v, 0.001, road, mob, motion);
    if (gen.next_packet(v, t, traffic)) out.push_back(t);
  }
  return out;
}

VehicleState cruising(double speed) {
  VehicleState v;
  v.speed_mps = v.target_speed_mps = speed;
  v.last_cam.speed_mps = speed;
  return v;
}

TEST(Traffic, PeriodicIsExactlyPeriodic) {
  TrafficModel m;
  const auto a = arrivals(m, cruising(20), steady(), 5000);
  ASSERT_GT(a.size(), 40u);
  EXPECT_LT(a.front(), 100);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_EQ(a[i] - a[i - 1], 100);
}

TEST(Traffic, ThreeGppInterArrivalStatistics) {
  TrafficModel m;
  m.kind = TrafficKind::threegpp;
  RngStream rng(12, "3gpp");
  constexpr int kDraws = 100000;
  double sum = 0;
  Subframe shortest = 1 << 30, last = 0;
  for (int i = 0; i < kDraws; ++i) {
    const Subframe next = threegpp_next_arrival(last, m, rng);
    sum += static_cast<double>(next - last);
    shortest = std::min(shortest, next - last);
    last = next;
  }
  EXPECT_NEAR(sum / kDraws, 100.0, 1.0);
  EXPECT_GE(shortest, 50);
}

TEST(Traffic, ThreeGppGeneratorFollowsSampler) {
  TrafficModel m;
  m.kind = TrafficKind::threegpp;
  const auto a = arrivals(m, cruising(20), steady(), 60000);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_GE(a[i] - a[i - 1], 50);
  const double mean = static_cast<double>(a.back() - a.front()) / static_cast<double>(a.size() - 1);
  EXPECT_NEAR(mean, 99.5, 4.0);
}

TEST(Traffic, EtsiPositionRuleAtSixteenMetresPerSecond) {
  TrafficModel m;
  m.kind = TrafficKind::etsi;
  const auto a = arrivals(m, cruising(16), steady(), 10000);
  ASSERT_GT(a.size(), 30u);
  EXPECT_LT(a.front(), 1000);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_EQ(a[i] - a[i - 1], 250);
}

TEST(Traffic, EtsiStationaryFallsBackToMaxGap) {
  TrafficModel m;
  m.kind = TrafficKind::etsi;
  const auto a = arrivals(m, cruising(0), steady(), 6000);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_EQ(a[i] - a[i - 1], 1000);
}

TEST(Traffic, EtsiHeadingChangeTriggers) {
  TrafficModel m;
  m.kind = TrafficKind::etsi;
  RngStream rng(1, "t");
  TrafficGenerator gen(m, 0, rng);
  VehicleState v = cruising(0);
  Subframe first = -1;
  for (Subframe t = 0; t < 1000 && first < 0; ++t)
    if (gen.next_packet(v, t, rng)) first = t;
  ASSERT_GE(first, 0);
  v.heading_deg = 3.0;
  EXPECT_FALSE(gen.next_packet(v, first + 1, rng));
  v.heading_deg = 5.0;
  EXPECT_TRUE(gen.next_packet(v, first + 2, rng));
  v.speed_mps = 0.6;
  EXPECT_TRUE(gen.next_packet(v, first + 3, rng));
}

TEST(Traffic, NamesRoundTrip) {
  for (auto k : {TrafficKind::periodic, TrafficKind::threegpp, TrafficKind::etsi,
                 TrafficKind::single_slot})
    EXPECT_EQ(traffic_kind_from(to_string(k)), k);
  EXPECT_THROW(traffic_kind_from("bursty"), std::invalid_argument);
}

TEST(Mobility, VehicleCountsFollowDensity) {
  RoadGeometry road;
  RngStream rng(1, "placement");
  EXPECT_EQ(place_vehicles(0.06, road, 30, rng).size(), 120u);
  EXPECT_EQ(place_vehicles(0.12, road, 30, rng).size(), 240u);
  EXPECT_EQ(place_vehicles(0.3, road, 30, rng).size(), 600u);
}

TEST(Mobility, PlacementIsOnTheRoad) {
  RoadGeometry road;
  RngStream rng(2, "placement");
  for (const auto& v : place_vehicles(0.2, road, 10, rng)) {
    EXPECT_GE(v.position_m, 0);
    EXPECT_LT(v.position_m, road.length_m);
    EXPECT_GE(v.lane, 0);
    EXPECT_LT(v.lane, road.lanes());
    EXPECT_EQ(v.direction() == 1, v.lane < road.lanes_per_direction);
  }
}

TEST(Mobility, SpeedCalibration) {
  EXPECT_NEAR(target_speed_mps(0.06), 4.0 / 0.122, 1e-9);
  EXPECT_NEAR(target_speed_mps(0.06), 32.8, 0.05);
  EXPECT_NEAR(target_speed_mps(0.3), 6.6, 0.05);
  EXPECT_NEAR(target_cam_interval_ms(0.12), 250.0, 1e-12);
  EXPECT_NEAR(target_cam_interval_ms(0.16), 317.0, 1e-9);
}

TEST(Mobility, JitterStaysBounded) {
  RoadGeometry road;
  MobilityConfig mob;
  RngStream rng(3, "m");
  VehicleState v = cruising(16);
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 200000; ++i) {
    mobility_step(v, 0.001, road, mob, rng);
    lo = std::min(lo, v.speed_mps);
    hi = std::max(hi, v.speed_mps);
    ASSERT_GE(v.position_m, 0);
    ASSERT_LT(v.position_m, road.length_m);
  }
  EXPECT_GE(lo, 16 - mob.jitter_bound_mps - 1e-12);
  EXPECT_LE(hi, 16 + mob.jitter_bound_mps + 1e-12);
  EXPECT_LT(lo, hi);
}

TEST(Mobility, RingDistance) {
  RoadGeometry road;
  VehicleState a, b;
  a.position_m = 10;
  b.position_m = 1990;
  EXPECT_NEAR(distance_m(a, b, road), 20.0, 1e-9);
  b.lane = 3;
  EXPECT_NEAR(distance_m(a, b, road), std::hypot(20.0, 12.0), 1e-9);
  EXPECT_NEAR(distance_m(a, b, road), distance_m(b, a, road), 1e-12);
  b.position_m = 1010;
  b.lane = 0;
  EXPECT_NEAR(distance_m(a, b, road), 1000.0, 1e-9);
}

}  // namespace
}  // namespace cv2x
