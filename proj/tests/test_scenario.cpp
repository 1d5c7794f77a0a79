// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <fstream>

#include "risleak/scenario.hpp"

using namespace risleak;

TEST_CASE("defaults match the reference parameter set") {
  ScenarioConfig cfg = parse_config("seed = 7\n", "test");
  CHECK(cfg.seed == 7);
  CHECK(cfg.ris_elements() == 100);
  CHECK(cfg.ap_antennas == 16);
  CHECK(cfg.wavelength_m == doctest::Approx(0.01));
  CHECK(cfg.tx_power_w == doctest::Approx(dbm_to_watts(12.0)));
  CHECK(cfg.noise_power_w == doctest::Approx(1e-11));
  CHECK(cfg.rician_k == doctest::Approx(10.0));
  CHECK(cfg.scatter_paths == 10);
  CHECK(cfg.test_points == 125);
  CHECK(cfg.ap_position == Eigen::Vector3d(0, 0, 10));
  CHECK(cfg.ris_position == Eigen::Vector3d(10, 34, 10));
  CHECK(cfg.ue_position == Eigen::Vector3d(16, 16, 0));
  CHECK(cfg.snr_divisor == doctest::Approx(1.5));
  // Friis constant at 10 mm wavelength.
  CHECK(cfg.reference_loss == doctest::Approx(6.3326e-7).epsilon(1e-3));
}

TEST_CASE("grid size follows nx * ny") {
  ScenarioConfig cfg = parse_config("ris_nx = 10\nris_ny = 10\n", "test");
  CHECK(cfg.ris_elements() == 100);
}

TEST_CASE("dBm keys convert to watts") {
  ScenarioConfig cfg = parse_config("tx_power_dbm = -3\n", "test");
  CHECK(cfg.tx_power_w == doctest::Approx(std::pow(10.0, -3.3)));
  CHECK(cfg.tx_power_w > 0);
}

TEST_CASE("config errors carry the key name") {
  CHECK_THROWS_WITH_AS(parse_config("bogus_key = 3\n", "test"),
                       doctest::Contains("bogus_key"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("tx_power_w = banana\n", "test"),
                       doctest::Contains("tx_power_w"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("snr_divisor = 1.0\n", "test"), std::invalid_argument);
  CHECK_THROWS_AS(load_config("/nonexistent/path.cfg"), std::invalid_argument);
}

TEST_CASE("dump/load round-trips the resolved config") {
  ScenarioConfig cfg = parse_config("seed = 9\nris_nx = 7\ntx_power_dbm = 3.7\n", "test");
  ScenarioConfig back = parse_config(dump_config(cfg), "roundtrip");
  CHECK(dump_config(back) == dump_config(cfg));
  CHECK(back.tx_power_w == cfg.tx_power_w);
  CHECK(back.seed == cfg.seed);
  CHECK(back.ris_nx == 7);
}

TEST_CASE("test point cloud satisfies counts, area and exclusion radius") {
  ScenarioConfig cfg;
  cfg.finalize();
  rng::Stream stream(5, rng::StreamTag::TestPoints, 0);
  const TestPointCloud cloud = sample_test_points(cfg, stream);
  REQUIRE(static_cast<int>(cloud.positions.size()) == 125);
  CHECK(cloud.positions[static_cast<std::size_t>(cloud.ue_index)] == cfg.ue_position);
  int leakage = 0;
  for (int i = 0; i < 125; ++i) {
    if (i == cloud.ue_index) continue;
    ++leakage;
    const auto& p = cloud.positions[static_cast<std::size_t>(i)];
    CHECK(p.z() == 0.0);
    CHECK(std::abs(p.x() - cfg.ue_position.x()) <= 15.0);
    CHECK(std::abs(p.y() - cfg.ue_position.y()) <= 15.0);
    CHECK((p - cfg.ue_position).norm() >= cfg.exclusion_radius_m);
  }
  CHECK(leakage == 124);
}

TEST_CASE("minimal cloud has exactly one leakage point") {
  ScenarioConfig cfg;
  cfg.test_points = 2;
  cfg.finalize();
  rng::Stream stream(5, rng::StreamTag::TestPoints, 0);
  const TestPointCloud cloud = sample_test_points(cfg, stream);
  CHECK(cloud.positions.size() == 2);
}

TEST_CASE("same seed gives identical clouds") {
  ScenarioConfig cfg;
  cfg.finalize();
  rng::Stream s1(11, rng::StreamTag::TestPoints, 4);
  rng::Stream s2(11, rng::StreamTag::TestPoints, 4);
  const TestPointCloud a = sample_test_points(cfg, s1);
  const TestPointCloud b = sample_test_points(cfg, s2);
  REQUIRE(a.positions.size() == b.positions.size());
  for (std::size_t i = 0; i < a.positions.size(); ++i) CHECK(a.positions[i] == b.positions[i]);
}

TEST_CASE("exclusion radius holds over many draws") {
  ScenarioConfig cfg;
  cfg.test_points = 5;
  cfg.finalize();
  double min_dist = 1e300;
  for (int trial = 0; trial < 2500; ++trial) {
    rng::Stream stream(17, rng::StreamTag::TestPoints, static_cast<std::uint64_t>(trial));
    const TestPointCloud cloud = sample_test_points(cfg, stream);
    for (int i = 0; i < static_cast<int>(cloud.positions.size()); ++i)
      if (i != cloud.ue_index)
        min_dist = std::min(min_dist,
                            (cloud.positions[static_cast<std::size_t>(i)] - cfg.ue_position).norm());
  }
  CHECK(min_dist >= cfg.exclusion_radius_m);
}

TEST_CASE("rejection sampling cap triggers when the area is too small") {
  ScenarioConfig cfg;
  cfg.area_side_x_m = 1.0;
  cfg.area_side_y_m = 1.0;
  cfg.exclusion_radius_m = 5.0;
  cfg.finalize();
  rng::Stream stream(5, rng::StreamTag::TestPoints, 0);
  CHECK_THROWS_AS(sample_test_points(cfg, stream), std::runtime_error);
}

TEST_CASE("overrides beat file values") {
  ScenarioConfig cfg = parse_config("trials = 10\n", "test");
  apply_override(cfg, "trials=25");
  CHECK(cfg.trials == 25);
  CHECK_THROWS_AS(apply_override(cfg, "nope=1"), std::invalid_argument);
}
