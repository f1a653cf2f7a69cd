#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "oamtherm/optics.hpp"

using namespace oamtherm;

TEST_CASE("calibration profiles") {
  SorterGeometry geom;
  auto calib = calibration_profiles(geom);

  SECTION("unit power and peak positions") {
    for (int ell = -15; ell <= 15; ++ell) {
      const auto& p = calib.profile(ell);
      CHECK(p.total() == Catch::Approx(1.0).margin(1e-12));
    }
    CHECK(calib.profile(0).argmax() == 40);
    // Peaks at 40 -/+ 2.5*15 = 2.5 and 77.5 straddle two equal bins;
    // argmax takes the first, so the mirror symmetry shows up in the
    // centroids instead.
    CHECK(calib.profile(-15).argmax() == 2);
    CHECK(calib.profile(15).argmax() == 77);
    auto centroid = [](const IntensityProfile& p) {
      double s = 0.0;
      for (std::size_t k = 0; k < p.bins.size(); ++k) s += k * p.bins[k];
      return s;
    };
    // Edge profiles lose some tail off-camera, which pulls the centroid
    // inward by up to ~0.45 pixels at ell = +/-15.
    for (int ell = -15; ell <= 15; ++ell)
      CHECK(std::abs(centroid(calib.profile(ell)) - geom.center(ell)) < 0.5);
  }
  SECTION("adjacent orders overlap considerably") {
    for (int ell = -15; ell < 15; ++ell) {
      const auto& a = calib.profile(ell);
      const auto& b = calib.profile(ell + 1);
      double overlap = 0.0;
      for (int k = 0; k < geom.pixels; ++k)
        overlap += std::min(a.bins[k], b.bins[k]);
      CHECK(overlap > 0.15);
    }
  }
  SECTION("translation covariance") {
    SorterGeometry narrow = geom;
    narrow.ell_range = LRange(-14, 14);  // keep shifted centers on-camera
    SorterGeometry moved = narrow;
    moved.center0 = 43.0;
    auto base = calibration_profiles(narrow);
    auto calib2 = calibration_profiles(moved);
    for (int ell = -14; ell <= 14; ++ell)
      CHECK(calib2.profile(ell).argmax() == base.profile(ell).argmax() + 3);
  }
  SECTION("centers outside the camera rejected") {
    SorterGeometry bad = geom;
    bad.slope = 4.0;  // ell = 15 lands at pixel 100
    CHECK_THROWS_AS(calibration_profiles(bad), std::invalid_argument);
  }
}

TEST_CASE("render output") {
  auto calib = calibration_profiles(SorterGeometry{});
  SECTION("single-mode weight reproduces the calibration profile") {
    auto out = render_output({{5, 1.0}}, calib);
    const auto& x = calib.profile(5);
    for (int k = 0; k < 80; ++k) CHECK(out.bins[k] == x.bins[k]);
  }
  SECTION("two-branch mixture gives a two-bump profile") {
    auto out = render_output({{-12, 0.5}, {-2, 0.5}}, calib);
    CHECK(out.total() == Catch::Approx(1.0).margin(1e-9));
    // Bumps near pixels 40 - 30 = 10 and 40 - 5 = 35.
    CHECK(out.bins[10] > 10.0 * out.bins[22]);
    CHECK(out.bins[35] > 10.0 * out.bins[22]);
  }
  SECTION("linearity in the weights") {
    std::map<int, double> w1{{-12, 0.5}, {-2, 0.5}};
    std::map<int, double> w2{{3, 1.0}};
    double alpha = 0.3;
    std::map<int, double> mix{{-12, alpha * 0.5}, {-2, alpha * 0.5},
                              {3, 1.0 - alpha}};
    auto lhs = render_output(mix, calib);
    auto a = render_output(w1, calib);
    auto b = render_output(w2, calib);
    for (int k = 0; k < 80; ++k)
      CHECK(lhs.bins[k] ==
            Catch::Approx(alpha * a.bins[k] + (1 - alpha) * b.bins[k])
                .margin(1e-12));
  }
  SECTION("errors") {
    CHECK_THROWS_AS(render_output({{20, 1.0}}, calib), std::out_of_range);
    CHECK_THROWS_AS(render_output({{0, 0.5}}, calib), std::invalid_argument);
  }
}

TEST_CASE("noise model") {
  auto calib = calibration_profiles(SorterGeometry{});
  auto clean = render_output({{0, 1.0}}, calib);

  SECTION("zero noise is the identity, bit-exact") {
    auto out = apply_noise(clean, NoiseModel{0.0, 0.0}, 9);
    for (int k = 0; k < 80; ++k) CHECK(out.bins[k] == clean.bins[k]);
  }
  SECTION("determinism under a fixed seed") {
    auto a = apply_noise(clean, NoiseModel{}, 31);
    auto b = apply_noise(clean, NoiseModel{}, 31);
    for (int k = 0; k < 80; ++k) CHECK(a.bins[k] == b.bins[k]);
  }
  SECTION("relative spread stays under 10% on bright bins") {
    const int reps = 10;
    double peak = *std::max_element(clean.bins.begin(), clean.bins.end());
    std::vector<std::vector<double>> copies;
    for (int r = 0; r < reps; ++r)
      copies.push_back(apply_noise(clean, NoiseModel{}, 1000 + r).bins);
    for (int k = 0; k < 80; ++k) {
      if (clean.bins[k] < 0.1 * peak) continue;
      double mean = 0.0, ss = 0.0;
      for (const auto& c : copies) mean += c[k];
      mean /= reps;
      for (const auto& c : copies) ss += (c[k] - mean) * (c[k] - mean);
      double rel = std::sqrt(ss / (reps - 1)) / mean;
      CHECK(rel <= 0.10);
    }
  }
  SECTION("noise is unbiased up to clamping") {
    const int reps = 1000;
    NoiseModel model;
    double peak = *std::max_element(clean.bins.begin(), clean.bins.end());
    std::vector<double> mean(80, 0.0);
    for (int r = 0; r < reps; ++r) {
      auto noisy = apply_noise(clean, model, 7000 + r);
      for (int k = 0; k < 80; ++k) mean[k] += noisy.bins[k];
    }
    for (int k = 0; k < 80; ++k) {
      mean[k] /= reps;
      double sigma = model.rel_std * clean.bins[k] + model.floor_frac * peak;
      double sem = sigma / std::sqrt(static_cast<double>(reps));
      // Clamping biases near-zero bins upward; allow for it there.
      double slack = clean.bins[k] < 3.0 * sigma ? sigma : 0.0;
      CHECK(std::abs(mean[k] - clean.bins[k]) <= 3.0 * sem + slack);
    }
  }
  SECTION("rel_std beyond the observed bound rejected") {
    CHECK_THROWS_AS(apply_noise(clean, NoiseModel{0.2, 0.0}, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("simulated observations") {
  auto calib = calibration_profiles(SorterGeometry{});
  SECTION("identity process with zero noise reproduces the calibration") {
    auto obs = simulate_observations(identity_kernel(LRange(-7, 7)), calib,
                                     NoiseModel{0.0, 0.0}, 5);
    for (int ell = -7; ell <= 7; ++ell) {
      const auto& x = calib.profile(ell);
      for (int k = 0; k < 80; ++k) CHECK(obs.at(ell).bins[k] == x.bins[k]);
    }
  }
  SECTION("split process puts bumps where the geometry says") {
    auto kernel = shift_superposition_kernel({{+5, 0.5}, {-5, 0.5}},
                                             LRange(-7, 7));
    auto obs = simulate_observations(kernel, calib, NoiseModel{0.0, 0.0}, 5);
    // Input ell = 3: branches at ell' = -2 (pixel 35) and ell' = 8 (pixel 60).
    const auto& y = obs.at(3);
    CHECK(y.argmax() == 35);
    CHECK(y.bins[60] > 10.0 * y.bins[47]);
  }
  SECTION("same seed gives identical observation sets") {
    auto kernel = shift_superposition_kernel({{+5, 0.5}, {-5, 0.5}},
                                             LRange(-7, 7));
    auto a = simulate_observations(kernel, calib, NoiseModel{}, 77);
    auto b = simulate_observations(kernel, calib, NoiseModel{}, 77);
    for (int ell = -7; ell <= 7; ++ell)
      for (int k = 0; k < 80; ++k)
        CHECK(a.at(ell).bins[k] == b.at(ell).bins[k]);
  }
  SECTION("kernel output outside calibration rejected") {
    auto wide = shift_superposition_kernel({{+9, 0.5}, {-9, 0.5}},
                                           LRange(-7, 7));
    CHECK_THROWS_AS(
        simulate_observations(wide, calib, NoiseModel{}, 1),
        std::out_of_range);
  }
}
