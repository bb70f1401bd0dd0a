#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "nvrabi/fit.hpp"
#include "nvrabi/rng.hpp"
#include "nvrabi/units.hpp"

using namespace nvrabi;

namespace {

std::vector<double> model(const std::vector<double>& t, double b, double a,
                          double tt, double p, double w, double phi) {
  std::vector<double> y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    y[i] = b - a * std::exp(-std::pow(t[i] / tt, p)) * std::cos(w * t[i] + phi);
  return y;
}

std::vector<double> grid(double t0, double t1, double dt) {
  std::vector<double> t;
  for (double x = t0; x <= t1 * (1.0 + 1e-12); x += dt) t.push_back(x);
  return t;
}

}  // namespace

TEST_CASE("noiseless round trip recovers parameters within 0.1%") {
  const auto t = grid(0.5e-6, 150e-6, 0.5e-6);
  const double b = 0.98, a = 0.02, tt = 40e-6, p = 1.3, w = kTwoPi * 100e3,
               phi = 0.2;
  const auto y = model(t, b, a, tt, p, w, phi);
  const DampedCosineFit f = fit_damped_cosine(t, y);
  REQUIRE(f.converged);
  CHECK(!f.degenerate);
  CHECK(f.offset == doctest::Approx(b).epsilon(1e-3));
  CHECK(f.amplitude == doctest::Approx(a).epsilon(1e-3));
  CHECK(f.decay_time == doctest::Approx(tt).epsilon(1e-3));
  CHECK(f.stretch == doctest::Approx(p).epsilon(1e-3));
  CHECK(f.omega == doctest::Approx(w).epsilon(1e-3));
  CHECK(f.phase == doctest::Approx(phi).epsilon(1e-3));
  CHECK(f.residual_rms < 1e-9);
}

TEST_CASE("round trip across randomized parameter draws") {
  Rng rng(5);
  for (int k = 0; k < 10; ++k) {
    const double a = 0.005 + 0.03 * rng.uniform();
    const double tt = (20.0 + 80.0 * rng.uniform()) * 1e-6;
    const double p = 0.8 + 1.5 * rng.uniform();
    const double w = kTwoPi * (30e3 + 170e3 * rng.uniform());
    const double phi = 0.8 * (rng.uniform() - 0.5);
    const auto t = grid(0.5e-6, 150e-6, 0.5e-6);
    const auto y = model(t, 1.0, a, tt, p, w, phi);
    const DampedCosineFit f = fit_damped_cosine(t, y);
    REQUIRE(f.converged);
    CHECK(f.amplitude == doctest::Approx(a).epsilon(1e-3));
    CHECK(f.decay_time == doctest::Approx(tt).epsilon(1e-3));
    CHECK(f.stretch == doctest::Approx(p).epsilon(1e-3));
    CHECK(f.omega == doctest::Approx(w).epsilon(1e-3));
  }
}

TEST_CASE("constant trace is flagged degenerate, not silent garbage") {
  const auto t = grid(0.5e-6, 100e-6, 0.5e-6);
  std::vector<double> y(t.size(), 0.97);
  const DampedCosineFit f = fit_damped_cosine(t, y);
  CHECK(f.degenerate);
  CHECK(std::fabs(f.amplitude) < 1e-6);
}

TEST_CASE("too-short input is degenerate") {
  std::vector<double> t = {1e-6, 2e-6, 3e-6};
  std::vector<double> y = {0.1, 0.2, 0.1};
  CHECK(fit_damped_cosine(t, y).degenerate);
}

TEST_CASE("pinned stretch holds p fixed") {
  const auto t = grid(0.5e-6, 150e-6, 0.5e-6);
  const auto y = model(t, 1.0, 0.02, 50e-6, 1.0, kTwoPi * 80e3, 0.0);
  DampedCosineOptions opt;
  opt.pin_stretch = true;
  opt.stretch_init = 1.0;
  const DampedCosineFit f = fit_damped_cosine(t, y, opt);
  REQUIRE(f.converged);
  CHECK(f.stretch == 1.0);
  CHECK(f.decay_time == doctest::Approx(50e-6).epsilon(1e-3));
}

TEST_CASE("mild additive noise keeps estimates close") {
  Rng rng(9);
  const auto t = grid(0.5e-6, 150e-6, 0.5e-6);
  auto y = model(t, 1.0, 0.02, 40e-6, 1.2, kTwoPi * 120e3, 0.1);
  for (auto& v : y) v += 2e-5 * rng.gaussian();
  const DampedCosineFit f = fit_damped_cosine(t, y);
  REQUIRE(f.converged);
  CHECK(f.amplitude == doctest::Approx(0.02).epsilon(0.02));
  CHECK(f.decay_time == doctest::Approx(40e-6).epsilon(0.05));
  CHECK(f.omega == doctest::Approx(kTwoPi * 120e3).epsilon(1e-3));
}
