#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "nvrabi/sequence.hpp"
#include "nvrabi/units.hpp"

using namespace nvrabi;

namespace {

std::vector<double> grid(double t0, double t1, double dt) {
  std::vector<double> t;
  for (double x = t0; x <= t1 * (1.0 + 1e-12); x += dt) t.push_back(x);
  return t;
}

double dft_amplitude(const std::vector<double>& x, double fs, double f) {
  std::complex<double> acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    acc += x[k] * std::exp(std::complex<double>(
                      0.0, -kTwoPi * f * static_cast<double>(k) / fs));
  return 2.0 * std::abs(acc) / static_cast<double>(x.size());
}

}  // namespace

TEST_CASE("subtracted_signal endpoints and exact amplitude ratio") {
  CHECK(subtracted_signal(0.0, Protocol::PiPulse, 1.0) == -1.0);
  CHECK(subtracted_signal(0.5, Protocol::PiPulse, 1.0) == 0.0);
  CHECK(subtracted_signal(1.0, Protocol::OnOff, 1.0) == -1.0);

  // peak-to-peak over the population grid; the pi protocol doubles the swing
  double pi_lo = 1e9, pi_hi = -1e9, oo_lo = 1e9, oo_hi = -1e9;
  for (int i = 0; i <= 1000; ++i) {
    const double p = i / 1000.0;
    const double spi = subtracted_signal(p, Protocol::PiPulse, 1.0);
    const double soo = subtracted_signal(p, Protocol::OnOff, 1.0);
    pi_lo = std::min(pi_lo, spi);
    pi_hi = std::max(pi_hi, spi);
    oo_lo = std::min(oo_lo, soo);
    oo_hi = std::max(oo_hi, soo);
  }
  CHECK(std::fabs((pi_hi - pi_lo) / (oo_hi - oo_lo) - 2.0) < 1e-9);
}

TEST_CASE("sequence validation ties data_rate to sequence_rate/2") {
  SequenceParams s;
  CHECK_NOTHROW(s.validate());
  s.data_rate = s.sequence_rate;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  SequenceParams t;
  t.mw_duration = 0.0;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("render_time_series sample count and constant input") {
  EnsembleParams ens;
  SequenceParams seq;
  HyperfineModel hf;
  const double w0 = kTwoPi * 42.8e3;
  const auto ts = render_time_series([=](double) { return w0; }, ens, seq, hf,
                                     1.0, 5, 2000);
  CHECK(ts.samples.size() == 6615);
  CHECK(ts.sample_rate == seq.data_rate);
  for (double v : ts.samples) CHECK(v == ts.samples.front());
}

TEST_CASE("render_time_series is deterministic and rejects negative drive") {
  EnsembleParams ens;
  SequenceParams seq;
  HyperfineModel hf;
  auto f = [](double t) { return kTwoPi * 42.8e3 * (1.0 + 0.01 * std::sin(kTwoPi * 25.0 * t)); };
  const auto a = render_time_series(f, ens, seq, hf, 0.2, 5, 1000);
  const auto b = render_time_series(f, ens, seq, hf, 0.2, 5, 1000);
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    CHECK(a.samples[i] == b.samples[i]);
  CHECK_THROWS_AS(render_time_series([](double) { return -1.0; }, ens, seq, hf,
                                     0.01, 5, 100),
                  std::domain_error);
}

TEST_CASE("25 Hz drive modulation shows up as the dominant DFT tone") {
  EnsembleParams ens;
  SequenceParams seq;
  HyperfineModel hf;
  const double w0 = kTwoPi * 40e3;
  auto f = [=](double t) {
    return w0 + kTwoPi * 300.0 * std::sin(kTwoPi * 25.0 * t);
  };
  const auto ts = render_time_series(f, ens, seq, hf, 1.0, 5, 2000);
  double mean = 0.0;
  for (double v : ts.samples) mean += v;
  mean /= static_cast<double>(ts.samples.size());
  std::vector<double> centered(ts.samples);
  for (auto& v : centered) v -= mean;
  const double at25 = dft_amplitude(centered, ts.sample_rate, 25.0);
  for (double f_other : {7.0, 60.0, 110.0, 500.0})
    CHECK(at25 > 5.0 * dft_amplitude(centered, ts.sample_rate, f_other));
}

TEST_CASE("hyperfine suppression metric") {
  EnsembleParams ens;
  HyperfineModel hf;
  hf.beat_frequency = 40.14e3;
  hf.modulation_depth = 0.3;
  hf.hf_detuning = kTwoPi * 3e6;
  const auto taus = grid(0.5e-6, 150e-6, 0.5e-6);
  const double w0 = kTwoPi * 220e3;
  const auto onoff = subtracted_rabi_trace(ens, w0, taus, hf, Protocol::OnOff,
                                           1.0, 4000, 9);
  const auto pi = subtracted_rabi_trace(ens, w0, taus, hf, Protocol::PiPulse,
                                        1.0, 4000, 9);
  const double ratio =
      hyperfine_suppression_metric(onoff, pi, hf.beat_frequency);
  CHECK(ratio < 0.1);

  // identical traces give exactly 1
  CHECK(hyperfine_suppression_metric(onoff, onoff, hf.beat_frequency) ==
        doctest::Approx(1.0));

  // nothing to suppress when the model is off: both residuals at the floor
  HyperfineModel off;
  off.beat_frequency = 40.14e3;
  const auto a = subtracted_rabi_trace(ens, w0, taus, off, Protocol::OnOff,
                                       1.0, 4000, 9);
  const auto b = subtracted_rabi_trace(ens, w0, taus, off, Protocol::PiPulse,
                                       1.0, 4000, 9);
  const double r0 = hyperfine_suppression_metric(a, b, off.beat_frequency);
  CHECK(r0 > 0.01);
  CHECK(r0 < 100.0);
}
