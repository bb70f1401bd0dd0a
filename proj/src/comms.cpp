#include "nvrabi/comms.hpp"

#include <cmath>
#include <complex>
#include <iostream>
#include <stdexcept>

#include "nvrabi/rng.hpp"
#include "nvrabi/units.hpp"

namespace nvrabi {

void ModulationSpec::validate() const {
  if (signal_amplitude < 0.0)
    throw std::invalid_argument("modulation.signal_amplitude must be >= 0");
  if (kind == ModulationKind::AmSine) {
    if (depth < 0.0 || depth > 1.0)
      throw std::invalid_argument("modulation.depth must be in [0, 1]");
    if (mod_frequency <= 0.0)
      throw std::invalid_argument("modulation.mod_frequency must be > 0");
  }
  if (kind == ModulationKind::PmSquare) {
    if (std::fabs(phase_deviation) > kTwoPi / 2.0)
      throw std::invalid_argument("modulation.phase_deviation must be within [-pi, pi]");
    if (mod_frequency <= 0.0)
      throw std::invalid_argument("modulation.mod_frequency must be > 0");
  }
  if (kind == ModulationKind::Bpsk) {
    if (std::fabs(phase_deviation) > kTwoPi / 2.0)
      throw std::invalid_argument("modulation.phase_deviation must be within [-pi, pi]");
    if (bit_rate <= 0.0)
      throw std::invalid_argument("modulation.bit_rate must be > 0");
    if (bitstream.empty())
      throw std::invalid_argument("modulation.bitstream must be non-empty");
    for (int b : bitstream)
      if (b != 0 && b != 1)
        throw std::invalid_argument("modulation.bitstream entries must be 0 or 1");
  }
}

std::function<double(double)> synthesize_omega(const ModulationSpec& spec,
                                               double drive_field,
                                               double gamma) {
  spec.validate();
  if (drive_field <= 0.0)
    throw std::invalid_argument("drive_field must be > 0");
  if (spec.signal_amplitude > drive_field)
    throw std::invalid_argument("signal amplitude exceeds the drive field");
  if (spec.signal_amplitude > 0.1 * drive_field)
    std::cerr << "warning: signal amplitude exceeds 10% of the drive field; "
                 "small-signal demodulation calibration degrades\n";

  switch (spec.kind) {
    case ModulationKind::AmSine: {
      const double db = spec.signal_amplitude;
      const double m = spec.depth;
      const double fm = spec.mod_frequency;
      return [=](double t) {
        FieldVector f;
        f.drive_amplitude = drive_field;
        f.signal_amplitude = 0.5 * db * (1.0 + m * std::sin(kTwoPi * fm * t));
        f.relative_phase = 0.0;
        return effective_rabi(f, gamma);
      };
    }
    case ModulationKind::PmSquare: {
      const double db = spec.signal_amplitude;
      const double dev = spec.phase_deviation;
      const double fm = spec.mod_frequency;
      return [=](double t) {
        const double frac = t * fm - std::floor(t * fm);
        FieldVector f;
        f.drive_amplitude = drive_field;
        f.signal_amplitude = db;
        f.relative_phase = frac < 0.5 ? 0.0 : dev;
        return effective_rabi(f, gamma);
      };
    }
    case ModulationKind::Bpsk: {
      const double db = spec.signal_amplitude;
      const double dev = spec.phase_deviation;
      const double rate = spec.bit_rate;
      const std::vector<int> bits = spec.bitstream;
      return [=](double t) {
        auto idx = static_cast<long long>(std::floor(t * rate));
        if (idx < 0) idx = 0;
        if (idx >= static_cast<long long>(bits.size()))
          idx = static_cast<long long>(bits.size()) - 1;
        FieldVector f;
        f.drive_amplitude = drive_field;
        f.signal_amplitude = db;
        f.relative_phase = bits[static_cast<std::size_t>(idx)] ? dev : 0.0;
        return effective_rabi(f, gamma);
      };
    }
  }
  throw std::logic_error("unreachable");
}

double demod_am(const TimeSeries& series, double mod_frequency, double slope,
                double gamma) {
  const std::size_t n = series.samples.size();
  if (n < 2) throw std::invalid_argument("series too short to demodulate");
  if (slope == 0.0) throw std::invalid_argument("slope must be nonzero");
  const double duration = static_cast<double>(n) / series.sample_rate;
  if (mod_frequency < 2.0 / duration ||
      mod_frequency >= 0.5 * series.sample_rate)
    throw std::invalid_argument("mod_frequency outside the resolvable band");

  double mean = 0.0;
  for (double v : series.samples) mean += v;
  mean /= static_cast<double>(n);

  std::complex<double> acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = series.start_time + static_cast<double>(k) / series.sample_rate;
    acc += (series.samples[k] - mean) *
           std::exp(std::complex<double>(0.0, -kTwoPi * mod_frequency * t));
  }
  const double tone_signal = 2.0 * std::abs(acc) / static_cast<double>(n);
  const double tone_omega = tone_signal / std::fabs(slope);
  return tone_omega * kSqrt3 / gamma;
}

BpskResult demod_bpsk(const TimeSeries& series, double bit_rate,
                      const BpskCalibration& cal,
                      const std::vector<int>* truth) {
  if (!cal.clock_synchronized)
    throw std::runtime_error(
        "unsupported mode: BPSK demodulation requires a synchronized bit "
        "clock (no timing recovery implemented)");
  if (bit_rate <= 0.0 || bit_rate > series.sample_rate / 10.0)
    throw std::invalid_argument("bit_rate must be in (0, sample_rate/10]");
  if (cal.level_one == cal.level_zero)
    throw std::invalid_argument("calibration levels must differ");

  const double threshold = 0.5 * (cal.level_zero + cal.level_one);
  const bool one_is_high = cal.level_one > cal.level_zero;
  const std::size_t n = series.samples.size();
  const auto n_bits = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) / series.sample_rate * bit_rate +
                 1e-9));

  BpskResult out;
  out.bits.reserve(n_bits);
  const double samples_per_bit = series.sample_rate / bit_rate;
  for (std::size_t b = 0; b < n_bits; ++b) {
    const auto lo = static_cast<std::size_t>(
        std::ceil(static_cast<double>(b) * samples_per_bit - 1e-9));
    auto hi = static_cast<std::size_t>(
        std::ceil(static_cast<double>(b + 1) * samples_per_bit - 1e-9));
    if (hi > n) hi = n;
    if (lo >= hi) break;
    double acc = 0.0;
    for (std::size_t k = lo; k < hi; ++k) acc += series.samples[k];
    acc /= static_cast<double>(hi - lo);
    const bool high = acc > threshold;
    out.bits.push_back(high == one_is_high ? 1 : 0);
  }

  if (truth != nullptr) {
    const std::size_t m = std::min(truth->size(), out.bits.size());
    if (m == 0) throw std::invalid_argument("empty truth bitstream");
    std::size_t errors = truth->size() > out.bits.size()
                             ? truth->size() - out.bits.size()
                             : 0;
    for (std::size_t i = 0; i < m; ++i)
      if ((*truth)[i] != out.bits[i]) ++errors;
    out.errors = errors;
    out.ber = static_cast<double>(errors) / static_cast<double>(truth->size());
  }
  return out;
}

std::vector<int> random_bitstream(std::size_t n_bits, std::uint64_t seed) {
  std::vector<int> bits(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i) {
    Rng rng(seed, rng_tag::kBitstream, i);
    bits[i] = static_cast<int>(rng.next_u64() & 1ull);
  }
  return bits;
}

}  // namespace nvrabi
