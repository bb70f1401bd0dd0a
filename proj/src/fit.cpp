#include "nvrabi/fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace nvrabi {

namespace {

constexpr double kPLo = 0.5;
constexpr double kPHi = 3.0;

double sigmoid(double q) { return 1.0 / (1.0 + std::exp(-q)); }
double p_of_q(double q) { return kPLo + (kPHi - kPLo) * sigmoid(q); }
double q_of_p(double p) {
  const double f = std::clamp((p - kPLo) / (kPHi - kPLo), 1e-6, 1.0 - 1e-6);
  return std::log(f / (1.0 - f));
}

struct Params {
  double offset, ln_amp, ln_decay, q, omega, phase;
};

// residual r_i = model_i - y_i and the 6 columns of the Jacobian
void eval(const Params& x, std::span<const double> t, std::span<const double> y,
          bool pin_p, std::vector<double>& r, std::vector<std::array<double, 6>>& jac) {
  const double amp = std::exp(x.ln_amp);
  const double decay = std::exp(x.ln_decay);
  const double p = p_of_q(x.q);
  const double dp_dq = (kPHi - kPLo) * sigmoid(x.q) * (1.0 - sigmoid(x.q));
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double u = t[i] / decay;
    const double up = u > 0.0 ? std::pow(u, p) : 0.0;
    const double env = std::exp(-up);
    const double c = std::cos(x.omega * t[i] + x.phase);
    const double s = std::sin(x.omega * t[i] + x.phase);
    r[i] = x.offset - amp * env * c - y[i];
    auto& j = jac[i];
    j[0] = 1.0;
    j[1] = -amp * env * c;
    j[2] = -amp * env * c * p * up;
    j[3] = pin_p || u <= 0.0 ? 0.0 : amp * env * c * up * std::log(u) * dp_dq;
    j[4] = amp * env * s * t[i];
    j[5] = amp * env * s;
  }
}

double cost_of(const std::vector<double>& r) {
  double c = 0.0;
  for (double v : r) c += v * v;
  return c;
}

// Cholesky solve of the 6x6 normal equations; returns false if not SPD.
bool solve6(std::array<std::array<double, 6>, 6> a, std::array<double, 6>& b) {
  for (int k = 0; k < 6; ++k) {
    double d = a[k][k];
    for (int j = 0; j < k; ++j) d -= a[k][j] * a[k][j];
    if (d <= 0.0) return false;
    a[k][k] = std::sqrt(d);
    for (int i = k + 1; i < 6; ++i) {
      double v = a[i][k];
      for (int j = 0; j < k; ++j) v -= a[i][j] * a[k][j];
      a[i][k] = v / a[k][k];
    }
  }
  for (int i = 0; i < 6; ++i) {
    double v = b[i];
    for (int j = 0; j < i; ++j) v -= a[i][j] * b[j];
    b[i] = v / a[i][i];
  }
  for (int i = 5; i >= 0; --i) {
    double v = b[i];
    for (int j = i + 1; j < 6; ++j) v -= a[j][i] * b[j];
    b[i] = v / a[i][i];
  }
  return true;
}

// amplitude of the mean-removed data correlated against e^{-i w t}
std::complex<double> tone(std::span<const double> t, std::span<const double> y,
                          double mean, double omega) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < t.size(); ++i)
    acc += (y[i] - mean) * std::exp(std::complex<double>(0.0, -omega * t[i]));
  return acc * (2.0 / static_cast<double>(t.size()));
}

}  // namespace

DampedCosineFit fit_damped_cosine(std::span<const double> t,
                                  std::span<const double> y,
                                  const DampedCosineOptions& opt) {
  if (t.size() != y.size())
    throw std::invalid_argument("fit_damped_cosine: length mismatch");
  DampedCosineFit out;
  const std::size_t n = t.size();
  if (n < 8) {
    out.degenerate = true;
    return out;
  }
  const double span = t.back() - t.front();
  if (span <= 0.0) throw std::invalid_argument("fit_damped_cosine: bad grid");

  double mean = 0.0, ymin = y[0], ymax = y[0];
  for (std::size_t i = 0; i < n; ++i) {
    mean += y[i];
    ymin = std::min(ymin, y[i]);
    ymax = std::max(ymax, y[i]);
  }
  mean /= static_cast<double>(n);

  // frequency scan at half-bin resolution up to the grid Nyquist
  const double dw = M_PI / span;
  const std::size_t nfreq = n;  // covers ~Nyquist of a uniform grid
  double best_amp = 0.0, w0 = 0.0;
  std::size_t best_j = 0;
  std::vector<double> scan(nfreq + 1, 0.0);
  for (std::size_t j = 1; j <= nfreq; ++j) {
    scan[j] = std::abs(tone(t, y, mean, dw * static_cast<double>(j)));
    if (scan[j] > best_amp) {
      best_amp = scan[j];
      best_j = j;
    }
  }
  const double yscale = std::max(std::abs(ymax), std::abs(ymin));
  if (best_amp < 1e-12 * std::max(yscale, 1e-300) || best_j == 0) {
    out.degenerate = true;
    out.offset = mean;
    return out;
  }
  w0 = dw * static_cast<double>(best_j);
  if (best_j > 1 && best_j < nfreq) {  // parabolic peak refinement
    const double a = scan[best_j - 1], b = scan[best_j], c = scan[best_j + 1];
    const double den = a - 2.0 * b + c;
    if (std::abs(den) > 0.0) w0 += dw * 0.5 * (a - c) / den;
  }
  if (span * w0 < 3.0 * 2.0 * M_PI) {
    // fewer than three oscillation periods in the record
    out.degenerate = true;
    out.offset = mean;
    return out;
  }

  // phase and amplitude from the quadrature at w0; model AC part is
  // -A*env*cos(w t + phi)
  const std::complex<double> c0 = tone(t, y, mean, w0);
  const double phi0 = std::atan2(-c0.imag(), -c0.real());
  double amp0 = std::max(0.5 * (ymax - ymin), std::abs(c0));

  // crude envelope regression for the decay-time seed
  const int nwin = 12;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int nreg = 0;
  for (int wdx = 0; wdx < nwin; ++wdx) {
    const double lo = t.front() + span * wdx / nwin;
    const double hi = t.front() + span * (wdx + 1) / nwin;
    double wmin = std::numeric_limits<double>::max(), wmax = -wmin, tc = 0;
    int cnt = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (t[i] < lo || t[i] >= hi) continue;
      wmin = std::min(wmin, y[i]);
      wmax = std::max(wmax, y[i]);
      tc += t[i];
      ++cnt;
    }
    if (cnt < 4) continue;
    const double a = 0.5 * (wmax - wmin);
    if (a < 1e-3 * amp0) continue;
    tc /= cnt;
    sx += tc;
    sy += std::log(a);
    sxx += tc * tc;
    sxy += tc * std::log(a);
    ++nreg;
  }
  double decay0 = 2.0 * span;
  if (nreg >= 3) {
    const double slope = (nreg * sxy - sx * sy) / (nreg * sxx - sx * sx);
    if (slope < -1e-12) decay0 = -1.0 / slope;
  }
  decay0 = std::clamp(decay0, span / 30.0, 1e4 * span);

  Params x{mean, std::log(amp0), std::log(decay0), q_of_p(opt.stretch_init),
           w0, phi0};
  const bool pin_p = opt.pin_stretch;

  std::vector<double> r(n);
  std::vector<std::array<double, 6>> jac(n);
  eval(x, t, y, pin_p, r, jac);
  double cost = cost_of(r);
  const double cost0 = cost;
  double lambda = 1e-3;
  int stall = 0;
  bool improved_overall = false;

  for (int it = 0; it < opt.max_iterations; ++it) {
    std::array<std::array<double, 6>, 6> jtj{};
    std::array<double, 6> jtr{};
    for (std::size_t i = 0; i < n; ++i) {
      for (int a = 0; a < 6; ++a) {
        jtr[a] += jac[i][a] * r[i];
        for (int b = 0; b <= a; ++b) jtj[a][b] += jac[i][a] * jac[i][b];
      }
    }
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b) jtj[a][b] = jtj[b][a];
    if (pin_p) {  // freeze the stretch parameter
      for (int a = 0; a < 6; ++a) jtj[3][a] = jtj[a][3] = 0.0;
      jtj[3][3] = 1.0;
      jtr[3] = 0.0;
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
      auto damped = jtj;
      for (int a = 0; a < 6; ++a)
        damped[a][a] += lambda * std::max(jtj[a][a], 1e-30);
      std::array<double, 6> step = jtr;
      if (solve6(damped, step)) {
        Params trial{x.offset - step[0], x.ln_amp - step[1],
                     x.ln_decay - step[2], x.q - step[3], x.omega - step[4],
                     x.phase - step[5]};
        trial.ln_decay = std::clamp(trial.ln_decay, std::log(span / 100.0),
                                    std::log(1e6 * span));
        eval(trial, t, y, pin_p, r, jac);
        const double trial_cost = cost_of(r);
        if (trial_cost <= cost) {
          const double rel = (cost - trial_cost) / std::max(cost, 1e-300);
          x = trial;
          cost = trial_cost;
          lambda = std::max(lambda * 0.3, 1e-12);
          stepped = true;
          improved_overall = true;
          stall = rel < 1e-14 ? stall + 1 : 0;
        } else {
          lambda *= 8.0;
        }
      } else {
        lambda *= 8.0;
      }
    }
    if (!stepped) {
      ++stall;
      eval(x, t, y, pin_p, r, jac);
    }
    if (stall >= 3) break;
  }

  eval(x, t, y, pin_p, r, jac);
  out.offset = x.offset;
  out.amplitude = std::exp(x.ln_amp);
  out.decay_time = std::exp(x.ln_decay);
  out.stretch = p_of_q(x.q);
  if (pin_p) out.stretch = opt.stretch_init;
  out.omega = x.omega;
  out.phase = x.phase;
  out.residual_rms = std::sqrt(cost_of(r) / static_cast<double>(n));
  out.converged = improved_overall || cost <= cost0;
  return out;
}

}  // namespace nvrabi
