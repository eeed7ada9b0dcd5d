// Rational-ratio polyphase resampler (Kaiser-windowed sinc lowpass).
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "enf/error.hpp"

namespace enf {

namespace resample_detail {

inline double bessel_i0(double x) {
  // series expansion, converged well below double precision for our betas
  double sum = 1.0, term = 1.0;
  const double hx = 0.5 * x;
  for (int k = 1; k < 64; ++k) {
    term *= (hx / k) * (hx / k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// Lowpass FIR at the upsampled rate L*fs_in: cutoff fc (Hz), Kaiser window.
inline std::vector<double> design_lowpass(std::int64_t upsampled_rate, double fc,
                                          double transition_hz, double atten_db) {
  const double pi = 3.141592653589793238462643383279502884;
  const double dw = 2.0 * pi * transition_hz / static_cast<double>(upsampled_rate);
  int half = static_cast<int>(std::ceil((atten_db - 8.0) / (2.285 * dw) / 2.0));
  if (half < 4) half = 4;
  const int taps = 2 * half + 1;
  double beta = 0.0;
  if (atten_db > 50.0)
    beta = 0.1102 * (atten_db - 8.7);
  else if (atten_db >= 21.0)
    beta = 0.5842 * std::pow(atten_db - 21.0, 0.4) + 0.07886 * (atten_db - 21.0);

  const double wc = 2.0 * pi * fc / static_cast<double>(upsampled_rate);
  const double i0b = bessel_i0(beta);
  std::vector<double> h(taps);
  for (int n = 0; n < taps; ++n) {
    const int m = n - half;
    const double sinc = (m == 0) ? wc / pi : std::sin(wc * m) / (pi * m);
    const double r = static_cast<double>(m) / half;
    const double win = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
    h[n] = sinc * win;
  }
  return h;
}

}  // namespace resample_detail

// Resamples x from in_rate to out_rate. Output length is floor(n*L/M) with
// L/M the reduced ratio, so exact-duration inputs map to exact durations.
inline std::vector<double> resample(const std::vector<double>& x, int in_rate, int out_rate) {
  require(in_rate > 0 && out_rate > 0, "resample: rates must be positive");
  if (in_rate == out_rate) return x;
  if (x.empty()) return {};

  const std::int64_t g = std::gcd(in_rate, out_rate);
  const std::int64_t L = out_rate / g;
  const std::int64_t M = in_rate / g;
  const std::int64_t up_rate = static_cast<std::int64_t>(in_rate) * L;

  const double fc = 0.45 * std::min(in_rate, out_rate);
  const double transition = 0.1 * std::min(in_rate, out_rate);
  std::vector<double> h = resample_detail::design_lowpass(up_rate, fc, transition, 70.0);
  const std::int64_t half = (static_cast<std::int64_t>(h.size()) - 1) / 2;

  const std::int64_t n_in = static_cast<std::int64_t>(x.size());
  const std::int64_t n_out = n_in * L / M;
  std::vector<double> y(static_cast<std::size_t>(n_out), 0.0);

  // y[t] taps the upsampled-and-filtered stream at position t*M; only every
  // L-th upsampled sample is nonzero, so walk input-side taps directly.
  for (std::int64_t t = 0; t < n_out; ++t) {
    const std::int64_t center = t * M;  // position at the upsampled rate
    const std::int64_t lo = center - half;
    const std::int64_t kmin = lo <= 0 ? 0 : (lo + L - 1) / L;
    std::int64_t kmax = (center + half) / L;
    if (kmax > n_in - 1) kmax = n_in - 1;
    double acc = 0.0;
    for (std::int64_t k = kmin; k <= kmax; ++k) {
      const std::int64_t tap = center - k * L + half;
      acc += x[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(tap)];
    }
    y[static_cast<std::size_t>(t)] = acc * static_cast<double>(L);
  }
  return y;
}

}  // namespace enf
