// Mixed-radix FFT with Bluestein fallback for lengths with large prime
// factors. A plan precomputes twiddles for one length and can be reused
// across many transforms (the STFT reuses one plan for every frame).
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "enf/error.hpp"

namespace enf {

using cplx = std::complex<double>;

namespace detail {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr std::size_t kMaxDirectRadix = 64;
}  // namespace detail

class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    require(n >= 1, "FFT size must be >= 1");
    std::size_t r = n;
    for (std::size_t p : {std::size_t{2}, std::size_t{3}, std::size_t{5},
                          std::size_t{7}, std::size_t{11}, std::size_t{13}}) {
      while (r % p == 0) {
        factors_.push_back(p);
        r /= p;
      }
    }
    if (r > 1) {
      if (r <= detail::kMaxDirectRadix) {
        factors_.push_back(r);
      } else {
        init_bluestein();
        return;
      }
    }
    twiddle_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const double a = -2.0 * detail::kPi * static_cast<double>(j) / static_cast<double>(n_);
      twiddle_[j] = {std::cos(a), std::sin(a)};
    }
  }

  std::size_t size() const { return n_; }

  void forward(const cplx* in, cplx* out) const {
    if (bluestein_) {
      bluestein_forward(in, out);
    } else {
      transform(in, 1, out, n_, 1, factors_.data());
    }
  }

  std::vector<cplx> forward(const std::vector<cplx>& x) const {
    require(x.size() == n_, "FFT input length does not match plan");
    std::vector<cplx> y(n_);
    forward(x.data(), y.data());
    return y;
  }

  std::vector<cplx> inverse(const std::vector<cplx>& x) const {
    require(x.size() == n_, "FFT input length does not match plan");
    std::vector<cplx> tmp(n_);
    for (std::size_t i = 0; i < n_; ++i) tmp[i] = std::conj(x[i]);
    std::vector<cplx> y(n_);
    forward(tmp.data(), y.data());
    const double s = 1.0 / static_cast<double>(n_);
    for (auto& v : y) v = std::conj(v) * s;
    return y;
  }

  // DFT of a real signal; returns the n/2+1 non-redundant bins.
  std::vector<cplx> forward_real_half(const std::vector<double>& x) const {
    require(x.size() == n_, "FFT input length does not match plan");
    std::vector<cplx> in(n_);
    for (std::size_t i = 0; i < n_; ++i) in[i] = {x[i], 0.0};
    std::vector<cplx> full(n_);
    forward(in.data(), full.data());
    full.resize(n_ / 2 + 1);
    return full;
  }

 private:
  void transform(const cplx* in, std::size_t stride, cplx* out, std::size_t n,
                 std::size_t tstep, const std::size_t* fptr) const {
    if (n == 1) {
      out[0] = in[0];
      return;
    }
    const std::size_t p = *fptr;
    const std::size_t m = n / p;
    for (std::size_t q = 0; q < p; ++q) {
      transform(in + q * stride, stride * p, out + q * m, m, tstep * p, fptr + 1);
    }
    std::array<cplx, detail::kMaxDirectRadix> tmp;
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t q = 0; q < p; ++q) {
        tmp[q] = out[q * m + k] * twiddle_[q * k * tstep];
      }
      for (std::size_t j = 0; j < p; ++j) {
        cplx acc = tmp[0];
        const std::size_t wstep = j * m * tstep;  // < n_
        std::size_t widx = 0;
        for (std::size_t q = 1; q < p; ++q) {
          widx += wstep;
          if (widx >= n_) widx -= n_;
          acc += tmp[q] * twiddle_[widx];
        }
        out[k + j * m] = acc;
      }
    }
  }

  void init_bluestein() {
    bluestein_ = true;
    m_ = 1;
    while (m_ < 2 * n_ - 1) m_ <<= 1;
    sub_ = std::make_unique<FftPlan>(m_);
    chirp_.resize(n_);
    const std::size_t mod = 2 * n_;
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t jj = (j * j) % mod;
      const double a = -detail::kPi * static_cast<double>(jj) / static_cast<double>(n_);
      chirp_[j] = {std::cos(a), std::sin(a)};
    }
    std::vector<cplx> b(m_, cplx{0.0, 0.0});
    b[0] = std::conj(chirp_[0]);
    for (std::size_t j = 1; j < n_; ++j) {
      b[j] = std::conj(chirp_[j]);
      b[m_ - j] = std::conj(chirp_[j]);
    }
    bfft_.resize(m_);
    sub_->forward(b.data(), bfft_.data());
  }

  void bluestein_forward(const cplx* in, cplx* out) const {
    std::vector<cplx> a(m_, cplx{0.0, 0.0});
    for (std::size_t j = 0; j < n_; ++j) a[j] = in[j] * chirp_[j];
    std::vector<cplx> fa(m_);
    sub_->forward(a.data(), fa.data());
    for (std::size_t j = 0; j < m_; ++j) fa[j] *= bfft_[j];
    // inverse via conjugation on the sub-plan
    for (auto& v : fa) v = std::conj(v);
    sub_->forward(fa.data(), a.data());
    const double s = 1.0 / static_cast<double>(m_);
    for (std::size_t k = 0; k < n_; ++k) out[k] = std::conj(a[k]) * s * chirp_[k];
  }

  std::size_t n_;
  std::vector<std::size_t> factors_;
  std::vector<cplx> twiddle_;
  bool bluestein_ = false;
  std::size_t m_ = 0;
  std::vector<cplx> chirp_;
  std::vector<cplx> bfft_;
  std::unique_ptr<FftPlan> sub_;
};

inline std::vector<cplx> fft(const std::vector<cplx>& x) { return FftPlan(x.size()).forward(x); }

inline std::vector<cplx> ifft(const std::vector<cplx>& x) { return FftPlan(x.size()).inverse(x); }

}  // namespace enf
