#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "nlslab/errors.hpp"

namespace nlslab {

// Thin RAII wrapper around a pair of FFTW plans on owned buffers.
//
// Conventions (everything downstream relies on these):
//   synth:   u_j = sum_b A_b exp(+2*pi*i*b*j/n)   (FFTW_BACKWARD, no scaling)
//   analyze: A_b = (1/n) sum_j u_j exp(-2*pi*i*b*j/n)
// so analyze(synth(A)) == A up to roundoff. Bins follow the usual FFT layout:
// bin b holds frequency b for b < n/2 and frequency b - n otherwise.
//
// Plan creation is serialized (the FFTW planner is not thread safe);
// execution on distinct instances is safe.
class Fft {
 public:
  explicit Fft(int n) : n_(n) {
    if (n < 2) throw InvalidArgument("Fft: grid size must be >= 2");
    in_ = fftw_alloc_complex(static_cast<size_t>(n));
    out_ = fftw_alloc_complex(static_cast<size_t>(n));
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_1d(n, in_, out_, FFTW_FORWARD, FFTW_MEASURE);
    bwd_ = fftw_plan_dft_1d(n, in_, out_, FFTW_BACKWARD, FFTW_MEASURE);
  }

  ~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(in_);
    fftw_free(out_);
  }

  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }

  void synth(const std::complex<double>* bins, std::complex<double>* grid) {
    auto* in = reinterpret_cast<std::complex<double>*>(in_);
    for (int j = 0; j < n_; ++j) in[j] = bins[j];
    fftw_execute(bwd_);
    auto* out = reinterpret_cast<std::complex<double>*>(out_);
    for (int j = 0; j < n_; ++j) grid[j] = out[j];
  }

  void analyze(const std::complex<double>* grid, std::complex<double>* bins) {
    auto* in = reinterpret_cast<std::complex<double>*>(in_);
    for (int j = 0; j < n_; ++j) in[j] = grid[j];
    fftw_execute(fwd_);
    auto* out = reinterpret_cast<std::complex<double>*>(out_);
    const double inv = 1.0 / n_;
    for (int j = 0; j < n_; ++j) bins[j] = out[j] * inv;
  }

  std::vector<std::complex<double>> synth(const std::vector<std::complex<double>>& bins) {
    std::vector<std::complex<double>> grid(bins.size());
    synth(bins.data(), grid.data());
    return grid;
  }

  std::vector<std::complex<double>> analyze(const std::vector<std::complex<double>>& grid) {
    std::vector<std::complex<double>> bins(grid.size());
    analyze(grid.data(), bins.data());
    return bins;
  }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  int n_;
  fftw_complex* in_;
  fftw_complex* out_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

}  // namespace nlslab
