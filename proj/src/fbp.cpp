#include "lact/fbp.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

#include "lact/projector.hpp"

namespace lact {

namespace {

// FFTW plan creation is not thread safe; executions on private buffers are.
std::mutex g_fftw_mutex;

// One r2c/c2r plan pair plus workspace for rows padded to length m.
class RampWorkspace {
 public:
  explicit RampWorkspace(int m, double pitch) : m_(m), pitch_(pitch) {
    real_ = fftw_alloc_real(m);
    spec_ = fftw_alloc_complex(m / 2 + 1);
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fwd_ = fftw_plan_dft_r2c_1d(m, real_, spec_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(m, spec_, real_, FFTW_ESTIMATE);
  }

  ~RampWorkspace() {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(spec_);
  }

  RampWorkspace(const RampWorkspace&) = delete;
  RampWorkspace& operator=(const RampWorkspace&) = delete;

  // Filters `n` samples from `in` into the first m_ slots of the padded
  // buffer; the result stays in real() until the next call.
  void filter(const double* in, int n) {
    const double pedestal = 0.5 * (in[0] + in[n - 1]);
    for (int i = 0; i < n; ++i) real_[i] = in[i] - pedestal;
    std::memset(real_ + n, 0, sizeof(double) * (m_ - n));
    fftw_execute(fwd_);
    // Bin q sits at frequency q/(m*pitch) cycles per unit length; the final
    // 1/m is the normalization FFTW leaves out of the inverse transform.
    const double scale = 1.0 / (static_cast<double>(m_) * pitch_ * m_);
    for (int q = 0; q <= m_ / 2; ++q) {
      const double w = q * scale;
      spec_[q][0] *= w;
      spec_[q][1] *= w;
    }
    fftw_execute(bwd_);
  }

  const double* real() const { return real_; }

 private:
  int m_;
  double pitch_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

}  // namespace

int ramlak_padded_length(int n) {
  if (n < 2) throw std::invalid_argument("ramlak_padded_length: n < 2");
  int m = 1;
  while (m < 2 * n) m *= 2;
  return m;
}

std::vector<double> ramlak_filter_row_padded(const std::vector<double>& row,
                                             double pitch) {
  const int n = static_cast<int>(row.size());
  if (n < 2) throw std::invalid_argument("ramlak_filter_row: row too short");
  if (!(pitch > 0.0)) throw std::invalid_argument("ramlak_filter_row: pitch <= 0");
  const int m = ramlak_padded_length(n);
  RampWorkspace ws(m, pitch);
  ws.filter(row.data(), n);
  return std::vector<double>(ws.real(), ws.real() + m);
}

std::vector<double> ramlak_filter_row(const std::vector<double>& row,
                                      double pitch) {
  std::vector<double> padded = ramlak_filter_row_padded(row, pitch);
  padded.resize(row.size());
  return padded;
}

FilteredSinogram ramlak_filter(const Sinogram& sino) {
  const Geometry& geom = sino.geometry();
  FilteredSinogram out(geom);
  const int n = geom.n_det();
  RampWorkspace ws(ramlak_padded_length(n), geom.pitch());
  // Rows go through one shared workspace in angle order, so the output does
  // not depend on the worker count.
  for (int j = 0; j < geom.n_angles(); ++j) {
    ws.filter(sino.row(j), n);
    std::memcpy(out.row(j), ws.real(), sizeof(double) * n);
  }
  return out;
}

Image fbp_reconstruct(const Sinogram& sino, int side) {
  return limited_fbp(sino, AngularRange::full(), side);
}

Image limited_fbp(const Sinogram& sino, const AngularRange& range, int side) {
  FilteredSinogram filtered = ramlak_filter(sino);
  Image img = back_project(filtered, range, side);
  if (kFbpScale != 1.0)
    for (double& v : img.values()) v *= kFbpScale;
  return img;
}

}  // namespace lact
