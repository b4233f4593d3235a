#include "busim/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace busim::kernels {
namespace {

void dissatisfaction_scalar(const double* l, const double* t, const double* w,
                            const double* c, size_t n, double bl, double bt,
                            double bw, double bc, double* out) {
  for (size_t i = 0; i < n; ++i) {
    out[i] = bl * l[i] + bt * t[i] + bw * w[i] + bc * c[i];
  }
}

void sum4_scalar(const double* a0, const double* a1, const double* a2,
                 const double* a3, size_t n, double out[4]) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    s0 += a0[i];
    s1 += a1[i];
    s2 += a2[i];
    s3 += a3[i];
  }
  out[0] = s0;
  out[1] = s1;
  out[2] = s2;
  out[3] = s3;
}

void gauss_accumulate_scalar(const double* samples, size_t n,
                             const double* grid, size_t m, double inv_h,
                             double* out) {
  for (size_t i = 0; i < n; ++i) {
    const double s = samples[i];
    for (size_t j = 0; j < m; ++j) {
      const double u = (grid[j] - s) * inv_h;
      out[j] += std::exp(-0.5 * u * u);
    }
  }
}

void speed_profile_scalar(const double* t_min, size_t n, double v_off_kmh,
                          double t_morning, double t_evening, double sigma,
                          double k, double v_min_kmh, double* out) {
  const double inv_sigma = 1.0 / sigma;
  for (size_t i = 0; i < n; ++i) {
    const double um = (t_min[i] - t_morning) * inv_sigma;
    const double ue = (t_min[i] - t_evening) * inv_sigma;
    const double dip = std::exp(-um * um) + std::exp(-ue * ue);
    out[i] = std::max(v_min_kmh, v_off_kmh * (1.0 - k * dip));
  }
}

size_t dot_select_ge_scalar(const double* x, const double* y, const double* z,
                            size_t n, double ux, double uy, double uz,
                            double min_dot, uint32_t* out_idx) {
  size_t cnt = 0;
  for (size_t j = 0; j < n; ++j) {
    const double d = x[j] * ux + y[j] * uy + z[j] * uz;
    if (d >= min_dot) out_idx[cnt++] = static_cast<uint32_t>(j);
  }
  return cnt;
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend b = {
      "scalar",
      dissatisfaction_scalar,
      sum4_scalar,
      gauss_accumulate_scalar,
      speed_profile_scalar,
      dot_select_ge_scalar,
  };
  return b;
}

}  // namespace busim::kernels
