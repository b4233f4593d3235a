#pragma once

#include <cstddef>
#include <cstdint>

// Batch numeric kernels. Every operation has a scalar reference
// implementation and, on x86-64 hardware with AVX2+FMA, a vectorized variant.
// The active backend is chosen once at runtime; BUSIM_SIMD=scalar|avx2 in the
// environment forces a specific one (used by the equivalence tests).
//
// Accumulation order is part of the contract: vector variants accumulate over
// the same index order as the scalar code (vectorization is across output
// elements), so backend results differ only by element-wise rounding.

namespace busim::kernels {

struct Backend {
  const char* name;

  // out[i] = bl*l[i] + bt*t[i] + bw*w[i] + bc*c[i]
  void (*dissatisfaction)(const double* l, const double* t, const double* w,
                          const double* c, size_t n, double bl, double bt,
                          double bw, double bc, double* out);

  // out[k] = sum over arrays[k], k = 0..3
  void (*sum4)(const double* a0, const double* a1, const double* a2,
               const double* a3, size_t n, double out[4]);

  // out[j] += sum_i exp(-0.5 * ((grid[j] - samples[i]) * inv_h)^2)
  void (*gauss_accumulate)(const double* samples, size_t n, const double* grid,
                           size_t m, double inv_h, double* out);

  // out[i] = max(v_min, v_off * (1 - k*(exp(-((t[i]-tm)/sigma)^2)
  //                                   + exp(-((t[i]-te)/sigma)^2))))
  void (*speed_profile)(const double* t_min, size_t n, double v_off_kmh,
                        double t_morning, double t_evening, double sigma,
                        double k, double v_min_kmh, double* out);

  // Collect j in [0, n) with x[j]*ux + y[j]*uy + z[j]*uz >= min_dot.
  // Returns the number of indices written to out_idx (caller sizes it to n).
  size_t (*dot_select_ge)(const double* x, const double* y, const double* z,
                          size_t n, double ux, double uy, double uz,
                          double min_dot, uint32_t* out_idx);
};

const Backend& scalar_backend();
const Backend& avx2_backend();  // valid only if avx2_available()
bool avx2_available();

// Runtime-selected backend (env override applied on first call).
const Backend& active();

}  // namespace busim::kernels
