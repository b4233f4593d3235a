#include "busim/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace busim::kernels {
namespace avx2 {
namespace {

// exp(x) for doubles: round-to-nearest power-of-two reduction, degree-13
// Taylor polynomial on |r| <= ln2/2, exponent reassembly via the bit pattern.
// Max observed error vs libm is a few ulp; inputs below -708 flush to zero.
inline __m256d exp_pd(__m256d x) {
  const __m256d kMin = _mm256_set1_pd(-708.0);
  const __m256d kMax = _mm256_set1_pd(709.0);
  const __m256d flush = _mm256_cmp_pd(x, kMin, _CMP_LT_OQ);
  x = _mm256_min_pd(kMax, _mm256_max_pd(kMin, x));

  const __m256d kLog2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, kLog2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);

  const __m256d kLn2Hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d kLn2Lo = _mm256_set1_pd(1.90821492927058770002e-10);
  __m256d r = _mm256_fnmadd_pd(n, kLn2Hi, x);
  r = _mm256_fnmadd_pd(n, kLn2Lo, r);

  __m256d p = _mm256_set1_pd(1.6059043836821614599e-10);  // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.0876756987868098979e-09));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.5052108385441718775e-08));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985890653e-07));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985892511e-06));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.4801587301587301566e-05));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.9841269841269841253e-04));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.3888888888888889419e-03));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(8.3333333333333332177e-03));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(4.1666666666666664354e-02));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.6666666666666665741e-01));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(5.0e-01));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  n64 = _mm256_slli_epi64(n64, 52);
  const __m256d scale = _mm256_castsi256_pd(n64);

  return _mm256_andnot_pd(flush, _mm256_mul_pd(p, scale));
}

void dissatisfaction_avx2(const double* l, const double* t, const double* w,
                          const double* c, size_t n, double bl, double bt,
                          double bw, double bc, double* out) {
  const __m256d vbl = _mm256_set1_pd(bl);
  const __m256d vbt = _mm256_set1_pd(bt);
  const __m256d vbw = _mm256_set1_pd(bw);
  const __m256d vbc = _mm256_set1_pd(bc);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_mul_pd(vbl, _mm256_loadu_pd(l + i));
    acc = _mm256_fmadd_pd(vbt, _mm256_loadu_pd(t + i), acc);
    acc = _mm256_fmadd_pd(vbw, _mm256_loadu_pd(w + i), acc);
    acc = _mm256_fmadd_pd(vbc, _mm256_loadu_pd(c + i), acc);
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    out[i] = bl * l[i] + bt * t[i] + bw * w[i] + bc * c[i];
  }
}

// One lane per input array keeps each running sum in scalar order, so the
// results match the reference backend bit for bit.
void sum4_avx2(const double* a0, const double* a1, const double* a2,
               const double* a3, size_t n, double out[4]) {
  __m256d acc = _mm256_setzero_pd();
  for (size_t i = 0; i < n; ++i) {
    acc = _mm256_add_pd(acc, _mm256_setr_pd(a0[i], a1[i], a2[i], a3[i]));
  }
  _mm256_storeu_pd(out, acc);
}

void gauss_accumulate_avx2(const double* samples, size_t n, const double* grid,
                           size_t m, double inv_h, double* out) {
  const __m256d vinv = _mm256_set1_pd(inv_h);
  const __m256d vhalf = _mm256_set1_pd(-0.5);
  for (size_t i = 0; i < n; ++i) {
    const __m256d vs = _mm256_set1_pd(samples[i]);
    size_t j = 0;
    for (; j + 4 <= m; j += 4) {
      const __m256d u = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(grid + j), vs), vinv);
      const __m256d e = exp_pd(_mm256_mul_pd(vhalf, _mm256_mul_pd(u, u)));
      _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j), e));
    }
    for (; j < m; ++j) {
      double u = (grid[j] - samples[i]) * inv_h;
      u = -0.5 * u * u;
      double lane[4] = {u, u, u, u};
      __m256d e = exp_pd(_mm256_loadu_pd(lane));
      double res[4];
      _mm256_storeu_pd(res, e);
      out[j] += res[0];
    }
  }
}

void speed_profile_avx2(const double* t_min, size_t n, double v_off_kmh,
                        double t_morning, double t_evening, double sigma,
                        double k, double v_min_kmh, double* out) {
  const __m256d vinvs = _mm256_set1_pd(1.0 / sigma);
  const __m256d vtm = _mm256_set1_pd(t_morning);
  const __m256d vte = _mm256_set1_pd(t_evening);
  const __m256d vk = _mm256_set1_pd(k);
  const __m256d voff = _mm256_set1_pd(v_off_kmh);
  const __m256d vmin = _mm256_set1_pd(v_min_kmh);
  const __m256d one = _mm256_set1_pd(1.0);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_loadu_pd(t_min + i);
    const __m256d um = _mm256_mul_pd(_mm256_sub_pd(t, vtm), vinvs);
    const __m256d ue = _mm256_mul_pd(_mm256_sub_pd(t, vte), vinvs);
    const __m256d dip = _mm256_add_pd(exp_pd(_mm256_xor_pd(_mm256_mul_pd(um, um), _mm256_set1_pd(-0.0))),
                                      exp_pd(_mm256_xor_pd(_mm256_mul_pd(ue, ue), _mm256_set1_pd(-0.0))));
    const __m256d v = _mm256_mul_pd(voff, _mm256_fnmadd_pd(vk, dip, one));
    _mm256_storeu_pd(out + i, _mm256_max_pd(vmin, v));
  }
  if (i < n) {
    scalar_backend().speed_profile(t_min + i, n - i, v_off_kmh, t_morning,
                                   t_evening, sigma, k, v_min_kmh, out + i);
  }
}

size_t dot_select_ge_avx2(const double* x, const double* y, const double* z,
                          size_t n, double ux, double uy, double uz,
                          double min_dot, uint32_t* out_idx) {
  const __m256d vux = _mm256_set1_pd(ux);
  const __m256d vuy = _mm256_set1_pd(uy);
  const __m256d vuz = _mm256_set1_pd(uz);
  const __m256d vmin = _mm256_set1_pd(min_dot);
  size_t cnt = 0;
  size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d d = _mm256_mul_pd(vux, _mm256_loadu_pd(x + j));
    d = _mm256_fmadd_pd(vuy, _mm256_loadu_pd(y + j), d);
    d = _mm256_fmadd_pd(vuz, _mm256_loadu_pd(z + j), d);
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(d, vmin, _CMP_GE_OQ));
    if (mask) {
      for (int lane = 0; lane < 4; ++lane) {
        if (mask & (1 << lane)) out_idx[cnt++] = static_cast<uint32_t>(j + lane);
      }
    }
  }
  for (; j < n; ++j) {
    const double d = x[j] * ux + y[j] * uy + z[j] * uz;
    if (d >= min_dot) out_idx[cnt++] = static_cast<uint32_t>(j);
  }
  return cnt;
}

}  // namespace
}  // namespace avx2

const Backend& avx2_backend() {
  static const Backend b = {
      "avx2",
      avx2::dissatisfaction_avx2,
      avx2::sum4_avx2,
      avx2::gauss_accumulate_avx2,
      avx2::speed_profile_avx2,
      avx2::dot_select_ge_avx2,
  };
  return b;
}

}  // namespace busim::kernels

#else  // non-AVX2 build: report the scalar backend under the avx2 slot

namespace busim::kernels {
const Backend& avx2_backend() { return scalar_backend(); }
}  // namespace busim::kernels

#endif
