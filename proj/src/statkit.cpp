#include "busim/statkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "busim/kernels.hpp"

namespace busim::stats {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kSqrt2Pi = 2.50662827463100050242;
}  // namespace

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? kNan : s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v, int ddof) {
  if (static_cast<int>(v.size()) <= ddof) return kNan;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - ddof));
}

std::vector<double> zscore(const std::vector<double>& v) {
  const double m = mean(v);
  const double sd = stddev(v, 0);
  std::vector<double> out(v.size());
  if (!(sd > 0.0)) {
    throw ValidationError("zscore: input has zero variance");
  }
  for (size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - m) / sd;
  return out;
}

namespace {

// modified Lentz evaluation of the incomplete beta continued fraction
double beta_cont_frac(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * beta_cont_frac(a, b, x) / a;
  }
  return 1.0 - bt * beta_cont_frac(b, a, 1.0 - x) / b;
}

double t_test_p_value(double t, double dof) {
  if (!(dof > 0.0)) return kNan;
  return incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

double f_test_p_value(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0) || !(f >= 0.0)) return kNan;
  return incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

namespace {

// solve A v = rhs in place by Gauss-Jordan, also producing A^-1; A is a
// small symmetric positive (semi)definite normal-equation matrix
void solve_with_inverse(std::vector<std::vector<double>>& a,
                        std::vector<double>& rhs,
                        std::vector<std::vector<double>>& inv) {
  const size_t n = a.size();
  inv.assign(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) inv[i][i] = 1.0;

  double scale = 0.0;
  for (size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a[i][i]));
  const double tol = scale * 1e-12 + 1e-300;

  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    if (std::fabs(a[pivot][col]) < tol) {
      throw ValidationError(
          "regression design is rank-deficient: column " +
          std::to_string(col == 0 ? col : col - 1) +
          (col == 0 ? " (intercept)" : "") +
          " is linearly dependent on the others");
    }
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    std::swap(rhs[pivot], rhs[col]);
    const double p = a[col][col];
    for (size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    rhs[col] /= p;
    for (size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
      rhs[r] -= f * rhs[col];
    }
  }
}

}  // namespace

RegressionResult ols(const std::vector<std::vector<double>>& x,
                     const std::vector<double>& y_in, bool standardize_y) {
  const size_t p = x.size();
  const size_t n = y_in.size();
  if (n <= p + 1) {
    throw ValidationError("regression needs more observations than parameters (" +
                          std::to_string(n) + " rows, " + std::to_string(p) +
                          " regressors)");
  }
  for (size_t j = 0; j < p; ++j) {
    if (x[j].size() != n) {
      throw ValidationError("regressor " + std::to_string(j) +
                            " length does not match y");
    }
  }
  if (!(stddev(y_in, 0) > 0.0)) {
    throw ValidationError("regression response has zero variance");
  }
  const std::vector<double> y = standardize_y ? zscore(y_in) : y_in;

  // normal equations over [1, x_1..x_p]
  const size_t m = p + 1;
  std::vector<std::vector<double>> ata(m, std::vector<double>(m, 0.0));
  std::vector<double> aty(m, 0.0);
  auto col = [&](size_t j, size_t i) -> double {
    return j == 0 ? 1.0 : x[j - 1][i];
  };
  for (size_t a = 0; a < m; ++a) {
    for (size_t b = a; b < m; ++b) {
      double s = 0.0;
      for (size_t i = 0; i < n; ++i) s += col(a, i) * col(b, i);
      ata[a][b] = ata[b][a] = s;
    }
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += col(a, i) * y[i];
    aty[a] = s;
  }

  std::vector<std::vector<double>> work = ata, inv;
  std::vector<double> beta = aty;
  solve_with_inverse(work, beta, inv);

  double rss = 0.0, tss = 0.0;
  const double ybar = mean(y);
  for (size_t i = 0; i < n; ++i) {
    double fit = 0.0;
    for (size_t j = 0; j < m; ++j) fit += beta[j] * col(j, i);
    rss += (y[i] - fit) * (y[i] - fit);
    tss += (y[i] - ybar) * (y[i] - ybar);
  }

  RegressionResult res;
  res.n = static_cast<long long>(n);
  res.intercept = beta[0];
  res.coefficients.assign(beta.begin() + 1, beta.end());
  res.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;

  const double dof = static_cast<double>(n - m);
  const double sigma2 = rss / dof;
  res.intercept_p_value =
      t_test_p_value(beta[0] / std::sqrt(std::max(sigma2 * inv[0][0], 1e-300)), dof);
  res.coef_p_values.resize(p);
  for (size_t j = 0; j < p; ++j) {
    const double se = std::sqrt(std::max(sigma2 * inv[j + 1][j + 1], 1e-300));
    res.coef_p_values[j] = t_test_p_value(beta[j + 1] / se, dof);
  }
  if (p > 0) {
    const double denom = 1.0 - res.r_squared;
    res.f_stat = denom > 0.0
                     ? (res.r_squared / static_cast<double>(p)) / (denom / dof)
                     : std::numeric_limits<double>::infinity();
    res.f_p_value = denom > 0.0
                        ? f_test_p_value(res.f_stat, static_cast<double>(p), dof)
                        : 0.0;
  }
  return res;
}

double scott_bandwidth(const std::vector<double>& samples) {
  if (samples.size() < 2) throw ValidationError("bandwidth needs >= 2 samples");
  const double sd = stddev(samples, 1);
  if (!(sd > 0.0)) throw ValidationError("bandwidth undefined: samples all equal");
  return sd * std::pow(static_cast<double>(samples.size()), -0.2);
}

std::vector<double> kde_grid(const std::vector<double>& samples,
                             double bandwidth, int n_points) {
  if (samples.empty()) throw ValidationError("kde grid needs samples");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it - 6.0 * bandwidth;
  const double hi = *hi_it + 6.0 * bandwidth;
  std::vector<double> grid(static_cast<size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    grid[static_cast<size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
  }
  return grid;
}

std::vector<double> gaussian_kde(const std::vector<double>& samples,
                                 double bandwidth,
                                 const std::vector<double>& grid) {
  if (samples.size() < 2) throw ValidationError("kde needs >= 2 samples");
  if (!(bandwidth > 0.0)) throw ValidationError("kde bandwidth must be positive");
  std::vector<double> acc(grid.size(), 0.0);
  kernels::active().gauss_accumulate(samples.data(), samples.size(), grid.data(),
                                     grid.size(), 1.0 / bandwidth, acc.data());
  const double norm =
      1.0 / (static_cast<double>(samples.size()) * bandwidth * kSqrt2Pi);
  for (double& v : acc) v *= norm;
  return acc;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  const size_t n = v.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return kNan;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

RankTestResult spearman(const std::vector<double>& a,
                        const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw ValidationError("rank correlation needs two equal-length sequences (>= 2)");
  }
  RankTestResult res;
  res.statistic = pearson(average_ranks(a), average_ranks(b));
  res.defined = !std::isnan(res.statistic);
  res.note = res.defined ? "average ranks" : "undefined: an input is all ties";
  if (!res.defined) res.statistic = kNan;
  return res;
}

RankTestResult kendall(const std::vector<double>& a,
                       const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw ValidationError("rank correlation needs two equal-length sequences (>= 2)");
  }
  const size_t n = a.size();
  long long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double da = a[i] - a[j];
      const double db = b[i] - b[j];
      if (da == 0.0 && db == 0.0) {
        ++ties_a;
        ++ties_b;
      } else if (da == 0.0) {
        ++ties_a;
      } else if (db == 0.0) {
        ++ties_b;
      } else if ((da > 0.0) == (db > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n0 = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
  const double denom = std::sqrt((n0 - static_cast<double>(ties_a)) *
                                 (n0 - static_cast<double>(ties_b)));
  RankTestResult res;
  if (!(denom > 0.0)) {
    res.defined = false;
    res.statistic = kNan;
    res.note = "undefined: an input is all ties";
    return res;
  }
  res.statistic = static_cast<double>(concordant - discordant) / denom;
  res.note = "tau-b";
  return res;
}

RankTestResult spearman_vs_expected(const std::vector<double>& observed,
                                    const std::vector<double>& expected) {
  if (observed.size() != expected.size() || observed.size() < 2) {
    throw ValidationError("rank correlation needs two equal-length sequences (>= 2)");
  }
  std::vector<double> obs_ranks = average_ranks(observed);
  const std::vector<double> exp_ranks = average_ranks(expected);

  // an expected tie means any internal order is acceptable: average the
  // observed ranks inside each expected tie class
  std::map<double, std::vector<size_t>> classes;
  for (size_t i = 0; i < expected.size(); ++i) classes[expected[i]].push_back(i);
  for (const auto& [value, members] : classes) {
    (void)value;
    if (members.size() < 2) continue;
    double s = 0.0;
    for (size_t i : members) s += obs_ranks[i];
    const double avg = s / static_cast<double>(members.size());
    for (size_t i : members) obs_ranks[i] = avg;
  }

  RankTestResult res;
  res.statistic = pearson(obs_ranks, exp_ranks);
  res.defined = !std::isnan(res.statistic);
  res.note = res.defined ? "observed ranks averaged within expected tie classes"
                         : "undefined: an input is all ties";
  return res;
}

double elasticity(double y_base, double y_new, double x_base, double x_new) {
  if (y_base == 0.0 || x_base == 0.0) return kNan;
  const double dx = (x_new - x_base) / x_base;
  if (dx == 0.0) return kNan;
  return ((y_new - y_base) / y_base) / dx;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ValidationError("quantile of empty sample");
  q = std::clamp(q, 0.0, 1.0);
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ValidationError("ks statistic needs samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b,
                   double bin_width) {
  if (a.empty() || b.empty()) throw ValidationError("tv distance needs samples");
  if (!(bin_width > 0.0)) throw ValidationError("tv bin width must be positive");
  std::map<long long, double> pa, pb;
  for (double x : a) pa[static_cast<long long>(std::floor(x / bin_width))] += 1.0 / a.size();
  for (double x : b) pb[static_cast<long long>(std::floor(x / bin_width))] += 1.0 / b.size();
  double tv = 0.0;
  for (const auto& [bin, mass] : pa) {
    const auto it = pb.find(bin);
    tv += std::fabs(mass - (it == pb.end() ? 0.0 : it->second));
  }
  for (const auto& [bin, mass] : pb) {
    if (pa.find(bin) == pa.end()) tv += mass;
  }
  return tv / 2.0;
}

}  // namespace busim::stats
