#pragma once

#include <string>
#include <vector>

#include "busim/types.hpp"

namespace busim::stats {

struct RegressionResult {
  std::vector<double> coefficients;
  double intercept = 0.0;
  std::vector<double> coef_p_values;
  double intercept_p_value = 1.0;
  double r_squared = 0.0;
  double f_stat = 0.0;
  double f_p_value = 1.0;
  long long n = 0;
};

struct RankTestResult {
  double statistic = 0.0;
  bool defined = true;  // false when rank variance vanishes (all tied)
  std::string note;
};

double mean(const std::vector<double>& v);
// ddof 0 -> population, 1 -> sample
double stddev(const std::vector<double>& v, int ddof);
std::vector<double> zscore(const std::vector<double>& v);

// least squares with intercept via normal equations; two-sided t p-values
// per coefficient and an overall F test. X is column-major: x[j] is the
// j-th regressor. standardize_y z-scores y before fitting.
RegressionResult ols(const std::vector<std::vector<double>>& x,
                     const std::vector<double>& y, bool standardize_y);

// regularized incomplete beta I_x(a, b), evaluated with a continued
// fraction (accurate to ~1e-14; downstream p-values documented at 1e-8)
double incomplete_beta(double a, double b, double x);
double t_test_p_value(double t, double dof);          // two-sided
double f_test_p_value(double f, double d1, double d2);  // upper tail

double scott_bandwidth(const std::vector<double>& samples);
std::vector<double> kde_grid(const std::vector<double>& samples,
                             double bandwidth, int n_points = 512);
std::vector<double> gaussian_kde(const std::vector<double>& samples,
                                 double bandwidth,
                                 const std::vector<double>& grid);

std::vector<double> average_ranks(const std::vector<double>& v);
RankTestResult spearman(const std::vector<double>& a,
                        const std::vector<double>& b);
RankTestResult kendall(const std::vector<double>& a,
                       const std::vector<double>& b);  // tau-b

// Spearman of observed values against an expected scoring where expected
// ties denote "any order is acceptable": observed ranks are averaged
// within each expected tie class before correlating, so the statistic is
// 1.0 exactly when every tie class sits in the right contiguous band.
RankTestResult spearman_vs_expected(const std::vector<double>& observed,
                                    const std::vector<double>& expected);

// (dy / y_base) / (dx / x_base); NaN with defined=false semantics is
// signalled by returning quiet NaN when y_base or x_base is zero
double elasticity(double y_base, double y_new, double x_base, double x_new);

// linear-interpolation quantile (type 7), q in [0, 1]
double quantile(std::vector<double> v, double q);

// two-sample Kolmogorov-Smirnov statistic over the empirical CDFs
double ks_statistic(std::vector<double> a, std::vector<double> b);
// total variation distance between the two samples' normalized histogram
// masses on a shared grid of bin_width-sized bins anchored at 0
double tv_distance(const std::vector<double>& a, const std::vector<double>& b,
                   double bin_width);

}  // namespace busim::stats
