#pragma once

#include <span>
#include <vector>

namespace offbeat::stats {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject = false;  // p_value < alpha
};

struct FiveNumber {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

double mean(std::span<const double> v);
double sample_stddev(std::span<const double> v);  // ddof = 1

// Linear-interpolation percentile, q in [0, 100].
double percentile(std::span<const double> values, double q);
FiveNumber five_number_summary(std::span<const double> values);

// Kendall tau-b. kendall_tau() picks the merge-sort path for large inputs;
// both paths produce bit-identical results.
double kendall_tau(std::span<const double> x, std::span<const double> y);
double kendall_tau_pairwise(std::span<const double> x, std::span<const double> y);
double kendall_tau_mergesort(std::span<const double> x, std::span<const double> y);

double pearson_r(std::span<const double> x, std::span<const double> y);

// Cosine similarity of non-negative vectors; result in [0, 1].
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Gaussian KDE with Scott's rule bandwidth (n^(-1/5) * sample stddev).
double scott_bandwidth(std::span<const double> values);
std::vector<double> gaussian_kde(std::span<const double> values, std::span<const double> grid);
std::vector<double> gaussian_kde(std::span<const double> values, std::span<const double> grid,
                                 double bandwidth);

// Second-order finite differences on equally spaced samples: central in the
// interior, one-sided three-point stencils at both ends.
std::vector<double> central_gradient(std::span<const double> f, double h = 1.0);

// One-tailed Mann-Whitney U, alternative "a stochastically less than b".
// Exact enumeration when |a|+|b| <= 12, otherwise normal approximation with
// tie and continuity corrections. statistic is U_a.
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          double alpha = 1e-4);

TestResult one_way_anova(const std::vector<std::vector<double>>& groups, double alpha = 0.01);

// Pairwise Tukey-HSD decisions (Tukey-Kramer for unequal group sizes).
// Critical values come from a studentized-range table (k <= 10, alpha 0.05 or
// 0.01), interpolated linearly in 1/df between tabulated df rows.
std::vector<std::vector<bool>> tukey_hsd(const std::vector<std::vector<double>>& groups,
                                         double alpha = 0.05);

// Distribution helpers (self-contained; no external stats dependency).
double normal_cdf(double z);
double f_distribution_sf(double f_stat, double df1, double df2);
double studentized_range_critical(double alpha, int n_groups, double df);

}  // namespace offbeat::stats
