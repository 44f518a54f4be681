#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "codev/missing.hpp"

namespace codev::stats {

struct TestResult {
  std::string test;
  double statistic = kMissing;
  double p_value = kMissing;
  std::vector<std::size_t> sample_sizes;
  double alpha = 0.05;
  bool reject = false;
  bool valid = true;  // false: insufficient data or degenerate input
  std::string note;
};

// Special functions (regularized incomplete beta/gamma based).
double normal_cdf(double x);
double incomplete_beta(double a, double b, double x);  // regularized I_x(a,b)
double gamma_p(double a, double x);                    // regularized P(a,x)
double gamma_q(double a, double x);                    // regularized Q(a,x)
double student_t_sf2(double t, double df);             // two-sided p
double chi2_sf(double x, double df);

// Two-sided Welch t-test with Welch-Satterthwaite degrees of freedom.
TestResult welch_t(std::span<const double> a, std::span<const double> b,
                   double alpha = 0.05);

// U of the first sample with average-rank ties; exact null distribution when
// min(n, m) <= 8 and there are no ties, normal approximation with tie
// correction otherwise.
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          double alpha = 0.05);

// Exact sup-distance D; p from the asymptotic Kolmogorov distribution with
// effective n = nm/(n+m).
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                         double alpha = 0.05);

// H with tie correction; p via chi-squared with k-1 df.
TestResult kruskal_wallis(std::span<const std::vector<double>> groups,
                          double alpha = 0.05);

// Chi-squared on the above/below-grand-median table; values equal to the
// grand median are excluded.
TestResult mood_median(std::span<const std::vector<double>> groups,
                       double alpha = 0.05);

// Fixed-bandwidth Gaussian KDE evaluated on a grid.
std::vector<double> gaussian_kde(std::span<const double> samples,
                                 double bandwidth,
                                 std::span<const double> grid);

enum class FitModel {
  PowerLaw,      // y = c * x^alpha          params: log_c, alpha
  Exponential2,  // y = c * 2^(x / T)        params: log_c, T
  Sigmoid        // y = a + b/(1+exp(-(x-d0)/tau))  params: a, b, d0, tau
};

struct Prior {
  double mean = 0.0;
  double sd = kMissing;  // NaN = flat
};

struct FitOptions {
  std::size_t n_steps = 20000;
  std::uint64_t seed = 1;
  double noise_sd = kMissing;  // NaN: sampled as an extra parameter
};

struct FitResult {
  std::string model;
  std::vector<std::string> param_names;
  std::vector<double> mean;
  std::vector<double> sd;
  double acceptance_rate = 0.0;
  std::size_t n_steps = 0;
  std::size_t burn_in = 0;
  std::uint64_t seed = 0;
};

// Metropolis sampling with Gaussian proposals under a Gaussian-noise
// likelihood; proposal scales adapted in a pre-run, then frozen; first 20%
// of the main chain discarded. Deterministic given the seed.
FitResult mcmc_curve_fit(FitModel model, std::span<const double> x,
                         std::span<const double> y,
                         std::span<const Prior> priors,
                         const FitOptions& options = {});

}  // namespace codev::stats
