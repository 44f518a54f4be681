#include "codev/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "codev/error.hpp"
#include "codev/rng.hpp"
#include "codev/series.hpp"

namespace codev::stats {

namespace {

TestResult insufficient(std::string name, std::vector<std::size_t> sizes,
                        double alpha, std::string why) {
  TestResult r;
  r.test = std::move(name);
  r.sample_sizes = std::move(sizes);
  r.alpha = alpha;
  r.valid = false;
  r.note = std::move(why);
  return r;
}

void finish(TestResult& r) {
  r.reject = r.valid && !is_missing(r.p_value) && r.p_value < r.alpha;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double sample_var(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

// Sum of t^3 - t over tie blocks of a sorted vector.
double tie_term(std::vector<double> sorted) {
  double total = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    double t = static_cast<double>(j - i + 1);
    total += t * t * t - t;
    i = j + 1;
  }
  return total;
}

// Continued fraction for the incomplete beta function (Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) {
    // series representation
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  return 1.0 - gamma_q(a, x);
}

double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p(a, x);
  // continued fraction (Lentz)
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double student_t_sf2(double t, double df) {
  double x = df / (df + t * t);
  return incomplete_beta(df / 2.0, 0.5, x);
}

double chi2_sf(double x, double df) { return gamma_q(df / 2.0, x / 2.0); }

TestResult welch_t(std::span<const double> a, std::span<const double> b,
                   double alpha) {
  std::vector<std::size_t> sizes{a.size(), b.size()};
  if (a.size() < 2 || b.size() < 2)
    return insufficient("welch_t", sizes, alpha, "need n >= 2 per sample");
  double ma = mean_of(a), mb = mean_of(b);
  double va = sample_var(a, ma), vb = sample_var(b, mb);
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double se2 = va / na + vb / nb;
  TestResult r;
  r.test = "welch_t";
  r.sample_sizes = sizes;
  r.alpha = alpha;
  if (se2 <= 0.0) {
    if (ma == mb) {
      r.statistic = 0.0;
      r.p_value = 1.0;
      r.note = "zero variance, equal means";
    } else {
      r.valid = false;
      r.note = "zero variance, distinct means";
    }
    finish(r);
    return r;
  }
  double t = (ma - mb) / std::sqrt(se2);
  double df = se2 * se2 /
              (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
  r.statistic = t;
  r.p_value = t == 0.0 ? 1.0 : student_t_sf2(t, df);
  r.note = "df=" + std::to_string(df);
  finish(r);
  return r;
}

namespace {

// Null distribution of the Mann-Whitney U count: N(u | n, m).
// Recurrence N(u|n,m) = N(u-m|n-1,m) + N(u|n,m-1).
std::vector<double> mwu_null_counts(std::size_t n, std::size_t m) {
  std::size_t umax = n * m;
  // table[i][j] over u
  std::vector<std::vector<double>> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = {1.0};  // n = 0
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = {1.0};  // m = 0
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t cap = i * j;
      cur[j].assign(cap + 1, 0.0);
      for (std::size_t u = 0; u <= cap; ++u) {
        double v = 0.0;
        if (u >= j && u - j < prev[j].size()) v += prev[j][u - j];
        if (u < cur[j - 1].size()) v += cur[j - 1][u];
        cur[j][u] = v;
      }
    }
    std::swap(prev, cur);
  }
  prev[m].resize(umax + 1, 0.0);
  return prev[m];
}

}  // namespace

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          double alpha) {
  std::vector<std::size_t> sizes{a.size(), b.size()};
  if (a.empty() || b.empty())
    return insufficient("mann_whitney_u", sizes, alpha, "empty sample");
  double u = 0.0;
  bool ties = false;
  for (double x : a)
    for (double y : b) {
      if (x > y)
        u += 1.0;
      else if (x == y) {
        u += 0.5;
        ties = true;
      }
    }
  double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());
  TestResult r;
  r.test = "mann_whitney_u";
  r.sample_sizes = sizes;
  r.alpha = alpha;
  r.statistic = u;
  if (!ties && std::min(a.size(), b.size()) <= 8) {
    auto counts = mwu_null_counts(a.size(), b.size());
    double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    auto iu = static_cast<std::size_t>(std::llround(u));
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (k <= iu) lo += counts[k];
      if (k >= iu) hi += counts[k];
    }
    r.p_value = std::min(1.0, 2.0 * std::min(lo, hi) / total);
    r.note = "exact";
  } else {
    double nt = n + m;
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    double tt = tie_term(std::move(pooled));
    double var = n * m / 12.0 * ((nt + 1.0) - tt / (nt * (nt - 1.0)));
    if (var <= 0.0) {
      r.valid = false;
      r.note = "all observations tied";
      finish(r);
      return r;
    }
    double z = (u - n * m / 2.0) / std::sqrt(var);
    r.p_value = 2.0 * normal_cdf(-std::abs(z));
    r.note = "normal approximation, tie-corrected";
  }
  finish(r);
  return r;
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                         double alpha) {
  std::vector<std::size_t> sizes{a.size(), b.size()};
  if (a.empty() || b.empty())
    return insufficient("ks_two_sample", sizes, alpha, "empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  double ne = na * nb / (na + nb);
  double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  // Kolmogorov survival series
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += 2.0 * sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  TestResult r;
  r.test = "ks_two_sample";
  r.sample_sizes = sizes;
  r.alpha = alpha;
  r.statistic = d;
  r.p_value = std::clamp(p, 0.0, 1.0);
  r.note = "asymptotic";
  finish(r);
  return r;
}

TestResult kruskal_wallis(std::span<const std::vector<double>> groups,
                          double alpha) {
  std::vector<std::size_t> sizes;
  std::vector<double> pooled;
  for (const auto& g : groups) {
    sizes.push_back(g.size());
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  if (groups.size() < 2)
    return insufficient("kruskal_wallis", sizes, alpha, "need >= 2 groups");
  for (auto s : sizes)
    if (s == 0)
      return insufficient("kruskal_wallis", sizes, alpha, "empty group");
  double nt = static_cast<double>(pooled.size());
  auto ranks = series::average_ranks(pooled);
  double h = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rsum = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) rsum += ranks[offset + k];
    offset += g.size();
    h += rsum * rsum / static_cast<double>(g.size());
  }
  h = 12.0 / (nt * (nt + 1.0)) * h - 3.0 * (nt + 1.0);
  std::sort(pooled.begin(), pooled.end());
  double tt = tie_term(std::move(pooled));
  double correction = 1.0 - tt / (nt * nt * nt - nt);
  TestResult r;
  r.test = "kruskal_wallis";
  r.sample_sizes = sizes;
  r.alpha = alpha;
  if (correction <= 0.0) {
    r.valid = false;
    r.note = "all observations tied";
    finish(r);
    return r;
  }
  r.statistic = h / correction;
  r.p_value = chi2_sf(r.statistic, static_cast<double>(groups.size()) - 1.0);
  finish(r);
  return r;
}

TestResult mood_median(std::span<const std::vector<double>> groups,
                       double alpha) {
  std::vector<std::size_t> sizes;
  std::vector<double> pooled;
  for (const auto& g : groups) {
    sizes.push_back(g.size());
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  if (groups.size() < 2)
    return insufficient("mood_median", sizes, alpha, "need >= 2 groups");
  if (pooled.empty())
    return insufficient("mood_median", sizes, alpha, "empty samples");
  std::sort(pooled.begin(), pooled.end());
  double median = pooled.size() % 2 == 1
                      ? pooled[pooled.size() / 2]
                      : 0.5 * (pooled[pooled.size() / 2 - 1] +
                               pooled[pooled.size() / 2]);
  std::vector<double> above(groups.size(), 0.0), below(groups.size(), 0.0);
  double ta = 0.0, tb = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (double x : groups[g]) {
      if (x > median) {
        ++above[g];
        ++ta;
      } else if (x < median) {
        ++below[g];
        ++tb;
      }
    }
  }
  TestResult r;
  r.test = "mood_median";
  r.sample_sizes = sizes;
  r.alpha = alpha;
  double total = ta + tb;
  if (total == 0.0 || ta == 0.0 || tb == 0.0) {
    r.valid = false;
    r.note = "degenerate above/below table";
    finish(r);
    return r;
  }
  double chi2 = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double ng = above[g] + below[g];
    if (ng == 0.0) {
      r.valid = false;
      r.note = "group entirely at grand median";
      finish(r);
      return r;
    }
    double ea = ng * ta / total, eb = ng * tb / total;
    chi2 += (above[g] - ea) * (above[g] - ea) / ea;
    chi2 += (below[g] - eb) * (below[g] - eb) / eb;
  }
  r.statistic = chi2;
  r.p_value = chi2_sf(chi2, static_cast<double>(groups.size()) - 1.0);
  finish(r);
  return r;
}

std::vector<double> gaussian_kde(std::span<const double> samples,
                                 double bandwidth,
                                 std::span<const double> grid) {
  if (samples.empty() || bandwidth <= 0.0)
    throw DataError("gaussian_kde: need samples and bandwidth > 0");
  constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343;
  std::vector<double> out(grid.size(), 0.0);
  double norm = kInvSqrt2Pi / (static_cast<double>(samples.size()) * bandwidth);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (double xi : samples) {
      double z = (grid[g] - xi) / bandwidth;
      sum += std::exp(-0.5 * z * z);
    }
    out[g] = norm * sum;
  }
  return out;
}

namespace {

struct ModelSpec {
  std::string name;
  std::vector<std::string> params;
  // predicted y given params
  std::function<double(std::span<const double>, double)> eval;
  // support check
  std::function<bool(std::span<const double>)> in_support;
  std::vector<double> init;  // rough data-driven start
};

ModelSpec make_spec(FitModel model, std::span<const double> x,
                    std::span<const double> y) {
  auto linear_fit = [](std::span<const double> xs, std::span<const double> ys,
                       double& slope, double& intercept) {
    double mx = mean_of(xs), my = mean_of(ys);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    slope = sxx > 0.0 ? sxy / sxx : 0.0;
    intercept = my - slope * mx;
  };
  switch (model) {
    case FitModel::PowerLaw: {
      ModelSpec s;
      s.name = "power_law";
      s.params = {"log_c", "alpha"};
      s.eval = [](std::span<const double> p, double xi) {
        return std::exp(p[0] + p[1] * std::log(xi));
      };
      s.in_support = [](std::span<const double>) { return true; };
      std::vector<double> lx, ly;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0.0 && y[i] > 0.0) {
          lx.push_back(std::log(x[i]));
          ly.push_back(std::log(y[i]));
        }
      double slope = -1.0, intercept = 0.0;
      if (lx.size() >= 2) linear_fit(lx, ly, slope, intercept);
      s.init = {intercept, slope};
      return s;
    }
    case FitModel::Exponential2: {
      ModelSpec s;
      s.name = "exponential2";
      s.params = {"log_c", "T"};
      s.eval = [](std::span<const double> p, double xi) {
        return std::exp(p[0] + 0.6931471805599453 * xi / p[1]);
      };
      s.in_support = [](std::span<const double> p) { return p[1] != 0.0; };
      std::vector<double> lx, ly;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (y[i] > 0.0) {
          lx.push_back(x[i]);
          ly.push_back(std::log2(y[i]));
        }
      double slope = 1e-3, intercept = 0.0;
      if (lx.size() >= 2) linear_fit(lx, ly, slope, intercept);
      if (slope == 0.0) slope = 1e-6;
      s.init = {intercept * 0.6931471805599453, 1.0 / slope};
      return s;
    }
    case FitModel::Sigmoid: {
      ModelSpec s;
      s.name = "sigmoid";
      s.params = {"a", "b", "d0", "tau"};
      s.eval = [](std::span<const double> p, double xi) {
        return p[0] + p[1] / (1.0 + std::exp(-(xi - p[2]) / p[3]));
      };
      s.in_support = [](std::span<const double> p) { return p[3] > 0.0; };
      double ymin = *std::min_element(y.begin(), y.end());
      double ymax = *std::max_element(y.begin(), y.end());
      double xmin = *std::min_element(x.begin(), x.end());
      double xmax = *std::max_element(x.begin(), x.end());
      s.init = {ymin, ymax - ymin, 0.5 * (xmin + xmax),
                std::max(1.0, (xmax - xmin) / 20.0)};
      return s;
    }
  }
  throw DataError("mcmc_curve_fit: unknown model");
}

}  // namespace

FitResult mcmc_curve_fit(FitModel model, std::span<const double> x,
                         std::span<const double> y,
                         std::span<const Prior> priors,
                         const FitOptions& options) {
  if (x.size() != y.size() || x.size() < 3)
    throw DataError("mcmc_curve_fit: need >= 3 (x, y) points");
  ModelSpec spec = make_spec(model, x, y);
  const bool sample_noise = is_missing(options.noise_sd);

  // Noise floor relative to the data scale keeps the likelihood from
  // collapsing on (near-)noiseless inputs, which would freeze the chain.
  double y_scale = 0.0;
  for (double v : y) y_scale = std::max(y_scale, std::abs(v));
  const double sigma_floor = 1e-6 * std::max(y_scale, 1e-12);

  // Parameter vector: model params (+ log noise sd when sampled).
  std::vector<double> theta = spec.init;
  if (sample_noise) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double r = y[i] - spec.eval(theta, x[i]);
      ss += r * r;
    }
    double s0 = std::sqrt(ss / static_cast<double>(x.size()));
    theta.push_back(std::log(std::max(s0, sigma_floor)));
  }
  const std::size_t np = theta.size();
  const std::size_t n_model = spec.params.size();

  auto log_post = [&](std::span<const double> p) {
    if (!spec.in_support(p.subspan(0, n_model)))
      return -std::numeric_limits<double>::infinity();
    double sigma = sample_noise ? std::exp(p[n_model]) : options.noise_sd;
    if (!(sigma > 0.0)) return -std::numeric_limits<double>::infinity();
    sigma = std::max(sigma, sigma_floor);
    double ll = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double r = y[i] - spec.eval(p.subspan(0, n_model), x[i]);
      ll += -0.5 * (r / sigma) * (r / sigma) - std::log(sigma);
    }
    for (std::size_t i = 0; i < priors.size() && i < n_model; ++i) {
      if (is_missing(priors[i].sd)) continue;
      double z = (p[i] - priors[i].mean) / priors[i].sd;
      ll += -0.5 * z * z;
    }
    if (!std::isfinite(ll)) return -std::numeric_limits<double>::infinity();
    return ll;
  };

  std::vector<double> step(np);
  for (std::size_t i = 0; i < np; ++i)
    step[i] = std::max(1e-4, 0.05 * std::abs(theta[i]));

  Rng rng(derive_seed(options.seed, 0x3c3c));
  double lp = log_post(theta);

  auto run_chain = [&](std::size_t steps, bool adapt, bool record,
                       std::vector<std::vector<double>>* samples) {
    std::size_t accepted = 0;
    std::size_t window_acc = 0, window_len = 0;
    for (std::size_t s = 0; s < steps; ++s) {
      std::vector<double> prop = theta;
      for (std::size_t i = 0; i < np; ++i) prop[i] += step[i] * rng.normal();
      double lp_new = log_post(prop);
      if (lp_new >= lp || rng.uniform() < std::exp(lp_new - lp)) {
        theta = std::move(prop);
        lp = lp_new;
        ++accepted;
        ++window_acc;
      }
      ++window_len;
      if (adapt && window_len == 100) {
        double rate = static_cast<double>(window_acc) / 100.0;
        double factor = rate > 0.4 ? 1.25
                        : rate < 0.05 ? 0.5  // fast escape from frozen chains
                        : rate < 0.2  ? 0.8
                                      : 1.0;
        for (auto& st : step) st *= factor;
        window_acc = 0;
        window_len = 0;
      }
      if (record) samples->push_back(theta);
    }
    return accepted;
  };

  // Adaptation pre-run (frozen afterwards; continued adaptation would break
  // detailed balance).
  std::size_t pre = std::max<std::size_t>(2000, options.n_steps / 5);
  run_chain(pre, true, false, nullptr);

  std::vector<std::vector<double>> samples;
  samples.reserve(options.n_steps);
  std::size_t accepted = run_chain(options.n_steps, false, true, &samples);

  std::size_t burn = options.n_steps / 5;
  FitResult out;
  out.model = spec.name;
  out.param_names = spec.params;
  out.n_steps = options.n_steps;
  out.burn_in = burn;
  out.seed = options.seed;
  out.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(options.n_steps);
  out.mean.assign(n_model, 0.0);
  out.sd.assign(n_model, 0.0);
  double kept = static_cast<double>(samples.size() - burn);
  for (std::size_t s = burn; s < samples.size(); ++s)
    for (std::size_t i = 0; i < n_model; ++i) out.mean[i] += samples[s][i];
  for (auto& m : out.mean) m /= kept;
  for (std::size_t s = burn; s < samples.size(); ++s)
    for (std::size_t i = 0; i < n_model; ++i) {
      double d = samples[s][i] - out.mean[i];
      out.sd[i] += d * d;
    }
  for (auto& v : out.sd) v = std::sqrt(v / kept);
  return out;
}

}  // namespace codev::stats
