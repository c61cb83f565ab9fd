#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace mpucb {

class EstimatorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Constants of the estimator rate bound
// |mu_hat - mu| <= 2 v^(1/(1+eps)) (c ln(1/delta) / n)^(eps/(1+eps)).
struct RateParams {
  double c = 1.0;
  double v = 1.0;
  double eps = 1.0;

  void validate() const;
};

// v^(1/(1+eps)) * (2 c ln t / n)^(eps/(1+eps)).
double confidence_radius(const RateParams& params, double n, double t);

// Batch trimmed mean with arrival-rank thresholds:
// (1/n) sum X_i 1{|X_i| <= (u i / ln(1/delta))^(1/(1+eps))}.
double trimmed_mean(std::span<const double> samples, double u, double eps, double delta);

// Median of k group means over consecutive blocks of floor(n/k) samples,
// k = floor(min(8 ln(e^(1/8)/delta), n/2)) clamped to >= 1. Leftover samples
// are dropped; an even k averages the two middle group means.
double median_of_means(std::span<const double> samples, double delta);
double median_of_means_groups(std::span<const double> samples, int groups);
int median_of_means_group_count(std::size_t n, double delta);

// Catoni M-estimator with psi(x) = sign(x) ln(1 + |x| + x^2/2), solved by
// bisection on [min X, max X].
double catoni_mean(std::span<const double> samples, double v, double delta);
double catoni_alpha(std::size_t n, double v, double delta);

double empirical_mean(std::span<const double> samples);

// Activation thresholds 2 u ln t for t = 1..T, shared by every online
// trimmed-mean state with the same (u, eps, T).
class TrimmedThresholds {
 public:
  TrimmedThresholds(double u, double eps, int horizon);

  double u() const { return u_; }
  double eps() const { return eps_; }
  int horizon() const { return horizon_; }

  // 2 u ln t.
  double level(int t) const { return level_[t]; }

  // Smallest t in [1, T] with |x|^(1+eps) <= i * 2 u ln t, or T + 1 if none.
  int first_active_round(double x, std::int64_t rank) const;

 private:
  double u_;
  double eps_;
  int horizon_;
  std::vector<double> level_;  // index 0 unused
};

// Online trimmed mean: the i-th sample x becomes active at the first round
// t >= its arrival round with |x|^(1+eps) <= 2 u i ln t and stays active.
// read(t) = (sum of active samples) / (number of samples seen).
class OnlineTrimmedMean {
 public:
  explicit OnlineTrimmedMean(std::shared_ptr<const TrimmedThresholds> thresholds);

  void push(double x, int round);
  double read(int round);

  std::int64_t count() const { return n_; }
  int last_push_round() const { return last_push_; }
  std::size_t pending() const;

 private:
  std::shared_ptr<const TrimmedThresholds> thr_;
  std::map<int, std::vector<double>> deferred_;
  double running_sum_ = 0.0;
  std::int64_t n_ = 0;
  int last_push_ = 0;
  int drained_through_ = 0;
};

}  // namespace mpucb
