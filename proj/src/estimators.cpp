#include "mpucb/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mpucb {

void RateParams::validate() const {
  if (!(c > 0.0)) throw EstimatorError("rate constant c must be positive");
  if (!(v > 0.0)) throw EstimatorError("moment bound v must be positive");
  if (!(eps > 0.0 && eps <= 1.0)) throw EstimatorError("eps must lie in (0, 1]");
}

double confidence_radius(const RateParams& params, double n, double t) {
  const double e = params.eps;
  return std::pow(params.v, 1.0 / (1.0 + e)) *
         std::pow(2.0 * params.c * std::log(t) / n, e / (1.0 + e));
}

double trimmed_mean(std::span<const double> samples, double u, double eps, double delta) {
  if (samples.empty()) throw EstimatorError("trimmed mean of an empty sample");
  if (!(delta > 0.0 && delta < 1.0)) throw EstimatorError("delta must lie in (0, 1)");
  if (!(u > 0.0)) throw EstimatorError("u must be positive");
  const double log_inv_delta = std::log(1.0 / delta);
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double rank = static_cast<double>(i + 1);
    const double threshold = std::pow(u * rank / log_inv_delta, 1.0 / (1.0 + eps));
    if (std::abs(samples[i]) <= threshold) sum += samples[i];
  }
  return sum / static_cast<double>(samples.size());
}

int median_of_means_group_count(std::size_t n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw EstimatorError("delta must lie in (0, 1)");
  const double k = std::min(8.0 * std::log(std::exp(0.125) / delta), static_cast<double>(n) / 2.0);
  return std::max(1, static_cast<int>(std::floor(k)));
}

double median_of_means_groups(std::span<const double> samples, int groups) {
  if (samples.empty()) throw EstimatorError("median of means of an empty sample");
  const std::size_t n = samples.size();
  const std::size_t k = static_cast<std::size_t>(std::clamp<long long>(groups, 1, static_cast<long long>(n)));
  const std::size_t per = n / k;
  std::vector<double> means(k);
  for (std::size_t g = 0; g < k; ++g) {
    double s = 0.0;
    for (std::size_t i = g * per; i < (g + 1) * per; ++i) s += samples[i];
    means[g] = s / static_cast<double>(per);
  }
  std::sort(means.begin(), means.end());
  if (k % 2 == 1) return means[k / 2];
  return 0.5 * (means[k / 2 - 1] + means[k / 2]);
}

double median_of_means(std::span<const double> samples, double delta) {
  if (samples.empty()) throw EstimatorError("median of means of an empty sample");
  return median_of_means_groups(samples, median_of_means_group_count(samples.size(), delta));
}

double catoni_alpha(std::size_t n, double v, double delta) {
  const double l = std::log(1.0 / delta);
  const double nn = static_cast<double>(n);
  if (!(nn > 2.0 * l)) throw EstimatorError("Catoni estimator needs n > 2 ln(1/delta)");
  return std::sqrt(2.0 * l / (nn * (v + 2.0 * v * l / (nn - 2.0 * l))));
}

double catoni_mean(std::span<const double> samples, double v, double delta) {
  if (samples.empty()) throw EstimatorError("Catoni mean of an empty sample");
  if (!(v > 0.0)) throw EstimatorError("v must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw EstimatorError("delta must lie in (0, 1)");
  const double a = catoni_alpha(samples.size(), v, delta);
  auto psi = [](double x) {
    const double ax = std::abs(x);
    return std::copysign(std::log1p(ax + 0.5 * ax * ax), x);
  };
  // Decreasing in mu.
  auto score = [&](double mu) {
    double s = 0.0;
    for (double x : samples) s += psi(a * (x - mu));
    return s;
  };
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  double lo = *mn, hi = *mx;
  if (lo == hi) return lo;
  const double f_lo = score(lo), f_hi = score(hi);
  if (!(f_lo >= 0.0 && f_hi <= 0.0)) throw EstimatorError("Catoni bracket does not contain a root");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (score(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double empirical_mean(std::span<const double> samples) {
  if (samples.empty()) throw EstimatorError("mean of an empty sample");
  return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

TrimmedThresholds::TrimmedThresholds(double u, double eps, int horizon)
    : u_(u), eps_(eps), horizon_(horizon), level_(static_cast<std::size_t>(horizon) + 1, 0.0) {
  if (!(u > 0.0)) throw EstimatorError("u must be positive");
  if (!(eps > 0.0 && eps <= 1.0)) throw EstimatorError("eps must lie in (0, 1]");
  if (horizon < 1) throw EstimatorError("horizon must be at least 1");
  for (int t = 1; t <= horizon; ++t) level_[t] = 2.0 * u * std::log(static_cast<double>(t));
}

int TrimmedThresholds::first_active_round(double x, std::int64_t rank) const {
  const double power = std::pow(std::abs(x), 1.0 + eps_);
  const double i = static_cast<double>(rank);
  // level_ is nondecreasing in t, so this is a binary search over [1, T].
  int lo = 1, hi = horizon_ + 1;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (power <= level_[mid] * i) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

OnlineTrimmedMean::OnlineTrimmedMean(std::shared_ptr<const TrimmedThresholds> thresholds)
    : thr_(std::move(thresholds)) {
  if (!thr_) throw EstimatorError("thresholds must not be null");
}

void OnlineTrimmedMean::push(double x, int round) {
  if (round < last_push_) throw EstimatorError("pushes must have nondecreasing rounds");
  if (round < drained_through_)
    throw EstimatorError("push at round " + std::to_string(round) + " after a read at round " +
                         std::to_string(drained_through_));
  last_push_ = round;
  ++n_;
  const int activation = std::max(round, thr_->first_active_round(x, n_));
  if (activation > thr_->horizon()) return;  // never selected within the horizon
  if (activation <= drained_through_) {
    running_sum_ += x;
  } else {
    deferred_[activation].push_back(x);
  }
}

double OnlineTrimmedMean::read(int round) {
  if (n_ == 0) throw EstimatorError("read before any sample was pushed");
  if (round < last_push_) throw EstimatorError("read at a round earlier than the last push");
  if (round > thr_->horizon()) throw EstimatorError("read beyond the horizon");
  if (round > drained_through_) {
    auto end = deferred_.upper_bound(round);
    for (auto it = deferred_.begin(); it != end; ++it)
      for (double x : it->second) running_sum_ += x;
    deferred_.erase(deferred_.begin(), end);
    drained_through_ = round;
  }
  return running_sum_ / static_cast<double>(n_);
}

std::size_t OnlineTrimmedMean::pending() const {
  std::size_t total = 0;
  for (const auto& [_, xs] : deferred_) total += xs.size();
  return total;
}

}  // namespace mpucb
