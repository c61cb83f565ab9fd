#include "mpucb/rewards.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace mpucb {
namespace {

constexpr double kMomentSlack = 1.1;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double ScaledBernoulli::atom_scale() const { return std::pow(2.0 * gap, 1.0 / tail); }
double ScaledBernoulli::atom() const { return 1.0 / atom_scale(); }

double ScaledBernoulli::success_probability() const {
  const double a = atom_scale();
  const double p_opt = std::pow(a, 1.0 + tail);
  return is_optimal ? p_opt : p_opt - gap * a;
}

void validate(const RewardDistribution& dist) {
  std::visit(overloaded{
                 [](const AlphaStable& d) {
                   if (!(d.alpha > 1.0 && d.alpha <= 2.0))
                     throw InstanceError("stable alpha must lie in (1, 2]");
                   if (!(d.scale > 0.0)) throw InstanceError("stable scale must be positive");
                 },
                 [](const ScaledBernoulli& d) {
                   if (!(d.gap > 0.0 && d.gap < 0.25))
                     throw InstanceError("scaled Bernoulli gap must lie in (0, 1/4)");
                   if (!(d.tail > 0.0 && d.tail <= 1.0))
                     throw InstanceError("scaled Bernoulli tail must lie in (0, 1]");
                 },
                 [](const Pareto& d) {
                   if (!(d.shape > 1.0)) throw InstanceError("Pareto shape must exceed 1");
                   if (!(d.scale > 0.0)) throw InstanceError("Pareto scale must be positive");
                 },
                 [](const Gaussian& d) {
                   if (!(d.std >= 0.0)) throw InstanceError("Gaussian std must be nonnegative");
                 },
             },
             dist);
}

double mean(const RewardDistribution& dist) {
  return std::visit(overloaded{
                        [](const AlphaStable& d) { return d.location; },
                        [](const ScaledBernoulli& d) {
                          return d.success_probability() * d.atom();
                        },
                        [](const Pareto& d) { return d.shape * d.scale / (d.shape - 1.0); },
                        [](const Gaussian& d) { return d.mean; },
                    },
                    dist);
}

// Chambers-Mallows-Stuck with beta = 0.
double sample(const AlphaStable& d, SplitMix64& rng) {
  const double v = M_PI * (uniform_open01(rng) - 0.5);
  const double w = -std::log(uniform_open01(rng));
  const double a = d.alpha;
  const double z = std::sin(a * v) / std::pow(std::cos(v), 1.0 / a) *
                   std::pow(std::cos((1.0 - a) * v) / w, (1.0 - a) / a);
  return d.location + d.scale * z;
}

double sample(const ScaledBernoulli& d, SplitMix64& rng) {
  return uniform_open01(rng) < d.success_probability() ? d.atom() : 0.0;
}

double sample(const Pareto& d, SplitMix64& rng) {
  return d.scale * std::pow(uniform_open01(rng), -1.0 / d.shape);
}

double sample(const Gaussian& d, SplitMix64& rng) {
  if (d.std == 0.0) return d.mean;
  return d.mean + d.std * standard_normal(rng);
}

double sample(const RewardDistribution& d, SplitMix64& rng) {
  return std::visit([&](const auto& x) { return sample(x, rng); }, d);
}

// E|Z|^p = (2/pi) Gamma(p+1) sin(pi p / 2) * I, where
// I = int_0^inf (1 - exp(-t^alpha)) t^(-p-1) dt.
// The [0, 1] piece is summed from the exponential series; the tail is
// 1/p - int_1^inf exp(-t^alpha) t^(-p-1) dt, evaluated numerically.
double stable_abs_moment(double alpha, double p) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw InstanceError("alpha must lie in (0, 2]");
  if (!(p > 0.0 && p < alpha)) throw InstanceError("moment order must lie in (0, alpha)");

  static std::mutex mu;
  static std::map<std::pair<double, double>, double> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find({alpha, p}); it != cache.end()) return it->second;
  }

  double head = 0.0;
  double fact = 1.0;
  for (int j = 1; j < 200; ++j) {
    fact *= j;
    const double term = 1.0 / (fact * (alpha * j - p));
    head += (j % 2 == 1) ? term : -term;
    if (term < 1e-18 * std::abs(head)) break;
  }

  boost::math::quadrature::exp_sinh<double> integrator;
  const double tail_decay = integrator.integrate(
      [&](double t) { return std::exp(-std::pow(t, alpha)) * std::pow(t, -p - 1.0); }, 1.0,
      std::numeric_limits<double>::infinity());
  const double integral = head + 1.0 / p - tail_decay;
  const double moment = 2.0 / M_PI * std::tgamma(p + 1.0) * std::sin(M_PI * p / 2.0) * integral;

  std::lock_guard lock(mu);
  cache.emplace(std::make_pair(alpha, p), moment);
  return moment;
}

double BanditInstance::max_gap() const {
  return gaps.empty() ? 0.0 : *std::max_element(gaps.begin(), gaps.end());
}

void finalize(BanditInstance& inst) {
  if (inst.arms.size() < 1) throw InstanceError("instance needs at least one arm");
  for (const auto& a : inst.arms) validate(a);
  inst.means.clear();
  for (const auto& a : inst.arms) inst.means.push_back(mean(a));
  const auto best = std::max_element(inst.means.begin(), inst.means.end());
  inst.optimal_arm = static_cast<int>(best - inst.means.begin());
  inst.gaps.clear();
  for (double m : inst.means) inst.gaps.push_back(*best - m);
  inst.gaps[inst.optimal_arm] = 0.0;
}

BanditInstance make_hard_instance(int k, double gap, double eps) {
  if (k < 2) throw InstanceError("hard instance needs K >= 2");
  if (!(gap > 0.0 && gap < 0.25)) throw InstanceError("gap must lie in (0, 1/4)");
  if (!(eps > 0.0 && eps <= 1.0)) throw InstanceError("eps must lie in (0, 1]");
  BanditInstance inst;
  inst.eps = eps;
  for (int i = 0; i < k; ++i) inst.arms.push_back(ScaledBernoulli{gap, eps, i == 0});
  finalize(inst);
  inst.u = 1.0;
  // Exact centred moment of the two-point laws.
  double v = 0.0;
  for (const auto& arm : inst.arms) {
    const auto& sb = std::get<ScaledBernoulli>(arm);
    const double q = sb.success_probability();
    const double mu = mean(arm);
    v = std::max(v, (1.0 - q) * std::pow(mu, 1.0 + eps) +
                        q * std::pow(sb.atom() - mu, 1.0 + eps));
  }
  inst.v = v;
  return inst;
}

double stable_moment_eps(double alpha) { return std::min(1.0, (alpha - 1.0) * 0.9); }

BanditInstance make_stable_instance(int k, double alpha, Rng& rng) {
  if (k < 1) throw InstanceError("instance needs at least one arm");
  if (!(alpha > 1.0 && alpha <= 2.0)) throw InstanceError("stable alpha must lie in (1, 2]");
  BanditInstance inst;
  inst.eps = stable_moment_eps(alpha);
  for (int i = 0; i < k; ++i) inst.arms.push_back(AlphaStable{alpha, 1.0, uniform_open01(rng)});
  finalize(inst);

  const double p = 1.0 + inst.eps;
  const double centred = stable_abs_moment(alpha, p);
  double u = 0.0;
  for (const auto& arm : inst.arms) {
    const auto& s = std::get<AlphaStable>(arm);
    const double norm = std::pow(centred * std::pow(s.scale, p), 1.0 / p);  // Minkowski
    u = std::max(u, std::pow(norm + std::abs(s.location), p));
  }
  inst.u = kMomentSlack * u;
  inst.v = kMomentSlack * centred;
  return inst;
}

BanditInstance make_gaussian_instance(int k, double std, Rng& rng) {
  if (!(std > 0.0)) throw InstanceError("Gaussian instance std must be positive");
  BanditInstance inst;
  inst.eps = 1.0;
  for (int i = 0; i < k; ++i) inst.arms.push_back(Gaussian{uniform_open01(rng), std});
  finalize(inst);
  double u = 0.0;
  for (double m : inst.means) u = std::max(u, std * std + m * m);
  inst.u = u;
  inst.v = std * std;
  return inst;
}

BanditInstance make_point_mass_instance(const std::vector<double>& means) {
  BanditInstance inst;
  inst.eps = 1.0;
  for (double m : means) inst.arms.push_back(Gaussian{m, 0.0});
  finalize(inst);
  double u = 1.0;
  for (double m : inst.means) u = std::max(u, m * m);
  inst.u = u;
  inst.v = 1e-12;
  return inst;
}

double lower_bound_reference(const BanditInstance& inst, double eps, double horizon) {
  if (!(eps > 0.0)) throw InstanceError("eps must be positive");
  double total = 0.0;
  for (double g : inst.gaps)
    if (g > 0.0) total += std::pow(2.0, 1.0 - 1.0 / eps) * std::pow(g, -1.0 / eps);
  return total * std::log(horizon);
}

}  // namespace mpucb
