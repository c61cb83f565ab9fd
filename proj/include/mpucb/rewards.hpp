#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mpucb/rng.hpp"

namespace mpucb {

class InstanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Symmetric alpha-stable S(alpha, beta = 0, scale, location).
struct AlphaStable {
  double alpha = 2.0;
  double scale = 1.0;
  double location = 0.0;
};

// Two-point law on {0, 1/a} with a = (2 gap)^(1/tail). The optimal variant
// has mean 2 gap, the suboptimal one mean gap; both have E|X|^(1+tail) = 1.
struct ScaledBernoulli {
  double gap = 0.1;
  double tail = 1.0;
  bool is_optimal = false;

  double atom_scale() const;        // a
  double atom() const;              // 1 / a
  double success_probability() const;
};

// Pareto(shape, scale): P(X > x) = (scale / x)^shape for x >= scale.
struct Pareto {
  double shape = 2.0;
  double scale = 1.0;
};

// Normal(mean, std); std = 0 gives a point mass.
struct Gaussian {
  double mean = 0.0;
  double std = 1.0;
};

using RewardDistribution = std::variant<AlphaStable, ScaledBernoulli, Pareto, Gaussian>;

void validate(const RewardDistribution& dist);
double mean(const RewardDistribution& dist);

double sample(const AlphaStable& d, SplitMix64& rng);
double sample(const ScaledBernoulli& d, SplitMix64& rng);
double sample(const Pareto& d, SplitMix64& rng);
double sample(const Gaussian& d, SplitMix64& rng);
double sample(const RewardDistribution& d, SplitMix64& rng);

// E|Z|^p for the unit symmetric stable law (characteristic function
// exp(-|t|^alpha)), 0 < p < alpha, by quadrature over the characteristic
// function. Results are memoised per (alpha, p).
double stable_abs_moment(double alpha, double p);

struct BanditInstance {
  std::vector<RewardDistribution> arms;
  double eps = 1.0;  // moment order is 1 + eps
  double u = 1.0;    // bound on E|X|^(1+eps)
  double v = 1.0;    // bound on E|X - mu|^(1+eps)
  std::vector<double> means;
  int optimal_arm = 0;
  std::vector<double> gaps;

  int num_arms() const { return static_cast<int>(arms.size()); }
  double max_gap() const;
};

// Fills means, optimal arm (lowest id among maxima) and gaps from the arms.
void finalize(BanditInstance& inst);

// Lower-bound construction: arm 0 optimal with mean 2 gap, the rest mean gap.
BanditInstance make_hard_instance(int k, double gap, double eps);

// Unit-scale symmetric stable arms with locations ~ Uniform[0, 1].
BanditInstance make_stable_instance(int k, double alpha, Rng& rng);

// Gaussian arms with means ~ Uniform[0, 1] and common std (eps = 1).
BanditInstance make_gaussian_instance(int k, double std, Rng& rng);

// Point-mass arms (std = 0 Gaussians) at the given means.
BanditInstance make_point_mass_instance(const std::vector<double>& means);

// Moment order used for stable arms: min(1, 0.9 (alpha - 1)).
double stable_moment_eps(double alpha);

// sum over suboptimal arms of 2^(1 - 1/eps) gap^(-1/eps) ln T.
double lower_bound_reference(const BanditInstance& inst, double eps, double horizon);

}  // namespace mpucb
