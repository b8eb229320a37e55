#include "ds_oracle.h"

#include <algorithm>
#include <map>

#include "random_scenarios.h"

namespace sls::testing {

DenseMass ToDense(const MassFunction& m) {
  DenseMass dense(std::size_t{1} << m.frame().size(), 0.0);
  for (const auto& [subset, weight] : m.focal()) dense[subset] = weight;
  return dense;
}

DenseMass BruteForceCombine(const DenseMass& a, const DenseMass& b) {
  DenseMass joint(a.size(), 0.0);
  double conflict = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = 0; y < b.size(); ++y) {
      const double p = a[x] * b[y];
      if ((x & y) == 0) {
        conflict += p;
      } else {
        joint[x & y] += p;
      }
    }
  }
  for (double& w : joint) w /= (1.0 - conflict);
  joint[0] = 0.0;
  return joint;
}

double BruteForcePlausibility(const DenseMass& m, HypothesisSet a) {
  double pl = 0.0;
  for (std::size_t x = 1; x < m.size(); ++x) {
    if ((x & a) != 0) pl += m[x];
  }
  return pl;
}

Frame RandomFrame(SplitMix64& rng, std::size_t size) {
  std::vector<int> pool(std::begin(kLimitPool), std::end(kLimitPool));
  std::vector<SpeedLimit> chosen;
  while (chosen.size() < size) {
    const std::size_t i = rng.NextBelow(pool.size());
    chosen.push_back(SpeedLimit::Kmh(pool[i]));
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
  }
  return Frame(chosen);
}

MassFunction RandomMass(SplitMix64& rng, const Frame& frame, std::size_t focal) {
  std::map<HypothesisSet, double> weights;
  double sum = 0.0;
  for (std::size_t i = 0; i < focal; ++i) {
    const auto subset = static_cast<HypothesisSet>(1 + rng.NextBelow(frame.full()));
    const double w = 0.05 + rng.NextUnit();
    weights[subset] += w;
    sum += w;
  }
  // Keep the full frame focal so that random pairs never conflict totally.
  const double vacuous = 0.05 + rng.NextUnit() * 0.2;
  weights[frame.full()] += vacuous;
  sum += vacuous;
  for (auto& [subset, w] : weights) w /= sum;
  return MassFunction(frame, weights);
}

}  // namespace sls::testing
