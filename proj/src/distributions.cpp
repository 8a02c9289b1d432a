#include "mmdscan/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <string>

#include "mmdscan/errors.hpp"
#include "mmdscan/parallel.hpp"

namespace mmdscan {
namespace {

template <typename... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};

void check_variance(double v) {
  if (!(std::isfinite(v) && v > 0.0)) {
    throw InvalidInput("distribution variance must be positive, got " + std::to_string(v));
  }
}

}  // namespace

DistSpec contaminated(double epsilon, const DistSpec& p, const DistSpec& q_tilde) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InvalidInput("contamination weight must lie in [0, 1]");
  }
  return {MixtureDist{{{1.0 - epsilon, p}, {epsilon, q_tilde}}}};
}

void validate(const DistSpec& spec) {
  std::visit(overloaded{
                 [](const GaussianDist& g) { check_variance(g.variance); },
                 [](const LaplaceDist& l) { check_variance(l.variance); },
                 [](const BernoulliDist& b) {
                   if (!(b.p0 >= 0.0 && b.p0 <= 1.0)) {
                     throw InvalidInput("Bernoulli probability must lie in [0, 1]");
                   }
                 },
                 [](const MixtureDist& mix) {
                   if (mix.components.empty()) throw InvalidInput("mixture has no components");
                   double total = 0.0;
                   for (const auto& c : mix.components) {
                     if (!(c.weight >= 0.0)) throw InvalidInput("mixture weights must be >= 0");
                     total += c.weight;
                     validate(c.dist);
                   }
                   if (std::abs(total - 1.0) > 1e-9) {
                     throw InvalidInput("mixture weights sum to " + std::to_string(total) +
                                        ", expected 1");
                   }
                 },
             },
             spec.family);
}

double mean_of(const DistSpec& spec) {
  return std::visit(overloaded{
                        [](const GaussianDist& g) { return g.mean; },
                        [](const LaplaceDist& l) { return l.mean; },
                        [](const BernoulliDist& b) { return b.p0; },
                        [](const MixtureDist& mix) {
                          double mean = 0.0;
                          for (const auto& c : mix.components) mean += c.weight * mean_of(c.dist);
                          return mean;
                        },
                    },
                    spec.family);
}

double variance_of(const DistSpec& spec) {
  return std::visit(overloaded{
                        [](const GaussianDist& g) { return g.variance; },
                        [](const LaplaceDist& l) { return l.variance; },
                        [](const BernoulliDist& b) { return b.p0 * (1.0 - b.p0); },
                        [&spec](const MixtureDist& mix) {
                          double second = 0.0;
                          for (const auto& c : mix.components) {
                            const double mu = mean_of(c.dist);
                            second += c.weight * (variance_of(c.dist) + mu * mu);
                          }
                          const double mean = mean_of(spec);
                          return second - mean * mean;
                        },
                    },
                    spec.family);
}

double draw(const DistSpec& spec, Rng& rng) {
  return std::visit(
      overloaded{
          [&rng](const GaussianDist& g) {
            return std::normal_distribution<double>(g.mean, std::sqrt(g.variance))(rng);
          },
          [&rng](const LaplaceDist& l) {
            // Difference of two unit exponentials is standard Laplace.
            std::exponential_distribution<double> expo(1.0);
            const double scale = std::sqrt(l.variance / 2.0);
            const double e1 = expo(rng);
            const double e2 = expo(rng);
            return l.mean + scale * (e1 - e2);
          },
          [&rng](const BernoulliDist& b) {
            return std::bernoulli_distribution(b.p0)(rng) ? 1.0 : 0.0;
          },
          [&rng](const MixtureDist& mix) {
            std::vector<double> weights;
            weights.reserve(mix.components.size());
            for (const auto& c : mix.components) weights.push_back(c.weight);
            std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
            return draw(mix.components[pick(rng)].dist, rng);
          },
      },
      spec.family);
}

Sequence sample_sequence(const DistSpec& spec, std::size_t m, std::uint64_t seed) {
  validate(spec);
  if (m < 2) throw InvalidInput("sequence length must be >= 2");
  Rng rng(seed);
  std::vector<double> values(m);
  for (auto& v : values) v = draw(spec, rng);
  return Sequence::from_scalars(std::move(values));
}

Dataset make_dataset(std::size_t n, std::size_t s, const DistSpec& p, const DistSpec& q,
                     std::size_t m, bool with_reference, std::uint64_t seed,
                     std::size_t workers) {
  if (n < 2) throw InvalidInput("a dataset needs n >= 2");
  if (s >= n) throw InvalidInput("s must be <= n - 1");
  if (m < 2) throw InvalidInput("sequence length must be >= 2");
  validate(p);
  validate(q);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng placement(derive_seed(seed, {0}));
  std::shuffle(order.begin(), order.end(), placement);
  std::vector<std::size_t> truth(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s));
  std::sort(truth.begin(), truth.end());

  std::vector<char> anomalous(n, 0);
  for (std::size_t k : truth) anomalous[k] = 1;

  std::vector<std::optional<Sequence>> slots(n);
  parallel_for(n, workers, [&](std::size_t k) {
    slots[k] = sample_sequence(anomalous[k] ? q : p, m, derive_seed(seed, {1, k}));
  });
  std::vector<Sequence> sequences;
  sequences.reserve(n);
  for (auto& slot : slots) sequences.push_back(std::move(*slot));

  std::optional<Sequence> reference;
  if (with_reference) reference = sample_sequence(p, m, derive_seed(seed, {2}));
  return Dataset(std::move(sequences), std::move(reference), std::move(truth));
}

}  // namespace mmdscan
