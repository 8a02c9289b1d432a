#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "mmdscan/dataset.hpp"
#include "mmdscan/random.hpp"

namespace mmdscan {

struct GaussianDist {
  double mean = 0.0;
  double variance = 1.0;
};

/// Parametrized by mean and variance; the scale is sqrt(variance / 2).
struct LaplaceDist {
  double mean = 0.0;
  double variance = 1.0;
};

/// Takes value 1 with probability p0 and 0 otherwise.
struct BernoulliDist {
  double p0 = 0.5;
};

struct MixtureComponent;

struct MixtureDist {
  std::vector<MixtureComponent> components;
};

/// A 1-D sampling distribution.
struct DistSpec {
  std::variant<GaussianDist, LaplaceDist, BernoulliDist, MixtureDist> family;
};

struct MixtureComponent {
  double weight = 0.0;
  DistSpec dist;
};

/// (1 - eps) p + eps q_tilde.
DistSpec contaminated(double epsilon, const DistSpec& p, const DistSpec& q_tilde);

/// Throws InvalidInput when variances are not positive, p0 is outside
/// [0, 1], or mixture weights are negative or do not sum to 1.
void validate(const DistSpec& spec);

double mean_of(const DistSpec& spec);
double variance_of(const DistSpec& spec);

/// One draw. Mixtures pick a component by weight, then sample it.
double draw(const DistSpec& spec, Rng& rng);

/// m i.i.d. draws, deterministic given seed. Requires m >= 2.
Sequence sample_sequence(const DistSpec& spec, std::size_t m, std::uint64_t seed);

/// n sequences of length m; s of them, at positions picked by a seeded
/// uniform shuffle, are drawn from q and the rest from p. With
/// `with_reference`, an extra reference sequence is drawn from p.
///
/// Sub-seeds: positions use derive_seed(seed, {0}), sequence k uses
/// derive_seed(seed, {1, k}), the reference uses derive_seed(seed, {2}).
/// Output is identical for every worker count.
Dataset make_dataset(std::size_t n, std::size_t s, const DistSpec& p, const DistSpec& q,
                     std::size_t m, bool with_reference, std::uint64_t seed,
                     std::size_t workers = 1);

}  // namespace mmdscan
