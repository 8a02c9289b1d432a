#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace mmdscan {

/// Which consistency guarantee to evaluate.
enum class BoundCase {
  RefS1,             ///< argmax against a reference, one anomaly
  RefKnownS,         ///< top-s against a reference
  RefUnknownS,       ///< threshold against a reference
  LooS1,             ///< leave-one-out argmax, one anomaly
  LooKnownS,         ///< leave-one-out top-s, s/n -> alpha < 1/2
  LooUnknownS,       ///< leave-one-out threshold
  MixtureRefKnownS,  ///< RefKnownS with q = (1-eps) p + eps q~
  MixtureLooKnownS,  ///< LooKnownS with q = (1-eps) p + eps q~
};

/// Sample-size guarantee inputs. `mmd2` is MMD^2[p, q], or MMD^2[p, q~] for
/// the mixture cases. Natural logarithms throughout.
struct BoundSpec {
  BoundCase which = BoundCase::RefS1;
  double kernel_bound = 1.0;
  double mmd2 = 0.0;
  double eta = 0.1;
  std::size_t n = 2;
  std::size_t s = 1;
  std::optional<double> delta;
  /// Limit of s/n; LooKnownS and MixtureLooKnownS only.
  double alpha = 0.0;
  /// Mixture weight in (0, 1]; mixture cases only.
  double epsilon = 1.0;
  /// E[MMD_u^2[Y, Ybar]] under contamination; LooUnknownS only.
  std::optional<double> e_null;
};

struct BoundResult {
  /// Right-hand side of the sufficient condition m > bound.
  double bound = 0.0;
  /// Smallest integer strictly greater than `bound`.
  std::uint64_t m = 0;
};

/// Throws InvalidInput when the spec violates the selected case's
/// preconditions (including delta >= MMD^2, where the bound is undefined).
BoundResult evaluate_bound(const BoundSpec& spec);

inline std::uint64_t required_m(const BoundSpec& spec) { return evaluate_bound(spec).m; }

/// ln((n - s) s): the s-dependence of the known-s reference bound.
double ref_known_s_log_term(std::size_t n, std::size_t s);

std::string_view to_string(BoundCase c) noexcept;
/// Kebab-case names: ref-s1, ref-known-s, ref-unknown-s, loo-s1, loo-known-s,
/// loo-unknown-s, mixture-ref-known-s, mixture-loo-known-s.
BoundCase parse_bound_case(std::string_view name);

}  // namespace mmdscan
