#include "mmdscan/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "mmdscan/errors.hpp"

namespace mmdscan {
namespace {

constexpr std::array<std::pair<BoundCase, std::string_view>, 8> kNames{{
    {BoundCase::RefS1, "ref-s1"},
    {BoundCase::RefKnownS, "ref-known-s"},
    {BoundCase::RefUnknownS, "ref-unknown-s"},
    {BoundCase::LooS1, "loo-s1"},
    {BoundCase::LooKnownS, "loo-known-s"},
    {BoundCase::LooUnknownS, "loo-unknown-s"},
    {BoundCase::MixtureRefKnownS, "mixture-ref-known-s"},
    {BoundCase::MixtureLooKnownS, "mixture-loo-known-s"},
}};

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

void require_known_s(const BoundSpec& b) {
  require(b.s >= 1 && b.s + 1 <= b.n, "known-s bounds need 1 <= s <= n - 1");
}

double delta_of(const BoundSpec& b, double mmd2) {
  require(b.delta.has_value(), "unknown-s bounds need a threshold delta");
  const double delta = *b.delta;
  require(std::isfinite(delta) && delta > 0.0, "threshold delta must be > 0");
  require(delta < mmd2, "threshold delta must be below MMD^2 (bound undefined otherwise)");
  return delta;
}

double log_term(std::size_t v) { return std::log(static_cast<double>(v)); }

}  // namespace

BoundResult evaluate_bound(const BoundSpec& b) {
  require(positive_finite(b.kernel_bound), "kernel bound K must be > 0");
  require(positive_finite(b.mmd2), "MMD^2 must be > 0");
  require(positive_finite(b.eta), "slack eta must be > 0");
  require(b.n >= 2, "n must be >= 2");

  const double k2 = b.kernel_bound * b.kernel_bound;
  const double slack = 1.0 + b.eta;
  double mmd2 = b.mmd2;
  if (b.which == BoundCase::MixtureRefKnownS || b.which == BoundCase::MixtureLooKnownS) {
    require(b.epsilon > 0.0 && b.epsilon <= 1.0, "mixture weight epsilon must lie in (0, 1]");
    mmd2 = b.epsilon * b.epsilon * b.mmd2;
  }
  const double mmd4 = mmd2 * mmd2;

  double bound = 0.0;
  switch (b.which) {
    case BoundCase::RefS1:
      bound = 24.0 * k2 * slack / mmd4 * log_term(b.n);
      break;
    case BoundCase::RefKnownS:
    case BoundCase::MixtureRefKnownS:
      require_known_s(b);
      bound = 24.0 * k2 * slack / mmd4 * log_term((b.n - b.s) * b.s);
      break;
    case BoundCase::LooS1:
      bound = 16.0 * k2 * slack / mmd4 * log_term(b.n);
      break;
    case BoundCase::LooKnownS:
    case BoundCase::MixtureLooKnownS: {
      require_known_s(b);
      require(b.alpha >= 0.0 && b.alpha < 0.5, "alpha must lie in [0, 1/2)");
      const double shrink = (1.0 - 2.0 * b.alpha) * (1.0 - 2.0 * b.alpha);
      bound = 16.0 * k2 * slack / (shrink * mmd4) * log_term(b.s * (b.n - b.s));
      break;
    }
    case BoundCase::RefUnknownS: {
      require(b.s + 1 <= b.n, "unknown-s bounds need 0 <= s <= n - 1");
      const double delta = delta_of(b, mmd2);
      const double gap = mmd2 - delta;
      bound = 16.0 * slack * k2 *
              std::max(log_term(std::max<std::size_t>(b.s, 1)) / (gap * gap),
                       log_term(b.n - b.s) / (delta * delta));
      break;
    }
    case BoundCase::LooUnknownS: {
      require(b.s + 1 <= b.n, "unknown-s bounds need 0 <= s <= n - 1");
      const double delta = delta_of(b, mmd2);
      require(b.e_null.has_value(), "loo-unknown-s needs e_null = E[MMD_u^2[Y, Ybar]]");
      const double e_null = *b.e_null;
      require(std::isfinite(e_null) && e_null < delta, "e_null must be below delta");
      const double gap = mmd2 - delta;
      const double margin = delta - e_null;
      bound = 16.0 * slack * k2 *
              std::max(log_term(std::max<std::size_t>(b.s, 1)) / (gap * gap),
                       log_term(b.n - b.s) / (margin * margin));
      break;
    }
  }

  require(std::isfinite(bound) && bound < 1.8e19, "bound overflows a 64-bit sample count");
  return {bound, static_cast<std::uint64_t>(std::floor(bound)) + 1};
}

double ref_known_s_log_term(std::size_t n, std::size_t s) {
  require(s >= 1 && s + 1 <= n, "need 1 <= s <= n - 1");
  return std::log(static_cast<double>((n - s) * s));
}

std::string_view to_string(BoundCase c) noexcept {
  for (const auto& [value, name] : kNames) {
    if (value == c) return name;
  }
  return "unknown";
}

BoundCase parse_bound_case(std::string_view name) {
  for (const auto& [value, n] : kNames) {
    if (n == name) return value;
  }
  throw InvalidInput("unknown bound case '" + std::string(name) + "'");
}

}  // namespace mmdscan
