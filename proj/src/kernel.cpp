#include "mmdscan/kernel.hpp"

#include <cmath>
#include <string>

#include "mmdscan/errors.hpp"

namespace mmdscan {

KernelSpec::KernelSpec(KernelFamily family, double sigma) : family_(family), sigma_(sigma) {
  if (!(std::isfinite(sigma) && sigma > 0.0)) {
    throw InvalidInput("kernel bandwidth must be finite and positive, got " +
                       std::to_string(sigma));
  }
}

double KernelSpec::rate() const noexcept {
  switch (family_) {
    case KernelFamily::Gaussian:
      return 1.0 / (2.0 * sigma_ * sigma_);
    case KernelFamily::Laplace:
      return 1.0 / sigma_;
  }
  return 0.0;
}

double eval_kernel(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InvalidInput("kernel arguments differ in dimension (" + std::to_string(x.size()) +
                       " vs " + std::to_string(y.size()) + ")");
  }
  if (x.empty()) throw InvalidInput("kernel arguments must have dimension >= 1");

  double dist = 0.0;
  if (spec.family() == KernelFamily::Gaussian) {
    for (std::size_t c = 0; c < x.size(); ++c) {
      const double diff = x[c] - y[c];
      dist += diff * diff;
    }
  } else {
    for (std::size_t c = 0; c < x.size(); ++c) dist += std::abs(x[c] - y[c]);
  }
  return std::exp(-spec.rate() * dist);
}

double kernel_bound(const KernelSpec&) noexcept { return 1.0; }

std::string_view to_string(KernelFamily family) noexcept {
  return family == KernelFamily::Gaussian ? "gaussian" : "laplace";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "gaussian") return KernelFamily::Gaussian;
  if (name == "laplace") return KernelFamily::Laplace;
  throw InvalidInput("unknown kernel family '" + std::string(name) +
                     "' (expected gaussian or laplace)");
}

}  // namespace mmdscan
