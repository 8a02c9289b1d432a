#pragma once

#include <span>
#include <string>
#include <string_view>

namespace mmdscan {

enum class KernelFamily { Gaussian, Laplace };

/// Bounded characteristic kernel on R^d.
///
/// Gaussian: k(x, y) = exp(-||x - y||_2^2 / (2 sigma^2))
/// Laplace:  k(x, y) = exp(-||x - y||_1 / sigma)
///
/// Both families take values in [0, 1], so the uniform bound K is 1.
class KernelSpec {
 public:
  /// Gaussian with sigma = 1.
  KernelSpec() = default;
  /// Throws InvalidInput unless sigma is finite and > 0.
  KernelSpec(KernelFamily family, double sigma);

  static KernelSpec gaussian(double sigma) { return {KernelFamily::Gaussian, sigma}; }
  static KernelSpec laplace(double sigma) { return {KernelFamily::Laplace, sigma}; }

  KernelFamily family() const noexcept { return family_; }
  double sigma() const noexcept { return sigma_; }

  /// Coefficient c such that k = exp(-c * dist), with dist the squared L2
  /// distance (Gaussian) or the L1 distance (Laplace).
  double rate() const noexcept;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

 private:
  KernelFamily family_ = KernelFamily::Gaussian;
  double sigma_ = 1.0;
};

/// Throws InvalidInput when x and y differ in dimension or are empty.
double eval_kernel(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

double kernel_bound(const KernelSpec& spec) noexcept;

std::string_view to_string(KernelFamily family) noexcept;
/// Accepts "gaussian" and "laplace".
KernelFamily parse_kernel_family(std::string_view name);

}  // namespace mmdscan
