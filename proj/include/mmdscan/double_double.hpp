#pragma once

// Unevaluated sum hi + lo, about 106 significant bits.
//
// MMD estimates are differences of kernel means of order one and can land
// near 1e-5, which costs five digits to cancellation. Kernel sums are
// accumulated and combined in this form and rounded to double once, at the
// end. Only the error-free two_sum and fma are relied on, so the type works
// on every IEEE-754 target without extended-precision hardware.

#include <cmath>

namespace mmdscan {

struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double h) : hi(h) {}  // NOLINT: implicit by design
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

  double value() const noexcept { return hi + lo; }

  friend bool operator==(const DoubleDouble&, const DoubleDouble&) = default;
};

/// a + b exactly, as (rounded sum, rounding error).
inline DoubleDouble two_sum(double a, double b) noexcept {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

/// two_sum for |a| >= |b|.
inline DoubleDouble quick_two_sum(double a, double b) noexcept {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) noexcept {
  DoubleDouble s = two_sum(a.hi, b.hi);
  const DoubleDouble t = two_sum(a.lo, b.lo);
  s = quick_two_sum(s.hi, s.lo + t.hi);
  return quick_two_sum(s.hi, s.lo + t.lo);
}

inline DoubleDouble operator-(DoubleDouble a) noexcept { return {-a.hi, -a.lo}; }

inline DoubleDouble operator-(DoubleDouble a, DoubleDouble b) noexcept { return a + (-b); }

inline DoubleDouble& operator+=(DoubleDouble& a, DoubleDouble b) noexcept { return a = a + b; }

inline DoubleDouble operator*(DoubleDouble a, double b) noexcept {
  const double p = a.hi * b;
  return quick_two_sum(p, std::fma(a.hi, b, -p) + a.lo * b);
}

inline DoubleDouble operator/(DoubleDouble a, double b) noexcept {
  const double q1 = a.hi / b;
  DoubleDouble r = a - DoubleDouble(q1) * b;
  const double q2 = r.hi / b;
  r = r - DoubleDouble(q2) * b;
  const double q3 = r.hi / b;
  return quick_two_sum(q1, q2) + DoubleDouble(q3);
}

/// Running sum of doubles with the rounding error of every step kept in a
/// second accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double err = 0.0;

  void add(double v) noexcept {
    const DoubleDouble t = two_sum(sum, v);
    sum = t.hi;
    err += t.lo;
  }
  DoubleDouble result() const noexcept { return two_sum(sum, err); }
};

}  // namespace mmdscan
