#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace symprop {

/// g(y) = -y log y (0 at y = 0). Defined for y >= 0.
struct NegYLogY {};
/// g(y) = |y - c|.
struct AbsShift {
  double c = 0.0;
};

using ApproxTarget = std::variant<NegYLogY, AbsShift>;

double evaluate_target(const ApproxTarget& target, double y);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// A degree-L polynomial in the monomial basis of the original variable,
/// together with its measured uniform error against the target.
struct PolynomialApprox {
  unsigned degree = 0;
  std::vector<double> coeffs;  // b_0..b_L
  Interval interval;
  double sup_error = 0.0;

  double operator()(double y) const;
  /// Largest |b_i| over i >= `from`.
  double max_abs_coeff(unsigned from = 0) const;
};

inline constexpr unsigned kMaxApproxDegree = 40;

/// Near-minimax degree-L approximation on [lo, hi] by Remez exchange, started
/// from the Chebyshev alternation points. Iterates until the reference-set
/// error heights agree to 1e-3 relative. sup_error is the largest deviation of
/// the monomial-form polynomial on the dense check grid (approximation_grid).
///
/// Throws std::invalid_argument for lo >= hi, L > 40, or an interval outside
/// the target's domain. Double precision loses digits in the monomial form
/// beyond L of roughly 25.
PolynomialApprox best_poly_approx(const ApproxTarget& target, Interval interval,
                                  unsigned degree);

/// The Chebyshev-clustered grid on which sup_error is measured.
std::vector<double> approximation_grid(Interval interval, unsigned degree);

/// sum_i b_i (count)_i / (n)_i with (a)_i = a (a-1) ... (a-i+1). This is an
/// unbiased estimate of sum_i b_i p^i when count ~ Binomial(n, p) and the
/// degree is at most n. Terms with i > n vanish.
double falling_factorial_estimate(std::span<const double> coeffs, std::uint64_t count,
                                  std::uint64_t n);
double falling_factorial_estimate(const PolynomialApprox& approx, std::uint64_t count,
                                  std::uint64_t n);

}  // namespace symprop
