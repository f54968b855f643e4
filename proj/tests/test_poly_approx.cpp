#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "symprop/poly_approx.hpp"

using namespace symprop;

namespace {

// Best affine approximation of |x| on [-1, 1] by brute force over (a, b).
double affine_grid_minimax() {
  double best = INFINITY;
  for (int ia = -100; ia <= 100; ++ia) {
    for (int ib = 0; ib <= 100; ++ib) {
      const double a = ia / 100.0;
      const double b = ib / 100.0;
      double err = 0.0;
      for (int i = 0; i <= 400; ++i) {
        const double x = -1.0 + i / 200.0;
        err = std::max(err, std::abs(a * x + b - std::abs(x)));
      }
      best = std::min(best, err);
    }
  }
  return best;
}

// Sign alternations among error extrema of magnitude >= 0.99 sup_error.
int count_alternations(const PolynomialApprox& approx, const ApproxTarget& target) {
  int count = 0;
  int last = 0;
  const int m = 20001;
  for (int i = 0; i < m; ++i) {
    const double y = approx.interval.lo + (approx.interval.hi - approx.interval.lo) * i / (m - 1);
    const double e = approx(y) - evaluate_target(target, y);
    if (std::abs(e) < 0.99 * approx.sup_error) continue;
    const int s = e > 0 ? 1 : -1;
    if (s != last) {
      ++count;
      last = s;
    }
  }
  return count;
}

}  // namespace

TEST(PolyApprox, AbsoluteValueDegreeOne) {
  const auto approx = best_poly_approx(AbsShift{0.0}, {-1.0, 1.0}, 1);
  ASSERT_EQ(approx.coeffs.size(), 2u);
  EXPECT_NEAR(approx.coeffs[0], 0.5, 1e-9);
  EXPECT_NEAR(approx.coeffs[1], 0.0, 1e-9);
  EXPECT_NEAR(approx.sup_error, 0.5, 1e-9);
  EXPECT_NEAR(affine_grid_minimax(), 0.5, 1e-12);
}

TEST(PolyApprox, RejectsBadInputs) {
  EXPECT_THROW(best_poly_approx(NegYLogY{}, {0.3, 0.3}, 3), std::invalid_argument);
  EXPECT_THROW(best_poly_approx(NegYLogY{}, {0.5, 0.2}, 3), std::invalid_argument);
  EXPECT_THROW(best_poly_approx(NegYLogY{}, {-1.0, 1.0}, 3), std::invalid_argument);
  EXPECT_THROW(best_poly_approx(AbsShift{0.0}, {-1.0, 1.0}, 41), std::invalid_argument);
}

TEST(PolyApprox, SupErrorBoundsTheGrid) {
  for (unsigned L : {2u, 5u, 9u}) {
    for (const ApproxTarget& target : {ApproxTarget{NegYLogY{}}, ApproxTarget{AbsShift{0.3}}}) {
      const auto approx = best_poly_approx(target, {0.0, 1.0}, L);
      for (double y : approximation_grid(approx.interval, L)) {
        EXPECT_LE(std::abs(approx(y) - evaluate_target(target, y)), approx.sup_error * (1 + 1e-6));
      }
    }
  }
}

TEST(PolyApprox, EntropyRateIsInverseSquare) {
  std::vector<double> scaled;
  for (unsigned L : {2u, 4u, 8u, 16u}) {
    const auto approx = best_poly_approx(NegYLogY{}, {0.0, 1.0}, L);
    scaled.push_back(approx.sup_error * L * L);
  }
  // E_L L^2 stays bounded (and, for this target, roughly constant).
  for (double v : scaled) {
    EXPECT_GT(v, 0.05);
    EXPECT_LT(v, 0.5);
  }
}

TEST(PolyApprox, EquioscillationOnAbsoluteValue) {
  for (unsigned L = 1; L <= 5; ++L) {
    const ApproxTarget target = AbsShift{0.0};
    const auto approx = best_poly_approx(target, {-1.0, 1.0}, L);
    EXPECT_GE(count_alternations(approx, target), static_cast<int>(L) + 2) << "L=" << L;
  }
}

TEST(PolyApprox, MinimaxNearKnownConstant) {
  // Bernstein: L E_L(|x|) -> 0.2801... for even L.
  const auto approx = best_poly_approx(AbsShift{0.0}, {-1.0, 1.0}, 20);
  EXPECT_NEAR(approx.sup_error * 20, 0.2801694990, 0.05 * 0.28);
}

TEST(PolyApprox, CoefficientMagnitudeOnUnitInterval) {
  for (unsigned L = 1; L <= 12; ++L) {
    for (double c : {0.0, 0.25, -0.6}) {
      const auto approx = best_poly_approx(AbsShift{c}, {-1.0, 1.0}, L);
      EXPECT_LE(approx.max_abs_coeff(), std::pow(2.0, 3.0 * L));
    }
  }
}

TEST(PolyApprox, ShiftedIntervalMonomialForm) {
  // Approximation on a narrow interval far from 0 must still evaluate
  // correctly in the monomial basis of y.
  const Interval iv{0.001 - 0.0005, 0.001 + 0.0005};
  const auto approx = best_poly_approx(AbsShift{0.001}, iv, 4);
  for (double y : approximation_grid(iv, 4)) {
    EXPECT_LE(std::abs(approx(y) - std::abs(y - 0.001)), approx.sup_error * (1 + 1e-6));
  }
  EXPECT_LT(approx.sup_error, 0.0005);
}

TEST(FallingFactorial, Examples) {
  const std::vector<double> linear{0.0, 1.0};
  for (std::uint64_t c = 0; c <= 10; ++c) {
    EXPECT_DOUBLE_EQ(falling_factorial_estimate(linear, c, 10), c / 10.0);
  }
  const std::vector<double> square{0.0, 0.0, 1.0};
  double expectation = 0.0;
  for (unsigned mask = 0; mask < 8; ++mask) {
    expectation += falling_factorial_estimate(square, std::popcount(mask), 3) / 8.0;
  }
  EXPECT_NEAR(expectation, 0.25, 1e-15);
  EXPECT_EQ(falling_factorial_estimate(std::vector<double>{0.0, 3.0, -2.0}, 0, 5), 0.0);
  EXPECT_THROW(falling_factorial_estimate(linear, 4, 3), std::invalid_argument);
}

TEST(FallingFactorial, UnbiasedUnderBinomial) {
  for (unsigned n = 1; n <= 12; ++n) {
    for (unsigned L = 0; L <= std::min(6u, n); ++L) {
      std::vector<double> b(L + 1);
      for (unsigned i = 0; i <= L; ++i) b[i] = std::cos(1.0 + i) * (i + 1);
      for (int pi = 0; pi <= 10; ++pi) {
        const double p = pi / 10.0;
        double expectation = 0.0;
        for (unsigned c = 0; c <= n; ++c) {
          expectation += oracle::binomial_pmf(n, c, p) * falling_factorial_estimate(b, c, n);
        }
        double poly = 0.0;
        for (unsigned i = L + 1; i-- > 0;) poly = poly * p + b[i];
        EXPECT_NEAR(expectation, poly, 1e-10) << "n=" << n << " L=" << L << " p=" << p;
      }
    }
  }
}
