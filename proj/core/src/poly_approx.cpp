#include "symprop/poly_approx.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace symprop {

namespace {

constexpr double kHeightTolerance = 1e-3;
constexpr int kMaxExchanges = 60;

std::size_t grid_size(unsigned degree) { return 4001 + 500 * std::size_t{degree}; }

// Clenshaw evaluation of sum_k c_k T_k(u).
double chebyshev_eval(const Eigen::VectorXd& c, double u) {
  double b1 = 0.0;
  double b2 = 0.0;
  for (Eigen::Index k = c.size() - 1; k >= 1; --k) {
    const double b0 = 2.0 * u * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + c[0];
}

// Monomial coefficients in y of sum_k c_k T_k((y - mid) / half).
std::vector<double> to_monomial(const Eigen::VectorXd& cheb, double mid, double half) {
  const auto L = static_cast<std::size_t>(cheb.size() - 1);
  // a_j: coefficients in u.
  std::vector<double> a(L + 1, 0.0);
  std::vector<double> t_prev(L + 1, 0.0);
  std::vector<double> t_cur(L + 1, 0.0);
  t_prev[0] = 1.0;
  a[0] += cheb[0];
  if (L >= 1) {
    t_cur[1] = 1.0;
    a[1] += cheb[1];
  }
  for (std::size_t k = 2; k <= L; ++k) {
    std::vector<double> t_next(L + 1, 0.0);
    for (std::size_t j = 0; j < L; ++j) t_next[j + 1] += 2.0 * t_cur[j];
    for (std::size_t j = 0; j <= L; ++j) t_next[j] -= t_prev[j];
    for (std::size_t j = 0; j <= L; ++j) a[j] += cheb[static_cast<Eigen::Index>(k)] * t_next[j];
    t_prev.swap(t_cur);
    t_cur.swap(t_next);
  }
  // Substitute u = alpha * y + beta by Horner over polynomials.
  const double alpha = 1.0 / half;
  const double beta = -mid / half;
  std::vector<double> result{a[L]};
  for (std::size_t j = L; j-- > 0;) {
    std::vector<double> next(result.size() + 1, 0.0);
    for (std::size_t i = 0; i < result.size(); ++i) {
      next[i] += beta * result[i];
      next[i + 1] += alpha * result[i];
    }
    next[0] += a[j];
    result.swap(next);
  }
  return result;
}

void check_domain(const ApproxTarget& target, Interval interval) {
  if (!(interval.lo < interval.hi) || !std::isfinite(interval.lo) ||
      !std::isfinite(interval.hi)) {
    throw std::invalid_argument("approximation interval must satisfy lo < hi");
  }
  if (std::holds_alternative<NegYLogY>(target) && interval.lo < 0.0) {
    throw std::invalid_argument("-y log y is only defined for y >= 0");
  }
}

}  // namespace

double evaluate_target(const ApproxTarget& target, double y) {
  if (const auto* shift = std::get_if<AbsShift>(&target)) return std::abs(y - shift->c);
  return y > 0.0 ? -y * std::log(y) : 0.0;
}

double PolynomialApprox::operator()(double y) const {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * y + coeffs[i];
  return acc;
}

double PolynomialApprox::max_abs_coeff(unsigned from) const {
  double best = 0.0;
  for (std::size_t i = from; i < coeffs.size(); ++i) best = std::max(best, std::abs(coeffs[i]));
  return best;
}

std::vector<double> approximation_grid(Interval interval, unsigned degree) {
  const std::size_t m = grid_size(degree);
  const double mid = 0.5 * (interval.lo + interval.hi);
  const double half = 0.5 * (interval.hi - interval.lo);
  std::vector<double> grid(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = -std::cos(std::numbers::pi * static_cast<double>(i) /
                               static_cast<double>(m - 1));
    grid[i] = std::clamp(mid + half * u, interval.lo, interval.hi);
  }
  grid.front() = interval.lo;
  grid.back() = interval.hi;
  return grid;
}

PolynomialApprox best_poly_approx(const ApproxTarget& target, Interval interval,
                                  unsigned degree) {
  check_domain(target, interval);
  if (degree > kMaxApproxDegree) {
    throw std::invalid_argument("polynomial degree above the conditioning guard (40)");
  }
  const double mid = 0.5 * (interval.lo + interval.hi);
  const double half = 0.5 * (interval.hi - interval.lo);
  auto f = [&](double u) {
    return evaluate_target(target, std::clamp(mid + half * u, interval.lo, interval.hi));
  };

  const Eigen::Index n_coeffs = degree + 1;
  const Eigen::Index n_ref = degree + 2;

  // Dense grid in u, Chebyshev-clustered toward the endpoints where the
  // error of -y log y concentrates.
  const std::size_t m = grid_size(degree);
  std::vector<double> grid_u(m);
  std::vector<double> grid_f(m);
  for (std::size_t i = 0; i < m; ++i) {
    grid_u[i] = -std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(m - 1));
    grid_f[i] = f(grid_u[i]);
  }
  grid_u.front() = -1.0;
  grid_u.back() = 1.0;

  // Starting reference: the first degree + 2 of degree + 3 Chebyshev
  // extrema. A symmetric reference would give a zero levelled error for
  // even targets on a symmetric interval.
  std::vector<double> ref(static_cast<std::size_t>(n_ref));
  for (Eigen::Index j = 0; j < n_ref; ++j) {
    ref[static_cast<std::size_t>(j)] =
        -std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(degree + 2));
  }

  Eigen::VectorXd cheb = Eigen::VectorXd::Zero(n_coeffs);
  std::vector<double> err(m);
  for (int iter = 0; iter < kMaxExchanges; ++iter) {
    Eigen::MatrixXd A(n_ref, n_ref);
    Eigen::VectorXd rhs(n_ref);
    for (Eigen::Index j = 0; j < n_ref; ++j) {
      const double u = ref[static_cast<std::size_t>(j)];
      double t_prev = 1.0;
      double t_cur = u;
      A(j, 0) = 1.0;
      if (n_coeffs > 1) A(j, 1) = u;
      for (Eigen::Index k = 2; k < n_coeffs; ++k) {
        const double t_next = 2.0 * u * t_cur - t_prev;
        A(j, k) = t_next;
        t_prev = t_cur;
        t_cur = t_next;
      }
      A(j, n_coeffs) = (j % 2 == 0) ? 1.0 : -1.0;
      rhs[j] = f(u);
    }
    const Eigen::VectorXd sol = A.fullPivLu().solve(rhs);
    cheb = sol.head(n_coeffs);

    for (std::size_t i = 0; i < m; ++i) err[i] = chebyshev_eval(cheb, grid_u[i]) - grid_f[i];

    // One extremum per run of constant error sign.
    std::vector<std::size_t> extrema;
    int run_sign = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const int s = err[i] > 0.0 ? 1 : (err[i] < 0.0 ? -1 : 0);
      if (s == 0) continue;
      if (s != run_sign) {
        extrema.push_back(i);
        run_sign = s;
      } else if (std::abs(err[i]) > std::abs(err[extrema.back()])) {
        extrema.back() = i;
      }
    }
    if (extrema.size() < static_cast<std::size_t>(n_ref)) break;

    // n_ref consecutive alternating extrema containing the global maximum.
    const auto global = static_cast<std::size_t>(
        std::max_element(extrema.begin(), extrema.end(),
                         [&](std::size_t a, std::size_t b) {
                           return std::abs(err[a]) < std::abs(err[b]);
                         }) -
        extrema.begin());
    const std::size_t width = static_cast<std::size_t>(n_ref);
    std::size_t first = global + 1 >= width ? global + 1 - width : 0;
    first = std::min(first, extrema.size() - width);

    double lo_height = std::numeric_limits<double>::infinity();
    double hi_height = 0.0;
    for (std::size_t j = 0; j < width; ++j) {
      const std::size_t idx = extrema[first + j];
      ref[j] = grid_u[idx];
      lo_height = std::min(lo_height, std::abs(err[idx]));
      hi_height = std::max(hi_height, std::abs(err[idx]));
    }
    if (hi_height == 0.0 || (hi_height - lo_height) <= kHeightTolerance * hi_height) break;
  }

  PolynomialApprox out;
  out.degree = degree;
  out.interval = interval;
  out.coeffs = to_monomial(cheb, mid, half);
  double sup = 0.0;
  for (double y : approximation_grid(interval, degree)) {
    sup = std::max(sup, std::abs(out(y) - evaluate_target(target, y)));
  }
  out.sup_error = sup;
  return out;
}

double falling_factorial_estimate(std::span<const double> coeffs, std::uint64_t count,
                                  std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("falling_factorial_estimate: n must be >= 1");
  if (count > n) throw std::invalid_argument("falling_factorial_estimate: count > n");
  if (coeffs.empty()) return 0.0;
  double total = coeffs[0];
  double ratio = 1.0;  // (count)_i / (n)_i
  for (std::size_t i = 1; i < coeffs.size(); ++i) {
    if (i > n) break;
    ratio *= static_cast<double>(count - (i - 1)) / static_cast<double>(n - (i - 1));
    if (ratio == 0.0) break;
    total += coeffs[i] * ratio;
  }
  return total;
}

double falling_factorial_estimate(const PolynomialApprox& approx, std::uint64_t count,
                                  std::uint64_t n) {
  return falling_factorial_estimate(approx.coeffs, count, n);
}

}  // namespace symprop
