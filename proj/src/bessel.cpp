#include "lagstat/bessel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lagstat {

namespace {

void check_range(double sigma) {
  if (!(sigma >= 0.0 && sigma <= 4.0)) {
    throw std::domain_error("J0 series is only used on [0, 4], got " + std::to_string(sigma));
  }
}

// sum_k (-x/4)^k / (k!)^2 and its derivative in x; terms decrease in modulus once k > x/4
// and alternate, so the first dropped term bounds the remainder.
struct Sum {
  double k = 0.0, dk = 0.0, bound = 0.0;
};

Sum kernel_sum(double x) {
  const double z = -0.25 * x;
  double term = 1.0;
  Sum s;
  s.k = 1.0;
  for (int k = 1; k < 60; ++k) {
    // d/dx of z^k / (k!)^2 is k z^(k-1) (-1/4) / (k!)^2 = term_{k-1} * (-1/4) / k
    s.dk += term * (-0.25) / k;
    term *= z / (static_cast<double>(k) * k);
    s.k += term;
    if (std::abs(term) < 1e-18 && k > 0.25 * std::abs(x)) {
      s.bound = std::abs(term * z / ((k + 1.0) * (k + 1.0)));
      return s;
    }
  }
  s.bound = std::abs(term);
  return s;
}

}  // namespace

SeriesValue bessel_j0_series(double sigma) {
  check_range(sigma);
  const Sum s = kernel_sum(sigma * sigma);
  return {s.k, s.bound};
}

double bessel_j0(double sigma) { return bessel_j0_series(sigma).value; }

double bessel_j0_prime(double sigma) {
  check_range(sigma);
  return 2.0 * sigma * kernel_sum(sigma * sigma).dk;
}

double bessel_j0_second(double sigma) {
  check_range(sigma);
  if (sigma == 0.0) return -0.5;
  const Sum s = kernel_sum(sigma * sigma);
  return -2.0 * s.dk - s.k;
}

KernelJet bessel_kernel(double x) {
  if (!(x >= 0.0 && x <= 16.0)) throw std::domain_error("kernel argument outside [0, 16]: " + std::to_string(x));
  const Sum s = kernel_sum(x);
  return {s.k, s.dk};
}

double bessel_j0_first_zero(double tol) {
  double lo = 2.0, hi = 3.0;
  if (!(bessel_j0(lo) > 0.0 && bessel_j0(hi) < 0.0)) throw std::logic_error("J0 sign bracket failed");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (bessel_j0(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace lagstat
