#pragma once

namespace lagstat {

/// Series value with a bound on the dropped tail.
struct SeriesValue {
  double value = 0.0;
  double bound = 0.0;
};

/// J0 by its power series on 0 <= sigma <= 4. Throws std::domain_error outside that range.
SeriesValue bessel_j0_series(double sigma);
double bessel_j0(double sigma);
double bessel_j0_prime(double sigma);   // -J1
double bessel_j0_second(double sigma);  // -J0'/sigma - J0, with the limit -1/2 at 0

/// K(x) = J0(sqrt x) and K'(x) for 0 <= x <= 16: the kernel in (theta^2 - mu^2) is then smooth
/// up to the characteristic, d/dtheta J0(sqrt(theta^2 - mu^2)) = 2 theta K'(theta^2 - mu^2).
struct KernelJet {
  double k = 0.0, dk = 0.0;
};
KernelJet bessel_kernel(double x);

/// First positive zero of J0 by bisection on the series.
double bessel_j0_first_zero(double tol = 1e-14);

}  // namespace lagstat
