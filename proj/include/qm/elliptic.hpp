#pragma once

namespace qm::elliptic {

/// A modulus r together with its complement r' = sqrt(1 - r^2), each
/// carried to full relative precision (r' is not recomputed from r).
struct EllipticParams {
  double r;
  double r_prime;

  static EllipticParams from_r(double r);
};

/// Arithmetic-geometric mean of two positive numbers.
double agm(double a, double b);

/// Complete elliptic integral of the first kind, K(r) = pi / (2 agm(1, r')).
double ellip_k(double r);

/// mu(r) = (pi/2) K(r') / K(r), a decreasing bijection (0,1) -> (0,inf).
double mu(double r);
double mu(const EllipticParams& p);

/// Inverse of mu. Returns r in (0,1) with mu(r) = y.
double mu_inv(double y);

/// Same as mu_inv, but returns the pair (r, r') with both components
/// accurate even when r is within rounding of 1.
EllipticParams mu_inv_params(double y);

/// Modulus of the trapezoid quadrilateral (1+hi, (h-1)i, 0, 1), h > 1.
double bowman_modulus(double h);

/// Large-h expansion h - 1/2 - log(2)/pi of bowman_modulus.
double asymptotic_modulus(double h);

}  // namespace qm::elliptic
