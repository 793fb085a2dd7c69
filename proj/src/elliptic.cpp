#include "qm/elliptic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qm::elliptic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;
constexpr double kQuarterPiSq = kPi * kPi / 4.0;

// mu from the pair: (pi/2) K(r')/K(r) = (pi/2) agm(1, r') / agm(1, r).
double mu_pair(double r, double rp) { return kHalfPi * agm(1.0, rp) / agm(1.0, r); }

// Solves mu(r) = y for y >= pi/2, where the root r <= 1/sqrt(2) is the small
// member of the pair and can be represented to full relative precision.
double small_root(double y) {
  constexpr double kLogFloor = -700.0;
  double lo = kLogFloor;
  double hi = std::log(std::numbers::sqrt2 / 2.0);
  auto f = [y](double s) {
    const double r = std::exp(s);
    return mu_pair(r, std::sqrt((1.0 - r) * (1.0 + r))) - y;
  };
  if (f(lo) < 0.0) {
    // mu(r) = log(4/r) + O(r^2) this far out.
    const double r = 4.0 * std::exp(-y);
    if (r == 0.0) throw std::domain_error("mu_inv: result underflows");
    return r;
  }
  // mu decreasing: f(lo) >= 0 >= f(hi).
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  double s = 0.5 * (lo + hi);
  // Newton on s = log r with d mu / d s = -pi^2 / (4 r'^2 K(r)^2).
  for (int it = 0; it < 3; ++it) {
    const double r = std::exp(s);
    const double rp2 = (1.0 - r) * (1.0 + r);
    const double k = ellip_k(r);
    const double slope = -kQuarterPiSq / (rp2 * k * k);
    const double next = s - f(s) / slope;
    if (!(next >= lo - 1e-12 && next <= hi + 1e-12) || next == s) break;
    s = next;
  }
  return std::exp(s);
}

}  // namespace

EllipticParams EllipticParams::from_r(double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::domain_error("elliptic modulus must lie in (0,1)");
  return {r, std::sqrt((1.0 - r) * (1.0 + r))};
}

double agm(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("agm needs positive arguments");
  for (int it = 0; it < 64; ++it) {
    if (std::abs(a - b) <= 1e-16 * a) break;
    const double next_a = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = next_a;
  }
  return 0.5 * (a + b);
}

double ellip_k(double r) {
  if (!(r >= 0.0 && r < 1.0)) throw std::domain_error("ellip_k: r must lie in [0,1)");
  return kHalfPi / agm(1.0, std::sqrt((1.0 - r) * (1.0 + r)));
}

double mu(double r) { return mu(EllipticParams::from_r(r)); }

double mu(const EllipticParams& p) { return mu_pair(p.r, p.r_prime); }

EllipticParams mu_inv_params(double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw std::domain_error("mu_inv: argument must be positive");
  if (y >= kHalfPi) {
    const double r = small_root(y);
    return {r, std::sqrt((1.0 - r) * (1.0 + r))};
  }
  // mu(r) mu(r') = pi^2/4, so the complement is the small root.
  const double rp = small_root(kQuarterPiSq / y);
  return {std::sqrt((1.0 - rp) * (1.0 + rp)), rp};
}

double mu_inv(double y) { return mu_inv_params(y).r; }

double bowman_modulus(double h) {
  if (!(h > 1.0) || !std::isfinite(h)) throw std::domain_error("bowman_modulus needs h > 1");
  const double c = 2.0 * h - 1.0;
  const double t1 = mu_inv_params(kPi / (2.0 * c)).r;
  const double t2 = mu_inv_params(kPi * c / 2.0).r;
  const double sum = t1 + t2;
  const double q = (t1 - t2) / sum;
  const double r = q * q;
  // 1 - r = 4 t1 t2 / (t1 + t2)^2 without cancellation.
  const double one_minus_r = 4.0 * t1 * t2 / (sum * sum);
  const double rp = std::sqrt(one_minus_r * (1.0 + r));
  // K(r)/K(r') = agm(1, r) / agm(1, r').
  return agm(1.0, r) / agm(1.0, rp);
}

double asymptotic_modulus(double h) { return h - 0.5 - std::numbers::ln2 / kPi; }

}  // namespace qm::elliptic
