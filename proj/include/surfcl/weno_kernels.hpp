#pragma once

// Third-order WENO building blocks shared by the embedded solver and the 1D
// periodic reference solver.

namespace surfcl::weno {

// Reconstructs the value at i+1/2 from the upwind-biased triple
// (a, b, c) = (v[i-1], v[i], v[i+1]).
inline double reconstruct3(double a, double b, double c, double eps) {
  const double b0 = (b - a) * (b - a);
  const double b1 = (c - b) * (c - b);
  const double a0 = (1.0 / 3.0) / ((eps + b0) * (eps + b0));
  const double a1 = (2.0 / 3.0) / ((eps + b1) * (eps + b1));
  return (a0 * (1.5 * b - 0.5 * a) + a1 * (0.5 * b + 0.5 * c)) / (a0 + a1);
}

// Hamilton-Jacobi WENO3 one-sided derivative from the divided differences
// v1, v2, v3 ordered away from the upwind side (v2 is the first-order
// one-sided difference at the point itself).
inline double hj_derivative3(double v1, double v2, double v3, double eps) {
  const double b0 = (v2 - v1) * (v2 - v1);
  const double b1 = (v3 - v2) * (v3 - v2);
  const double a0 = (1.0 / 3.0) / ((eps + b0) * (eps + b0));
  const double a1 = (2.0 / 3.0) / ((eps + b1) * (eps + b1));
  return (a0 * (1.5 * v2 - 0.5 * v1) + a1 * (0.5 * v2 + 0.5 * v3)) / (a0 + a1);
}

}  // namespace surfcl::weno
