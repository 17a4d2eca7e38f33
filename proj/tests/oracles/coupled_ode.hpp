#pragma once

// Continuous-time oracle for the coupled edit ODE between two isotropic
// Gaussians of equal scale s and means mu_src, mu_tar.
//
// Velocities come from Gaussian posterior means:
//   E[X | z] = mu + (1 - t) s^2 (z - (1 - t) mu) / D,   E[N | z] = t (z - (1 - t) mu) / D,
//   D = (1 - t)^2 s^2 + t^2.
// With z_src = (1 - t) x + t n and z_tar = z_edit + z_src - x, the difference
// v_tar(z_tar) - v_src(z_src) depends on the state only through
// d = z_edit - x, and d stays proportional to delta = mu_tar - mu_src. The
// oracle integrates the coefficient g in d = g * delta with classic RK4.

#include <cstddef>

namespace oracle {

inline double posterior_velocity(double z, double t, double mu, double s) {
  const double D = (1.0 - t) * (1.0 - t) * s * s + t * t;
  const double centered = z - (1.0 - t) * mu;
  const double ex = mu + (1.0 - t) * s * s * centered / D;
  const double en = t * centered / D;
  return en - ex;
}

/// d g / d t for unit delta, evaluated with an arbitrary shared base point.
inline double edit_rate(double t, double g, double s) {
  const double x = 0.37, n = -1.21;  // any values; they cancel
  const double z_src = (1.0 - t) * x + t * n;
  const double z_tar = (x + g) + z_src - x;
  return posterior_velocity(z_tar, t, 1.0, s) - posterior_velocity(z_src, t, 0.0, s);
}

/// Coefficient g(0) after integrating from t_start (with g = 0) down to 0.
inline double mean_shift_coefficient(double t_start, double s,
                                     std::size_t substeps = 200000) {
  const double h = -t_start / static_cast<double>(substeps);
  double t = t_start, g = 0.0;
  for (std::size_t k = 0; k < substeps; ++k) {
    const double k1 = edit_rate(t, g, s);
    const double k2 = edit_rate(t + h / 2, g + h / 2 * k1, s);
    const double k3 = edit_rate(t + h / 2, g + h / 2 * k2, s);
    const double k4 = edit_rate(t + h, g + h * k3, s);
    g += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t = t_start + static_cast<double>(k + 1) * h;
  }
  return g;
}

}  // namespace oracle
