#pragma once

// Euler-Maruyama simulation of dY = sqrt(2) dW + ((1 - m)/Y) ds, the
// empirical law of its hitting time of 0, and the Dynkin representation
// Q_t f(x) = E f(X_S) with X an independent sqrt(2)-Brownian motion.

#include <cstdint>
#include <span>
#include <vector>

#include "beckner/fields.hpp"
#include "beckner/numerics.hpp"

namespace beckner {

struct BesselSimConfig {
  double m = 6.0;
  double t0 = 1.0;
  double dt = 1e-4;
  double max_time = 50.0;
  double absorption_eps = 1e-3;

  void validate() const;
};

struct HitResult {
  double s = 0.0;
  bool hit = false;
};

/// One path from t0; the step is dt * min(1, Y^2) so the singular drift moves
/// Y by a bounded fraction per step.  Absorbed once Y <= absorption_eps.
HitResult simulate_hitting_path(const BesselSimConfig& cfg, RandomStream& rs);

/// As above while also driving X_s = x + sqrt(2) W'_s; writes X_S into x_s.
HitResult simulate_joint_path(const BesselSimConfig& cfg, std::span<const double> x, RandomStream& rs,
                              std::span<double> x_s);

struct PathSample {
  std::vector<double> s;    // hitting times of the absorbed paths
  std::vector<double> x_s;  // row-major X_S of the absorbed paths (joint runs only)
  long non_hits = 0;
};

/// n_paths independent paths, split contiguously across n_streams substreams.
PathSample simulate_paths(const BesselSimConfig& cfg, long n_paths, std::uint64_t seed, int n_streams = 16);
PathSample simulate_joint_paths(const BesselSimConfig& cfg, std::span<const double> x, long n_paths,
                                std::uint64_t seed, int n_streams = 16);

/// Mean hitting time at two absorption thresholds (common random numbers)
/// and its Richardson extrapolation to eps = 0 assuming an eps^2 bias.
struct HittingMean {
  double mean_coarse = 0.0;  // eps = eps_coarse
  double mean_fine = 0.0;    // eps = eps_fine
  double extrapolated = 0.0;
  double std_error = 0.0;
  double bias_estimate = 0.0;  // |extrapolated - mean_fine|
  long non_hits = 0;
};
HittingMean hitting_mean_richardson(BesselSimConfig cfg, long n_paths, std::uint64_t seed, double eps_coarse = 1e-3,
                                    double eps_fine = 1e-4);

struct DynkinResult {
  Estimate path_mean;   // average of f(X_S) over simulated paths
  Estimate quadrature;  // Q_t f(x)
  double gap = 0.0;
  long non_hits = 0;
};
/// Throws Inconclusive if more than 0.1% of paths are not absorbed by max_time.
DynkinResult dynkin_check(const DifferentiableField& f, std::span<const double> x, const BesselSimConfig& cfg,
                          long n_paths, std::uint64_t seed, const QuadratureConfig& qcfg = {});

}  // namespace beckner
