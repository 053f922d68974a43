#pragma once

// Quadrature, Monte Carlo and finite-difference primitives shared by every
// other module.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace beckner {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  /// Budget of integrand evaluations; angular nodes count individually.
  long max_evals = 20'000'000;
  /// Radius at which [0, inf) is split before the tail is mapped to [0, 1).
  double radial_cutoff = 1.0;
  /// Order of the angular product rule in d = 2, 3.
  int angular_order = 16;

  void validate() const;
};

struct MonteCarloConfig {
  long n_samples = 100'000;
  std::uint64_t seed = 0x5eed'1234'abcd'0001ULL;
  int n_streams = 16;

  void validate() const;
};

enum class ErrorKind { quadrature_bound, standard_error, exact };

/// A numerical value with its error: a one-sided bound for quadrature, a
/// 1-sigma standard error for Monte Carlo.
struct Estimate {
  double value = 0.0;
  double error_bound = 0.0;
  long n_evals = 0;
  ErrorKind kind = ErrorKind::quadrature_bound;
};

std::string to_string(ErrorKind kind);

/// Vector-valued counterpart of Estimate; error_bound is a sup-norm bound.
struct VectorEstimate {
  std::vector<double> value;
  double error_bound = 0.0;
  long n_evals = 0;
};

/// Integrand writing n_out components at one abscissa.
using VectorIntegrand = std::function<void(double, std::span<double>)>;
using ScalarIntegrand = std::function<double(double)>;

/// Raw output of the adaptive Gauss-Kronrod driver; never throws on budget.
struct AdaptiveResult {
  std::vector<double> value;
  double error_bound = 0.0;
  long n_evals = 0;
  bool converged = false;
};

/// Global adaptive 21-point Gauss-Kronrod on [a, b].  The reported error is
/// the smallest total error seen along the refinement, together with the
/// value it belongs to, so a larger budget never reports a larger error.
AdaptiveResult adaptive_gauss_kronrod(const VectorIntegrand& f, std::size_t n_out, double a, double b,
                                      double abs_tol, double rel_tol, long max_evals,
                                      std::span<const double> breakpoints = {});

/// \int_0^\infty integrand(r) dr.  [0, cutoff] and [cutoff, inf) are refined
/// jointly after mapping r = s / (1 - s).
/// Throws NonConvergence if the tolerance is unmet at max_evals and
/// DomainError if the integrand returns a non-finite value.  The vector form
/// reports non-convergence through *converged instead when it is given.
Estimate integrate_radial(const ScalarIntegrand& integrand, const QuadratureConfig& config);
VectorEstimate integrate_radial(const VectorIntegrand& integrand, std::size_t n_out,
                                const QuadratureConfig& config, long evals_per_call = 1,
                                bool* converged = nullptr);

/// \int_a^b integrand(x) dx on a finite interval.
Estimate integrate_interval(const ScalarIntegrand& integrand, double a, double b, const QuadratureConfig& config);

// ---------------------------------------------------------------------------
// Angular rules on the unit sphere S^{d-1}, d = 1, 2, 3.

struct AngularRule {
  int d = 0;
  std::vector<double> nodes;    // d * n, row-major unit vectors
  std::vector<double> weights;  // sum to 1
  std::vector<double> coarse_weights;  // lower-order rule on the same node set
                                       // plus extra nodes; zero where unused
  int size() const { return static_cast<int>(weights.size()); }
  std::span<const double> node(int k) const { return {nodes.data() + static_cast<std::size_t>(k) * d, static_cast<std::size_t>(d)}; }
};

/// Product rule: d = 1 exact {+1, -1}; d = 2 trapezoid with 2*order nodes
/// (coarse = every other node); d = 3 Gauss-Legendre(order) in cos(theta)
/// times trapezoid(2*order) in phi (coarse = Gauss-Legendre(order/2) times
/// trapezoid(order)).
const AngularRule& angular_rule(int d, int order);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

double unit_sphere_area(int d);

/// Radial profile w(|y|) of a rotation-invariant density on R^d, given in
/// log form for stability at large parameters.
struct RadialDensity {
  int d = 1;
  std::function<double(double)> log_weight;  // log of density at radius r
  std::string name;
};

/// \int_{R^d} g(y) w(|y|) dy by radial-angular product quadrature.  The
/// error bound adds the Gauss-Kronrod radial bound and the difference
/// between the fine and coarse angular rules.
Estimate integrate_measure(const std::function<double(std::span<const double>)>& g, const RadialDensity& density,
                           const QuadratureConfig& config);
/// Vector version; g writes n_out components.
VectorEstimate integrate_measure(const std::function<void(std::span<const double>, std::span<double>)>& g,
                                 std::size_t n_out, const RadialDensity& density, const QuadratureConfig& config,
                                 bool* converged = nullptr);

// ---------------------------------------------------------------------------
// Random streams and Monte Carlo.

/// Independent reproducible substream: engine seeded from (seed, index).
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t index);

  double uniform();  // (0, 1)
  double normal();
  /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 boosted through U^{1/shape}.
  double gamma(double shape);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

/// Number of samples assigned to stream k (contiguous split).
long stream_share(const MonteCarloConfig& cfg, int k);

/// Mean of draw(stream) over cfg.n_samples draws.  Streams are evaluated
/// independently (possibly in parallel) and merged by a fixed pairwise tree.
Estimate mc_mean(const MonteCarloConfig& cfg, const std::function<double(RandomStream&)>& draw);

/// Runs body(k) for k in [0, n); parallel when hardware allows.  Results
/// must be written to per-index slots by the caller.
void parallel_for(int n, const std::function<void(int)>& body);

/// Pairwise tree sum, independent of evaluation order.
double pairwise_sum(std::span<const double> xs);

// ---------------------------------------------------------------------------
// Statistics used by the distributional checks.

/// sup |F_n - F| of the samples against cdf.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Two-sample sup |F_n - G_m|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);
/// Asymptotic Kolmogorov critical value at level alpha for sample size n.
double ks_critical_value(long n, double alpha);
double ks_two_sample_critical_value(long n, long m, double alpha);

/// Energy-distance two-sample permutation test on points of dimension d.
struct EnergyTest {
  double statistic = 0.0;
  double p_value = 1.0;
};
EnergyTest energy_distance_test(std::span<const double> a, std::span<const double> b, int d, int n_permutations,
                                std::uint64_t seed);

/// Least-squares slope of log|y| against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Finite differences.

using PointFunction = std::function<double(std::span<const double>)>;
using DomainPredicate = std::function<bool(std::span<const double>)>;

/// Default step eps^{1/(k+2)} * max(1, |point|_inf) for a derivative of order k.
double default_fd_step(int order, std::span<const double> point);

/// Central finite-difference approximation of d^a f(point), |a| <= 4, with
/// O(step^2) error.  multi_index holds the derivative count per coordinate.
/// step <= 0 selects default_fd_step.  Throws DomainError if any stencil
/// point fails in_domain.
double fd_derivative(const PointFunction& f, std::span<const double> point, std::span<const int> multi_index,
                     double step, const DomainPredicate& in_domain = {});

}  // namespace beckner
