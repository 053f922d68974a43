#include "beckner/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <queue>
#include <thread>

#include "beckner/errors.hpp"

namespace beckner {

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0)) throw ParamError("QuadratureConfig: abs_tol must be > 0");
  if (!(rel_tol > 0.0)) throw ParamError("QuadratureConfig: rel_tol must be > 0");
  if (!(radial_cutoff > 0.0)) throw ParamError("QuadratureConfig: radial_cutoff must be > 0");
  if (max_evals < 100) throw ParamError("QuadratureConfig: max_evals must be >= 100");
  if (angular_order < 2) throw ParamError("QuadratureConfig: angular_order must be >= 2");
}

void MonteCarloConfig::validate() const {
  if (n_samples < 1) throw ParamError("MonteCarloConfig: n_samples must be >= 1");
  if (n_streams < 1) throw ParamError("MonteCarloConfig: n_streams must be >= 1");
}

std::string to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::quadrature_bound:
      return "quadrature_bound";
    case ErrorKind::standard_error:
      return "standard_error";
    case ErrorKind::exact:
      return "exact";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 21 (QUADPACK dqk21 tables)

namespace {

constexpr std::array<double, 5> kWg = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                                       0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                                       0.295524224714752870173892994651338};
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452, 0.930157491355708226001207180059508,
    0.865063366688984510732096688423493, 0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784, 0.294392862701460198131126603103866,
    0.14887433898163121088482600112972,  0.0};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.03255816230796472747881897245939,  0.05475589657435199603138130024458,
    0.07503967481091995276704314091619,  0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707, 0.142775938577060080797094273138717,
    0.147739104901338491374841515972068, 0.149445554002916905664936468389821};

struct Panel {
  double a = 0.0, b = 0.0;
  std::vector<double> value;
  double error = 0.0;
};

void check_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) throw DomainError("integrand returned a non-finite value");
}

Panel gk21(const VectorIntegrand& f, std::size_t n, double a, double b, std::vector<double>& scratch) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  scratch.assign(21 * n, 0.0);
  auto row = [&](int k) { return std::span<double>(scratch.data() + static_cast<std::size_t>(k) * n, n); };
  f(center, row(0));
  check_finite(row(0));
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    f(center - dx, row(1 + 2 * j));
    f(center + dx, row(2 + 2 * j));
    check_finite(row(1 + 2 * j));
    check_finite(row(2 + 2 * j));
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value.assign(n, 0.0);
  double worst = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const double fc = scratch[c];
    double resk = kWgk[10] * fc;
    double resg = 0.0;
    double resabs = std::abs(resk);
    for (int j = 0; j < 10; ++j) {
      const double f1 = scratch[(1 + 2 * j) * n + c];
      const double f2 = scratch[(2 + 2 * j) * n + c];
      resk += kWgk[j] * (f1 + f2);
      resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
      if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - reskh);
    for (int j = 0; j < 10; ++j) {
      resasc += kWgk[j] * (std::abs(scratch[(1 + 2 * j) * n + c] - reskh) +
                           std::abs(scratch[(2 + 2 * j) * n + c] - reskh));
    }
    const double result = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    p.value[c] = result;
    worst = std::max(worst, err);
  }
  p.error = worst;
  return p;
}

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

AdaptiveResult adaptive_gauss_kronrod(const VectorIntegrand& f, std::size_t n_out, double a, double b,
                                      double abs_tol, double rel_tol, long max_evals,
                                      std::span<const double> breakpoints) {
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  std::vector<double> scratch;
  std::vector<Panel> panels;
  auto cmp = [&](int i, int j) { return panels[i].error < panels[j].error; };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> heap(cmp);

  AdaptiveResult out;
  std::vector<double> total(n_out, 0.0);
  double total_err = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    panels.push_back(gk21(f, n_out, cuts[k], cuts[k + 1], scratch));
    out.n_evals += 21;
    heap.push(static_cast<int>(panels.size() - 1));
    for (std::size_t c = 0; c < n_out; ++c) total[c] += panels.back().value[c];
    total_err += panels.back().error;
  }

  out.value = total;
  out.error_bound = total_err;
  bool best_is_current = true;
  auto tolerance = [&] { return std::max(abs_tol, rel_tol * sup_norm(total)); };
  // Panels narrower than this relative width are not split further.
  constexpr double kMinRelWidth = 1e-12;

  while (total_err > tolerance()) {
    if (heap.empty() || out.n_evals + 42 > max_evals) break;
    const int worst = heap.top();
    heap.pop();
    const Panel parent = panels[worst];
    const double mid = 0.5 * (parent.a + parent.b);
    const double scale = std::max({std::abs(parent.a), std::abs(parent.b), 1e-300});
    if (parent.b - parent.a < kMinRelWidth * scale) continue;  // frozen, error stays in total
    Panel left = gk21(f, n_out, parent.a, mid, scratch);
    Panel right = gk21(f, n_out, mid, parent.b, scratch);
    out.n_evals += 42;
    for (std::size_t c = 0; c < n_out; ++c) total[c] += left.value[c] + right.value[c] - parent.value[c];
    total_err += left.error + right.error - parent.error;
    panels[worst] = std::move(left);
    heap.push(worst);
    panels.push_back(std::move(right));
    heap.push(static_cast<int>(panels.size() - 1));
    best_is_current = total_err < out.error_bound;
    if (best_is_current) {
      out.error_bound = total_err;
      out.value = total;
    }
  }

  // The running error decides which state is reported; when that is the
  // final state its value is re-summed from the panels to remove drift.
  if (best_is_current) {
    std::vector<double> column(panels.size());
    for (std::size_t c = 0; c < n_out; ++c) {
      for (std::size_t i = 0; i < panels.size(); ++i) column[i] = panels[i].value[c];
      out.value[c] = pairwise_sum(column);
    }
  }
  out.converged = out.error_bound <= std::max(abs_tol, rel_tol * sup_norm(out.value));
  return out;
}

VectorEstimate integrate_radial(const VectorIntegrand& integrand, std::size_t n_out, const QuadratureConfig& config,
                                long evals_per_call, bool* converged) {
  config.validate();
  const VectorIntegrand mapped = [&](double s, std::span<double> out) {
    const double one_minus = 1.0 - s;
    const double r = s / one_minus;
    integrand(r, out);
    const double jac = 1.0 / (one_minus * one_minus);
    for (double& v : out) v *= jac;
  };
  const double split = config.radial_cutoff / (1.0 + config.radial_cutoff);
  const double cuts[] = {split};
  const long budget = std::max<long>(100, config.max_evals / std::max<long>(1, evals_per_call));
  AdaptiveResult res = adaptive_gauss_kronrod(mapped, n_out, 0.0, 1.0, config.abs_tol, config.rel_tol, budget, cuts);
  if (converged) *converged = res.converged;
  if (!res.converged && !converged) {
    throw NonConvergence("radial quadrature: error " + std::to_string(res.error_bound) + " above tolerance after " +
                         std::to_string(res.n_evals * evals_per_call) + " evaluations");
  }
  return {std::move(res.value), res.error_bound, res.n_evals * evals_per_call};
}

Estimate integrate_radial(const ScalarIntegrand& integrand, const QuadratureConfig& config) {
  const VectorIntegrand vf = [&](double r, std::span<double> out) { out[0] = integrand(r); };
  VectorEstimate v = integrate_radial(vf, 1, config);
  return {v.value[0], v.error_bound, v.n_evals, ErrorKind::quadrature_bound};
}

Estimate integrate_interval(const ScalarIntegrand& integrand, double a, double b, const QuadratureConfig& config) {
  config.validate();
  const VectorIntegrand vf = [&](double x, std::span<double> out) { out[0] = integrand(x); };
  AdaptiveResult res = adaptive_gauss_kronrod(vf, 1, a, b, config.abs_tol, config.rel_tol, config.max_evals);
  if (!res.converged) throw NonConvergence("interval quadrature did not reach tolerance");
  return {res.value[0], res.error_bound, res.n_evals, ErrorKind::quadrature_bound};
}

// ---------------------------------------------------------------------------
// Angular rules

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

AngularRule build_angular(int d, int order) {
  AngularRule rule;
  rule.d = d;
  if (d == 1) {
    rule.nodes = {1.0, -1.0};
    rule.weights = {0.5, 0.5};
    rule.coarse_weights = {0.5, 0.5};
    return rule;
  }
  if (d == 2) {
    const int n = 2 * order;
    for (int k = 0; k < n; ++k) {
      const double phi = 2.0 * std::numbers::pi * (k + 0.5) / n;
      rule.nodes.push_back(std::cos(phi));
      rule.nodes.push_back(std::sin(phi));
      rule.weights.push_back(1.0 / n);
      rule.coarse_weights.push_back(k % 2 == 0 ? 2.0 / n : 0.0);
    }
    return rule;
  }
  if (d == 3) {
    auto add_product = [&](int n_mu, bool fine) {
      std::vector<double> mu, w;
      gauss_legendre(n_mu, mu, w);
      const int n_phi = 2 * n_mu;
      for (int i = 0; i < n_mu; ++i) {
        const double s = std::sqrt(std::max(0.0, 1.0 - mu[i] * mu[i]));
        for (int k = 0; k < n_phi; ++k) {
          const double phi = 2.0 * std::numbers::pi * (k + 0.5) / n_phi;
          rule.nodes.push_back(s * std::cos(phi));
          rule.nodes.push_back(s * std::sin(phi));
          rule.nodes.push_back(mu[i]);
          const double wt = 0.5 * w[i] / n_phi;
          rule.weights.push_back(fine ? wt : 0.0);
          rule.coarse_weights.push_back(fine ? 0.0 : wt);
        }
      }
    };
    add_product(order, true);
    add_product(std::max(1, order / 2), false);
    return rule;
  }
  throw DomainError("angular product rules exist only for d <= 3");
}

}  // namespace

const AngularRule& angular_rule(int d, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, AngularRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(d, order);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_angular(d, order)).first;
  return it->second;
}

double unit_sphere_area(int d) { return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d); }

VectorEstimate integrate_measure(const std::function<void(std::span<const double>, std::span<double>)>& g,
                                 std::size_t n_out, const RadialDensity& density, const QuadratureConfig& config,
                                 bool* converged) {
  const int d = density.d;
  if (d < 1 || d > 3) throw DomainError("deterministic cubature supports d <= 3; use Monte Carlo for d >= 4");
  const AngularRule& rule = angular_rule(d, config.angular_order);
  const double area = unit_sphere_area(d);
  const bool exact_angles = (d == 1);
  const std::size_t n_all = exact_angles ? n_out : 2 * n_out;
  std::vector<double> y(d), vals(n_out), fine(n_out), coarse(n_out);

  const VectorIntegrand radial = [&](double r, std::span<double> out) {
    const double lw = density.log_weight(r);
    const double w = (lw == -std::numeric_limits<double>::infinity()) ? 0.0 : area * std::pow(r, d - 1) * std::exp(lw);
    std::fill(fine.begin(), fine.end(), 0.0);
    std::fill(coarse.begin(), coarse.end(), 0.0);
    if (w != 0.0) {
      for (int k = 0; k < rule.size(); ++k) {
        auto om = rule.node(k);
        for (int i = 0; i < d; ++i) y[i] = r * om[i];
        g(y, vals);
        for (std::size_t c = 0; c < n_out; ++c) {
          fine[c] += rule.weights[k] * vals[c];
          coarse[c] += rule.coarse_weights[k] * vals[c];
        }
      }
    }
    for (std::size_t c = 0; c < n_out; ++c) {
      out[c] = w * fine[c];
      if (!exact_angles) out[n_out + c] = w * std::abs(fine[c] - coarse[c]);
    }
  };
  VectorEstimate raw = integrate_radial(radial, n_all, config, rule.size(), converged);
  VectorEstimate est;
  est.value.assign(raw.value.begin(), raw.value.begin() + static_cast<long>(n_out));
  double angular = 0.0;
  if (!exact_angles)
    for (std::size_t c = 0; c < n_out; ++c) angular = std::max(angular, raw.value[n_out + c]);
  est.error_bound = raw.error_bound + angular;
  est.n_evals = raw.n_evals;
  return est;
}

Estimate integrate_measure(const std::function<double(std::span<const double>)>& g, const RadialDensity& density,
                           const QuadratureConfig& config) {
  auto vg = [&](std::span<const double> y, std::span<double> out) { out[0] = g(y); };
  VectorEstimate v = integrate_measure(vg, 1, density, config);
  return {v.value[0], v.error_bound, v.n_evals, ErrorKind::quadrature_bound};
}

// ---------------------------------------------------------------------------
// Random streams

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t index)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x1234567ULL))) {}

double RandomStream::uniform() {
  // 53 random bits, strictly inside (0, 1)
  return ((engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() { return normal_(engine_); }

double RandomStream::gamma(double shape) {
  if (!(shape > 0.0)) throw DomainError("gamma shape must be > 0");
  if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

long stream_share(const MonteCarloConfig& cfg, int k) {
  const long base = cfg.n_samples / cfg.n_streams;
  const long extra = cfg.n_samples % cfg.n_streams;
  return base + (k < extra ? 1 : 0);
}

void parallel_for(int n, const std::function<void(int)>& body) {
  const unsigned hw = std::thread::hardware_concurrency();
  if (n <= 1 || hw <= 1) {
    for (int k = 0; k < n; ++k) body(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (int k = next++; k < n; k = next++) {
      try {
        body(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  const unsigned n_threads = std::min<unsigned>(hw, static_cast<unsigned>(n));
  for (unsigned i = 0; i < n_threads; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t h = xs.size() / 2;
  return pairwise_sum(xs.subspan(0, h)) + pairwise_sum(xs.subspan(h));
}

namespace {

struct Moments {
  double n = 0.0, mean = 0.0, m2 = 0.0;
};

Moments merge(const Moments& a, const Moments& b) {
  if (a.n == 0.0) return b;
  if (b.n == 0.0) return a;
  Moments r;
  r.n = a.n + b.n;
  const double delta = b.mean - a.mean;
  r.mean = a.mean + delta * b.n / r.n;
  r.m2 = a.m2 + b.m2 + delta * delta * a.n * b.n / r.n;
  return r;
}

Moments tree_merge(std::span<const Moments> parts) {
  if (parts.size() == 1) return parts[0];
  const std::size_t h = parts.size() / 2;
  return merge(tree_merge(parts.subspan(0, h)), tree_merge(parts.subspan(h)));
}

}  // namespace

Estimate mc_mean(const MonteCarloConfig& cfg, const std::function<double(RandomStream&)>& draw) {
  cfg.validate();
  std::vector<Moments> parts(cfg.n_streams);
  parallel_for(cfg.n_streams, [&](int k) {
    RandomStream rs(cfg.seed, static_cast<std::uint64_t>(k));
    Moments m;
    const long n = stream_share(cfg, k);
    for (long i = 0; i < n; ++i) {
      const double x = draw(rs);
      m.n += 1.0;
      const double delta = x - m.mean;
      m.mean += delta / m.n;
      m.m2 += delta * (x - m.mean);
    }
    parts[k] = m;
  });
  const Moments total = tree_merge(parts);
  const double var = total.n > 1.0 ? total.m2 / (total.n - 1.0) : 0.0;
  return {total.mean, std::sqrt(var / total.n), cfg.n_samples, ErrorKind::standard_error};
}

// ---------------------------------------------------------------------------
// Statistics

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_critical_value(long n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

double ks_two_sample_critical_value(long n, long m, double alpha) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) * std::sqrt((nn + mm) / (nn * mm));
}

EnergyTest energy_distance_test(std::span<const double> a, std::span<const double> b, int d, int n_permutations,
                                std::uint64_t seed) {
  const std::size_t na = a.size() / d, nb = b.size() / d, n = na + nb;
  std::vector<double> pts(a.begin(), a.end());
  pts.insert(pts.end(), b.begin(), b.end());
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) {
        const double u = pts[i * d + k] - pts[j * d + k];
        s += u * u;
      }
      dist[i * n + j] = dist[j * n + i] = std::sqrt(s);
    }
  auto statistic = [&](const std::vector<int>& label) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double v = dist[i * n + j];
        if (label[i] != label[j]) ab += v;
        else if (label[i] == 0) aa += v;
        else bb += v;
      }
    const double fa = static_cast<double>(na), fb = static_cast<double>(nb);
    const double e = ab / (fa * fb) - aa / (fa * fa) - bb / (fb * fb);
    return e * fa * fb / (fa + fb);
  };
  std::vector<int> label(n, 0);
  for (std::size_t i = na; i < n; ++i) label[i] = 1;
  EnergyTest out;
  out.statistic = statistic(label);
  RandomStream rs(seed, 0);
  int exceed = 0;
  for (int p = 0; p < n_permutations; ++p) {
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rs.uniform() * (i + 1));
      std::swap(label[i], label[std::min(j, i)]);
    }
    if (statistic(label) >= out.statistic) ++exceed;
  }
  out.p_value = (exceed + 1.0) / (n_permutations + 1.0);
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Finite differences

double default_fd_step(int order, std::span<const double> point) {
  double scale = 1.0;
  for (double v : point) scale = std::max(scale, std::abs(v));
  return std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (order + 2)) * scale;
}

namespace {

struct Stencil {
  std::vector<int> offsets;
  std::vector<double> weights;
};

const Stencil& stencil(int order) {
  static const std::array<Stencil, 5> table = {
      Stencil{{0}, {1.0}},
      Stencil{{-1, 1}, {-0.5, 0.5}},
      Stencil{{-1, 0, 1}, {1.0, -2.0, 1.0}},
      Stencil{{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}},
      Stencil{{-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}},
  };
  return table[order];
}

}  // namespace

double fd_derivative(const PointFunction& f, std::span<const double> point, std::span<const int> multi_index,
                     double step, const DomainPredicate& in_domain) {
  const std::size_t dim = point.size();
  if (multi_index.size() != dim) throw ParamError("fd_derivative: multi-index size must match point dimension");
  int total = 0;
  for (int a : multi_index) {
    if (a < 0) throw ParamError("fd_derivative: negative derivative order");
    total += a;
  }
  if (total > 4) throw ParamError("fd_derivative: total order must be <= 4");
  if (step <= 0.0) step = default_fd_step(total, point);

  // Tensor-product stencil over the differentiated axes.
  std::vector<std::size_t> axes;
  for (std::size_t i = 0; i < dim; ++i)
    if (multi_index[i] > 0) axes.push_back(i);
  std::vector<double> y(point.begin(), point.end());
  std::vector<std::size_t> pos(axes.size(), 0);
  std::vector<double> terms;
  for (;;) {
    double w = 1.0;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const Stencil& s = stencil(multi_index[axes[k]]);
      y[axes[k]] = point[axes[k]] + s.offsets[pos[k]] * step;
      w *= s.weights[pos[k]];
    }
    if (in_domain && !in_domain(y)) throw DomainError("finite-difference stencil leaves the domain");
    terms.push_back(w * f(y));
    std::size_t k = 0;
    for (; k < axes.size(); ++k) {
      if (++pos[k] < stencil(multi_index[axes[k]]).offsets.size()) break;
      pos[k] = 0;
    }
    if (k == axes.size()) break;
  }
  return pairwise_sum(terms) / std::pow(step, total);
}

}  // namespace beckner
