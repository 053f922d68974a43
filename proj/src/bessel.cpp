#include "beckner/bessel.hpp"

#include <cmath>

#include "beckner/errors.hpp"
#include "beckner/qtm.hpp"

namespace beckner {

void BesselSimConfig::validate() const {
  if (!(m > 0.0)) throw ParamError("BesselSimConfig: m must be > 0");
  if (!(t0 > 0.0)) throw ParamError("BesselSimConfig: t0 must be > 0");
  if (!(dt > 0.0)) throw ParamError("BesselSimConfig: dt must be > 0");
  if (!(max_time > 0.0)) throw ParamError("BesselSimConfig: max_time must be > 0");
  if (!(absorption_eps > 0.0 && absorption_eps < t0)) throw ParamError("BesselSimConfig: needs 0 < eps < t0");
}

namespace {

template <class OnStep>
HitResult run_path(const BesselSimConfig& cfg, RandomStream& rs, OnStep&& on_step) {
  double y = cfg.t0, s = 0.0;
  const double drift = 1.0 - cfg.m;
  while (s < cfg.max_time) {
    const double h = cfg.dt * std::min(1.0, y * y);
    y += drift / y * h + std::sqrt(2.0 * h) * rs.normal();
    s += h;
    on_step(h);
    if (y <= cfg.absorption_eps) return {s, true};
  }
  return {s, false};
}

}  // namespace

HitResult simulate_hitting_path(const BesselSimConfig& cfg, RandomStream& rs) {
  return run_path(cfg, rs, [](double) {});
}

HitResult simulate_joint_path(const BesselSimConfig& cfg, std::span<const double> x, RandomStream& rs,
                              std::span<double> x_s) {
  std::copy(x.begin(), x.end(), x_s.begin());
  return run_path(cfg, rs, [&](double h) {
    const double sd = std::sqrt(2.0 * h);
    for (double& v : x_s) v += sd * rs.normal();
  });
}

namespace {

PathSample simulate(const BesselSimConfig& cfg, std::span<const double> x, bool joint, long n_paths,
                    std::uint64_t seed, int n_streams) {
  cfg.validate();
  if (n_paths < 1) throw ParamError("simulate_paths: n_paths must be >= 1");
  MonteCarloConfig mc{n_paths, seed, n_streams};
  mc.validate();
  const std::size_t d = x.size();
  std::vector<PathSample> parts(n_streams);
  parallel_for(n_streams, [&](int k) {
    RandomStream rs(seed, static_cast<std::uint64_t>(k));
    PathSample& part = parts[k];
    std::vector<double> xs(d);
    const long n = stream_share(mc, k);
    for (long i = 0; i < n; ++i) {
      const HitResult r = joint ? simulate_joint_path(cfg, x, rs, xs) : simulate_hitting_path(cfg, rs);
      if (!r.hit) {
        ++part.non_hits;
        continue;
      }
      part.s.push_back(r.s);
      part.x_s.insert(part.x_s.end(), xs.begin(), xs.end());
    }
  });
  PathSample all;
  for (auto& p : parts) {
    all.s.insert(all.s.end(), p.s.begin(), p.s.end());
    all.x_s.insert(all.x_s.end(), p.x_s.begin(), p.x_s.end());
    all.non_hits += p.non_hits;
  }
  return all;
}

struct MeanSe {
  double mean, se;
};

MeanSe mean_se(const std::vector<double>& v) {
  if (v.size() < 2) throw Inconclusive("fewer than two absorbed paths");
  const double n = static_cast<double>(v.size());
  const double mean = pairwise_sum(v) / n;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  return {mean, std::sqrt(pairwise_sum(sq) / (n - 1.0) / n)};
}

}  // namespace

PathSample simulate_paths(const BesselSimConfig& cfg, long n_paths, std::uint64_t seed, int n_streams) {
  return simulate(cfg, {}, false, n_paths, seed, n_streams);
}

PathSample simulate_joint_paths(const BesselSimConfig& cfg, std::span<const double> x, long n_paths,
                                std::uint64_t seed, int n_streams) {
  if (x.empty()) throw ParamError("simulate_joint_paths: empty base point");
  return simulate(cfg, x, true, n_paths, seed, n_streams);
}

HittingMean hitting_mean_richardson(BesselSimConfig cfg, long n_paths, std::uint64_t seed, double eps_coarse,
                                    double eps_fine) {
  if (!(eps_fine < eps_coarse)) throw ParamError("hitting_mean_richardson: needs eps_fine < eps_coarse");
  cfg.absorption_eps = eps_coarse;
  const PathSample a = simulate_paths(cfg, n_paths, seed);
  cfg.absorption_eps = eps_fine;
  const PathSample b = simulate_paths(cfg, n_paths, seed);
  const MeanSe ma = mean_se(a.s), mb = mean_se(b.s);
  HittingMean r;
  r.mean_coarse = ma.mean;
  r.mean_fine = mb.mean;
  const double c2 = eps_coarse * eps_coarse, f2 = eps_fine * eps_fine;
  r.extrapolated = (mb.mean * c2 - ma.mean * f2) / (c2 - f2);
  r.std_error = mb.se;
  r.bias_estimate = std::abs(r.extrapolated - mb.mean);
  r.non_hits = a.non_hits + b.non_hits;
  return r;
}

DynkinResult dynkin_check(const DifferentiableField& f, std::span<const double> x, const BesselSimConfig& cfg,
                          long n_paths, std::uint64_t seed, const QuadratureConfig& qcfg) {
  if (static_cast<int>(x.size()) != f.dim()) throw ParamError("dynkin_check: x has wrong dimension");
  const PathSample ps = simulate_joint_paths(cfg, x, n_paths, seed);
  if (ps.non_hits > 0.001 * n_paths)
    throw Inconclusive("dynkin_check: " + std::to_string(ps.non_hits) + " of " + std::to_string(n_paths) +
                       " paths not absorbed by max_time");
  const std::size_t d = x.size();
  std::vector<double> vals(ps.s.size());
  for (std::size_t i = 0; i < ps.s.size(); ++i) vals[i] = f(std::span<const double>(ps.x_s.data() + i * d, d));
  const MeanSe ms = mean_se(vals);
  DynkinResult r;
  r.path_mean = {ms.mean, ms.se, static_cast<long>(vals.size()), ErrorKind::standard_error};
  r.quadrature = qtm_quadrature(f, {cfg.m, static_cast<int>(d), cfg.t0, std::vector<double>(x.begin(), x.end())}, qcfg);
  r.gap = std::abs(r.path_mean.value - r.quadrature.value);
  r.non_hits = ps.non_hits;
  return r;
}

}  // namespace beckner
