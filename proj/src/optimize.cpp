#include "nadqec/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <numeric>
#include <random>

#include <Eigen/Dense>

namespace nadqec {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

OptimizeResult nelder_mead(const Objective& f, std::vector<double> x0, double step, int max_evals, double ftol) {
  const std::size_t n = x0.size();
  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dn;
  const double gamma = 0.75 - 1.0 / (2.0 * dn);
  const double delta = 1.0 - 1.0 / dn;

  OptimizeResult res;
  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) {
    fv[i] = f(simplex[i]);
    ++res.evaluations;
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  while (res.evaluations < max_evals) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    if (std::abs(fv[worst] - fv[best]) <= ftol * (1.0 + std::abs(fv[best])) || fv[best] <= 1e-30) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t idx = order[k];
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[idx][i] / dn;
    }
    for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + alpha * (centroid[i] - simplex[worst][i]);
    const double fr = f(xr);
    ++res.evaluations;

    if (fr < fv[best]) {
      for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + beta * (xr[i] - centroid[i]);
      const double fe = f(xe);
      ++res.evaluations;
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    for (std::size_t i = 0; i < n; ++i) {
      xc[i] = outside ? centroid[i] + gamma * (xr[i] - centroid[i]) : centroid[i] - gamma * (centroid[i] - simplex[worst][i]);
    }
    const double fc = f(xc);
    ++res.evaluations;
    if (fc < (outside ? fr : fv[worst])) {
      simplex[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t k = 1; k <= n; ++k) {
      const std::size_t idx = order[k];
      for (std::size_t i = 0; i < n; ++i) simplex[idx][i] = simplex[best][i] + delta * (simplex[idx][i] - simplex[best][i]);
      fv[idx] = f(simplex[idx]);
      ++res.evaluations;
    }
  }
  const auto it = std::min_element(fv.begin(), fv.end());
  res.x = simplex[static_cast<std::size_t>(it - fv.begin())];
  res.cost = *it;
  return res;
}

OptimizeResult bfgs_refine(const Objective& f, std::vector<double> x0, double h, int max_iters) {
  const auto n = static_cast<Eigen::Index>(x0.size());
  OptimizeResult res;
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(x0.data(), n);
  auto eval = [&](const Eigen::VectorXd& v) {
    ++res.evaluations;
    return f(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
  };
  auto grad = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd g(n);
    Eigen::VectorXd w = v;
    for (Eigen::Index i = 0; i < n; ++i) {
      w[i] = v[i] + h;
      const double fp = eval(w);
      w[i] = v[i] - h;
      const double fm = eval(w);
      w[i] = v[i];
      g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
  };

  double fx = eval(x);
  Eigen::VectorXd g = grad(x);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  for (int it = 0; it < max_iters; ++it) {
    if (g.norm() < 1e-12 || fx <= 1e-30) break;
    Eigen::VectorXd dir = -hinv * g;
    double slope = g.dot(dir);
    if (slope >= 0.0) {  // lost descent; restart from steepest descent
      hinv.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
    }
    double t = 1.0;
    Eigen::VectorXd xn;
    double fn = fx;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = x + t * dir;
      fn = eval(xn);
      if (fn <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    const Eigen::VectorXd gn = grad(xn);
    const Eigen::VectorXd s = xn - x, y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      hinv = (id - rho * s * y.transpose()) * hinv * (id - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    const bool stalled = fx - fn <= 1e-16 * std::max(1.0, std::abs(fx));
    x = xn;
    fx = fn;
    g = gn;
    if (stalled && g.norm() < 1e-8) break;
  }
  res.x.assign(x.data(), x.data() + n);
  res.cost = fx;
  return res;
}

OptimizeResult minimize(const Objective& f, int dimension, std::uint64_t seed, const OptimizeOptions& opt) {
  if (dimension < 1) throw std::invalid_argument("minimize: dimension must be positive");
  OptimizeResult best;
  best.cost = std::numeric_limits<double>::infinity();
  const int batch = std::max(1, opt.batch_size);

  for (int start = 0; start < opt.restarts; start += batch) {
    const int count = std::min(batch, opt.restarts - start);
    std::vector<OptimizeResult> runs(static_cast<std::size_t>(count));

#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k < count; ++k) {
      const int r = start + k;
      std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(r) + 1)));
      std::uniform_real_distribution<double> u(-opt.init_range, opt.init_range);
      std::vector<double> x0(static_cast<std::size_t>(dimension));
      for (double& v : x0) v = u(rng);
      OptimizeResult nm = nelder_mead(f, std::move(x0), opt.simplex_initial_step, opt.simplex_max_evals);
      OptimizeResult bf = bfgs_refine(f, nm.x, opt.fd_step, opt.bfgs_max_iters);
      bf.evaluations += nm.evaluations;
      if (nm.cost < bf.cost) {
        nm.evaluations = bf.evaluations;
        bf = std::move(nm);
      }
      bf.best_restart = r;
      runs[static_cast<std::size_t>(k)] = std::move(bf);
    }

    for (auto& run : runs) {
      best.evaluations += run.evaluations;
      ++best.restarts_run;
      if (run.cost < best.cost) {
        best.cost = run.cost;
        best.x = run.x;
        best.best_restart = run.best_restart;
      }
    }
    if (best.cost <= opt.target_cost) break;
  }
  best.converged = best.cost <= opt.target_cost;
  return best;
}

}  // namespace nadqec
