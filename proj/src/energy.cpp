#include "fracp/energy.hpp"

#include <cmath>
#include <future>
#include <stdexcept>
#include <vector>

namespace fracp {

double phi_p(double t, double p) {
  if (p == 2.0) return t;
  if (t == 0.0) return 0.0;
  const double a = std::abs(t);
  return std::pow(a, p - 1.0) * (t > 0.0 ? 1.0 : -1.0);
}

double abs_pow(double t, double p) {
  if (p == 2.0) return t * t;
  return std::pow(std::abs(t), p);
}

namespace {

void check_shape(const Grid& g, const State& u) {
  if (u.size() != g.n)
    throw std::invalid_argument("state length does not match the grid");
}

// Splits [0,n) into blocks, runs fn(block) concurrently, combines the partial
// sums in fixed block order so the result depends only on the block layout.
template <typename Fn>
double blocked_sum(int n, Fn&& fn) {
  const int workers = worker_count();
  if (workers <= 1 || n < 64) return fn(0, n);
  const int blocks = workers;
  std::vector<std::future<double>> futs;
  futs.reserve(blocks);
  for (int b = 0; b < blocks; ++b) {
    const int lo = static_cast<int>(static_cast<long long>(n) * b / blocks);
    const int hi = static_cast<int>(static_cast<long long>(n) * (b + 1) / blocks);
    futs.push_back(std::async(std::launch::async, [&fn, lo, hi] { return fn(lo, hi); }));
  }
  double total = 0.0;
  for (auto& f : futs) total += f.get();
  return total;
}

}  // namespace

double seminorm_p(const Grid& g, const KernelWeights& k, const State& u) {
  check_shape(g, u);
  const int n = g.n;
  const double p = g.p;
  const double interior = blocked_sum(n, [&](int lo, int hi) {
    double acc = 0.0;
    for (int i = lo; i < hi; ++i) {
      const double ui = u[i];
      double row = 0.0;
      for (int j = i + 1; j < n; ++j) row += k.W(i, j) * abs_pow(ui - u[j], p);
      acc += row;
    }
    return acc;
  });
  double exterior = 0.0;
  for (int i = 0; i < n; ++i) exterior += k.rho[i] * abs_pow(u[i], p);
  return 2.0 * interior + 2.0 * g.h * exterior;
}

State apply_operator(const Grid& g, const KernelWeights& k, const State& u) {
  check_shape(g, u);
  const int n = g.n;
  const double p = g.p;
  State out(n);
  const int workers = worker_count();
  auto compute_rows = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      const double ui = u[i];
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        acc += k.W(i, j) * phi_p(ui - u[j], p);
      }
      out[i] = 2.0 * acc + 2.0 * k.rho[i] * g.h * phi_p(ui, p);
    }
  };
  if (workers <= 1 || n < 64) {
    compute_rows(0, n);
  } else {
    std::vector<std::future<void>> futs;
    for (int b = 0; b < workers; ++b) {
      const int lo = static_cast<int>(static_cast<long long>(n) * b / workers);
      const int hi = static_cast<int>(static_cast<long long>(n) * (b + 1) / workers);
      futs.push_back(std::async(std::launch::async, compute_rows, lo, hi));
    }
    for (auto& f : futs) f.get();
  }
  return out;
}

double operator_pairing(const Grid& g, const KernelWeights& k, const State& u,
                        const State& v) {
  check_shape(g, u);
  check_shape(g, v);
  const int n = g.n;
  const double p = g.p;
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      acc += k.W(i, j) * phi_p(u[i] - u[j], p) * (v[i] - v[j]);
  acc *= 2.0;  // both orderings of each pair
  for (int i = 0; i < n; ++i) acc += 2.0 * k.rho[i] * g.h * phi_p(u[i], p) * v[i];
  return acc;
}

double phi(const Grid& g, const KernelWeights& k, const ReactionSpec& spec,
           const State& u) {
  check_shape(g, u);
  double reaction = 0.0;
  for (int i = 0; i < g.n; ++i) reaction += spec.F(u[i]);
  return seminorm_p(g, k, u) / g.p - g.h * reaction;
}

State grad_phi(const Grid& g, const KernelWeights& k, const ReactionSpec& spec,
               const State& u) {
  State out = apply_operator(g, k, u);
  for (int i = 0; i < g.n; ++i) out[i] -= g.h * spec.f(u[i]);
  return out;
}

double residual(const Grid& g, const KernelWeights& k,
                const ReactionSpec& spec, const State& u) {
  return grad_phi(g, k, spec, u).norm() / std::sqrt(double(g.n));
}

double cerami_quantity(const Grid& g, const KernelWeights& k,
                       const ReactionSpec& spec, const State& u) {
  const double e = seminorm_p(g, k, u);
  return (1.0 + std::pow(e, 1.0 / g.p)) * residual(g, k, spec, u);
}

EnergyReport evaluate_energy(const Grid& g, const KernelWeights& k,
                             const ReactionSpec& spec, const State& u) {
  EnergyReport rep;
  rep.seminorm_p = seminorm_p(g, k, u);
  rep.value = phi(g, k, spec, u);
  rep.grad_norm = residual(g, k, spec, u);
  rep.cerami = (1.0 + std::pow(rep.seminorm_p, 1.0 / g.p)) * rep.grad_norm;
  return rep;
}

double lp_norm(const Grid& g, const State& u, double p) {
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i) acc += abs_pow(u[i], p);
  return std::pow(g.h * acc, 1.0 / p);
}

double l2_norm(const Grid& g, const State& u) {
  return std::sqrt(g.h) * u.norm();
}

double rel_l2_distance(const Grid& g, const State& u, const State& v) {
  const double nu = l2_norm(g, u);
  const double nv = l2_norm(g, v);
  const double scale = std::max(nu, nv);
  if (scale == 0.0) return 0.0;
  return l2_norm(g, State(u - v)) / scale;
}

}  // namespace fracp
