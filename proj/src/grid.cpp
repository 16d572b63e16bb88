#include "fracp/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fracp {

double Grid::sobolev_exponent() const {
  const double exps = ps();
  if (exps >= 1.0) return std::numeric_limits<double>::infinity();
  return p / (1.0 - exps);
}

Grid build_grid(double a, double b, int n, double s, double p,
                bool enforce_subcritical) {
  if (!(b > a)) throw std::invalid_argument("grid: require b > a");
  if (n < 2) throw std::invalid_argument("grid: require n >= 2");
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("grid: require s in (0,1)");
  if (!(p > 1.0)) throw std::invalid_argument("grid: require p > 1");
  if (enforce_subcritical && p * s >= 1.0)
    throw std::invalid_argument(
        "grid: supercritical scaling for N = 1 (ps = " + std::to_string(p * s) +
        " >= 1)");

  Grid g;
  g.a = a;
  g.b = b;
  g.n = n;
  g.h = (b - a) / n;
  g.s = s;
  g.p = p;
  g.x.resize(n);
  for (int i = 0; i < n; ++i) g.x[i] = a + (i + 0.5) * g.h;
  return g;
}

KernelWeights kernel_weights(const Grid& g) {
  const int n = g.n;
  const double exps = g.ps();
  KernelWeights k;
  k.W = Eigen::MatrixXd::Zero(n, n);
  k.rho.resize(n);
  k.ds.resize(n);

  const double h2 = g.h * g.h;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double w = h2 / std::pow(g.x[j] - g.x[i], 1.0 + exps);
      k.W(i, j) = w;
      k.W(j, i) = w;
    }
  }

  // Exact exterior integral of |x_i - y|^(-(1+ps)) over (-inf,a] and [b,inf):
  // the antiderivative gives (b-x)^(-ps)/ps + (x-a)^(-ps)/ps.
  for (int i = 0; i < n; ++i) {
    const double dl = g.x[i] - g.a;
    const double dr = g.b - g.x[i];
    k.rho[i] = (std::pow(dr, -exps) + std::pow(dl, -exps)) / exps;
    k.ds[i] = std::pow(std::min(dl, dr), g.s);
  }
  return k;
}

}  // namespace fracp
