#ifndef FRACP_GRID_HPP
#define FRACP_GRID_HPP

#include <Eigen/Dense>

#include "fracp/util.hpp"

namespace fracp {

/// Uniform cell partition of the interval (a,b) with midpoint nodes, carrying
/// the fractional order s and the integrability exponent p.
struct Grid {
  double a = 0.0;
  double b = 1.0;
  int n = 0;
  double h = 0.0;           // cell width (b-a)/n
  Eigen::VectorXd x;        // midpoints x_i = a + (i - 1/2) h
  double s = 0.5;
  double p = 2.0;

  double ps() const { return p * s; }
  double diam() const { return b - a; }

  /// p/(1 - ps) when ps < 1; +infinity otherwise (every polynomial growth
  /// is then subcritical in one dimension).
  double sobolev_exponent() const;
};

/// Builds the grid. Rejects b <= a, n < 2, s outside (0,1), p <= 1.
/// With enforce_subcritical (the default) also rejects ps >= 1
/// ("supercritical scaling for N = 1"); pass false to allow any s in (0,1),
/// in which case sobolev_exponent() reports +infinity for ps >= 1.
Grid build_grid(double a, double b, int n, double s, double p,
                bool enforce_subcritical = true);

/// Kernel data for the discrete nonlocal energy on a grid:
///   W_ij  = h^2 / |x_i - x_j|^(1+ps)   (i != j, zero diagonal)
///   rho_i = exact integral of |x_i - y|^(-(1+ps)) over the complement of (a,b)
///   ds_i  = min(x_i - a, b - x_i)^s    (boundary weight d_Omega^s)
struct KernelWeights {
  Eigen::MatrixXd W;
  Eigen::VectorXd rho;
  Eigen::VectorXd ds;
};

KernelWeights kernel_weights(const Grid& g);

}  // namespace fracp

#endif
