#include "fracp/eigenpair.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace fracp {

double rayleigh(const Grid& g, const KernelWeights& k, const State& u) {
  if (u.size() != g.n)
    throw std::invalid_argument("rayleigh: state length does not match the grid");
  double mass = 0.0;
  for (int i = 0; i < g.n; ++i) mass += abs_pow(u[i], g.p);
  mass *= g.h;
  if (mass == 0.0) throw std::invalid_argument("rayleigh: u must be nonzero");
  return seminorm_p(g, k, u) / mass;
}

namespace {

State eigen_residual_vector(const Grid& g, const KernelWeights& k,
                            const State& u, double lam) {
  State rv = apply_operator(g, k, u);
  for (int i = 0; i < g.n; ++i) rv[i] -= lam * g.h * phi_p(u[i], g.p);
  return rv;
}

}  // namespace

EigenResult principal_eigenpair(const Grid& g, const KernelWeights& k,
                                double tol, int max_iter, const State* initial) {
  if (!(tol > 0.0)) throw std::invalid_argument("principal_eigenpair: tol > 0");
  const int n = g.n;
  const double rootn = std::sqrt(double(n));

  // fixed SPD preconditioner: the kernel form matrix, factored once; the
  // search stays a projected-gradient descent on the quotient (gradient-only
  // oracle), just in a better metric
  const Eigen::LLT<Eigen::MatrixXd> llt(kernel_form_matrix(g, k));

  // tent profile d^s: positive with the right boundary decay
  State u = initial ? *initial : State(k.ds);
  if (lp_norm(g, u, g.p) == 0.0)
    throw std::invalid_argument("principal_eigenpair: initial guess is zero");
  u /= lp_norm(g, u, g.p);
  double lam = seminorm_p(g, k, u);

  EigenResult res;
  res.quotient_trace.push_back(lam);

  State rv = eigen_residual_vector(g, k, u, lam);
  State dir = llt.solve(rv);
  State u_prev = u, dir_prev = dir;
  double alpha = 1.0;
  double last_decrease = std::numeric_limits<double>::infinity();
  int hard_stalls = 0;

  for (int iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter;
    res.eigen_residual = rv.norm() / rootn;
    if (res.eigen_residual <= tol && last_decrease < tol) {
      res.converged = true;
      break;
    }

    if (iter > 0) {
      const State sdiff = u - u_prev;
      const State ydiff = dir - dir_prev;
      const double sy = sdiff.dot(ydiff);
      const double ss = sdiff.squaredNorm();
      if (std::abs(sy) > 1e-300 && ss > 0.0)
        alpha = std::min(std::max(ss / std::abs(sy), 1e-14), 1e14);
    }

    u_prev = u;
    dir_prev = dir;

    // Backtracked step; the modulus cannot increase the quotient and the
    // renormalization keeps the p-norm at one. Near the minimizer the
    // quotient is quadratically flat and its decrease drops under the
    // floating-point floor long before the residual does, so acceptance
    // tolerates roundoff dust and falls back to a plain unit preconditioned
    // step (which still contracts the residual).
    const double dust = 1e-13 * std::max(1.0, std::abs(lam));
    double step = alpha;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      State v = (u - step * dir).cwiseAbs();
      const double norm = lp_norm(g, v, g.p);
      if (norm == 0.0) {
        step *= 0.5;
        continue;
      }
      v /= norm;
      const double lam_v = seminorm_p(g, k, v);
      if (lam_v <= lam + dust) {
        last_decrease = std::max(lam - lam_v, 0.0);
        u = v;
        lam = lam_v;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      State v = (u - dir).cwiseAbs();
      const double norm = lp_norm(g, v, g.p);
      if (norm > 0.0) {
        v /= norm;
        const double lam_v = seminorm_p(g, k, v);
        if (lam_v <= lam + dust) {
          u = v;
          lam = lam_v;
          accepted = true;
        }
      }
      last_decrease = 0.0;
      if (!accepted) ++hard_stalls;
    } else {
      hard_stalls = 0;
    }
    if (hard_stalls > 50) break;  // no usable step at this precision

    res.quotient_trace.push_back(lam);
    rv = eigen_residual_vector(g, k, u, lam);
    dir = llt.solve(rv);
  }

  res.eigen_residual = eigen_residual_vector(g, k, u, lam).norm() / rootn;
  res.pair.lambda1 = lam;
  res.pair.e1 = u;
  if (!res.converged && res.eigen_residual <= tol) res.converged = true;
  return res;
}

Eigen::MatrixXd kernel_form_matrix(const Grid& g, const KernelWeights& k) {
  const int n = g.n;
  Eigen::MatrixXd B = -2.0 * k.W;
  for (int i = 0; i < n; ++i) {
    const double rowsum = k.W.row(i).sum();
    B(i, i) = 2.0 * (rowsum + k.rho[i] * g.h);
  }
  return B;
}

Eigen::MatrixXd seminorm_form_matrix_p2(const Grid& g, const KernelWeights& k) {
  if (g.p != 2.0)
    throw std::invalid_argument("seminorm form matrix requires p = 2");
  return kernel_form_matrix(g, k);
}

DenseSpectrum dense_spectrum_p2(const Grid& g, const KernelWeights& k,
                                int count) {
  if (g.p != 2.0) throw std::invalid_argument("dense_spectrum_p2 requires p = 2");
  if (count < 1 || count > g.n)
    throw std::invalid_argument("dense_spectrum_p2: count must be in [1, n]");

  // E(u) = u^T B u against the mass h I, i.e. the standard spectrum of B/h.
  Eigen::MatrixXd B = seminorm_form_matrix_p2(g, k) / g.h;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dense_spectrum_p2: eigensolver failed");

  DenseSpectrum out;
  out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + count);
  out.gap = es.eigenvalues()[1] - es.eigenvalues()[0];
  State v = es.eigenvectors().col(0);
  if (v.sum() < 0.0) v = -v;
  v /= lp_norm(g, v, 2.0);
  out.principal_vector = v;
  return out;
}

}  // namespace fracp
