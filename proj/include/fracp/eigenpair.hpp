#ifndef FRACP_EIGENPAIR_HPP
#define FRACP_EIGENPAIR_HPP

#include <vector>

#include "fracp/energy.hpp"

namespace fracp {

/// Principal eigenpair of the discrete operator: lambda1 = E(e1) with
/// h-weighted p-norm of e1 equal to one and e1 > 0 componentwise.
struct EigenPair {
  double lambda1 = 0.0;
  State e1;
};

struct EigenResult {
  EigenPair pair;
  bool converged = false;
  double eigen_residual = 0.0;  // ||A e1 - lambda1 h phi_p(e1)|| / sqrt(n)
  int iterations = 0;
  std::vector<double> quotient_trace;  // Rayleigh quotient per iteration
};

/// Rayleigh quotient E(u) / (h sum |u_i|^p). Rejects u = 0.
double rayleigh(const Grid& g, const KernelWeights& k, const State& u);

/// Projected-gradient descent on the Rayleigh quotient with a modulus step
/// (the iterate is replaced by its componentwise absolute value, which never
/// increases the quotient) and L^p renormalization. Barzilai-Borwein steps
/// with an Armijo backtracking safeguard keep the quotient non-increasing;
/// the descent direction is preconditioned by the kernel form matrix.
/// Stops when the quotient decrease over a sweep falls below tol and the
/// eigen-residual is at most tol. Starts from the d^s tent profile unless an
/// initial guess is supplied.
EigenResult principal_eigenpair(const Grid& g, const KernelWeights& k,
                                double tol, int max_iter = 200000,
                                const State* initial = nullptr);

/// Dense oracle at p = 2: spectrum of the pencil (B, h I) where E(u) = u^T B u.
struct DenseSpectrum {
  std::vector<double> values;       // ascending
  State principal_vector;           // sign-fixed eigenvector of the smallest
  double gap = 0.0;                 // lambda2 - lambda1
};

/// Smallest `count` eigenvalues of the discrete quadratic form at p = 2.
/// Rejects p != 2.
DenseSpectrum dense_spectrum_p2(const Grid& g, const KernelWeights& k,
                                int count);

/// Assembles the symmetric matrix B with E(u) = u^T B u (p = 2 only).
Eigen::MatrixXd seminorm_form_matrix_p2(const Grid& g, const KernelWeights& k);

/// The same kernel form matrix 2(D - W + diag(rho h)) for any p; SPD, used as
/// a fixed preconditioner by the first-order solvers.
Eigen::MatrixXd kernel_form_matrix(const Grid& g, const KernelWeights& k);

}  // namespace fracp

#endif
