#ifndef FRACP_ENERGY_HPP
#define FRACP_ENERGY_HPP

#include "fracp/grid.hpp"
#include "fracp/reaction.hpp"

namespace fracp {

/// phi_p(t) = |t|^(p-2) t, with the p = 2 fast path.
double phi_p(double t, double p);

/// |t|^p with the p = 2 fast path.
double abs_pow(double t, double p);

/// Discrete Gagliardo energy
///   E(u) = sum_{i != j} W_ij |u_i - u_j|^p + 2 sum_i rho_i h |u_i|^p.
/// Nonnegative, zero only at u = 0, positively p-homogeneous.
double seminorm_p(const Grid& g, const KernelWeights& k, const State& u);

/// Gradient of u -> E(u)/p:
///   (Au)_i = 2 sum_{j != i} W_ij phi_p(u_i - u_j) + 2 rho_i h phi_p(u_i),
/// so that <Au, u> = E(u).
State apply_operator(const Grid& g, const KernelWeights& k, const State& u);

/// Weak pairing <Au, v> evaluated directly from the double sum, without
/// assembling Au. Used as an independent route in the audit.
double operator_pairing(const Grid& g, const KernelWeights& k, const State& u,
                        const State& v);

/// Energy functional of the chosen truncation mode:
///   Phi(u) = E(u)/p - h sum_i F(u_i).
double phi(const Grid& g, const KernelWeights& k, const ReactionSpec& spec,
           const State& u);

/// Gradient of phi: apply_operator(u) - h (f(u_i))_i.
State grad_phi(const Grid& g, const KernelWeights& k, const ReactionSpec& spec,
               const State& u);

/// Mesh-comparable convergence metric: ||grad_phi(u)||_2 / sqrt(n).
double residual(const Grid& g, const KernelWeights& k,
                const ReactionSpec& spec, const State& u);

/// (1 + E(u)^(1/p)) * residual(u).
double cerami_quantity(const Grid& g, const KernelWeights& k,
                       const ReactionSpec& spec, const State& u);

struct EnergyReport {
  double value = 0.0;       // phi(u)
  double grad_norm = 0.0;   // residual(u)
  double cerami = 0.0;
  double seminorm_p = 0.0;  // E(u)
};

EnergyReport evaluate_energy(const Grid& g, const KernelWeights& k,
                             const ReactionSpec& spec, const State& u);

/// h-weighted p-norm: (h sum |u_i|^p)^(1/p).
double lp_norm(const Grid& g, const State& u, double p);

/// h-weighted L2 norm, the metric used for path lengths and distances.
double l2_norm(const Grid& g, const State& u);

/// Relative L2 distance ||u - v|| / max(||u||, ||v||); 0 when both vanish.
double rel_l2_distance(const Grid& g, const State& u, const State& v);

}  // namespace fracp

#endif
