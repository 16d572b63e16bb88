#ifndef FRACP_CRITICAL_POINT_HPP
#define FRACP_CRITICAL_POINT_HPP

#include <optional>
#include <string>

#include "fracp/energy.hpp"

namespace fracp {

enum class SignClass { zero, positive, negative, sign_changing };
std::string to_string(SignClass c);

/// Componentwise sign classification at threshold 1e-10 * max|u|, and the
/// boundary-quotient extremum: min_i u_i/ds_i for positive states,
/// max_i u_i/ds_i for negative ones, min_i u_i/ds_i otherwise.
struct SignInfo {
  SignClass sign_class = SignClass::zero;
  double hopf_ratio = 0.0;
};

SignInfo classify_sign(const State& u, const Eigen::VectorXd& ds);

struct CriticalPoint {
  State state;
  double value = 0.0;     // phi at state
  double residual = 0.0;
  SignClass sign_class = SignClass::zero;
  double hopf_ratio = 0.0;
  std::optional<int> morse_index;  // p = 2 only
  bool degenerate = false;
  bool converged = false;
};

/// Builds a classified critical point record from a state (no convergence
/// claim beyond the residual it reports).
CriticalPoint make_critical_point(const Grid& g, const KernelWeights& k,
                                  const ReactionSpec& spec, const State& u,
                                  bool converged);

}  // namespace fracp

#endif
