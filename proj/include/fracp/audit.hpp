#ifndef FRACP_AUDIT_HPP
#define FRACP_AUDIT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fracp/critical_point.hpp"

namespace fracp {

/// Exact Hessian of the discrete energy at p = 2: the seminorm form matrix
/// minus diag(h f'(u_i)). Rejects p != 2 (the functional is C^1 only
/// elsewhere).
Eigen::MatrixXd hessian_p2(const Grid& g, const KernelWeights& k,
                           const ReactionSpec& spec, const State& u);

struct MorseIndex {
  int index = 0;
  bool degenerate = false;
  double min_abs_eigenvalue = 0.0;
  double tol_eig = 0.0;  // 1e-8 * spectral radius
};

/// Count of Hessian eigenvalues below -tol_eig, with a degeneracy flag when
/// any eigenvalue lies within +-tol_eig of zero. Requires p = 2 and
/// residual <= 1e-8.
MorseIndex morse_index(const Grid& g, const KernelWeights& k,
                       const ReactionSpec& spec, const CriticalPoint& cp);

enum class PhVerdict { pass, incomplete, inconclusive };
std::string to_string(PhVerdict v);

struct IndexTableRow {
  SignClass sign_class = SignClass::zero;
  double value = 0.0;
  int morse_index = 0;
  int predicted_group_degree = 0;  // m in the delta_{k,m} pattern
  bool degenerate = false;
};

struct AuditReport {
  std::vector<IndexTableRow> index_table;
  long long signed_sum = 0;  // sum of (-1)^index over the inventory
  PhVerdict ph_verdict = PhVerdict::inconclusive;
  std::vector<std::string> flags;
  std::vector<std::string> notes;
};

/// Signed count over the inventory. A nonzero sum raises the
/// "inventory incomplete" flag (a further critical point exists); degenerate
/// or index-free entries make the verdict inconclusive.
AuditReport poincare_hopf_audit(const std::vector<CriticalPoint>& inventory);

/// Max over random smooth unit test states v of
///   |<Au, v> - h sum f(u_i) v_i|
/// with the pairing evaluated from the weak double sum, independent of the
/// assembled gradient.
double weak_residual_test(const Grid& g, const KernelWeights& k,
                          const ReactionSpec& spec, const State& u,
                          int trial_count, std::uint64_t seed = 0x5eedu);

}  // namespace fracp

#endif
