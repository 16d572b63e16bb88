#include "fracp/audit.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "fracp/eigenpair.hpp"

namespace fracp {

std::string to_string(PhVerdict v) {
  switch (v) {
    case PhVerdict::pass: return "pass";
    case PhVerdict::incomplete: return "incomplete";
    case PhVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

Eigen::MatrixXd hessian_p2(const Grid& g, const KernelWeights& k,
                           const ReactionSpec& spec, const State& u) {
  if (g.p != 2.0)
    throw std::invalid_argument("hessian_p2: the energy is C^1 only for p != 2");
  if (u.size() != g.n)
    throw std::invalid_argument("hessian_p2: state length mismatch");
  Eigen::MatrixXd H = seminorm_form_matrix_p2(g, k);
  for (int i = 0; i < g.n; ++i) H(i, i) -= g.h * spec.fprime(u[i]);
  return H;
}

MorseIndex morse_index(const Grid& g, const KernelWeights& k,
                       const ReactionSpec& spec, const CriticalPoint& cp) {
  if (g.p != 2.0) throw std::invalid_argument("morse_index requires p = 2");
  if (!(cp.residual <= 1e-8))
    throw std::invalid_argument("morse_index: point is not converged to 1e-8");

  Eigen::MatrixXd H = hessian_p2(g, k, spec, cp.state);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("morse_index: eigensolver failed");

  const auto& ev = es.eigenvalues();
  const double radius = std::max(std::abs(ev[0]), std::abs(ev[g.n - 1]));
  MorseIndex out;
  out.tol_eig = 1e-8 * radius;
  out.min_abs_eigenvalue = ev.cwiseAbs().minCoeff();
  for (int i = 0; i < g.n; ++i) {
    if (ev[i] < -out.tol_eig) ++out.index;
    if (std::abs(ev[i]) <= out.tol_eig) out.degenerate = true;
  }
  return out;
}

AuditReport poincare_hopf_audit(const std::vector<CriticalPoint>& inventory) {
  AuditReport rep;
  if (inventory.empty()) {
    rep.signed_sum = 0;
    rep.ph_verdict = PhVerdict::inconclusive;
    rep.flags.push_back("inconclusive -- empty inventory");
    return rep;
  }

  bool degenerate = false;
  bool missing_index = false;
  long long sum = 0;
  for (const auto& cp : inventory) {
    IndexTableRow row;
    row.sign_class = cp.sign_class;
    row.value = cp.value;
    row.degenerate = cp.degenerate;
    if (cp.morse_index.has_value()) {
      row.morse_index = *cp.morse_index;
      row.predicted_group_degree = *cp.morse_index;  // delta_{k,m} pattern
      if (!cp.degenerate) sum += (*cp.morse_index % 2 == 0) ? 1 : -1;
    } else {
      missing_index = true;
    }
    if (cp.degenerate) degenerate = true;
    rep.index_table.push_back(row);
  }
  rep.signed_sum = sum;

  if (degenerate || missing_index) {
    rep.ph_verdict = PhVerdict::inconclusive;
    rep.flags.push_back(degenerate
                            ? "inconclusive -- degenerate point present"
                            : "inconclusive -- point without a Morse index");
    return rep;
  }
  if (sum == 0) {
    rep.ph_verdict = PhVerdict::pass;
  } else {
    rep.ph_verdict = PhVerdict::incomplete;
    rep.flags.push_back(
        "inventory incomplete -- a further critical point exists");
  }
  return rep;
}

double weak_residual_test(const Grid& g, const KernelWeights& k,
                          const ReactionSpec& spec, const State& u,
                          int trial_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double rootn = std::sqrt(double(g.n));
  double worst = 0.0;
  for (int trial = 0; trial < trial_count; ++trial) {
    State v = smoothed_noise(g.n, rng, 8);
    const double norm = v.norm();
    if (norm == 0.0) continue;
    v /= norm;
    double reaction = 0.0;
    for (int i = 0; i < g.n; ++i) reaction += spec.f(u[i]) * v[i];
    const double gap = operator_pairing(g, k, u, v) - g.h * reaction;
    worst = std::max(worst, std::abs(gap) / rootn);
  }
  return worst;
}

}  // namespace fracp
