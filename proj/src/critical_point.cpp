#include "fracp/critical_point.hpp"

#include <cmath>
#include <limits>

namespace fracp {

std::string to_string(SignClass c) {
  switch (c) {
    case SignClass::zero: return "zero";
    case SignClass::positive: return "positive";
    case SignClass::negative: return "negative";
    case SignClass::sign_changing: return "sign-changing";
  }
  return "?";
}

SignInfo classify_sign(const State& u, const Eigen::VectorXd& ds) {
  SignInfo info;
  const int n = static_cast<int>(u.size());
  const double umax = u.cwiseAbs().maxCoeff();
  if (umax == 0.0) return info;  // zero class, ratio 0

  const double thresh = 1e-10 * umax;
  bool has_pos = false, has_neg = false;
  for (int i = 0; i < n; ++i) {
    if (u[i] > thresh) has_pos = true;
    if (u[i] < -thresh) has_neg = true;
  }
  if (has_pos && has_neg) {
    info.sign_class = SignClass::sign_changing;
  } else if (has_pos) {
    info.sign_class = SignClass::positive;
  } else if (has_neg) {
    info.sign_class = SignClass::negative;
  } else {
    info.sign_class = SignClass::zero;
    return info;
  }

  if (info.sign_class == SignClass::negative) {
    // boundary quotient closest to zero from below
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) hi = std::max(hi, u[i] / ds[i]);
    info.hopf_ratio = hi;
  } else {
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) lo = std::min(lo, u[i] / ds[i]);
    info.hopf_ratio = lo;
  }
  return info;
}

CriticalPoint make_critical_point(const Grid& g, const KernelWeights& k,
                                  const ReactionSpec& spec, const State& u,
                                  bool converged) {
  CriticalPoint cp;
  cp.state = u;
  cp.value = phi(g, k, spec, u);
  cp.residual = residual(g, k, spec, u);
  const SignInfo info = classify_sign(u, k.ds);
  cp.sign_class = info.sign_class;
  cp.hopf_ratio = info.hopf_ratio;
  cp.converged = converged;
  return cp;
}

}  // namespace fracp
