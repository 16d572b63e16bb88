#include "fracp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace fracp {

std::string to_string(DescentStatus s) {
  switch (s) {
    case DescentStatus::converged: return "converged";
    case DescentStatus::max_iter: return "max_iter";
    case DescentStatus::unbounded: return "unbounded descent";
  }
  return "?";
}

namespace {

constexpr double kArmijoSigma = 1e-4;

TraceRow make_trace_row(const Grid& g, const KernelWeights& k, const State& u,
                        int iter, double fval, double resid) {
  TraceRow row;
  row.iter = iter;
  row.phi = fval;
  row.residual = resid;
  const double e = seminorm_p(g, k, u);
  row.cerami = (1.0 + std::pow(e, 1.0 / g.p)) * resid;
  return row;
}

}  // namespace

DescentResult descend(const Grid& g, const KernelWeights& k,
                      const ReactionSpec& spec, const State& u0,
                      const DescentOptions& opt) {
  if (!(opt.tol > 0.0)) throw std::invalid_argument("descend: tol > 0");
  const double rootn = std::sqrt(double(g.n));

  // below p = 2 the gradient field is not Lipschitz; descend in the metric of
  // the kernel form matrix instead (still a gradient-only method)
  const bool precond = g.p < 2.0;
  Eigen::LLT<Eigen::MatrixXd> llt;
  if (precond) llt.compute(kernel_form_matrix(g, k));

  DescentResult res;
  State u = u0;
  double fval = phi(g, k, spec, u);
  State gvec = grad_phi(g, k, spec, u);
  State dir = precond ? State(llt.solve(gvec)) : gvec;
  double resid = gvec.norm() / rootn;
  if (opt.record_trace)
    res.trace.push_back(make_trace_row(g, k, u, 0, fval, resid));

  State u_prev, d_prev;
  double alpha = 0.01 * (1.0 + u.norm()) / (1.0 + dir.norm());

  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    if (resid <= opt.tol) {
      res.status = DescentStatus::converged;
      break;
    }
    if (fval < opt.phi_floor) {
      res.status = DescentStatus::unbounded;
      break;
    }

    if (iter > 1) {
      const State sdiff = u - u_prev;
      const State ydiff = dir - d_prev;
      const double sy = sdiff.dot(ydiff);
      const double ss = sdiff.squaredNorm();
      if (std::abs(sy) > 1e-300 && ss > 0.0)
        alpha = std::min(std::max(ss / std::abs(sy), 1e-14), 1e10);
    }

    const double slope = gvec.dot(dir);  // > 0, the preconditioner is SPD
    double step = alpha;
    bool accepted = false;
    double fnew = fval;
    State unew;
    for (int bt = 0; bt < 60; ++bt) {
      unew = u - step * dir;
      fnew = phi(g, k, spec, unew);
      if (fnew <= fval - kArmijoSigma * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // below floating-point resolution of phi

    u_prev = u;
    d_prev = dir;
    u = unew;
    fval = fnew;
    gvec = grad_phi(g, k, spec, u);
    dir = precond ? State(llt.solve(gvec)) : gvec;
    resid = gvec.norm() / rootn;
    if (opt.record_trace)
      res.trace.push_back(make_trace_row(g, k, u, iter, fval, resid));
    if (resid <= opt.tol) {
      res.status = DescentStatus::converged;
      break;
    }
  }

  res.point = make_critical_point(g, k, spec, u,
                                  res.status == DescentStatus::converged);
  return res;
}

LowPointResult find_low_point(const Grid& g, const KernelWeights& k,
                              const ReactionSpec& spec, const State& e1) {
  LowPointResult out;
  // The minus truncation has no reaction mass on the positive ray, so the
  // search runs along -e1 there.
  const double dir = spec.mode == TruncationMode::minus ? -1.0 : 1.0;
  double tau = 1.0;
  for (int kstep = 0; kstep <= 40; ++kstep) {
    const State v = (dir * tau) * e1;
    const double val = phi(g, k, spec, v);
    out.sweep.emplace_back(tau, val);
    if (val < -1.0) {
      out.u = v;
      out.tau = tau;
      out.value = val;
      out.found = true;
      return out;
    }
    tau *= 2.0;
  }
  out.found = false;  // superlinearity not visible at this scale
  return out;
}

namespace {

// --- squared-gradient-norm polish -----------------------------------------
//
// Minimizes D(u) = (1/2) M(u)^2 |grad phi(u)|^2, where M is the product of
// shifted deflation factors 1 + ||u - w||^-(p-1) over the known roots (M = 1
// without roots). Zeros of the true gradient away from the roots are global
// minima of D, including saddle points of phi, which plain descent cannot
// reach. grad D = M^2 H g + M |g|^2 grad M, with H g exact at p = 2 and by
// central differences otherwise.

struct PolishOptions {
  double tol = 1e-8;
  int max_iter = 20000;
  bool use_pullback = false;
  double phi_level = 0.0;
  double pullback_fraction = 0.10;
  std::vector<State> deflate;
  // > 0: abandon a run whose iterate comes this close (h-weighted L2) to a
  // deflated root; the run is converging onto a known point and the deflation
  // only slows it down
  double abort_root_radius = 0.0;
};

struct PolishResult {
  State u;
  bool converged = false;
  bool pulled_back = false;
  int iterations = 0;
  double residual = 0.0;
  std::vector<TraceRow> trace;
};

struct DeflationEval {
  double M = 1.0;
  State grad_M;  // empty when no roots
};

DeflationEval eval_deflation(const Grid& g, const State& u,
                             const std::vector<State>& roots, double p) {
  DeflationEval out;
  if (roots.empty()) return out;
  out.grad_M = State::Zero(u.size());
  State ratio_sum = State::Zero(u.size());
  for (const auto& w : roots) {
    const State d = u - w;
    const double dist = std::max(std::sqrt(g.h) * d.norm(), 1e-300);
    const double mw = 1.0 + std::pow(dist, -(p - 1.0));
    // grad of 1 + dist^-(p-1) is -(p-1) h dist^-(p+1) (u - w)
    const double coef = -(p - 1.0) * g.h * std::pow(dist, -(p + 1.0));
    ratio_sum += (coef / mw) * d;
    out.M *= mw;
  }
  out.grad_M = out.M * ratio_sum;
  return out;
}

// Hessian of the full energy for p >= 2 (the kernel term is C^1 there):
//   H_ij = -2 W_ij phi_p'(u_i - u_j),  phi_p'(t) = (p-1)|t|^(p-2),
//   H_ii =  2 sum_j W_ij phi_p'(u_i - u_j) + 2 rho_i h phi_p'(u_i) - h f'(u_i).
Eigen::MatrixXd energy_hessian(const Grid& g, const KernelWeights& k,
                               const ReactionSpec& spec, const State& u) {
  const int n = g.n;
  const double p = g.p;
  // below p = 2 the pair curvature |t|^(p-2) blows up at coincidence points;
  // it is floored there, which only matters for the first-order surrogate
  // gradient (convergence is always checked on the true residual)
  const double floor_t =
      p < 2.0 ? 1e-9 * (1.0 + u.cwiseAbs().maxCoeff()) : 0.0;
  auto dphi = [p, floor_t](double t) {
    if (p == 2.0) return 1.0;
    return (p - 1.0) * std::pow(std::max(std::abs(t), floor_t), p - 2.0);
  };
  Eigen::MatrixXd H(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = 2.0 * k.W(i, j) * dphi(u[i] - u[j]);
      H(i, j) = -w;
      diag += w;
    }
    H(i, i) = diag + 2.0 * k.rho[i] * g.h * dphi(u[i]) - g.h * spec.fprime(u[i]);
  }
  return H;
}

PolishResult polish_critical_point(const Grid& g, const KernelWeights& k,
                                   const ReactionSpec& spec, const State& u0,
                                   const PolishOptions& opt) {
  const double rootn = std::sqrt(double(g.n));
  // second-order information is only trustworthy away from the singular range;
  // below p = 2 the search stays first-order but runs in the metric of the
  // kernel form matrix (fixed SPD preconditioner)
  const bool newton_ok = g.p >= 2.0;
  Eigen::LLT<Eigen::MatrixXd> llt;
  if (!newton_ok) llt.compute(kernel_form_matrix(g, k));

  auto precond = [&](const State& v) -> State {
    return newton_ok ? v : State(llt.solve(v));
  };

  PolishResult res;
  State u = u0;
  State gvec = grad_phi(g, k, spec, u);
  State pg = precond(gvec);
  DeflationEval defl = eval_deflation(g, u, opt.deflate, g.p);
  double dval = 0.5 * defl.M * defl.M * gvec.dot(pg);

  State dg;  // gradient of D for the first-order fallback
  std::deque<std::pair<State, State>> secants;  // (s, y) pairs, L-BFGS memory
  constexpr int kSecantMemory = 20;

  auto dgrad = [&](const State& uu, const State& gg, const State& pgg,
                   const DeflationEval& dd) -> State {
    // exact H (v) from the assembled pair-curvature matrix; at p < 2 this is
    // only a matrix-vector product, never a solve
    State hg = newton_ok ? State(energy_hessian(g, k, spec, uu) * gg)
                         : State(energy_hessian(g, k, spec, uu) * pgg);
    State out = dd.M * dd.M * hg;
    if (!opt.deflate.empty()) out += (dd.M * gg.dot(pgg)) * dd.grad_M;
    return out;
  };

  auto eval_d = [&](const State& uu, State& gg, State& pgg, DeflationEval& dd) {
    gg = grad_phi(g, k, spec, uu);
    pgg = precond(gg);
    dd = eval_deflation(g, uu, opt.deflate, g.p);
    return 0.5 * dd.M * dd.M * gg.dot(pgg);
  };

  // two-loop recursion over the stored secant pairs
  auto lbfgs_direction = [&](const State& grad) -> State {
    State q = grad;
    std::vector<double> coeffs;
    coeffs.reserve(secants.size());
    for (auto rit = secants.rbegin(); rit != secants.rend(); ++rit) {
      const double rho = 1.0 / rit->second.dot(rit->first);
      const double a = rho * rit->first.dot(q);
      coeffs.push_back(a);
      q -= a * rit->second;
    }
    if (!secants.empty()) {
      const auto& last = secants.back();
      q *= last.first.dot(last.second) / last.second.squaredNorm();
    }
    int idx = static_cast<int>(coeffs.size()) - 1;
    for (auto fit = secants.begin(); fit != secants.end(); ++fit, --idx) {
      const double rho = 1.0 / fit->second.dot(fit->first);
      const double b = rho * fit->second.dot(q);
      q += (coeffs[idx] - b) * fit->first;
    }
    return q;
  };

  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    res.iterations = iter;
    res.residual = gvec.norm() / rootn;
    if (res.residual <= opt.tol) {
      res.converged = true;
      break;
    }
    if (opt.use_pullback) {
      const double level = opt.phi_level;
      const double fval = phi(g, k, spec, u);
      if (fval < level - opt.pullback_fraction * std::max(std::abs(level), 1e-12)) {
        res.pulled_back = true;
        break;
      }
    }
    if (opt.abort_root_radius > 0.0 && iter % 5 == 0) {
      bool near_root = false;
      for (const auto& w : opt.deflate) {
        if (l2_norm(g, State(u - w)) <= opt.abort_root_radius) {
          near_root = true;
          break;
        }
      }
      if (near_root) break;
    }

    bool stepped = false;

    if (newton_ok) {
      // damped Newton on the deflated system M g = 0; the deflated step is
      // the plain Newton step rescaled by 1/(1 - <grad M, d>/M)
      const Eigen::MatrixXd H = energy_hessian(g, k, spec, u);
      State dn = H.partialPivLu().solve(-gvec);
      if (dn.allFinite()) {
        if (!opt.deflate.empty()) {
          const double denom = 1.0 - defl.grad_M.dot(dn) / defl.M;
          if (std::abs(denom) > 1e-10) dn /= denom;
        }
        double tau = 1.0;
        for (int bt = 0; bt < 40; ++bt) {
          State unew = u + tau * dn;
          State gnew, pgnew;
          DeflationEval deflnew;
          const double dnew = eval_d(unew, gnew, pgnew, deflnew);
          if (dnew <= (1.0 - kArmijoSigma * tau) * dval) {
            u = unew;
            gvec = gnew;
            pg = pgnew;
            defl = deflnew;
            dval = dnew;
            stepped = true;
            secants.clear();  // a Newton jump invalidates the secant history
            break;
          }
          tau *= 0.5;
        }
      }
    }

    if (!stepped) {
      // L-BFGS step on D with Armijo backtracking (gradient-only)
      if (dg.size() == 0) dg = dgrad(u, gvec, pg, defl);
      State dir = lbfgs_direction(dg);
      double slope = dg.dot(dir);
      if (!(slope > 0.0)) {  // not a descent direction: restart the memory
        secants.clear();
        dir = dg;
        slope = dg.squaredNorm();
      }
      double step = secants.empty()
                        ? 0.01 * (1.0 + u.norm()) / (1.0 + dir.norm())
                        : 1.0;
      for (int bt = 0; bt < 60; ++bt) {
        State unew = u - step * dir;
        State gnew, pgnew;
        DeflationEval deflnew;
        const double dnew = eval_d(unew, gnew, pgnew, deflnew);
        if (dnew <= dval - kArmijoSigma * step * slope) {
          State dgnew = dgrad(unew, gnew, pgnew, deflnew);
          const State sdiff = unew - u;
          const State ydiff = dgnew - dg;
          if (sdiff.dot(ydiff) > 1e-14 * sdiff.norm() * ydiff.norm()) {
            secants.emplace_back(sdiff, ydiff);
            if (static_cast<int>(secants.size()) > kSecantMemory)
              secants.pop_front();
          }
          u = unew;
          gvec = gnew;
          pg = pgnew;
          defl = deflnew;
          dval = dnew;
          dg = std::move(dgnew);
          stepped = true;
          break;
        }
        step *= 0.5;
      }
      if (!stepped) break;  // stalled at the numerical floor of D
    } else {
      dg.resize(0);  // Hessian changed; recompute lazily on the next fallback
    }
  }

  res.residual = gvec.norm() / rootn;
  if (res.residual <= opt.tol) res.converged = true;
  res.u = u;
  return res;
}

// equal-arclength resampling of the polyline in the h-weighted L2 metric
bool reparameterize_path(const Grid& g, std::vector<State>& path,
                         double& spacing) {
  const int m = static_cast<int>(path.size());
  std::vector<double> cum(m, 0.0);
  for (int j = 1; j < m; ++j) {
    const double seg = l2_norm(g, State(path[j] - path[j - 1]));
    if (seg < 1e-12) return false;  // path collapse
    cum[j] = cum[j - 1] + seg;
  }
  const double total = cum[m - 1];
  spacing = total / (m - 1);
  std::vector<State> fresh(m);
  fresh[0] = path[0];
  fresh[m - 1] = path[m - 1];
  int seg = 1;
  for (int j = 1; j < m - 1; ++j) {
    const double target = total * j / (m - 1);
    while (seg < m - 1 && cum[seg] < target) ++seg;
    const double t = (target - cum[seg - 1]) / (cum[seg] - cum[seg - 1]);
    fresh[j] = (1.0 - t) * path[seg - 1] + t * path[seg];
  }
  path.swap(fresh);
  return true;
}

}  // namespace

MountainPassResult mountain_pass(const Grid& g, const KernelWeights& k,
                                 const ReactionSpec& spec, const State& end0,
                                 const State& end1,
                                 const MountainPassOptions& opt) {
  if (opt.path_nodes < 5 || opt.path_nodes % 2 == 0)
    throw std::invalid_argument("mountain_pass: path_nodes must be odd and >= 5");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("mountain_pass: tol > 0");

  MountainPassResult res;
  res.endpoint_low = end1;

  int m = opt.path_nodes;
  std::vector<State> path(m);
  for (int j = 0; j < m; ++j) {
    const double t = double(j) / (m - 1);
    path[j] = (1.0 - t) * end0 + t * end1;
  }

  std::vector<double> phis(m);
  std::vector<double> alphas(m, 0.0);
  auto refresh_phis = [&]() {
    for (int j = 0; j < m; ++j) phis[j] = phi(g, k, spec, path[j]);
  };
  refresh_phis();

  const double rootn = std::sqrt(double(g.n));
  int total_sweeps = 0;
  bool want_refine = false;

  for (int round = 0; round < 2; ++round) {
    if (round == 1) {
      if (!want_refine) break;
      // refine: insert midpoints, m -> 2m-1, then relax again
      std::vector<State> dense;
      dense.reserve(2 * m - 1);
      for (int j = 0; j + 1 < m; ++j) {
        dense.push_back(path[j]);
        dense.push_back(0.5 * (path[j] + path[j + 1]));
      }
      dense.push_back(path[m - 1]);
      path.swap(dense);
      m = static_cast<int>(path.size());
      phis.assign(m, 0.0);
      alphas.assign(m, 0.0);
      refresh_phis();
      res.refined = true;
    }

    double level_prev = std::numeric_limits<double>::infinity();
    int plateau = 0;
    int max_at = 0;
    double resid_max = std::numeric_limits<double>::infinity();
    double spacing = l2_norm(g, State(path[m - 1] - path[0])) / (m - 1);

    // nodes already below both endpoints are frozen: the energy has no floor,
    // and letting them descend only stretches the path until the ridge is no
    // longer resolved
    const double floor_phi = std::min(phis[0], phis[m - 1]);

    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
      ++total_sweeps;
      // one safeguarded descent step per interior node, capped at half the
      // node spacing so the string stays taut
      for (int j = 1; j + 1 < m; ++j) {
        if (phis[j] <= floor_phi) continue;
        State gvec = grad_phi(g, k, spec, path[j]);
        const double gnorm2 = gvec.squaredNorm();
        if (gnorm2 == 0.0) continue;
        const double gnorm_l2 = std::sqrt(g.h * gnorm2);
        const double cap = 0.5 * spacing / gnorm_l2;
        double step = alphas[j] > 0.0 ? std::min(1.5 * alphas[j], cap) : cap;
        for (int bt = 0; bt < 40; ++bt) {
          const State cand = path[j] - step * gvec;
          const double fc = phi(g, k, spec, cand);
          if (fc <= phis[j] - kArmijoSigma * step * gnorm2) {
            path[j] = cand;
            phis[j] = fc;
            alphas[j] = step;
            break;
          }
          step *= 0.5;
        }
      }

      if (!reparameterize_path(g, path, spacing)) {
        res.note = "path collapse: adjacent nodes closer than 1e-12";
        res.level = *std::max_element(phis.begin(), phis.end());
        res.iterations = total_sweeps;
        res.critical = make_critical_point(g, k, spec, path[m / 2], false);
        return res;
      }
      refresh_phis();

      max_at = 0;
      for (int j = 0; j < m; ++j)
        if (phis[j] > phis[max_at]) max_at = j;
      res.level = phis[max_at];
      // the saddle candidate is the interior maximum
      int interior_max = 1;
      for (int j = 1; j + 1 < m; ++j)
        if (phis[j] > phis[interior_max]) interior_max = j;

      resid_max = grad_phi(g, k, spec, path[interior_max]).norm() / rootn;
      if (opt.record_trace)
        res.trace.push_back(make_trace_row(g, k, path[interior_max], total_sweeps,
                                           res.level, resid_max));

      const double handoff_tol = std::max(opt.tol, 1e-3 * (1.0 + std::abs(res.level)));
      if (resid_max <= handoff_tol) {
        max_at = interior_max;
        break;
      }
      if (std::abs(res.level - level_prev) <=
          1e-9 * std::max(1.0, std::abs(res.level))) {
        if (++plateau >= 25) {
          max_at = interior_max;
          break;
        }
      } else {
        plateau = 0;
      }
      level_prev = res.level;
      max_at = interior_max;
    }

    res.iterations = total_sweeps;

    // polish the saddle candidate; plain descent would slide off an index-1
    // point, so the hand-off minimizes the squared gradient norm instead,
    // with the pull-back guard on the phi level
    PolishOptions popt;
    popt.tol = 0.3 * opt.tol;
    popt.max_iter = opt.handoff_max_iter;
    popt.use_pullback = true;
    popt.phi_level = res.level;
    popt.pullback_fraction = opt.pullback_fraction;
    PolishResult pol = polish_critical_point(g, k, spec, path[max_at], popt);

    for (const auto& row : pol.trace) res.trace.push_back(row);

    // a converged polish that sank well under the level slid into a basin
    const bool sank =
        phi(g, k, spec, pol.u) <
        res.level - opt.pullback_fraction * std::max(std::abs(res.level), 1e-12);
    if (pol.converged && !pol.pulled_back && !sank) {
      res.critical = make_critical_point(g, k, spec, pol.u, true);
      res.converged = true;
      // the polished saddle is the refined max node; its value is the level
      res.level = std::max(res.level, res.critical.value);
      res.path = path;
      return res;
    }
    want_refine = true;  // re-insert the node and refine the path once
  }

  res.note = "nonconverged: returning best-so-far saddle candidate";
  int best = 1;
  for (int j = 1; j + 1 < m; ++j)
    if (phis[j] > phis[best]) best = j;
  res.critical = make_critical_point(g, k, spec, path[best], false);
  res.path = path;
  return res;
}

namespace {

double sup_norm(const State& u) { return u.cwiseAbs().maxCoeff(); }

}  // namespace

ConstantSignResult solve_constant_sign(const Grid& g, const KernelWeights& k,
                                       const ReactionSpec& spec_full,
                                       const EigenPair& ep,
                                       const ConstantSignOptions& opt) {
  if (spec_full.mode != TruncationMode::full)
    throw std::invalid_argument("solve_constant_sign: spec must be untruncated");

  ConstantSignResult res;
  const ReactionSpec spec_p = spec_full.truncated(TruncationMode::plus);
  const ReactionSpec spec_m = spec_full.truncated(TruncationMode::minus);
  const State zero = State::Zero(g.n);

  const LowPointResult low_p = find_low_point(g, k, spec_p, ep.e1);
  const LowPointResult low_m = find_low_point(g, k, spec_m, ep.e1);
  if (!low_p.found || !low_m.found) {
    res.flags.push_back("superlinearity not visible at this scale");
    return res;
  }

  MountainPassOptions mp_opt = opt.mp;
  mp_opt.tol = opt.tol;
  res.mp_plus = mountain_pass(g, k, spec_p, zero, low_p.u, mp_opt);
  res.mp_minus = mountain_pass(g, k, spec_m, zero, low_m.u, mp_opt);

  auto finalize = [&](const MountainPassResult& mp, bool plus) -> CriticalPoint {
    const State& u = mp.critical.state;
    CriticalPoint cp = make_critical_point(g, k, spec_full, u, mp.converged);
    const std::string tag = plus ? "plus" : "minus";
    const double umax = sup_norm(u);
    const double wrong_part =
        plus ? std::max(0.0, -u.minCoeff()) : std::max(0.0, u.maxCoeff());
    if (wrong_part > 1e-6 * umax)
      res.flags.push_back("sign cleanup defect (" + tag + ")");
    if (plus && !(cp.sign_class == SignClass::positive && cp.hopf_ratio > 0.0))
      res.flags.push_back("boundary quotient not positive (plus)");
    if (!plus && !(cp.sign_class == SignClass::negative && cp.hopf_ratio < 0.0))
      res.flags.push_back("boundary quotient not negative (minus)");
    if (!(cp.value > 0.0))
      res.flags.push_back("level not positive (" + tag + ")");
    if (!(cp.residual <= 2.0 * opt.tol))
      res.flags.push_back("full-energy residual above 2 tol (" + tag + ")");
    return cp;
  };

  res.u_plus = finalize(res.mp_plus, true);
  res.u_minus = finalize(res.mp_minus, false);
  res.converged = res.mp_plus.converged && res.mp_minus.converged;

  // sampled ring estimate: states on the seminorm sphere of radius
  // delta (h lambda1)^(1/p) stay above zero energy under the plus truncation
  {
    const double eps = ep.lambda1 / (2.0 * g.p);
    const double delta = small_f_delta(spec_full, eps);
    if (delta > 0.0) {
      const double radius = delta * std::pow(g.h * ep.lambda1, 1.0 / g.p);
      std::mt19937_64 rng(0x00c0ffee);
      double eta = std::numeric_limits<double>::infinity();
      for (int trial = 0; trial < 1000; ++trial) {
        State v = smoothed_noise(g.n, rng, 4);
        const double e = seminorm_p(g, k, v);
        if (e == 0.0) continue;
        v *= radius / std::pow(e, 1.0 / g.p);
        eta = std::min(eta, phi(g, k, spec_p, v));
      }
      res.eta_ring_estimate = eta;
    }
  }
  return res;
}

State deflated_gradient(const Grid& g, const KernelWeights& k,
                        const ReactionSpec& spec, const State& u,
                        const std::vector<State>& known_roots) {
  const DeflationEval defl = eval_deflation(g, u, known_roots, g.p);
  return defl.M * grad_phi(g, k, spec, u);
}

namespace {

State sign_changing_seed(const Grid& g, std::mt19937_64& rng) {
  State v = smoothed_noise(g.n, rng, 6);
  if (v.minCoeff() >= 0.0 || v.maxCoeff() <= 0.0) {
    const double mean = v.mean();
    for (int i = 0; i < g.n; ++i) v[i] -= mean;
  }
  if (v.minCoeff() >= 0.0 || v.maxCoeff() <= 0.0) {
    for (int i = 0; i < g.n / 2; ++i) v[i] = -v[i];
  }
  return v;
}

// two-bump seed: the one-sign profile compressed into each half with
// opposite signs, a natural first guess for a sign-changing state
State two_bump_seed(const Grid& g, const State& plus_profile) {
  const int n = g.n;
  State v(n);
  for (int i = 0; i < n; ++i) {
    if (i < n / 2) {
      v[i] = plus_profile[std::min(2 * i, n - 1)];
    } else {
      v[i] = -plus_profile[std::min(2 * (i - n / 2), n - 1)];
    }
  }
  return v;
}

}  // namespace

ThirdResult third_solution(const Grid& g, const KernelWeights& k,
                           const ReactionSpec& spec_full,
                           const CriticalPoint& u_plus,
                           const CriticalPoint& u_minus,
                           const ThirdOptions& opt) {
  if (spec_full.mode != TruncationMode::full)
    throw std::invalid_argument("third_solution: spec must be untruncated");

  ThirdResult res;
  const State zero = State::Zero(g.n);
  const std::vector<State> known = {zero, u_plus.state, u_minus.state};
  const double scale = l2_norm(g, u_plus.state);

  // distance relative to the solution scale, so that near-zero states match
  // the zero root instead of being "infinitely far" from it
  auto distinct = [&](const State& u) {
    for (const auto& w : known) {
      const double ref = std::max({scale, l2_norm(g, u), l2_norm(g, w)});
      if (l2_norm(g, State(u - w)) <= opt.distinct_tol * ref) return false;
    }
    return true;
  };

  // strategy A: full-energy pass between the constant-sign pair
  if (opt.strategy == ThirdStrategy::both || opt.strategy == ThirdStrategy::path) {
    MountainPassOptions mp_opt = opt.mp;
    mp_opt.tol = opt.tol;
    MountainPassResult mp =
        mountain_pass(g, k, spec_full, u_plus.state, u_minus.state, mp_opt);
    if (mp.converged && mp.critical.residual <= opt.tol &&
        distinct(mp.critical.state)) {
      res.point = mp.critical;
      res.found = true;
      res.strategy_used = "path";
      res.path_level = mp.level;
      return res;
    }
    res.note = "path strategy landed on a known point; ";
  }

  // strategy B: seeded multistart on the squared deflated gradient
  if ((opt.strategy == ThirdStrategy::both ||
       opt.strategy == ThirdStrategy::multistart) &&
      opt.multistart.count > 0) {
    const double target = seminorm_p(g, k, u_plus.state);
    // the two-bump seeds keep their raw amplitude: dilating the one-sign
    // profile already puts them on the right energy scale, and shrinking
    // them drops them into the zero basin
    std::vector<State> seeds;
    seeds.push_back(two_bump_seed(g, u_plus.state));
    seeds.push_back(two_bump_seed(g, State(-u_minus.state)));
    std::mt19937_64 rng(opt.multistart.seed);
    // random starts ride an amplitude ladder above the one-sign scale; states
    // at exactly that scale tend to fall into the zero basin
    for (int i = 0; i < opt.multistart.count; ++i) {
      State v = sign_changing_seed(g, rng);
      const double e = seminorm_p(g, k, v);
      if (e == 0.0) continue;
      const double amp = 1.0 + 0.5 * (i % 4);
      v *= amp * std::pow(target / e, 1.0 / g.p);
      seeds.push_back(std::move(v));
    }

    PolishOptions popt;
    popt.tol = 0.3 * opt.tol;
    popt.max_iter = opt.multistart.max_iter;
    popt.deflate = known;
    popt.abort_root_radius = opt.distinct_tol * std::max(scale, 1e-12);

    for (const auto& seed : seeds) {
      PolishResult pol = polish_critical_point(g, k, spec_full, seed, popt);
      if (!pol.converged) continue;
      if (!distinct(pol.u)) continue;
      res.point = make_critical_point(g, k, spec_full, pol.u, true);
      res.found = true;
      res.strategy_used = "multistart";
      return res;
    }
    res.note += "no third solution found at this resolution";
  }
  return res;
}

std::vector<CriticalPoint> multistart_inventory(const Grid& g,
                                                const KernelWeights& k,
                                                const ReactionSpec& spec,
                                                int count, std::uint64_t seed,
                                                double tol, double scale) {
  std::vector<CriticalPoint> found;
  std::mt19937_64 rng(seed);

  auto matches = [&](const State& u, const State& v) {
    const double ref =
        std::max({scale, l2_norm(g, u), l2_norm(g, v)});
    return l2_norm(g, State(u - v)) <= 1e-2 * ref;
  };

  PolishOptions popt;
  popt.tol = tol;
  // a useful start converges in well under a hundred steps; wanderers are cut
  popt.max_iter = 300;

  // the zero state is always a critical point (f(0) = 0)
  found.push_back(make_critical_point(g, k, spec, State::Zero(g.n), true));

  for (int trial = 0; trial < count; ++trial) {
    State u0(g.n);
    const double amp = scale * std::pow(10.0, -1.0 + 1.7 * uniform01(rng));
    for (int i = 0; i < g.n; ++i) u0[i] = amp * normal01(rng);
    PolishResult pol = polish_critical_point(g, k, spec, u0, popt);
    if (!pol.converged) continue;
    if (l2_norm(g, pol.u) > 100.0 * scale) continue;
    bool fresh = true;
    for (const auto& cp : found) {
      if (matches(pol.u, cp.state)) {
        fresh = false;
        break;
      }
    }
    if (fresh) found.push_back(make_critical_point(g, k, spec, pol.u, true));
  }
  return found;
}

}  // namespace fracp
