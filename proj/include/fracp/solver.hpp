#ifndef FRACP_SOLVER_HPP
#define FRACP_SOLVER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fracp/audit.hpp"
#include "fracp/critical_point.hpp"
#include "fracp/eigenpair.hpp"

namespace fracp {

struct TraceRow {
  int iter = 0;
  double phi = 0.0;
  double residual = 0.0;
  double cerami = 0.0;
};

enum class DescentStatus { converged, max_iter, unbounded };
std::string to_string(DescentStatus s);

struct DescentResult {
  CriticalPoint point;
  DescentStatus status = DescentStatus::max_iter;
  std::vector<TraceRow> trace;
};

struct DescentOptions {
  double tol = 1e-8;
  int max_iter = 20000;
  double phi_floor = -1e8;  // divergence guard: below this, report unbounded
  bool record_trace = true;
};

/// Barzilai-Borwein gradient descent with Armijo backtracking on the chosen
/// energy. Phi is non-increasing along accepted steps. Stops at
/// residual <= tol; reports unbounded descent when phi falls under the floor.
DescentResult descend(const Grid& g, const KernelWeights& k,
                      const ReactionSpec& spec, const State& u0,
                      const DescentOptions& opt);

struct LowPointResult {
  State u;                 // tau* e1 (or -tau* e1 for the minus truncation)
  double tau = 0.0;
  double value = 0.0;      // phi at u, < -1 on success
  bool found = false;
  std::vector<std::pair<double, double>> sweep;  // (tau, phi) doubling trace
};

/// Doubles tau from 1 until phi(tau e1) < -1, guarded at tau <= 2^40.
/// The minus truncation searches along -e1 (its energy is coercive on the
/// positive ray). Failure signals that superlinearity is not visible at this
/// scale.
LowPointResult find_low_point(const Grid& g, const KernelWeights& k,
                              const ReactionSpec& spec, const State& e1);

struct MountainPassOptions {
  int path_nodes = 21;      // m, odd and >= 5
  double tol = 1e-8;
  int max_sweeps = 2000;
  int handoff_max_iter = 50000;
  double pullback_fraction = 0.10;  // refine when phi drops this far below level
  bool record_trace = true;
};

struct MountainPassResult {
  State endpoint_low;
  double level = 0.0;              // final max-node value along the path
  std::vector<State> path;
  CriticalPoint critical;
  int iterations = 0;              // string sweeps performed
  bool converged = false;
  bool refined = false;            // the path was reinserted and doubled once
  std::string note;
  std::vector<TraceRow> trace;     // max-node history, then refinement iterations
};

/// Elastic-string saddle search between two low endpoints: interior nodes take
/// one safeguarded descent step per sweep, the path is reparameterized to
/// equal spacing in the discrete L2 metric, and the max-phi node is tracked.
/// Once the string stalls, the max node is polished by first-order
/// minimization of |grad phi|^2 (plain descent cannot settle on an index-1
/// point), with a pull-back safeguard: if phi drops more than
/// pullback_fraction below the current level before the residual is small,
/// the node is re-inserted and the path refined (m -> 2m-1, once).
MountainPassResult mountain_pass(const Grid& g, const KernelWeights& k,
                                 const ReactionSpec& spec, const State& end0,
                                 const State& end1,
                                 const MountainPassOptions& opt);

struct ConstantSignOptions {
  double tol = 1e-8;
  MountainPassOptions mp;
};

struct ConstantSignResult {
  CriticalPoint u_plus;
  CriticalPoint u_minus;
  MountainPassResult mp_plus;
  MountainPassResult mp_minus;
  double eta_ring_estimate = 0.0;  // sampled min of the truncated energy on the ring
  bool converged = false;
  std::vector<std::string> flags;  // sign-cleanup or residual defects
};

/// Runs the plus and minus truncated mountain passes from 0 to their low
/// points, checks the one-sign cleanup (the opposite part must vanish to
/// tolerance), the boundary quotient, positivity of the level, and the
/// residual under the full energy (<= 2 tol).
ConstantSignResult solve_constant_sign(const Grid& g, const KernelWeights& k,
                                       const ReactionSpec& spec_full,
                                       const EigenPair& ep,
                                       const ConstantSignOptions& opt);

struct MultistartConfig {
  int count = 64;
  std::uint64_t seed = 0x243f6a8885a308d3ull;
  int max_iter = 20000;
};

enum class ThirdStrategy { both, path, multistart };

struct ThirdOptions {
  double tol = 1e-8;
  MultistartConfig multistart;
  ThirdStrategy strategy = ThirdStrategy::both;
  MountainPassOptions mp;
  double distinct_tol = 1e-2;   // relative L2 distance from {0, u+, u-}
};

struct ThirdResult {
  CriticalPoint point;
  bool found = false;
  std::string strategy_used;  // "path" or "multistart"
  double path_level = 0.0;    // level estimate when strategy A produced it
  std::string note;
};

/// Searches for a critical point distinct from {0, u+, u-}: first a full-energy
/// mountain pass between u+ and u- (strategy A); when that lands on a known
/// point, seeded multistart minimization of the squared deflated gradient
/// (strategy B). Never asserts nonexistence on exhaustion.
ThirdResult third_solution(const Grid& g, const KernelWeights& k,
                           const ReactionSpec& spec_full,
                           const CriticalPoint& u_plus,
                           const CriticalPoint& u_minus,
                           const ThirdOptions& opt);

/// Gradient of the full energy scaled by the deflation factors
/// prod_w (1 + ||u - w||^-(p-1)) over the known roots; bounded away from zero
/// near each w, so searches cannot re-converge there.
State deflated_gradient(const Grid& g, const KernelWeights& k,
                        const ReactionSpec& spec, const State& u,
                        const std::vector<State>& known_roots);

/// Seeded multistart inventory search: polishes every start by squared
/// gradient-norm minimization and dedupes by relative L2 distance. Used by the
/// coarse-grid signed-count audit.
std::vector<CriticalPoint> multistart_inventory(const Grid& g,
                                                const KernelWeights& k,
                                                const ReactionSpec& spec,
                                                int count, std::uint64_t seed,
                                                double tol, double scale);

}  // namespace fracp

#endif
