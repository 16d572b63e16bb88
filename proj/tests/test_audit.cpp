#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "fracp/audit.hpp"
#include "fracp/solver.hpp"
#include "oracles.hpp"

using namespace fracp;

namespace {

struct AuditLab {
  Grid g = build_grid(0.0, 1.0, 48, 0.4, 2.0);
  KernelWeights k = kernel_weights(g);
  ReactionSpec spec = make_power_reaction(4.0, 2.0);
  EigenPair ep;
  ConstantSignResult cs;

  AuditLab() {
    const EigenResult er = principal_eigenpair(g, k, 1e-9);
    REQUIRE(er.converged);
    ep = er.pair;
    ConstantSignOptions opt;
    opt.tol = 1e-9;
    opt.mp.tol = 1e-9;
    cs = solve_constant_sign(g, k, spec, ep, opt);
    REQUIRE(cs.converged);
  }
};

AuditLab& lab() {
  static AuditLab instance;
  return instance;
}

CriticalPoint synthetic_point(int index, bool degenerate = false) {
  CriticalPoint cp;
  cp.morse_index = index;
  cp.degenerate = degenerate;
  cp.converged = true;
  return cp;
}

}  // namespace

TEST_SUITE_BEGIN("audit");

TEST_CASE("sign classification") {
  auto& L = lab();
  const SignInfo zero = classify_sign(State::Zero(L.g.n), L.k.ds);
  CHECK(zero.sign_class == SignClass::zero);
  CHECK(zero.hopf_ratio == 0.0);

  const SignInfo pos = classify_sign(L.ep.e1, L.k.ds);
  CHECK(pos.sign_class == SignClass::positive);
  CHECK(pos.hopf_ratio > 0.0);

  State flipped = L.ep.e1;
  flipped[L.g.n / 3] = -flipped[L.g.n / 3];
  CHECK(classify_sign(flipped, L.k.ds).sign_class == SignClass::sign_changing);

  const SignInfo neg = classify_sign(State(-L.ep.e1), L.k.ds);
  CHECK(neg.sign_class == SignClass::negative);
  CHECK(neg.hopf_ratio < 0.0);
}

TEST_CASE("hessian structure at the origin") {
  auto& L = lab();
  const Eigen::MatrixXd H = hessian_p2(L.g, L.k, L.spec, State::Zero(L.g.n));
  CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
  // f'(0) = 0 for q = 4: the Hessian reduces to the seminorm form matrix
  const Eigen::MatrixXd B = seminorm_form_matrix_p2(L.g, L.k);
  CHECK((H - B).cwiseAbs().maxCoeff() == 0.0);

  // its smallest eigenvalue is lambda1 times the mass factor h
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const DenseSpectrum dense = dense_spectrum_p2(L.g, L.k, 1);
  CHECK(es.eigenvalues()[0] ==
        doctest::Approx(dense.values[0] * L.g.h).epsilon(1e-8));

  const Grid g15 = build_grid(0.0, 1.0, 16, 0.25, 1.5);
  const KernelWeights k15 = kernel_weights(g15);
  const ReactionSpec r15 = make_power_reaction(3.0, 1.5);
  CHECK_THROWS_AS(hessian_p2(g15, k15, r15, State::Zero(16)),
                  std::invalid_argument);
}

TEST_CASE("morse indices of the basic inventory") {
  auto& L = lab();
  const CriticalPoint zero =
      make_critical_point(L.g, L.k, L.spec, State::Zero(L.g.n), true);
  const MorseIndex mi0 = morse_index(L.g, L.k, L.spec, zero);
  CHECK(mi0.index == 0);
  CHECK(!mi0.degenerate);

  const MorseIndex mip = morse_index(L.g, L.k, L.spec, L.cs.u_plus);
  CHECK(mip.index == 1);
  CHECK(!mip.degenerate);
  const MorseIndex mim = morse_index(L.g, L.k, L.spec, L.cs.u_minus);
  CHECK(mim.index == mip.index);

  CriticalPoint sloppy = L.cs.u_plus;
  sloppy.residual = 1e-5;
  CHECK_THROWS_AS(morse_index(L.g, L.k, L.spec, sloppy), std::invalid_argument);
}

TEST_CASE("audit determinism under tiny perturbations") {
  auto& L = lab();
  std::mt19937_64 rng(0xa0a0);
  CriticalPoint wiggled = L.cs.u_plus;
  for (int i = 0; i < L.g.n; ++i)
    wiggled.state[i] += 1e-12 * (2.0 * uniform01(rng) - 1.0);
  const MorseIndex a = morse_index(L.g, L.k, L.spec, L.cs.u_plus);
  const MorseIndex b = morse_index(L.g, L.k, L.spec, wiggled);
  CHECK(a.index == b.index);
  CHECK(a.degenerate == b.degenerate);
}

TEST_CASE("signed count bookkeeping") {
  const AuditReport partial = poincare_hopf_audit(
      {synthetic_point(0), synthetic_point(1), synthetic_point(1)});
  CHECK(partial.signed_sum == -1);
  CHECK(partial.ph_verdict == PhVerdict::incomplete);
  REQUIRE(!partial.flags.empty());
  CHECK(partial.flags[0].find("inventory incomplete") != std::string::npos);

  const AuditReport full = poincare_hopf_audit(
      {synthetic_point(0), synthetic_point(1), synthetic_point(1),
       synthetic_point(2)});
  CHECK(full.signed_sum == 0);
  CHECK(full.ph_verdict == PhVerdict::pass);
  CHECK(full.flags.empty());

  const AuditReport empty = poincare_hopf_audit({});
  CHECK(empty.signed_sum == 0);
  CHECK(empty.ph_verdict == PhVerdict::inconclusive);

  const AuditReport degen = poincare_hopf_audit(
      {synthetic_point(0), synthetic_point(1, true)});
  CHECK(degen.ph_verdict == PhVerdict::inconclusive);
}

TEST_CASE("weak residual check") {
  auto& L = lab();
  const double at_plus =
      weak_residual_test(L.g, L.k, L.spec, L.cs.u_plus.state, 25);
  CHECK(at_plus <= 10.0 * 1e-9);

  // principal mode under the matching linear reaction
  const double lam = L.ep.lambda1;
  const ReactionSpec linear = make_table_reaction(
      {-1e4, 0.0, 1e4}, {-lam * 1e4, 0.0, lam * 1e4}, 2.0, 3.0);
  const double at_e1 = weak_residual_test(L.g, L.k, linear, L.ep.e1, 25);
  CHECK(at_e1 <= 10.0 * 1e-9);

  std::mt19937_64 rng(0xdead);
  const State noise = oracles::random_state(L.g.n, rng, 2.0);
  CHECK(weak_residual_test(L.g, L.k, L.spec, noise, 25) > 100.0 * at_plus);
}

TEST_SUITE_END();
