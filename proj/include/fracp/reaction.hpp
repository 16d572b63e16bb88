#ifndef FRACP_REACTION_HPP
#define FRACP_REACTION_HPP

#include <string>
#include <vector>

#include "fracp/grid.hpp"

namespace fracp {

enum class ReactionKind { power, logpower, custom_table };
enum class TruncationMode { full, plus, minus };

std::string to_string(ReactionKind k);
std::string to_string(TruncationMode m);

/// A reaction f(t) with primitive F(t) = integral of f from 0 to t, and the
/// one-sign truncations f_plus(t) = f(max(t,0)), f_minus(t) = f(min(t,0)).
/// Built-ins are autonomous; the x argument of the continuous problem is
/// dropped since it carries no information for them.
///
/// Kinds:
///   power:        f(t) = |t|^(q-2) t,  F(t) = |t|^q / q
///   logpower:     F(t) = |t|^q ln|t| / q on 0<|t|<1, |t|^p ln|t| / q on |t|>=1
///   custom_table: piecewise-linear f through user nodes (t_k, f_k), with the
///                 boundary segments extended linearly outside the table range;
///                 F by exact piecewise integration.
class ReactionSpec {
 public:
  ReactionKind kind = ReactionKind::power;
  double q = 4.0;   // power exponent
  double r = 4.0;   // declared growth exponent of f
  double c0 = 1.0;  // declared growth constant
  double p = 2.0;   // integrability exponent, inherited from the grid
  TruncationMode mode = TruncationMode::full;

  double f(double t) const;        // mode-aware reaction value
  double F(double t) const;        // mode-aware primitive
  double fprime(double t) const;   // analytic for power, central difference else

  /// One-sign truncation. Rejects double truncation (mode must be full).
  ReactionSpec truncated(TruncationMode m) const;

  /// The reaction t -> -f(-t). Identical to *this for odd built-ins.
  ReactionSpec reflected() const;

  const std::vector<double>& table_t() const { return t_; }
  const std::vector<double>& table_f() const { return f_; }

  friend ReactionSpec make_table_reaction(std::vector<double> t,
                                          std::vector<double> f, double p,
                                          double r, double c0);

 private:
  double f_full(double t) const;
  double F_full(double t) const;

  // custom_table data: nodes and cumulative primitive at the nodes
  std::vector<double> t_, f_, F_;
  void rebuild_table_primitive();
};

inline double eval_f(const ReactionSpec& spec, double t) { return spec.f(t); }
inline double eval_F(const ReactionSpec& spec, double t) { return spec.F(t); }
inline ReactionSpec truncate(const ReactionSpec& spec, TruncationMode m) {
  return spec.truncated(m);
}

ReactionSpec make_power_reaction(double q, double p, double c0 = 1.0);
ReactionSpec make_logpower_reaction(double q, double p, double r,
                                    double c0 = 1.0);
ReactionSpec make_table_reaction(std::vector<double> t, std::vector<double> f,
                                 double p, double r, double c0 = 1.0);

/// Loads a two-column CSV `t,f` with strictly increasing t; the table must
/// contain t = 0 with f = 0. Throws std::runtime_error on format violations.
ReactionSpec load_table_reaction(const std::string& path, double p, double r,
                                 double c0 = 1.0);

/// Rejects reactions whose declared exponents fall outside (p, p*_s).
void validate_reaction(const ReactionSpec& spec, const Grid& g);

// ---------------------------------------------------------------------------
// Sampled verification of the growth hypotheses.

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct SampleConfig {
  double t_min = 1e-6;
  double t_max = 1e6;
  int per_decade = 16;
  double h4_tol = 1e-3;        // |f|/|t|^(p-1) must fall below this near 0
  double h2_ratio_min = 1.0;   // F/|t|^p must exceed this at t_max
};

struct Witness {
  double t = 0.0;
  double value = 0.0;
};

struct HypothesisCheck {
  Verdict verdict = Verdict::inconclusive;
  std::vector<Witness> witnesses;  // at least one point on fail
  std::string note;
};

struct HypothesisReport {
  HypothesisCheck h1, h2, h3, h4;
  double c0_hat = 0.0;     // measured sup |f|/(1+|t|^(r-1))
  double r_hat = 0.0;      // measured tail growth exponent of f, plus one
  double sigma_hat = 0.0;  // measured tail exponent of f t - p F
  double beta_hat = 0.0;   // measured inf of (f t - p F)/|t|^sigma_hat on the tail
  double big_t = 0.0;      // tail threshold used for h2/h3
  double t_min = 0.0, t_max = 0.0;
  bool ar_condition_holds = false;  // informational: classical AR condition
  bool all_pass() const;
};

HypothesisReport verify_hypotheses(const ReactionSpec& spec, const Grid& g,
                                   const SampleConfig& cfg = SampleConfig{});

/// Largest sampled delta such that |F(t)| <= eps |t|^p for all |t| <= delta
/// (log grid over [1e-8, 1e3]); 0 when even the smallest sample violates.
double small_f_delta(const ReactionSpec& spec, double eps);

}  // namespace fracp

#endif
