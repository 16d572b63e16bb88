#include "fracp/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fracp {

namespace {

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

double phi_exp(double t, double e) {
  // |t|^(e-1) sgn(t)
  if (t == 0.0) return 0.0;
  return std::pow(std::abs(t), e - 1.0) * sgn(t);
}

}  // namespace

std::string to_string(ReactionKind k) {
  switch (k) {
    case ReactionKind::power: return "power";
    case ReactionKind::logpower: return "logpower";
    case ReactionKind::custom_table: return "custom-table";
  }
  return "?";
}

std::string to_string(TruncationMode m) {
  switch (m) {
    case TruncationMode::full: return "full";
    case TruncationMode::plus: return "plus";
    case TruncationMode::minus: return "minus";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

double ReactionSpec::f_full(double t) const {
  switch (kind) {
    case ReactionKind::power:
      return phi_exp(t, q);
    case ReactionKind::logpower: {
      if (t == 0.0) return 0.0;
      const double at = std::abs(t);
      if (at < 1.0) return phi_exp(t, q) * (std::log(at) + 1.0 / q);
      return phi_exp(t, p) * (p * std::log(at) + 1.0) / q;
    }
    case ReactionKind::custom_table: {
      const auto& tt = t_;
      const auto& ff = f_;
      const int m = static_cast<int>(tt.size());
      if (t <= tt.front()) {
        const double slope = (ff[1] - ff[0]) / (tt[1] - tt[0]);
        return ff[0] + slope * (t - tt[0]);
      }
      if (t >= tt.back()) {
        const double slope =
            (ff[m - 1] - ff[m - 2]) / (tt[m - 1] - tt[m - 2]);
        return ff[m - 1] + slope * (t - tt[m - 1]);
      }
      const int k = static_cast<int>(
          std::upper_bound(tt.begin(), tt.end(), t) - tt.begin() - 1);
      const double slope = (ff[k + 1] - ff[k]) / (tt[k + 1] - tt[k]);
      // anchor at the nearer node to avoid cancellation on wide segments
      const int anchor = (t - tt[k] <= tt[k + 1] - t) ? k : k + 1;
      return ff[anchor] + slope * (t - tt[anchor]);
    }
  }
  return 0.0;
}

double ReactionSpec::F_full(double t) const {
  switch (kind) {
    case ReactionKind::power:
      return std::pow(std::abs(t), q) / q;
    case ReactionKind::logpower: {
      if (t == 0.0) return 0.0;
      const double at = std::abs(t);
      if (at < 1.0) return std::pow(at, q) * std::log(at) / q;
      return std::pow(at, p) * std::log(at) / q;
    }
    case ReactionKind::custom_table: {
      const auto& tt = t_;
      const auto& ff = f_;
      const auto& FF = F_;
      const int m = static_cast<int>(tt.size());
      if (t <= tt.front()) {
        const double slope = (ff[1] - ff[0]) / (tt[1] - tt[0]);
        const double d = t - tt[0];
        return FF[0] + ff[0] * d + 0.5 * slope * d * d;
      }
      if (t >= tt.back()) {
        const double slope =
            (ff[m - 1] - ff[m - 2]) / (tt[m - 1] - tt[m - 2]);
        const double d = t - tt[m - 1];
        return FF[m - 1] + ff[m - 1] * d + 0.5 * slope * d * d;
      }
      const int k = static_cast<int>(
          std::upper_bound(tt.begin(), tt.end(), t) - tt.begin() - 1);
      const double slope = (ff[k + 1] - ff[k]) / (tt[k + 1] - tt[k]);
      // anchor at the nearer node to avoid cancellation on wide segments
      const int anchor = (t - tt[k] <= tt[k + 1] - t) ? k : k + 1;
      const double d = t - tt[anchor];
      return FF[anchor] + ff[anchor] * d + 0.5 * slope * d * d;
    }
  }
  return 0.0;
}

double ReactionSpec::f(double t) const {
  switch (mode) {
    case TruncationMode::full: return f_full(t);
    case TruncationMode::plus: return t > 0.0 ? f_full(t) : 0.0;
    case TruncationMode::minus: return t < 0.0 ? f_full(t) : 0.0;
  }
  return 0.0;
}

double ReactionSpec::F(double t) const {
  switch (mode) {
    case TruncationMode::full: return F_full(t);
    case TruncationMode::plus: return t > 0.0 ? F_full(t) : 0.0;
    case TruncationMode::minus: return t < 0.0 ? F_full(t) : 0.0;
  }
  return 0.0;
}

double ReactionSpec::fprime(double t) const {
  if (mode == TruncationMode::plus && t < 0.0) return 0.0;
  if (mode == TruncationMode::minus && t > 0.0) return 0.0;
  if (kind == ReactionKind::power) {
    if (t == 0.0) return q > 2.0 ? 0.0 : (q == 2.0 ? 1.0 : 0.0);
    return (q - 1.0) * std::pow(std::abs(t), q - 2.0);
  }
  const double delta = 1e-6 * std::max(1.0, std::abs(t));
  return (f(t + delta) - f(t - delta)) / (2.0 * delta);
}

ReactionSpec ReactionSpec::truncated(TruncationMode m) const {
  if (mode != TruncationMode::full)
    throw std::invalid_argument("reaction: double truncation rejected");
  if (m == TruncationMode::full)
    throw std::invalid_argument("reaction: truncation mode must be plus or minus");
  ReactionSpec out = *this;
  out.mode = m;
  return out;
}

ReactionSpec ReactionSpec::reflected() const {
  ReactionSpec out = *this;
  if (kind == ReactionKind::custom_table) {
    const int m = static_cast<int>(t_.size());
    out.t_.resize(m);
    out.f_.resize(m);
    for (int i = 0; i < m; ++i) {
      out.t_[i] = -t_[m - 1 - i];
      out.f_[i] = -f_[m - 1 - i];
    }
    out.rebuild_table_primitive();
  }
  return out;  // power and logpower are odd: -f(-t) = f(t)
}

void ReactionSpec::rebuild_table_primitive() {
  const int m = static_cast<int>(t_.size());
  F_.assign(m, 0.0);
  int zero_idx = -1;
  for (int i = 0; i < m; ++i)
    if (t_[i] == 0.0) zero_idx = i;
  // cumulative trapezoid anchored at the zero node
  for (int i = zero_idx + 1; i < m; ++i)
    F_[i] = F_[i - 1] + 0.5 * (f_[i] + f_[i - 1]) * (t_[i] - t_[i - 1]);
  for (int i = zero_idx - 1; i >= 0; --i)
    F_[i] = F_[i + 1] - 0.5 * (f_[i] + f_[i + 1]) * (t_[i + 1] - t_[i]);
}

ReactionSpec make_power_reaction(double q, double p, double c0) {
  if (!(q > p)) throw std::invalid_argument("power reaction: require q > p");
  ReactionSpec spec;
  spec.kind = ReactionKind::power;
  spec.q = q;
  spec.r = q;
  spec.c0 = c0;
  spec.p = p;
  return spec;
}

ReactionSpec make_logpower_reaction(double q, double p, double r, double c0) {
  if (!(q > p)) throw std::invalid_argument("logpower reaction: require q > p");
  if (!(r > p)) throw std::invalid_argument("logpower reaction: require r > p");
  ReactionSpec spec;
  spec.kind = ReactionKind::logpower;
  spec.q = q;
  spec.r = r;
  spec.c0 = c0;
  spec.p = p;
  return spec;
}

ReactionSpec make_table_reaction(std::vector<double> t, std::vector<double> f,
                                 double p, double r, double c0) {
  if (t.size() != f.size() || t.size() < 2)
    throw std::invalid_argument("table reaction: need >= 2 matching nodes");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw std::invalid_argument("table reaction: t must be strictly increasing");
  bool has_zero = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == 0.0) {
      if (f[i] != 0.0)
        throw std::invalid_argument("table reaction: f(0) must be 0");
      has_zero = true;
    }
  }
  if (!has_zero)
    throw std::invalid_argument("table reaction: must contain t = 0");
  ReactionSpec spec;
  spec.kind = ReactionKind::custom_table;
  spec.q = r;
  spec.r = r;
  spec.c0 = c0;
  spec.p = p;
  spec.t_ = std::move(t);
  spec.f_ = std::move(f);
  spec.rebuild_table_primitive();
  return spec;
}

ReactionSpec load_table_reaction(const std::string& path, double p, double r,
                                 double c0) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("reaction table: cannot open " + path);
  std::vector<double> t, f;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.find_first_not_of("tf, \r") == std::string::npos)
      continue;  // optional "t,f" header
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected two columns t,f");
    try {
      t.push_back(std::stod(a));
      f.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": not a number");
    }
  }
  return make_table_reaction(std::move(t), std::move(f), p, r, c0);
}

void validate_reaction(const ReactionSpec& spec, const Grid& g) {
  const double pstar = g.sobolev_exponent();
  if (spec.p != g.p)
    throw std::invalid_argument("reaction: p does not match the grid");
  if (spec.kind != ReactionKind::custom_table) {
    if (!(spec.q > g.p && spec.q < pstar))
      throw std::invalid_argument("reaction: require p < q < p*_s");
  }
  if (!(spec.r > g.p && spec.r < pstar))
    throw std::invalid_argument("reaction: require p < r < p*_s");
  if (!(spec.c0 > 0.0))
    throw std::invalid_argument("reaction: require c0 > 0");
}

// ---------------------------------------------------------------------------

bool HypothesisReport::all_pass() const {
  return h1.verdict == Verdict::pass && h2.verdict == Verdict::pass &&
         h3.verdict == Verdict::pass && h4.verdict == Verdict::pass;
}

namespace {

// least-squares slope of log(y) against log(t)
double loglog_slope(const std::vector<double>& t, const std::vector<double>& y) {
  const int n = static_cast<int>(t.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(t[i]);
    const double ly = std::log(std::max(y[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  return denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

}  // namespace

HypothesisReport verify_hypotheses(const ReactionSpec& spec, const Grid& g,
                                   const SampleConfig& cfg) {
  if (spec.mode != TruncationMode::full)
    throw std::invalid_argument("verify_hypotheses: spec must be untruncated");

  HypothesisReport rep;
  rep.t_min = cfg.t_min;
  rep.t_max = cfg.t_max;

  std::vector<double> ts;
  {
    const double decades = std::log10(cfg.t_max / cfg.t_min);
    const int count = static_cast<int>(decades * cfg.per_decade);
    for (int k = 0; k <= count; ++k)
      ts.push_back(cfg.t_min * std::pow(10.0, k / double(cfg.per_decade)));
    if (ts.back() < cfg.t_max) ts.push_back(cfg.t_max);
  }
  const int m = static_cast<int>(ts.size());
  const double p = spec.p;

  // H(i): growth bound |f| <= c0 (1 + |t|^(r-1)). The measured tail slope of
  // |f| must not exceed the declared exponent.
  {
    double c0_hat = 0.0;
    std::vector<double> tail_t, tail_f;
    for (int i = 0; i < m; ++i) {
      const double t = ts[i];
      const double af = std::max(std::abs(spec.f(t)), std::abs(spec.f(-t)));
      c0_hat = std::max(c0_hat, af / (1.0 + std::pow(t, spec.r - 1.0)));
      if (t >= cfg.t_max / 10.0) {
        tail_t.push_back(t);
        tail_f.push_back(af);
      }
    }
    rep.c0_hat = c0_hat;
    const double slope = loglog_slope(tail_t, tail_f);
    rep.r_hat = slope + 1.0;
    if (rep.r_hat <= spec.r + 0.1) {
      rep.h1.verdict = Verdict::pass;
    } else if (rep.r_hat > spec.r + 0.25) {
      rep.h1.verdict = Verdict::fail;
      rep.h1.witnesses.push_back({ts.back(), tail_f.back()});
      rep.h1.note = "measured tail growth exceeds the declared exponent";
    } else {
      rep.h1.verdict = Verdict::inconclusive;
      rep.h1.note = "tail growth within 0.25 of the declared exponent";
    }
  }

  // H(ii): F(t)/|t|^p increasing beyond some T and large at t_max.
  {
    std::vector<double> ratio(m);
    for (int i = 0; i < m; ++i) {
      const double t = ts[i];
      ratio[i] = std::min(spec.F(t), spec.F(-t)) / std::pow(t, p);
    }
    int k0 = m - 1;
    for (int i = m - 1; i > 0; --i) {
      if (ratio[i] > ratio[i - 1] + 1e-12 * std::max(1.0, std::abs(ratio[i - 1])))
        k0 = i - 1;
      else
        break;
    }
    const bool long_tail = ts[k0] <= cfg.t_max / 100.0;
    const bool big_final = ratio[m - 1] >= cfg.h2_ratio_min;
    rep.big_t = ts[k0];
    if (long_tail && big_final) {
      rep.h2.verdict = Verdict::pass;
    } else if (!long_tail || ratio[m - 1] < 0.5 * cfg.h2_ratio_min) {
      rep.h2.verdict = Verdict::fail;
      rep.h2.witnesses.push_back({ts[m - 1], ratio[m - 1]});
      if (!long_tail) {
        rep.h2.witnesses.push_back({ts[k0], ratio[k0]});
        rep.h2.note = "F/|t|^p is not increasing over the sampled tail";
      } else {
        rep.h2.note = "F/|t|^p stays below the superlinearity threshold";
      }
    } else {
      rep.h2.verdict = Verdict::inconclusive;
      rep.h2.note = "F/|t|^p grows but has not cleared the threshold yet";
    }
  }

  // H(iii): beta |t|^sigma lower bound for f t - p F on the tail, with sigma
  // inside the admissible window. The window uses the measured growth of f
  // when the declared r is too generous for it.
  {
    std::vector<double> tail_t, tail_g;
    bool nonpositive = false;
    double bad_t = 0.0, bad_g = 0.0;
    for (int i = 0; i < m; ++i) {
      const double t = ts[i];
      if (t < cfg.t_max / 100.0) continue;
      const double gp = spec.f(t) * t - p * spec.F(t);
      const double gm = spec.f(-t) * (-t) - p * spec.F(-t);
      const double gmin = std::min(gp, gm);
      if (gmin <= 0.0 && !nonpositive) {
        nonpositive = true;
        bad_t = t;
        bad_g = gmin;
      }
      tail_t.push_back(t);
      tail_g.push_back(gmin);
    }
    rep.big_t = std::max(rep.big_t, tail_t.front());
    if (nonpositive) {
      rep.h3.verdict = Verdict::fail;
      rep.beta_hat = 0.0;
      rep.sigma_hat = 0.0;
      rep.h3.witnesses.push_back({bad_t, bad_g});
      rep.h3.note = "f t - p F is not positive on the tail";
    } else {
      std::vector<double> top_t, top_g;
      for (std::size_t i = 0; i < tail_t.size(); ++i)
        if (tail_t[i] >= cfg.t_max / 10.0) {
          top_t.push_back(tail_t[i]);
          top_g.push_back(tail_g[i]);
        }
      rep.sigma_hat = loglog_slope(top_t, top_g);
      double beta = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < tail_t.size(); ++i)
        beta = std::min(beta, tail_g[i] / std::pow(tail_t[i], rep.sigma_hat));
      rep.beta_hat = beta;
      const double r_eff = std::min(spec.r, std::max(p, rep.r_hat));
      const double lower = (r_eff - p) / g.ps();
      const double upper = g.sobolev_exponent();
      if (beta > 0.0 && rep.sigma_hat > lower && rep.sigma_hat < upper) {
        rep.h3.verdict = Verdict::pass;
      } else if (beta > 0.0) {
        rep.h3.verdict = Verdict::inconclusive;
        rep.h3.note = "positive tail but measured exponent outside the window";
      } else {
        rep.h3.verdict = Verdict::fail;
        rep.h3.witnesses.push_back({tail_t.front(), tail_g.front()});
      }
    }
  }

  // H(iv): |f(t)|/|t|^(p-1) -> 0 as t -> 0.
  {
    double low_max = 0.0;   // over the smallest sampled decade
    double mid_max = 0.0;   // two orders of magnitude up
    double low_t = 0.0;
    for (int i = 0; i < m; ++i) {
      const double t = ts[i];
      const double ratio = std::max(std::abs(spec.f(t)), std::abs(spec.f(-t))) /
                           std::pow(t, p - 1.0);
      if (t <= cfg.t_min * 10.0) {
        if (ratio > low_max) {
          low_max = ratio;
          low_t = t;
        }
      }
      if (t >= cfg.t_min * 100.0 && t <= cfg.t_min * 1000.0)
        mid_max = std::max(mid_max, ratio);
    }
    const bool small_enough = low_max <= cfg.h4_tol;
    const bool decreasing = low_max <= mid_max + 1e-12;
    if (small_enough && decreasing) {
      rep.h4.verdict = Verdict::pass;
    } else if (low_max > 10.0 * cfg.h4_tol || !decreasing) {
      rep.h4.verdict = Verdict::fail;
      rep.h4.witnesses.push_back({low_t, low_max});
      rep.h4.note = "f does not vanish under |t|^(p-1) near the origin";
    } else {
      rep.h4.verdict = Verdict::inconclusive;
      rep.h4.note = "ratio near the origin is small but above tolerance";
    }
  }

  // Informational: classical Ambrosetti-Rabinowitz ratio f t / F on the tail.
  {
    auto mu_min = [&](double lo, double hi) {
      double mu = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double t = ts[i];
        if (t < lo || t > hi) continue;
        const double Fp = spec.F(t), Fm = spec.F(-t);
        if (Fp > 0.0) mu = std::min(mu, spec.f(t) * t / Fp);
        if (Fm > 0.0) mu = std::min(mu, spec.f(-t) * (-t) / Fm);
      }
      return mu;
    };
    const double far = mu_min(cfg.t_max / 10.0, cfg.t_max) - p;
    const double mid = mu_min(cfg.t_max / 1000.0, cfg.t_max / 100.0) - p;
    rep.ar_condition_holds =
        std::isfinite(far) && far > 0.01 * std::max(1.0, p) &&
        (!std::isfinite(mid) || far >= 0.9 * mid);
  }

  return rep;
}

double small_f_delta(const ReactionSpec& spec, double eps) {
  const int per_decade = 64;
  const double lo = 1e-8, hi = 1e3;
  const int count = static_cast<int>(std::log10(hi / lo) * per_decade);
  double best = 0.0;
  double running_max = 0.0;
  for (int k = 0; k <= count; ++k) {
    const double t = lo * std::pow(10.0, k / double(per_decade));
    const double ratio =
        std::max(std::abs(spec.F(t)), std::abs(spec.F(-t))) / std::pow(t, spec.p);
    running_max = std::max(running_max, ratio);
    if (running_max <= eps) best = t;
  }
  return best;
}

}  // namespace fracp
