#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "fracp/reaction.hpp"

using namespace fracp;

namespace {

ReactionSpec linear_table(double slope, double p, double r) {
  return make_table_reaction({-1e7, 0.0, 1e7}, {-slope * 1e7, 0.0, slope * 1e7},
                             p, r);
}

}  // namespace

TEST_SUITE_BEGIN("reaction");

TEST_CASE("power evaluations") {
  const ReactionSpec f = make_power_reaction(4.0, 2.0);
  CHECK(f.f(2.0) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(f.f(0.0) == 0.0);
  CHECK(f.F(2.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(f.F(0.0) == 0.0);

  const ReactionSpec plus = f.truncated(TruncationMode::plus);
  CHECK(plus.f(-3.0) == 0.0);
  CHECK(plus.f(1.0) == doctest::Approx(1.0));
  const ReactionSpec minus = f.truncated(TruncationMode::minus);
  CHECK(minus.f(-3.0) == doctest::Approx(-27.0).epsilon(1e-15));
  CHECK(minus.F(2.5) == 0.0);
  CHECK(minus.F(0.0) == 0.0);
}

TEST_CASE("logpower evaluations") {
  const ReactionSpec f = make_logpower_reaction(4.0, 2.0, 4.5);
  const double e = std::exp(1.0);
  CHECK(f.F(e) == doctest::Approx(e * e / 4.0).epsilon(1e-14));
  CHECK(f.F(0.0) == 0.0);
  CHECK(f.f(0.0) == 0.0);
  // continuity across the |t| = 1 seam
  CHECK(f.f(1.0 - 1e-9) == doctest::Approx(f.f(1.0 + 1e-9)).epsilon(1e-6));
  CHECK(f.F(1.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("double truncation rejected") {
  const ReactionSpec f = make_power_reaction(4.0, 2.0);
  const ReactionSpec plus = f.truncated(TruncationMode::plus);
  CHECK_THROWS_AS(plus.truncated(TruncationMode::plus), std::invalid_argument);
  CHECK_THROWS_AS(f.truncated(TruncationMode::full), std::invalid_argument);
}

TEST_CASE("primitive consistency") {
  std::mt19937_64 rng(0x77aa);
  std::vector<ReactionSpec> specs = {make_power_reaction(4.0, 2.0),
                                     make_power_reaction(2.7, 1.5),
                                     make_logpower_reaction(4.0, 2.0, 4.5),
                                     linear_table(1.0, 2.0, 3.0)};
  for (const auto& spec : specs) {
    for (int trial = 0; trial < 100; ++trial) {
      const double t = -10.0 + 20.0 * uniform01(rng);
      const double delta = 1e-5 * std::max(1.0, std::abs(t));
      const double fd = (spec.F(t + delta) - spec.F(t - delta)) / (2.0 * delta);
      const double scale = std::max(std::abs(spec.f(t)), 1e-8);
      CHECK(std::abs(fd - spec.f(t)) / scale <= 1e-4);
    }
  }
}

TEST_CASE("truncation identity and sign") {
  const ReactionSpec f = make_power_reaction(3.5, 2.0);
  const ReactionSpec plus = f.truncated(TruncationMode::plus);
  const ReactionSpec minus = f.truncated(TruncationMode::minus);
  std::mt19937_64 rng(0x5151);
  for (int trial = 0; trial < 200; ++trial) {
    const double t = -50.0 + 100.0 * uniform01(rng);
    CHECK(plus.f(t) + minus.f(t) == f.f(t));
    if (t >= 0.0) CHECK(plus.f(t) * t >= 0.0);
  }
}

TEST_CASE("power oddness is exact") {
  const ReactionSpec f = make_power_reaction(4.0, 2.0);
  std::mt19937_64 rng(0xabcd);
  for (int trial = 0; trial < 100; ++trial) {
    const double t = -100.0 + 200.0 * uniform01(rng);
    CHECK(f.f(-t) == -f.f(t));
    CHECK(f.F(-t) == f.F(t));
  }
}

TEST_CASE("table reaction loading") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "fracp_reaction_test";
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "ok.csv");
    out << "t,f\n-2,-8\n-1,-1\n0,0\n1,1\n2,8\n";
  }
  const ReactionSpec t = load_table_reaction((dir / "ok.csv").string(), 2.0, 3.0);
  CHECK(t.f(0.0) == 0.0);
  CHECK(t.f(1.0) == doctest::Approx(1.0));
  CHECK(t.f(1.5) == doctest::Approx(4.5));   // midpoint of the 1..2 segment
  CHECK(t.f(3.0) == doctest::Approx(15.0));  // extended boundary slope
  CHECK(t.F(1.0) == doctest::Approx(0.5));   // trapezoid of the 0..1 segment
  CHECK(t.F(-1.0) == doctest::Approx(0.5));

  {
    std::ofstream out(dir / "bad_order.csv");
    out << "0,0\n-1,-1\n1,1\n";
  }
  CHECK_THROWS(load_table_reaction((dir / "bad_order.csv").string(), 2.0, 3.0));
  {
    std::ofstream out(dir / "no_zero.csv");
    out << "-1,-1\n1,1\n";
  }
  CHECK_THROWS(load_table_reaction((dir / "no_zero.csv").string(), 2.0, 3.0));
  {
    std::ofstream out(dir / "bad_zero.csv");
    out << "-1,-1\n0,0.5\n1,1\n";
  }
  CHECK_THROWS(load_table_reaction((dir / "bad_zero.csv").string(), 2.0, 3.0));
}

TEST_CASE("reflected table") {
  const ReactionSpec t =
      make_table_reaction({-1.0, 0.0, 2.0}, {-3.0, 0.0, 1.0}, 2.0, 3.0);
  const ReactionSpec r = t.reflected();
  for (double x : {-2.5, -1.0, -0.2, 0.0, 0.4, 1.0, 3.0})
    CHECK(r.f(x) == doctest::Approx(-t.f(-x)).epsilon(1e-14));
}

TEST_CASE("hypotheses: power reaction passes") {
  const Grid g = build_grid(0.0, 1.0, 8, 0.4, 2.0);
  const ReactionSpec f = make_power_reaction(4.0, 2.0);
  const HypothesisReport rep = verify_hypotheses(f, g);
  CHECK(rep.h1.verdict == Verdict::pass);
  CHECK(rep.h2.verdict == Verdict::pass);
  CHECK(rep.h3.verdict == Verdict::pass);
  CHECK(rep.h4.verdict == Verdict::pass);
  CHECK(rep.all_pass());
  // f t - p F = (1 - p/q)|t|^q for the power kind
  CHECK(rep.sigma_hat == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(rep.beta_hat == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(rep.r_hat == doctest::Approx(4.0).epsilon(1e-3));
  CHECK(rep.ar_condition_holds);
}

TEST_CASE("hypotheses: linear reaction fails superlinearity") {
  const Grid g = build_grid(0.0, 1.0, 8, 0.4, 2.0);
  const ReactionSpec f = linear_table(1.0, 2.0, 3.0);
  const HypothesisReport rep = verify_hypotheses(f, g);
  CHECK(rep.h2.verdict == Verdict::fail);
  CHECK(!rep.h2.witnesses.empty());
  CHECK(!rep.all_pass());
}

TEST_CASE("hypotheses: logpower passes without the classical AR condition") {
  const Grid g = build_grid(0.0, 1.0, 8, 0.4, 2.0);
  const ReactionSpec f = make_logpower_reaction(4.0, 2.0, 4.5);
  const HypothesisReport rep = verify_hypotheses(f, g);
  CHECK(rep.all_pass());
  CHECK(rep.h3.verdict == Verdict::pass);
  CHECK(rep.sigma_hat == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(!rep.ar_condition_holds);
}

TEST_CASE("fail verdicts carry witnesses") {
  const Grid g = build_grid(0.0, 1.0, 8, 0.4, 2.0);
  const ReactionSpec f = linear_table(1.0, 2.0, 3.0);
  const HypothesisReport rep = verify_hypotheses(f, g);
  for (const auto* check : {&rep.h2, &rep.h3, &rep.h4}) {
    if (check->verdict == Verdict::fail) CHECK(!check->witnesses.empty());
  }
}

TEST_CASE("small-reaction threshold") {
  const ReactionSpec f = make_power_reaction(4.0, 2.0);
  const double eps = 0.3;
  const double delta = small_f_delta(f, eps);
  CHECK(delta > 0.0);
  // F(t)/t^p = t^2/4 for q = 4; the bound must hold at the returned delta
  CHECK(std::abs(f.F(delta)) / std::pow(delta, 2.0) <= eps * (1.0 + 1e-12));
}

TEST_CASE("reaction validation against the grid") {
  const Grid g = build_grid(0.0, 1.0, 8, 0.4, 2.0);  // p*_s = 10
  CHECK_THROWS_AS(validate_reaction(make_power_reaction(11.0, 2.0), g),
                  std::invalid_argument);
  CHECK_NOTHROW(validate_reaction(make_power_reaction(4.0, 2.0), g));
  ReactionSpec wrong_p = make_power_reaction(4.0, 3.0);
  CHECK_THROWS_AS(validate_reaction(wrong_p, g), std::invalid_argument);
}

TEST_SUITE_END();
