#include <doctest.h>

#include <cmath>
#include <random>

#include "frankopt/baselines/adaptive.hpp"
#include "frankopt/baselines/factory.hpp"
#include "frankopt/baselines/fire.hpp"
#include "frankopt/baselines/line_search.hpp"
#include "frankopt/harness/run.hpp"
#include "frankopt/problems/functions.hpp"
#include "frankopt/problems/lennard_jones.hpp"
#include "oracles.hpp"

using namespace frankopt;

namespace {

constexpr std::size_t kDim = 6;
constexpr int kSteps = 100;

// Shared gradient stream: smooth drift plus noise, with occasional sign flips.
std::vector<std::vector<double>> gradient_stream(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<std::vector<double>> out(kSteps, std::vector<double>(kDim));
  for (int t = 0; t < kSteps; ++t) {
    for (std::size_t i = 0; i < kDim; ++i) {
      out[t][i] = std::sin(0.1 * t + static_cast<double>(i)) * std::pow(10.0, static_cast<double>(i) - 3.0) +
                  0.3 * noise(rng);
    }
  }
  return out;
}

std::vector<double> theta0() { return {0.5, -1.0, 2.0, 0.0, 3.0, -0.25}; }

template <class Ref>
std::uint64_t worst_ulp(GradientOptimizer& opt, Ref& ref, std::uint64_t seed) {
  opt.reset(theta0());
  std::uint64_t worst = 0;
  for (const auto& g : gradient_stream(seed)) {
    opt.update(g);
    ref.step(g);
    worst = std::max(worst, oracle::max_ulp(opt.parameters(), ref.theta));
  }
  return worst;
}

std::vector<double> zeros() { return std::vector<double>(kDim, 0.0); }

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("update rules match independent oracles within one ulp per step") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    CAPTURE(seed);
    {
      SgdNesterov opt(1e-2, 0.9);
      oracle::SgdNag ref{1e-2, 0.9, theta0(), zeros()};
      CHECK(worst_ulp(opt, ref, seed) <= 1);
    }
    {
      RmsProp opt(1e-3, 0.9, 1e-8);
      oracle::RmsPropRef ref{1e-3, 0.9, 1e-8, theta0(), zeros()};
      CHECK(worst_ulp(opt, ref, seed) <= 1);
    }
    {
      Adam opt(1e-3, 0.9, 0.999, 1e-8, false);
      oracle::AdamRef ref{1e-3, 0.9, 0.999, 1e-8, false, theta0(), zeros(), zeros(), zeros()};
      CHECK(worst_ulp(opt, ref, seed) <= 1);
    }
    {
      Adam opt(1e-3, 0.9, 0.999, 1e-8, true);
      oracle::AdamRef ref{1e-3, 0.9, 0.999, 1e-8, true, theta0(), zeros(), zeros(), zeros()};
      CHECK(worst_ulp(opt, ref, seed) <= 1);
    }
    {
      AdaBound opt(1e-3, 0.9, 0.999, 1e-8, 0.1, 1e-3);
      oracle::AdaBoundRef ref{1e-3, 0.9, 0.999, 1e-8, 0.1, 1e-3, theta0(), zeros(), zeros()};
      CHECK(worst_ulp(opt, ref, seed) <= 1);
    }
    {
      Padam opt(1e-1, 0.9, 0.999, 1e-8, 0.125);
      oracle::PadamRef ref{1e-1, 0.9, 0.999, 1e-8, 0.125, theta0(), zeros(), zeros(), zeros()};
      CHECK(worst_ulp(opt, ref, seed) <= 1);
    }
    {
      AdaBelief opt(1e-3, 0.9, 0.999, 1e-8);
      oracle::AdaBeliefRef ref{1e-3, 0.9, 0.999, 1e-8, theta0(), zeros(), zeros()};
      CHECK(worst_ulp(opt, ref, seed) <= 1);
    }
  }
}

TEST_CASE("lookahead with sync 1 and slow step 1 is its inner optimizer") {
  Lookahead la(std::make_unique<Adam>(1e-3, 0.9, 0.999, 1e-8, false), 1, 1.0);
  Adam plain(1e-3, 0.9, 0.999, 1e-8, false);
  la.reset(theta0());
  plain.reset(theta0());
  bool same = true;
  for (const auto& g : gradient_stream(5)) {
    la.update(g);
    plain.update(g);
    for (std::size_t i = 0; i < kDim; ++i) same = same && la.parameters()[i] == plain.parameters()[i];
  }
  CHECK(same);
}

TEST_CASE("lookahead interpolates toward the fast weights every k steps") {
  Lookahead la(std::make_unique<SgdNesterov>(0.1, 0.0), 5, 0.5);
  la.reset(std::vector<double>{0.0});
  for (int i = 0; i < 5; ++i) la.update(std::vector<double>{-1.0});
  // Fast weights reach 0.5; the slow weight moves halfway.
  CHECK(la.parameters()[0] == doctest::Approx(0.25));
}

TEST_CASE("adam first step by hand") {
  Adam opt(1e-3, 0.9, 0.999, 1e-8, false);
  opt.reset(std::vector<double>{0.0});
  opt.update(std::vector<double>{1.0});
  CHECK(opt.parameters()[0] == doctest::Approx(-1e-3 / (1.0 + 1e-8)).epsilon(1e-14));
}

TEST_CASE("amsgrad v_hat never decreases") {
  Adam opt(1e-3, 0.9, 0.999, 1e-8, true);
  opt.reset(theta0());
  oracle::AdamRef shadow{1e-3, 0.9, 0.999, 1e-8, true, theta0(), zeros(), zeros(), zeros()};
  std::vector<double> prev = zeros();
  bool monotone = true;
  for (const auto& g : gradient_stream(9)) {
    shadow.step(g);
    for (std::size_t i = 0; i < kDim; ++i) monotone = monotone && shadow.vmax[i] >= prev[i];
    prev = shadow.vmax;
  }
  CHECK(monotone);
}

TEST_CASE("adabelief with g equal to m collapses to the epsilon floor") {
  // beta1 = 0 makes m_t = g_t exactly, so (g - m)^2 = 0 and s_t = eps.
  AdaBelief opt(1e-3, 0.0, 0.999, 1e-8);
  opt.reset(std::vector<double>{0.0});
  opt.update(std::vector<double>{2.0});
  CHECK(opt.belief()[0] == 1e-8);
}

TEST_CASE("config defaults follow the usual published settings") {
  BaselineConfig c;
  CHECK(c.momentum == 0.9);
  CHECK(c.rms_decay == 0.9);
  CHECK(c.beta1 == 0.9);
  CHECK(c.beta2 == 0.999);
  CHECK(c.sync_period == 5);
  CHECK(c.slow_step == 0.5);
  CHECK(c.final_lr == 0.1);
  CHECK(c.padam_p == 0.125);
  CHECK(c.lbfgs_memory == 10);
  CHECK(c.line_search.c1 == 1e-4);
  CHECK(c.line_search.c2 == 0.9);
  CHECK(c.fire.f_inc == 1.1);
  CHECK(c.fire.f_dec == 0.5);
  CHECK(c.fire.alpha_start == 0.1);
  CHECK(c.fire.n_min == 5);
  CHECK(c.fire.dt_max == 10 * c.fire.dt);
}

TEST_CASE("method tags and aliases") {
  CHECK(parse_method("cg") == Method::conjugate_gradient);
  CHECK(parse_method("sd") == Method::steepest_descent);
  CHECK(parse_method("lookahead") == Method::lookahead_adam);
  CHECK_FALSE(parse_method("radam").has_value());
  for (Method m : all_methods()) CHECK(parse_method(to_string(m)) == m);
}

TEST_CASE("non-finite gradients are rejected") {
  for (Method m : all_methods()) {
    if (!is_gradient_stream(m) || m == Method::frankenstein) continue;
    CAPTURE(to_string(m));
    BaselineConfig c;
    c.method = m;
    auto opt = make_gradient_optimizer(c);
    opt->reset(std::vector<double>{1.0, 2.0});
    CHECK_THROWS_AS(opt->update(std::vector<double>{NAN, 0.0}), NonFiniteGradientError);
  }
}

TEST_CASE("invalid configurations are rejected") {
  BaselineConfig c;
  c.lr = -1.0;
  CHECK_THROWS(c.validate());
  c = {};
  c.beta1 = 1.0;
  CHECK_THROWS(c.validate());
  c = {};
  c.line_search.cg_c2 = 1e-5;  // must exceed c1
  CHECK_THROWS(c.validate());
}

TEST_CASE("fire zeroes velocity when the power turns non-positive") {
  FireParams p;
  p.dt = 0.1;
  Fire fire(p);
  fire.reset(std::vector<double>{0.0, 0.0});
  fire.update(std::vector<double>{-1.0, 0.0});  // force +x
  fire.update(std::vector<double>{-1.0, 0.0});
  CHECK(fire.velocity()[0] > 0.0);
  fire.update(std::vector<double>{5.0, 0.0});  // force now opposes the velocity
  CHECK(fire.last_power() <= 0.0);
  // After the reset only the new force acts on the velocity.
  CHECK(fire.velocity()[0] == doctest::Approx(-5.0 * fire.timestep()));
  CHECK(fire.timestep() == doctest::Approx(0.05));
  CHECK(fire.mixing() == p.alpha_start);
}

TEST_CASE("steepest descent decreases a convex quadratic monotonically") {
  const Quadratic q(5);
  BaselineConfig c;
  c.method = Method::steepest_descent;
  c.lr = 0.1;
  StopRule stop;
  stop.max_steps = 1000;
  stop.loss_threshold = 1e-10;
  const RunRecord r = run_single(OptimizerSpec::of(Method::steepest_descent, 0.1), q, {}, stop, 0);
  CHECK(r.converged);
  CHECK(r.final_loss < 1e-10);
  bool monotone = true;
  for (std::size_t i = 1; i < r.log.size(); ++i) monotone = monotone && r.log[i].loss < r.log[i - 1].loss;
  CHECK(monotone);
}

TEST_CASE("conjugate gradient with exact line search finishes a quadratic in d iterations") {
  for (std::size_t d : {2u, 5u, 10u}) {
    CAPTURE(d);
    std::mt19937_64 rng(d);
    std::normal_distribution<double> n01;
    // A = M^T M + I is symmetric positive definite.
    std::vector<double> m(d * d), a(d * d, 0.0), b(d);
    for (auto& x : m) x = n01(rng);
    for (auto& x : b) x = n01(rng);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < d; ++k) a[i * d + j] += m[k * d + i] * m[k * d + j];
      }
      a[i * d + i] += 1.0;
    }
    const QuadraticForm f(a, b);
    BaselineConfig c;
    c.method = Method::conjugate_gradient;
    c.lr = 1.0;
    c.line_search.exact = true;
    c.line_search.max_move = 1e6;
    StopRule stop;
    stop.max_steps = d;
    stop.fmax_threshold = 1e-8;
    auto spec = OptimizerSpec::of(Method::conjugate_gradient, c, 1.0);
    const RunRecord r = run_single(spec, f, {}, stop, 0);
    CHECK(r.converged);
    CHECK(r.steps <= d);
  }
}

TEST_CASE("every minimizer relaxes an LJ dimer to the pair minimum") {
  const LennardJonesCluster dimer(2);
  struct Start final : Problem {
    const Problem& inner;
    explicit Start(const Problem& p) : inner(p) {}
    std::string name() const override { return "dimer"; }
    std::size_t dimension() const override { return 6; }
    double evaluate(std::span<const double> t, std::span<double> g) const override { return inner.evaluate(t, g); }
    std::vector<double> initial_point(std::uint64_t) const override { return {0, 0, 0, 1.5, 0, 0}; }
    std::size_t block_size() const override { return 3; }
  } start(dimer);

  StopRule stop;
  stop.max_steps = 20000;
  stop.fmax_threshold = 1e-6;
  for (Method m : all_methods()) {
    CAPTURE(to_string(m));
    double lr = 1e-2;
    if (m == Method::sgd_nag) lr = 1e-3;
    if (m == Method::lbfgs || m == Method::conjugate_gradient || m == Method::steepest_descent) lr = 0.1;
    if (m == Method::fire) lr = 0.05;
    if (m == Method::adabound) lr = 1e-2;
    const RunRecord r = run_single(OptimizerSpec::of(m, lr), start, {}, stop, 0);
    CHECK(r.converged);
    const auto& x = r.final_theta;
    const double dist = std::hypot(x[0] - x[3], x[1] - x[4], x[2] - x[5]);
    CHECK(dist == doctest::Approx(std::pow(2.0, 1.0 / 6.0)).epsilon(1e-5));
    CHECK(r.final_loss == doctest::Approx(-1.0).epsilon(1e-9));
  }
}

TEST_CASE("line-search methods count every probe as a force call") {
  const Rosenbrock rosen(2);
  StopRule stop;
  stop.max_steps = 50;
  for (Method m : {Method::conjugate_gradient, Method::lbfgs, Method::steepest_descent}) {
    const RunRecord r = run_single(OptimizerSpec::of(m, 0.1), rosen, {}, stop, 0);
    CHECK(r.force_calls == r.steps + 1 + r.line_search_probes);
    CHECK(r.force_calls > r.steps + 1);
  }
}

}  // TEST_SUITE
