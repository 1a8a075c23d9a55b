#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "labs/bench.hpp"
#include "labs/sampler.hpp"
#include "labs/signals.hpp"
#include "support/sampler_checks.hpp"
#include "support/stats_oracles.hpp"

using namespace lbs;

namespace {

// n points on [0, 1] with y = 0 except a unit bump so init_state accepts it.
Dataset flat_data(Index n = 64) {
  Vector x = Vector::LinSpaced(n, 0.0, 1.0);
  Vector y = Vector::Zero(n);
  return Dataset(x, y, Interval{0.0, 1.0});
}

ModelState empty_state(const Hyperparams& hyper, Scalar sigma2 = 1.0) {
  ModelState s;
  for (int k : hyper.degrees) s.components.push_back(DegreeComponent{k, {}, 1.0, 1.0});
  s.sigma2 = sigma2;
  return s;
}

void check(const checks::Result& r) {
  INFO(r.detail);
  CHECK(r.ok);
}

}  // namespace

TEST_CASE("chain config and options validate") {
  ChainConfig cfg{10, 0, 1, 1};
  CHECK(cfg.retained() == 10);
  CHECK_NOTHROW(cfg.validate());
  CHECK(ChainConfig{50000, 25000, 10, 1}.retained() == 2500);
  CHECK(ChainConfig{105, 100, 10, 1}.retained() == 0);
  CHECK_THROWS_AS((ChainConfig{10, 10, 1, 1}.validate()), PreconditionError);
  CHECK_THROWS_AS((ChainConfig{10, 0, 0, 1}.validate()), PreconditionError);
  SamplerOptions opts;
  opts.move_repeats = 0;
  CHECK_THROWS_AS(opts.validate(), PreconditionError);
}

TEST_CASE("move choice") {
  Rng rng = make_rng(3);
  const MoveProbabilities probs;
  for (int i = 0; i < 1000; ++i) CHECK(choose_move(probs, 0, rng) == Move::birth);
  for (int i = 0; i < 1000; ++i) CHECK(choose_move(MoveProbabilities{1, 0, 0}, 5, rng) == Move::birth);

  const int n = 100000;
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) ++counts[static_cast<int>(choose_move(probs, 4, rng))];
  const double p[3] = {0.4, 0.4, 0.2};
  for (int m = 0; m < 3; ++m) {
    const double se = std::sqrt(p[m] * (1 - p[m]) / n);
    CHECK(std::abs(counts[m] / double(n) - p[m]) < 3 * se);
  }
}

TEST_CASE("birth and death ratio examples") {
  const Dataset data = flat_data();
  const Hyperparams hyper = Hyperparams::uniform({0}, 0.01, 0.01, 1.0, 1.0);
  const ModelState s = empty_state(hyper);

  // Zero-coefficient atom on all-zero data, M = 1, J = 0: forced birth so
  // only the reverse death probability remains.
  const Sampler at_zero(data, hyper, s);
  const Atom a{KnotVector(0, {0.2, 0.7}), 0.0};
  const double birth = at_zero.birth_log_ratio(0, a);
  CHECK(birth == doctest::Approx(std::log(0.4)).epsilon(1e-14));

  ModelState one = s;
  one.components[0].atoms.push_back(a);
  const Sampler at_one(data, hyper, one);
  CHECK(at_one.death_log_ratio(0, 0) == doctest::Approx(-std::log(0.4)).epsilon(1e-14));
  CHECK(birth + at_one.death_log_ratio(0, 0) == doctest::Approx(0.0).epsilon(1e-14));

  CHECK_THROWS_AS(at_zero.death_log_ratio(0, 0), std::logic_error);
  Rng rng = make_rng(1);
  Sampler mutable_zero(data, hyper, s);
  CHECK_THROWS_AS(mutable_zero.death(0, rng), std::logic_error);
  CHECK_THROWS_AS(mutable_zero.relocate(0, rng), std::logic_error);
}

TEST_CASE("atom without data support leaves the likelihood unchanged") {
  Vector x = Vector::LinSpaced(50, 0.0, 0.5);
  Vector y = Vector::LinSpaced(50, -1.0, 2.0);
  const Dataset data(x, y, Interval{0.0, 1.0});
  const Hyperparams hyper = Hyperparams::uniform({1}, 0.01, 0.01, 1.0, 1.0);
  ModelState s = empty_state(hyper, 0.3);
  s.components[0].rate = 2.5;
  s.components[0].atoms.push_back(Atom{KnotVector(1, {0.1, 0.2, 0.3}), 1.5});
  s.components[0].atoms.push_back(Atom{KnotVector(1, {0.6, 0.8, 0.9}), 4.0});
  for (bool full : {false, true}) {
    SamplerOptions opts;
    opts.full_recompute = full;
    const Sampler sampler(data, hyper, s, opts);
    // Prior-over-proposal cancels; only counts, rate and move probabilities remain.
    const double expected = std::log(2.0) - std::log(2.5) + std::log(0.4) - std::log(0.4);
    CHECK(sampler.death_log_ratio(1, 1) == expected);
  }
}

TEST_CASE("a likelihood-dominated birth is always accepted") {
  Vector x = Vector::LinSpaced(100, 0.0, 1.0);
  Vector y = (x.array() >= 0.3 && x.array() < 0.6).cast<double>() * 50.0;
  const Dataset data(x, y, Interval{0.0, 1.0});
  const Hyperparams hyper = Hyperparams::uniform({0}, 0.01, 0.01, 1.0, 1.0);
  ModelState s = empty_state(hyper, 1e-4);
  s.components[0].phi = 25.0;
  const Atom exact{KnotVector(0, {0.295, 0.595}), 50.0};
  for (int i = 0; i < 100; ++i) {
    Sampler sampler(data, hyper, s);
    Rng rng = make_rng(100 + i);
    CHECK(sampler.birth_log_ratio(0, exact) > 1e6);
    CHECK(sampler.birth(0, exact, rng).accepted);
  }
}

TEST_CASE("reciprocity of birth and death") { check(checks::reciprocity(500, 21)); }

TEST_CASE("death selects atoms uniformly") {
  const Dataset data = flat_data();
  const Hyperparams hyper = Hyperparams::uniform({0}, 0.01, 0.01, 1.0, 1.0);
  ModelState s = empty_state(hyper);
  for (double lo : {0.1, 0.4, 0.7}) s.components[0].atoms.push_back(Atom{KnotVector(0, {lo, lo + 0.1}), 0.5});
  const Sampler base(data, hyper, s);
  Rng rng = make_rng(9);
  const int n = 100000;
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) {
    Sampler trial = base;
    ++counts[trial.death(0, rng).atom];
  }
  const double se = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / n);
  for (int c : counts) CHECK(std::abs(c / double(n) - 1.0 / 3.0) < 3 * se);
}

TEST_CASE("relocation keeps the knots ordered and the count fixed") {
  const SimulatedData sim = simulate(TestFunction::doppler, 128, 5.0, 4);
  const Hyperparams hyper = Hyperparams::uniform({0, 1, 3}, 0.01, 0.01, 5.0, 1.0);
  for (bool prior_only : {true, false}) {
    SamplerOptions opts;
    opts.prior_only = prior_only;
    Rng rng = make_rng(5, 1);
    ModelState init = init_state(sim.data, hyper, rng);
    for (auto& c : init.components) {
      if (c.count() == 0) c.atoms.push_back(sample_atom(c.degree, c.phi, sim.data.domain, rng));
    }
    Sampler sampler(sim.data, hyper, init, opts);
    bool ordered = true, inside = true, fixed = true;
    for (int i = 0; i < 100000 / 3; ++i) {
      for (int k : hyper.degrees) {
        const auto& comp = sampler.state().components[sampler.state().component_index(k)];
        const std::size_t before = comp.count();
        const RelocationResult r = sampler.relocate(k, rng);
        fixed &= comp.count() == before;
        const KnotVector& kv = comp.atoms[r.atom].knots;
        for (std::size_t j = 0; j + 1 < kv.size(); ++j) ordered &= kv[j] < kv[j + 1];
        inside &= kv.front() > 0.0 && kv.back() < 1.0;
      }
    }
    CHECK(ordered);
    CHECK(inside);
    CHECK(fixed);
  }
}

TEST_CASE("relocation to the current position has zero ratio") {
  const SimulatedData sim = simulate(TestFunction::blocks, 128, 3.0, 2);
  const Hyperparams hyper = Hyperparams::uniform({2}, 0.01, 0.01, 5.0, 1.0);
  ModelState s = empty_state(hyper, 0.7);
  s.components[0].atoms.push_back(Atom{KnotVector(2, {0.1, 0.3, 0.35, 0.8}), 2.0});
  for (bool full : {false, true}) {
    SamplerOptions opts;
    opts.full_recompute = full;
    const Sampler sampler(sim.data, hyper, s, opts);
    for (std::size_t j = 0; j < 4; ++j) CHECK(sampler.knot_log_ratio(2, 0, j, s.components[0].atoms[0].knots[j]) == 0.0);
  }
}

TEST_CASE("relocation finds the brute-force posterior mode of a single step") {
  const Index n = 100;
  Vector x = Vector::LinSpaced(n, 0.0, 1.0);
  Rng noise = make_rng(77);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = ((x[i] >= 0.3 && x[i] < 0.6) ? 3.0 : 0.0) + normal(noise, 0.0, 0.1);
  const Dataset data(x, y, Interval{0.0, 1.0});
  const Hyperparams hyper = Hyperparams::uniform({0}, 0.01, 0.01, 1.0, 1.0);
  ModelState s = empty_state(hyper, 0.01);
  s.beta0 = 0.0;
  s.components[0].phi = 10.0;
  s.components[0].atoms.push_back(Atom{KnotVector(0, {0.1, 0.9}), 3.0});

  // Brute force over knot pairs at midpoints between abscissae with beta = 3.
  double best = -INFINITY;
  Index best_lo = 0, best_hi = 0;
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b <= n; ++b) {
      double ssr = 0.0;
      for (Index i = 0; i < n; ++i) {
        const double e = y[i] - ((i >= a && i < b) ? 3.0 : 0.0);
        ssr += e * e;
      }
      if (-ssr > best) {
        best = -ssr;
        best_lo = a;
        best_hi = b;
      }
    }
  }
  Sampler sampler(data, hyper, s);
  Rng rng = make_rng(8, 1);
  for (int i = 0; i < 2000; ++i) {
    sampler.relocate(0, rng);
  }
  const auto [lo, hi] = support_range(sampler.state().components[0].atoms[0].knots, data.x);
  CHECK(lo == best_lo);
  CHECK(hi == best_hi);
}

TEST_CASE("coefficient conditional") {
  // No data under the support: the prior.
  Vector x = Vector::LinSpaced(20, 0.0, 0.4);
  Vector y = Vector::LinSpaced(20, 1.0, 2.0);
  const Dataset data(x, y, Interval{0.0, 1.0});
  const Hyperparams hyper = Hyperparams::uniform({0}, 0.01, 0.01, 1.0, 1.0);
  ModelState s = empty_state(hyper);
  s.components[0].phi = 2.5;
  s.components[0].atoms.push_back(Atom{KnotVector(0, {0.6, 0.9}), 1.0});
  const NormalLaw prior = Sampler(data, hyper, s).beta_law(0, 0);
  CHECK(prior.mean == 0.0);
  CHECK(prior.variance == doctest::Approx(6.25));

  // One data point with B = 1, sigma^2 = 1 and a diffuse prior: N(residual, 1).
  Vector b(1), e(1);
  b << 1.0;
  e << 2.5;
  const NormalLaw diffuse = beta_conditional(b, e, 1.0, 1e6);
  CHECK(diffuse.mean == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(diffuse.variance == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rate and noise conditionals") {
  CHECK(rate_conditional(0, 1.0, 1.0).shape == 1.0);
  CHECK(rate_conditional(0, 1.0, 1.0).rate == 2.0);
  const GammaLaw g7 = rate_conditional(7, 1.0, 1.0);
  CHECK(g7.shape / g7.rate == 4.0);
  for (double b : {0.5, 1.0, 3.0}) {
    const GammaLaw lo = rate_conditional(3, 2.0, b), hi = rate_conditional(4, 2.0, b);
    CHECK(hi.shape / hi.rate - lo.shape / lo.rate == doctest::Approx(1.0 / (b + 1.0)));
  }
  const InverseGammaLaw v = sigma2_conditional(0.0, 128, 2.0, 1.0);
  CHECK(v.shape == 65.0);
  CHECK(v.scale == 1.0);
  const InverseGammaLaw w = sigma2_conditional(10.0, 128, 0.01, 0.01);
  CHECK(w.shape == doctest::Approx(64.005));
  CHECK(w.scale == doctest::Approx(0.5 * (10.0 + 1e-4)));
}

TEST_CASE("gibbs draws follow their analytic laws") { check(checks::gibbs_laws(20000, 31)); }

TEST_CASE("prior-only chain recovers the prior") { check(checks::prior_recovery(20000, 41)); }

TEST_CASE("incremental and full likelihood agree") {
  const ChainConfig cfg{600, 100, 5, 12};
  check(checks::recompute_agreement(TestFunction::blocks, published_hyperparams(TestFunction::blocks), cfg, 12));
  SamplerOptions opts;
  opts.move_repeats = 3;
  opts.update_all_betas = true;
  check(checks::recompute_agreement(TestFunction::heavisine, Hyperparams::uniform({0, 1, 2, 3}, 0.01, 0.01, 5.0, 1.0),
                                    cfg, 13, opts));
}

TEST_CASE("sampler state stays valid and moves change counts by one") {
  const SimulatedData sim = simulate(TestFunction::bumps, 128, 5.0, 6);
  const Hyperparams hyper = Hyperparams::uniform({0, 1, 2}, 0.01, 0.01, 5.0, 1.0);
  Rng rng = make_rng(6, 1);
  Sampler sampler(sim.data, hyper, init_state(sim.data, hyper, rng));
  bool steps_ok = true;
  for (int i = 0; i < 2000; ++i) {
    for (int k : hyper.degrees) {
      const std::size_t before = sampler.state().components[sampler.state().component_index(k)].count();
      const MoveResult r = sampler.move(k, rng);
      const std::size_t after = sampler.state().components[sampler.state().component_index(k)].count();
      const long expected = !r.accepted || r.move == Move::relocate ? 0 : (r.move == Move::birth ? 1 : -1);
      steps_ok &= static_cast<long>(after) - static_cast<long>(before) == expected;
    }
    sampler.sweep(rng);
    REQUIRE_NOTHROW(validate_state(sampler.state(), hyper, sim.data.domain));
  }
  CHECK(steps_ok);
  // The cached residuals track the state.
  const Vector direct = sampler.data().y - eval_mean(sampler.state(), sampler.data().x);
  CHECK((direct - sampler.residuals()).cwiseAbs().maxCoeff() < 1e-9);
  for (int k : hyper.degrees) {
    const AcceptanceStats& st = sampler.stats(k);
    CHECK(st.birth.accepts <= st.birth.attempts);
    CHECK(st.death.accepts <= st.death.attempts);
    CHECK(st.relocate.accepts <= st.relocate.attempts);
  }
}

TEST_CASE("run_chain retention and determinism") {
  const SimulatedData sim = simulate(TestFunction::blocks, 128, 3.0, 1);
  const Hyperparams hyper = published_hyperparams(TestFunction::blocks);
  const ChainOutput out = run_chain(sim.data, hyper, ChainConfig{10, 0, 1, 3});
  CHECK(out.retained() == 10);
  CHECK(out.curves.cols() == 128);
  CHECK(out.sigma2.size() == 10);
  CHECK(out.iterations.front() == 1);
  CHECK(out.iterations.back() == 10);

  const ChainConfig cfg{300, 100, 7, 5};
  const ChainOutput a = run_chain(sim.data, hyper, cfg);
  const ChainOutput b = run_chain(sim.data, hyper, cfg);
  CHECK(a.retained() == cfg.retained());
  CHECK(a.curves == b.curves);
  CHECK(a.sigma2 == b.sigma2);
  CHECK(a.counts == b.counts);
  const ChainOutput c = run_chain(sim.data, hyper, ChainConfig{300, 100, 7, 6});
  CHECK(a.curves != c.curves);

  Vector grid = Vector::LinSpaced(33, 0.0, 1.0);
  const ChainOutput g = run_chain(sim.data, hyper, cfg, {}, grid);
  CHECK(g.curves.cols() == 33);
  CHECK(g.sigma2 == a.sigma2);
}

TEST_CASE("posterior curve summaries") {
  Vector grid = Vector::LinSpaced(4, 0.0, 1.0);
  Matrix one(1, 4);
  one << 1, 2, 3, 4;
  const PosteriorCurve p1 = posterior_curve(grid, one);
  CHECK(p1.mean == one.row(0).transpose());
  CHECK(p1.lower == p1.mean);
  CHECK(p1.upper == p1.mean);

  Matrix same(5, 4);
  same.rowwise() = one.row(0);
  const PosteriorCurve ps = posterior_curve(grid, same);
  CHECK((ps.upper - ps.lower).cwiseAbs().maxCoeff() == 0.0);

  Matrix pm(2, 4);
  pm.row(0) = one.row(0);
  pm.row(1) = -one.row(0);
  CHECK(posterior_curve(grid, pm).mean.cwiseAbs().maxCoeff() == 0.0);

  CHECK(empirical_quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(empirical_quantile({4, 3, 2, 1}, 0.0) == 1.0);
  CHECK(empirical_quantile({4, 3, 2, 1}, 1.0) == 4.0);
  CHECK(empirical_quantile({3, 1, 4, 1, 5, 9, 2, 6}, 0.3) == doctest::Approx(2.1));
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), PreconditionError);
  CHECK_THROWS_AS(posterior_curve(grid, one, 0.9, 0.1), PreconditionError);
}
