#include <algorithm>
#include <cmath>
#include <map>

#include "bebp/bounds/bounds.hpp"
#include "bebp/core/error.hpp"
#include "bebp/hoeffding/hoeffding.hpp"
#include "doctest.h"

using namespace bebp;

namespace {

const auto kSigns = Distribution::uniform(SampleSpace::numeric_alphabet({-1, 1}));
const auto kSkewSigns = Distribution::weighted(SampleSpace::numeric_alphabet({-1, 1}), {0.3, 0.7});
const auto kTri = Distribution::weighted(SampleSpace::numeric_alphabet({0, 1, 2}), {0.2, 0.3, 0.5});

// Oracle helpers evaluate f directly on substituted configurations.
Configuration with(const Configuration& y, std::size_t j, const Configuration& src) {
  Configuration out = y;
  out.set(j, src[j]);
  return out;
}

double diff(const Functional& f, const Configuration& y, const Configuration& yp, std::size_t j) {
  return f.evaluate(y) - f.evaluate(with(y, j, yp));
}

double kappa_literal(std::size_t n, std::size_t a) {
  double binom = 1.0;
  for (std::size_t i = 0; i < a; ++i) binom = binom * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return 1.0 / (binom * static_cast<double>(n - a));
}

// T(x,xp) = 1/2 Σ_{A strict} κ_{n,A} Σ_{j∉A} Δ_j f(x,xp) Δ_j f(x^A,xp), and the primed form.
std::pair<double, double> exact_T(const Functional& f, const Configuration& x, const Configuration& xp) {
  const std::size_t n = x.size();
  double t = 0.0, tp = 0.0;
  for (std::uint64_t bits = 0; bits + 1 < (1ull << n); ++bits) {
    Configuration xa = x;
    std::size_t a = 0;
    for (std::size_t i = 0; i < n; ++i)
      if ((bits >> i) & 1) {
        xa.set(i, xp[i]);
        ++a;
      }
    double s = 0.0, sp = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if ((bits >> j) & 1) continue;
      const double d = diff(f, x, xp, j), da = diff(f, xa, xp, j);
      s += d * da;
      sp += d * std::fabs(da);
    }
    t += kappa_literal(n, a) * s;
    tp += kappa_literal(n, a) * sp;
  }
  return {0.5 * t, 0.5 * tp};
}

// Enumerates all length-n words of a weighted alphabet.
template <class Body>
void for_each_word(const Distribution& dist, std::size_t n, Body body) {
  const std::size_t k = dist.weights().size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= k;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Configuration y(1, n);
    double p = 1.0;
    for (std::size_t i = 0, r = idx; i < n; ++i, r /= k) {
      y.element(i)[0] = dist.symbol_value(r % k);
      p *= dist.weights()[r % k];
    }
    body(y, p);
  }
}

Configuration pick(const Configuration& x, const Configuration& xp, const Configuration& xt,
                   const RecombinationSelector& sel) {
  Configuration out = x;
  for (std::size_t i = 0; i < x.size(); ++i)
    out.set(i, sel.choices[i] == Source::Base ? x[i] : sel.choices[i] == Source::Prime ? xp[i] : xt[i]);
  return out;
}

// Δ_{i,k} f(y, xp) by four evaluations.
double diff2(const Functional& f, const Configuration& y, const Configuration& xp, std::size_t i, std::size_t k) {
  return diff(f, y, xp, i) - diff(f, with(y, k, xp), xp, i);
}

}  // namespace

TEST_CASE("subset sampler: strict subsets, size marginal chi-square, uniform within size") {
  for (std::size_t n = 1; n <= 10; ++n) {
    SubsetSampler sampler(n);
    double h = 0.0;
    for (std::size_t a = 0; a < n; ++a) h += 1.0 / static_cast<double>(n - a);
    CHECK(sampler.harmonic() == doctest::Approx(h));
    auto stream = SeedPolicy(n).stream(0, Role::SubsetSampler);
    const std::size_t draws = 40000;
    std::vector<double> counts(n, 0.0);
    std::vector<std::uint8_t> member;
    std::vector<std::size_t> outside;
    for (std::size_t k = 0; k < draws; ++k) {
      sampler.draw(stream, member, outside);
      std::size_t a = 0;
      for (auto m : member) a += m;
      REQUIRE(a < n);
      REQUIRE(outside.size() == n - a);
      for (auto j : outside) REQUIRE(member[j] == 0);
      counts[a] += 1.0;
    }
    double chi2 = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      const double expected = draws * (1.0 / static_cast<double>(n - a)) / h;
      CHECK(sampler.size_probability(a) == doctest::Approx(expected / draws));
      chi2 += (counts[a] - expected) * (counts[a] - expected) / expected;
    }
    // 99.9% quantile of chi-square with 9 degrees of freedom is 27.9; fewer dof are smaller.
    if (n > 1) CHECK(chi2 < 27.9);
  }

  SubsetSampler sampler(4);
  auto stream = SeedPolicy(99).stream(0, Role::SubsetSampler);
  std::map<std::uint64_t, double> freq;
  std::vector<std::uint8_t> member;
  std::vector<std::size_t> outside;
  const std::size_t draws = 60000;
  for (std::size_t k = 0; k < draws; ++k) {
    sampler.draw(stream, member, outside);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < 4; ++i) bits |= static_cast<std::uint64_t>(member[i]) << i;
    freq[bits] += 1.0;
  }
  double chi2 = 0.0;
  for (std::uint64_t bits = 0; bits < 15; ++bits) {
    const double expected = draws * kappa_literal(4, std::popcount(bits)) / sampler.harmonic();
    chi2 += (freq[bits] - expected) * (freq[bits] - expected) / expected;
  }
  // 99.9% quantile with 14 dof.
  CHECK(chi2 < 36.1);
}

TEST_CASE("t_term: sum example and constant") {
  const functionals::Sum sum;
  Configuration x(1, std::vector<double>{1.0}), xp(1, std::vector<double>{0.0});
  SubsetSampler sampler(1);
  const auto t = t_term(sum, x, xp, x, {0});
  CHECK(0.5 * sampler.harmonic() * t.t == doctest::Approx(0.5));

  const functionals::Constant constant(2.0);
  auto sx = SeedPolicy(1).stream(0, Role::X);
  auto si = SeedPolicy(1).stream(0, Role::Inner);
  const auto terms = sample_T_terms(constant, kSigns, 6, 8, sx, si);
  CHECK(terms.t_mean == 0.0);
  CHECK(terms.t_prime_mean == 0.0);
}

TEST_CASE("H_n-reweighted T estimate matches the exact subset sum") {
  auto table_stream = SeedPolicy(3).stream(0, Role::Integration);
  for (std::size_t n : {3, 5, 8}) {
    const auto f = functionals::Table::random(kTri, n, table_stream);
    SubsetSampler sampler(n);
    for (int trial = 0; trial < 3; ++trial) {
      auto sx = SeedPolicy(10 * n + trial).stream(0, Role::X);
      auto sp = SeedPolicy(10 * n + trial).stream(0, Role::XPrime);
      auto sa = SeedPolicy(10 * n + trial).stream(0, Role::SubsetSampler);
      const auto x = kTri.sample(n, sx), xp = kTri.sample(n, sp);
      const auto [t_exact, tp_exact] = exact_T(f, x, xp);
      RunningStats t, tp;
      std::vector<std::uint8_t> member;
      std::vector<std::size_t> outside;
      for (int k = 0; k < 20000; ++k) {
        sampler.draw(sa, member, outside);
        const auto term = t_term(f, x, xp, substituted(x, xp, member), outside);
        t.add(0.5 * sampler.harmonic() * term.t);
        tp.add(0.5 * sampler.harmonic() * term.t_prime);
      }
      CHECK(std::fabs(t.mean() - t_exact) <= 3 * t.se_mean() + 1e-12);
      CHECK(std::fabs(tp.mean() - tp_exact) <= 3 * tp.se_mean() + 1e-12);
    }
  }
}

TEST_CASE("E[T] equals Var f for the sum of five signs") {
  const functionals::Sum sum;
  RunningStats mean_t;
  const SeedPolicy seeds(21);
  for (std::size_t r = 0; r < 10000; ++r) {
    auto sx = seeds.stream(r, Role::X);
    auto si = seeds.stream(r, Role::Inner);
    mean_t.add(sample_T_terms(sum, kSigns, 5, 2, sx, si).t_mean);
  }
  CHECK(std::fabs(mean_t.mean() - 5.0) <= 3 * mean_t.se_mean());
}

TEST_CASE("Var E[T|X]: zero for the sum and constant, exact oracle for x1*x2") {
  BoundConfig config;
  config.outer = 2000;
  config.k_inner = 8;
  const auto sum = estimate_var_conditional(fixed_functional(std::make_shared<functionals::Sum>()), kSigns, 16,
                                            TWhich::T, config, SeedPolicy(4));
  CHECK(std::fabs(sum.raw) <= 3 * sum.se);
  CHECK(sum.value >= 0.0);
  const auto constant = estimate_var_conditional(fixed_functional(std::make_shared<functionals::Constant>(1.0)),
                                                 kSigns, 5, TWhich::T, config, SeedPolicy(4));
  CHECK(constant.raw == 0.0);

  const functionals::Product product;
  for (TWhich which : {TWhich::T, TWhich::TPrime}) {
    double m1 = 0.0, m2 = 0.0;
    for_each_word(kSkewSigns, 2, [&](const Configuration& x, double px) {
      double cond = 0.0;
      for_each_word(kSkewSigns, 2, [&](const Configuration& xp, double pp) {
        const auto [t, tp] = exact_T(product, x, xp);
        cond += pp * (which == TWhich::T ? t : tp);
      });
      m1 += px * cond;
      m2 += px * cond * cond;
    });
    const double exact = m2 - m1 * m1;
    CHECK(exact > 0.01);
    config.outer = 4000;
    const auto est = estimate_var_conditional(fixed_functional(std::make_shared<functionals::Product>()), kSkewSigns,
                                              2, which, config, SeedPolicy(8));
    CHECK(std::fabs(est.raw - exact) <= 3 * est.se);
  }
}

TEST_CASE("kolmogorov_bound: constant is degenerate, sum rates and domination") {
  BoundConfig config;
  config.outer = 200;
  CHECK_THROWS_AS(kolmogorov_bound(fixed_functional(std::make_shared<functionals::Constant>(1.0)), kSigns, 8, config,
                                   SeedPolicy(1)),
                  Error);
  CHECK_THROWS_AS(wasserstein_bound(fixed_functional(std::make_shared<functionals::Constant>(1.0)), kSigns, 8, config,
                                    SeedPolicy(1)),
                  Error);

  config.outer = 3000;
  config.k_inner = 256;
  std::vector<BoundReport> reports;
  for (std::size_t n : {64, 256}) {
    auto factory = fixed_functional(std::make_shared<functionals::Sum>(1.0 / std::sqrt(static_cast<double>(n))));
    reports.push_back(kolmogorov_bound(factory, kSigns, n, config, SeedPolicy(n)));
    const auto& r = reports.back();
    CHECK(std::fabs(r.mean_T.value - r.sigma2_hat.value) <= 3 * std::hypot(r.mean_T.se, r.sigma2_hat.se));
    CHECK(r.var_ET_given_X.raw >= -2 * r.var_ET_given_X.se);
    CHECK(r.var_ETprime_given_X.raw >= -2 * r.var_ETprime_given_X.se);
    CHECK(r.kolmogorov_bound_loose >=
          r.kolmogorov_bound_intermed - 2 * std::hypot(r.kolmogorov_bound_loose_se, r.kolmogorov_bound_intermed_se));
    CHECK(r.wasserstein_bound == wasserstein_bound(r));
    CHECK(r.empirical_dK.value <= r.kolmogorov_bound_intermed + 0.1);
  }
  const double ratio = reports[1].kolmogorov_bound_intermed / reports[0].kolmogorov_bound_intermed;
  CHECK(ratio >= 0.35);
  CHECK(ratio <= 0.65);
  const double wratio = reports[1].wasserstein_bound / reports[0].wasserstein_bound;
  CHECK(wratio >= 0.35);
  CHECK(wratio <= 0.65);
}

TEST_CASE("symmetric shortcut agrees with the explicit sum over coordinates") {
  BoundConfig config;
  config.outer = 4000;
  config.k_inner = 4;
  auto factory = fixed_functional(std::make_shared<functionals::PairwiseProducts>());
  config.use_symmetry = true;
  const auto fast = kolmogorov_bound(factory, kSkewSigns, 6, config, SeedPolicy(2));
  config.use_symmetry = false;
  const auto full = kolmogorov_bound(factory, kSkewSigns, 6, config, SeedPolicy(2));
  CHECK(fast.symmetric_shortcut);
  CHECK_FALSE(full.symmetric_shortcut);
  CHECK(std::fabs(fast.third_moment_term.value - full.third_moment_term.value) <=
        3 * std::hypot(fast.third_moment_term.se, full.third_moment_term.se));
  CHECK(std::fabs(fast.sixth_moment_term.value - full.sixth_moment_term.value) <=
        3 * std::hypot(fast.sixth_moment_term.se, full.sixth_moment_term.se));
}

TEST_CASE("geometric bound: additive functional has no interactions") {
  GeometricConfig config;
  config.reps = 200;
  const auto r = geometric_bound(fixed_functional(std::make_shared<functionals::Sum>()), kSigns, 10, config,
                                 SeedPolicy(3));
  CHECK(r.b_n.value == 0.0);
  CHECK(r.b_prime_n.value == 0.0);
  CHECK(r.b_candidates.size() >= 20);
  CHECK(r.b_prime_candidates.size() >= 20);
  CHECK(r.bound >= r.empirical_dK.value);

  CHECK_THROWS_AS(geometric_bound(fixed_functional(std::make_shared<functionals::Table>(
                                      functionals::Table(kSigns, 3, {0, 1, 2, 3, 4, 5, 6, 7}))),
                                  kSigns, 3, config, SeedPolicy(3)),
                  Error);
}

TEST_CASE("geometric bound: pairwise products at n = 4 against exact enumeration") {
  const functionals::PairwiseProducts f;
  GeometricConfig config;
  config.reps = 20000;
  const auto r = geometric_bound(fixed_functional(std::make_shared<functionals::PairwiseProducts>()), kSigns, 4,
                                 config, SeedPolicy(17));
  CHECK(r.b_n.value > 0.0);

  // Average over all (X, X', X~) in {-1,1}^12.
  auto expectation = [&](auto integrand) {
    double acc = 0.0;
    for_each_word(kSigns, 4, [&](const Configuration& x, double p1) {
      for_each_word(kSigns, 4, [&](const Configuration& xp, double p2) {
        for_each_word(kSigns, 4, [&](const Configuration& xt, double p3) { acc += p1 * p2 * p3 * integrand(x, xp, xt); });
      });
    });
    return acc;
  };
  double exact_max = 0.0;
  for (const auto& c : r.b_candidates) {
    const double exact = expectation([&](const Configuration& x, const Configuration& xp, const Configuration& xt) {
      const auto y = pick(x, xp, xt, c.selectors[0]), z = pick(x, xp, xt, c.selectors[1]);
      const double d = diff(f, z, xp, 0);
      return diff2(f, y, xp, 0, 1) != 0.0 ? d * d * d * d : 0.0;
    });
    exact_max = std::max(exact_max, exact);
    CHECK_MESSAGE(std::fabs(c.value.value - exact) <= 3 * c.value.se + 1e-12, c.label);
  }
  CHECK(exact_max > 0.0);
  for (const auto& c : r.b_prime_candidates) {
    const double exact = expectation([&](const Configuration& x, const Configuration& xp, const Configuration& xt) {
      const auto y = pick(x, xp, xt, c.selectors[0]), y2 = pick(x, xp, xt, c.selectors[1]),
                 z = pick(x, xp, xt, c.selectors[2]);
      const double d = diff(f, z, xp, 1);
      return diff2(f, y, xp, 0, 1) != 0.0 && diff2(f, y2, xp, 0, 2) != 0.0 ? d * d * d * d : 0.0;
    });
    CHECK_MESSAGE(std::fabs(c.value.value - exact) <= 3 * c.value.se + 1e-12, c.label);
  }
}

TEST_CASE("moment bound check") {
  const auto sum = fixed_functional(std::make_shared<functionals::Sum>());
  const auto two = moment_bound_check(sum, kSigns, 16, 2.0, 20000, SeedPolicy(5));
  CHECK(two.c_q == 0.5);
  CHECK(std::fabs(two.lhs.value - 16.0) <= 3 * two.lhs.se);
  CHECK(two.lhs.value <= two.rhs.value + 3 * std::hypot(two.lhs.se, two.rhs.se));
  const auto three = moment_bound_check(sum, kSigns, 16, 3.0, 20000, SeedPolicy(5));
  CHECK(three.c_q == doctest::Approx(8.0 * std::pow(18.0 * std::sqrt(3.0) * 1.5, 1.5)));
  CHECK(three.holds);
  const auto constant =
      moment_bound_check(fixed_functional(std::make_shared<functionals::Constant>(1.0)), kSigns, 8, 3.0, 100,
                         SeedPolicy(5));
  CHECK(constant.lhs.value == 0.0);
  CHECK(constant.holds);
}

TEST_CASE("reports serialize deterministically") {
  BoundConfig config;
  config.outer = 200;
  auto factory = fixed_functional(std::make_shared<functionals::Sum>());
  const auto a = to_json(kolmogorov_bound(factory, kSigns, 10, config, SeedPolicy(9))).dump();
  const auto b = to_json(kolmogorov_bound(factory, kSigns, 10, config, SeedPolicy(9))).dump();
  CHECK(a == b);
  CHECK(a.find("kolmogorov_bound_intermed") != std::string::npos);
}
