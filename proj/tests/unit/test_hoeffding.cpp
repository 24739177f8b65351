#include <bit>
#include <cmath>

#include "bebp/core/error.hpp"
#include "bebp/diffops/diffops.hpp"
#include "bebp/hoeffding/hoeffding.hpp"
#include "doctest.h"

using namespace bebp;

namespace {

const auto kBits = Distribution::uniform(SampleSpace::numeric_alphabet({0, 1}));
const auto kSigns = Distribution::uniform(SampleSpace::numeric_alphabet({-1, 1}));
const auto kTri = Distribution::uniform(SampleSpace::numeric_alphabet({0, 1, 2}));
const auto kTriSkew = Distribution::weighted(SampleSpace::numeric_alphabet({0, 1, 2}), {0.2, 0.3, 0.5});

// Oracle 1: literal conditional expectation of Δ_B f(X',X) by enumerating X'
// and evaluating the recursive iterated difference on the functional itself.
std::vector<double> kernel_by_enumeration(const Functional& f, const Distribution& dist, std::size_t n,
                                          const std::vector<std::size_t>& b) {
  const std::size_t k = dist.weights().size();
  std::size_t size = 1;
  for (std::size_t i = 0; i < b.size(); ++i) size *= k;
  std::vector<double> out(size, 0.0);
  for (std::size_t idx = 0; idx < size; ++idx) {
    Configuration x(1, n);
    for (std::size_t i = 0; i < n; ++i) x.element(i)[0] = dist.symbol_value(0);
    for (std::size_t r = idx, q = b.size(); q-- > 0; r /= k) x.element(b[q])[0] = dist.symbol_value(r % k);
    double acc = 0.0;
    for_each_configuration(dist, n, [&](const Configuration& xp, double p) { acc += p * delta_iterated(f, xp, x, b); });
    out[idx] = (b.size() % 2 == 0 ? 1.0 : -1.0) * acc;
  }
  return out;
}

// Oracle 2: classical Möbius form Σ_{A⊆B} (-1)^{|B\A|} E[f | X_A].
std::vector<double> kernel_by_mobius(const Functional& f, const Distribution& dist, std::size_t n,
                                     const std::vector<std::size_t>& b) {
  const std::size_t k = dist.weights().size();
  std::size_t size = 1;
  for (std::size_t i = 0; i < b.size(); ++i) size *= k;
  std::vector<double> out(size, 0.0);
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::vector<std::size_t> sym(b.size());
    for (std::size_t r = idx, q = b.size(); q-- > 0; r /= k) sym[q] = r % k;
    for (std::uint64_t a = 0; a < (1ull << b.size()); ++a) {
      double cond = 0.0, mass = 0.0;
      for_each_configuration(dist, n, [&](const Configuration& y, double p) {
        for (std::size_t q = 0; q < b.size(); ++q)
          if (((a >> q) & 1u) && y[b[q]][0] != dist.symbol_value(sym[q])) return;
        cond += p * f(y);
        mass += p;
      });
      const double sign = ((b.size() - std::popcount(a)) % 2 == 0) ? 1.0 : -1.0;
      out[idx] += sign * cond / mass;
    }
  }
  return out;
}

class SumOfSquares final : public Functional {
 public:
  std::string name() const override { return "sum-of-squares"; }
  double evaluate(const Configuration& y) const override {
    double t = 0;
    for (std::size_t i = 0; i < y.size(); ++i) t += y[i][0] * y[i][0];
    return t;
  }
};

}  // namespace

TEST_CASE("kappa and harmonic identities") {
  for (std::size_t n = 1; n <= 10; ++n) {
    double all = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::uint64_t a = 0; a < (1ull << n); ++a)
        if (!((a >> j) & 1u) && a != (1ull << n) - 1) s += kappa(n, std::popcount(a));
      CHECK(std::abs(s - 1.0) < 1e-12);
    }
    for (std::uint64_t a = 0; a + 1 < (1ull << n); ++a) all += kappa(n, std::popcount(a));
    CHECK(std::abs(all - harmonic(n)) < 1e-12);
  }
  CHECK(harmonic(1) == 1.0);
  CHECK(kappa(2, 1) == 0.5);
}

TEST_CASE("kernel examples") {
  const functionals::Sum sum;
  const std::size_t one[] = {0}, both[] = {0, 1};
  auto k1 = hoeffding_kernel(sum, kBits, 2, one);
  CHECK(k1.table[0] == doctest::Approx(-0.5));
  CHECK(k1.table[1] == doctest::Approx(0.5));
  auto k12 = hoeffding_kernel(sum, kBits, 2, both);
  for (double v : k12.table) CHECK(std::abs(v) < 1e-15);

  const functionals::Product prod;
  auto p12 = hoeffding_kernel(prod, kSigns, 2, both);
  CHECK(p12.table == std::vector<double>{1, -1, -1, 1});
  auto p1 = hoeffding_kernel(prod, kSigns, 2, one);
  for (double v : p1.table) CHECK(v == 0.0);
}

TEST_CASE("kernel agrees with both oracles") {
  auto s = SeedPolicy(21).stream(0, Role::X);
  for (const auto* dist : {&kTri, &kTriSkew}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto f = functionals::Table::random(*dist, 3, s);
      const ExactModel model(f, *dist, 3);
      for (std::uint64_t mask = 1; mask < 8; ++mask) {
        std::vector<std::size_t> b;
        for (std::size_t i = 0; i < 3; ++i)
          if ((mask >> i) & 1u) b.push_back(i);
        const auto kernel = hoeffding_kernel(model, b);
        const auto lit = kernel_by_enumeration(f, *dist, 3, b);
        const auto mob = kernel_by_mobius(f, *dist, 3, b);
        for (std::size_t i = 0; i < kernel.table.size(); ++i) {
          CHECK(std::abs(kernel.table[i] - lit[i]) < 1e-12);
          CHECK(std::abs(kernel.table[i] - mob[i]) < 1e-12);
        }
        CHECK(degeneracy_violation(kernel, dist->weights()) < 1e-12);
      }
    }
  }
}

TEST_CASE("decomposition examples") {
  const functionals::Constant c(3.5);
  auto rc = decompose(c, kTri, 3);
  CHECK(rc.mean == doctest::Approx(3.5));
  for (double m : rc.second_moments) CHECK(m < 1e-24);
  CHECK(variance_expansion(rc) < 1e-20);

  const functionals::Sum sum;
  auto rs = decompose(sum, kSigns, 4);
  for (std::size_t slot = 0; slot < rs.kernels.size(); ++slot) {
    if (rs.kernels[slot].index_set.size() > 1) CHECK(rs.second_moments[slot] < 1e-24);
    else CHECK(rs.second_moments[slot] == doctest::Approx(1.0));
  }
  CHECK(variance_expansion(rs) == doctest::Approx(4.0));

  const functionals::Product prod;
  CHECK(variance_expansion(decompose(prod, kSigns, 2)) == doctest::Approx(1.0));
}

TEST_CASE("reconstruction, orthogonality and variance expansion on random tables") {
  auto s = SeedPolicy(22).stream(0, Role::X);
  for (const auto* dist : {&kTri, &kTriSkew}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto f = functionals::Table::random(*dist, 3, s);
      const ExactModel model(f, *dist, 3);
      const auto report = decompose(model);
      CHECK(reconstruction_residual(report, model) <= 1e-10);
      const auto m = orthogonality_matrix(report, dist->weights());
      for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = 0; b < m.size(); ++b) {
          if (a == b) CHECK(std::abs(m[a][a] - report.second_moments[a]) < 1e-12);
          else CHECK(std::abs(m[a][b]) <= 1e-12);
        }
      CHECK(std::abs(variance_expansion(report) - model.variance()) <= 1e-10);
    }
  }
  const auto f = functionals::Table::random(kBits, 10, s);
  const ExactModel big(f, kBits, 10);
  const auto report = decompose(big);
  CHECK(reconstruction_residual(report, big) <= 1e-10);
  CHECK(std::abs(variance_expansion(report) - big.variance()) <= 1e-10);
}

TEST_CASE("variance sandwich") {
  const functionals::Sum sum;
  const ExactModel ms(sum, kTriSkew, 4);
  CHECK(variance_lower_bound(ms) == doctest::Approx(ms.variance()));
  CHECK(efron_stein_upper(ms) == doctest::Approx(ms.variance()));

  const functionals::Product prod;
  const ExactModel mp(prod, kSigns, 2);
  CHECK(std::abs(variance_lower_bound(mp)) < 1e-15);
  CHECK(mp.variance() == doctest::Approx(1.0));
  // x1 - x1' is 0 or ±2 with equal odds: (1/2)·2·E[(x1-x1')^2] = 2.
  CHECK(efron_stein_upper(mp) == doctest::Approx(2.0));

  const ExactModel mc(functionals::Constant(2.0), kTri, 3);
  CHECK(variance_lower_bound(mc) < 1e-24);
  CHECK(efron_stein_upper(mc) == 0.0);

  auto s = SeedPolicy(23).stream(0, Role::X);
  for (int trial = 0; trial < 50; ++trial) {
    const auto& dist = trial % 2 ? kTri : kTriSkew;
    const ExactModel m(functionals::Table::random(dist, 3, s), dist, 3);
    CHECK(variance_lower_bound(m) <= m.variance() + 1e-12);
    CHECK(m.variance() <= efron_stein_upper(m) + 1e-12);
  }
}

TEST_CASE("covariance identity") {
  const functionals::Sum sum;
  const ExactModel m(sum, kBits, 2);
  const auto id = covariance_identity(m, m);
  CHECK(id.covariance == doctest::Approx(0.5));
  CHECK(id.interpolation == doctest::Approx(0.5));

  const ExactModel c(functionals::Constant(1.0), kBits, 2);
  CHECK(covariance_identity(c, m).covariance == 0.0);
  CHECK(covariance_identity(c, m).interpolation == 0.0);

  auto s = SeedPolicy(24).stream(0, Role::X);
  for (int trial = 0; trial < 20; ++trial) {
    const ExactModel f(functionals::Table::random(kBits, 3, s), kBits, 3);
    const ExactModel g(functionals::Table::random(kBits, 3, s), kBits, 3);
    CHECK(covariance_identity(f, g).residual <= 1e-10);
  }
  const ExactModel f(functionals::Table::random(kTriSkew, 3, s), kTriSkew, 3);
  CHECK(covariance_identity(f, ExactModel(SumOfSquares{}, kTriSkew, 3)).residual <= 1e-10);
}

TEST_CASE("cap exceeded") {
  CHECK_THROWS_AS(ExactModel(functionals::Sum{}, kTri, 15), Error);
}

TEST_CASE("monte carlo sandwich on the sum") {
  const auto cube = Distribution::uniform(SampleSpace::cube(1));
  SandwichConfig cfg{2000, 8};
  const auto r = variance_sandwich_mc(fixed_functional(std::make_shared<functionals::Sum>()), cube, 20, cfg,
                                      SeedPolicy(25));
  const double exact = 20.0 / 12.0;
  CHECK(std::abs(r.lower.value - exact) < 4 * r.lower.se);
  CHECK(std::abs(r.upper.value - exact) < 4 * r.upper.se);
  CHECK(std::abs(r.variance.value - exact) < 4 * r.variance.se);
}
