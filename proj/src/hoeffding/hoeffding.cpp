#include "bebp/hoeffding/hoeffding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "bebp/core/error.hpp"
#include "bebp/core/parallel.hpp"

namespace bebp {

double kappa(std::size_t n, std::size_t a) {
  require(a < n, ErrorCode::InvalidArgument, "κ needs a strict subset");
  // 1 / (C(n,a) (n-a)), binomial in floating point (n is small here).
  double binom = 1.0;
  for (std::size_t i = 1; i <= a; ++i) binom = binom * static_cast<double>(n - a + i) / static_cast<double>(i);
  return 1.0 / (binom * static_cast<double>(n - a));
}

double harmonic(std::size_t n) {
  double h = 0.0;
  for (std::size_t a = n; a >= 1; --a) h += 1.0 / static_cast<double>(a);
  return h;
}

ExactModel::ExactModel(const Functional& f, const Distribution& dist, std::size_t n, std::uint64_t cap)
    : n_(n), weights_(dist.weights()), strides_(n) {
  const std::uint64_t total = configuration_count(dist, n, cap);
  std::size_t s = 1;
  for (std::size_t i = n; i-- > 0;) {
    strides_[i] = s;
    s *= weights_.size();
  }
  table_.reserve(total);
  for_each_configuration(dist, n, [&](const Configuration& y, double) { table_.push_back(f.evaluate(y)); }, cap);
}

double ExactModel::probability(std::size_t index) const {
  double p = 1.0;
  for (std::size_t i = 0; i < n_; ++i) p *= weights_[digit(index, i)];
  return p;
}

double ExactModel::mean() const {
  double m = 0.0;
  for (std::size_t x = 0; x < table_.size(); ++x) m += probability(x) * table_[x];
  return m;
}

double ExactModel::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t x = 0; x < table_.size(); ++x) v += probability(x) * (table_[x] - m) * (table_[x] - m);
  return v;
}

double HoeffdingKernel::at(std::span<const std::size_t> symbols) const {
  std::size_t idx = 0;
  for (std::size_t s : symbols) idx = idx * alphabet + s;
  return table[idx];
}

double HoeffdingKernel::at_full(const ExactModel& model, std::size_t full_index) const {
  std::size_t idx = 0;
  for (std::size_t i : index_set) idx = idx * alphabet + model.digit(full_index, i);
  return table[idx];
}

namespace {

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

// E[f(X) | X_B = z] as a table over E^|B|.
std::vector<double> marginal(const ExactModel& model, std::span<const std::size_t> b) {
  const std::size_t k = model.alphabet();
  std::vector<double> out(ipow(k, b.size()), 0.0);
  const auto& w = model.weights();
  for (std::size_t x = 0; x < model.table().size(); ++x) {
    std::size_t idx = 0;
    double p = 1.0;
    for (std::size_t i = 0, pos = 0; i < model.n(); ++i) {
      const std::size_t d = model.digit(x, i);
      if (pos < b.size() && b[pos] == i) {
        idx = idx * k + d;
        ++pos;
      } else {
        p *= w[d];
      }
    }
    out[idx] += p * model.table()[x];
  }
  return out;
}

// g <- g - E_p g along axis p of a k-ary table with `dims` axes.
void subtract_axis_mean(std::vector<double>& g, std::size_t k, std::size_t dims, std::size_t p,
                        std::span<const double> w) {
  const std::size_t stride = ipow(k, dims - 1 - p);
  const std::size_t block = stride * k;
  for (std::size_t base = 0; base < g.size(); base += block)
    for (std::size_t off = 0; off < stride; ++off) {
      double m = 0.0;
      for (std::size_t s = 0; s < k; ++s) m += w[s] * g[base + off + s * stride];
      for (std::size_t s = 0; s < k; ++s) g[base + off + s * stride] -= m;
    }
}

void check_index_set(std::span<const std::size_t> b, std::size_t n) {
  require(!b.empty(), ErrorCode::InvalidArgument, "kernel index set must be nonempty");
  for (std::size_t a = 0; a < b.size(); ++a) {
    require(b[a] < n, ErrorCode::IndexOutOfRange, "kernel index outside [0, n)");
    require(a == 0 || b[a - 1] < b[a], ErrorCode::DuplicateIndex, "kernel index set must be strictly increasing");
  }
}

}  // namespace

HoeffdingKernel hoeffding_kernel(const ExactModel& model, std::span<const std::size_t> index_set) {
  check_index_set(index_set, model.n());
  HoeffdingKernel kernel{{index_set.begin(), index_set.end()}, model.alphabet(), marginal(model, index_set)};
  // Averaging Δ_i over X'_i turns it into E_i - S_i; the (-1)^k flips each
  // factor to S_i - E_i.
  for (std::size_t p = 0; p < index_set.size(); ++p)
    subtract_axis_mean(kernel.table, model.alphabet(), index_set.size(), p, model.weights());
  return kernel;
}

HoeffdingKernel hoeffding_kernel(const Functional& f, const Distribution& dist, std::size_t n,
                                 std::span<const std::size_t> index_set) {
  return hoeffding_kernel(ExactModel(f, dist, n), index_set);
}

DecompositionReport decompose(const ExactModel& model) {
  const std::size_t n = model.n();
  require(n <= 12, ErrorCode::ArityTooLarge, "exact decomposition limited to n <= 12");
  DecompositionReport report;
  report.mean = model.mean();
  const std::size_t count = (std::size_t{1} << n) - 1;
  report.kernels.resize(count);
  report.second_moments.resize(count);
  parallel_for(count, [&](std::size_t slot) {
    const std::uint64_t mask = slot + 1;
    std::vector<std::size_t> b;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1u) b.push_back(i);
    auto kernel = hoeffding_kernel(model, b);
    double m2 = 0.0;
    for (std::size_t idx = 0; idx < kernel.table.size(); ++idx) {
      double p = 1.0;
      for (std::size_t r = idx, pos = 0; pos < b.size(); ++pos, r /= model.alphabet())
        p *= model.weights()[r % model.alphabet()];
      m2 += p * kernel.table[idx] * kernel.table[idx];
    }
    report.kernels[slot] = std::move(kernel);
    report.second_moments[slot] = m2;
  });
  return report;
}

DecompositionReport decompose(const Functional& f, const Distribution& dist, std::size_t n) {
  return decompose(ExactModel(f, dist, n));
}

double degeneracy_violation(const HoeffdingKernel& kernel, std::span<const double> weights) {
  const std::size_t k = kernel.alphabet, dims = kernel.index_set.size();
  double worst = 0.0;
  for (std::size_t p = 0; p < dims; ++p) {
    const std::size_t stride = ipow(k, dims - 1 - p), block = stride * k;
    for (std::size_t base = 0; base < kernel.table.size(); base += block)
      for (std::size_t off = 0; off < stride; ++off) {
        double m = 0.0;
        for (std::size_t s = 0; s < k; ++s) m += weights[s] * kernel.table[base + off + s * stride];
        worst = std::max(worst, std::abs(m));
      }
  }
  return worst;
}

double reconstruction_residual(const DecompositionReport& report, const ExactModel& model) {
  double worst = 0.0;
  for (std::size_t x = 0; x < model.table().size(); ++x) {
    double v = report.mean;
    for (const auto& kernel : report.kernels) v += kernel.at_full(model, x);
    worst = std::max(worst, std::abs(v - model.table()[x]));
  }
  return worst;
}

std::vector<std::vector<double>> orthogonality_matrix(const DecompositionReport& report,
                                                      std::span<const double> weights) {
  const std::size_t count = report.kernels.size();
  const std::size_t k = weights.size();
  std::vector<std::vector<double>> m(count, std::vector<double>(count, 0.0));
  parallel_for(count, [&](std::size_t a) {
    const auto& ka = report.kernels[a];
    for (std::size_t b = 0; b <= a; ++b) {
      const auto& kb = report.kernels[b];
      // enumerate the union of the two index sets
      std::vector<std::size_t> u;
      std::set_union(ka.index_set.begin(), ka.index_set.end(), kb.index_set.begin(), kb.index_set.end(),
                     std::back_inserter(u));
      std::vector<std::size_t> digits(u.size(), 0), sa(ka.index_set.size()), sb(kb.index_set.size());
      double total = 0.0;
      for (std::size_t idx = 0; idx < ipow(k, u.size()); ++idx) {
        double p = 1.0;
        for (std::size_t r = idx, q = u.size(); q-- > 0; r /= k) {
          digits[q] = r % k;
          p *= weights[digits[q]];
        }
        for (std::size_t q = 0, ia = 0, ib = 0; q < u.size(); ++q) {
          if (ia < sa.size() && ka.index_set[ia] == u[q]) sa[ia++] = digits[q];
          if (ib < sb.size() && kb.index_set[ib] == u[q]) sb[ib++] = digits[q];
        }
        total += p * ka.at(sa) * kb.at(sb);
      }
      m[a][b] = total;
    }
  });
  for (std::size_t a = 0; a < count; ++a)
    for (std::size_t b = a + 1; b < count; ++b) m[a][b] = m[b][a];
  return m;
}

double variance_expansion(const DecompositionReport& report) {
  double v = 0.0;
  for (double m2 : report.second_moments) v += m2;
  return v;
}

double variance_lower_bound(const ExactModel& model) {
  double total = 0.0;
  for (std::size_t i = 0; i < model.n(); ++i) {
    const std::size_t b[] = {i};
    const auto kernel = hoeffding_kernel(model, b);
    for (std::size_t s = 0; s < model.alphabet(); ++s) total += model.weights()[s] * kernel.table[s] * kernel.table[s];
  }
  return total;
}

double efron_stein_upper(const ExactModel& model) {
  const auto& t = model.table();
  const auto& w = model.weights();
  double total = 0.0;
  for (std::size_t x = 0; x < t.size(); ++x) {
    const double px = model.probability(x);
    for (std::size_t i = 0; i < model.n(); ++i) {
      const std::size_t cleared = x - model.digit(x, i) * model.stride(i);
      for (std::size_t s = 0; s < w.size(); ++s) {
        const double d = t[x] - t[cleared + s * model.stride(i)];
        total += px * w[s] * d * d;
      }
    }
  }
  return 0.5 * total;
}

CovarianceIdentity covariance_identity(const ExactModel& f, const ExactModel& g) {
  const std::size_t n = f.n();
  require(g.n() == n && g.alphabet() == f.alphabet(), ErrorCode::ArityMismatch, "f and g must share E^n");
  require(n <= 12, ErrorCode::ArityTooLarge, "covariance identity limited to n <= 12");
  const auto& tf = f.table();
  const auto& tg = g.table();
  const std::size_t size = tf.size();
  require(static_cast<double>(size) * static_cast<double>(size) <= 1e10, ErrorCode::CapExceeded,
          "|E|^{2n} too large for the covariance identity");

  CovarianceIdentity out;
  const double mf = f.mean(), mg = g.mean();
  for (std::size_t x = 0; x < size; ++x) out.covariance += f.probability(x) * (tf[x] - mf) * (tg[x] - mg);

  // Mixed index of X^C: digits in C from x', the rest from x.
  auto mix = [&](std::size_t x, std::size_t xp, std::uint64_t c) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) idx += (((c >> i) & 1u) ? f.digit(xp, i) : f.digit(x, i)) * f.stride(i);
    return idx;
  };
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  std::vector<double> partial(size, 0.0);
  parallel_for(size, [&](std::size_t x) {
    const double px = f.probability(x);
    double acc = 0.0;
    for (std::size_t xp = 0; xp < size; ++xp) {
      const double p = px * f.probability(xp);
      for (std::uint64_t a = 0; a < full; ++a) {
        const double kap = kappa(n, static_cast<std::size_t>(std::popcount(a)));
        const std::size_t xa = mix(x, xp, a);
        for (std::size_t j = 0; j < n; ++j) {
          if ((a >> j) & 1u) continue;
          const std::uint64_t bit = std::uint64_t{1} << j;
          const double dg = tg[x] - tg[mix(x, xp, bit)];
          const double df = tf[xa] - tf[mix(x, xp, a | bit)];
          acc += p * kap * dg * df;
        }
      }
    }
    partial[x] = acc;
  });
  for (double v : partial) out.interpolation += v;
  out.interpolation *= 0.5;
  out.residual = std::abs(out.covariance - out.interpolation);
  return out;
}

VarianceSandwich variance_sandwich_mc(const FunctionalFactory& factory, const PointLaw& law, std::size_t n,
                                      const SandwichConfig& config, const SeedPolicy& seeds) {
  require(config.reps >= 2 && config.k_inner >= 2, ErrorCode::InvalidArgument, "sandwich needs reps, k_inner >= 2");
  struct Rep {
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
  };
  std::vector<Rep> reps(config.reps);
  parallel_for(config.reps, [&](std::size_t r) {
    auto integration = seeds.stream(r, Role::Integration);
    auto sx = seeds.stream(r, Role::X);
    auto sp = seeds.stream(r, Role::XPrime);
    auto si = seeds.stream(r, Role::Inner);
    const auto f = factory(integration);
    const auto x = law.sample(n, sx);
    const auto xp = law.sample(n, sp);
    reps[r].value = f->evaluate(x);

    const bool sym = f->symmetric();
    const std::size_t coords = sym ? 1 : n;
    double lower = 0.0, upper = 0.0;
    for (std::size_t i = 0; i < coords; ++i) {
      upper += f->replace_difference(x, i, xp[i]) * f->replace_difference(x, i, xp[i]);
      // E[Δ_i f(X',X) | X_i]: average over fresh X' of f(X') - f(X' with i <- X_i).
      RunningStats inner;
      for (std::size_t k = 0; k < config.k_inner; ++k) inner.add(f->replace_difference(law.sample(n, si), i, x[i]));
      lower += inner.mean() * inner.mean() - inner.variance() / static_cast<double>(config.k_inner);
    }
    const double scale = sym ? static_cast<double>(n) : 1.0;
    reps[r].lower = scale * lower;
    reps[r].upper = 0.5 * scale * upper;
  });
  std::vector<double> values(config.reps);
  RunningStats lower, upper;
  for (std::size_t r = 0; r < config.reps; ++r) {
    values[r] = reps[r].value;
    lower.add(reps[r].lower);
    upper.add(reps[r].upper);
  }
  return {variance_estimate(values), lower.mean_estimate(), upper.mean_estimate()};
}

}  // namespace bebp
