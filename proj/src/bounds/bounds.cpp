#include "bebp/bounds/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "bebp/core/error.hpp"
#include "bebp/core/parallel.hpp"

namespace bebp {

namespace {

const double kStein = std::sqrt(2.0 * std::numbers::pi) / 16.0;

// Lane tags for the auxiliary streams of one report.
constexpr std::uint64_t kBootstrapT = 1;
constexpr std::uint64_t kBootstrapTPrime = 2;
constexpr std::uint64_t kCandidates = 3;

void draw_into(const PointLaw& law, RandomStream& stream, Configuration& out) {
  for (std::size_t i = 0; i < out.size(); ++i) law.draw(stream, out.element(i));
}

// Standard error of sqrt(v) by the delta method, kept finite near zero.
double sqrt_se(const NestedVariance& v) {
  if (v.se <= 0.0) return 0.0;
  return v.se / (2.0 * std::sqrt(std::max(v.value, v.se)));
}

double sqrt_se(const Estimate& e) {
  if (e.se <= 0.0) return 0.0;
  return e.se / (2.0 * std::sqrt(std::max(e.value, e.se)));
}

void require_variance(const Estimate& s2) {
  require(s2.value > 2.0 * s2.se && s2.value > 0.0, ErrorCode::DegenerateVariance,
          "estimated variance is not distinguishable from zero");
}

KolmogorovDistance distance_if_enough(const std::vector<double>& values) {
  if (values.size() < 100) return {};
  const auto s = summarize(values);
  if (s.variance() <= 0.0) return {};
  return empirical_kolmogorov(values, true);
}

struct OuterRep {
  double value = 0.0;
  InnerTerms inner;
  double third = 0.0;
  std::vector<double> sixth;
};

std::vector<OuterRep> run_outer(const FunctionalFactory& factory, const PointLaw& law, std::size_t n,
                                const BoundConfig& config, const SeedPolicy& seeds, bool moments, bool& shortcut) {
  require(config.outer >= 30, ErrorCode::InvalidArgument, "need at least 30 outer replications");
  require(config.k_inner >= 2, ErrorCode::InvalidArgument, "need k_inner >= 2");
  require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
  std::vector<OuterRep> reps(config.outer);
  std::vector<std::uint8_t> symmetric(config.outer, 0);
  parallel_for(config.outer, [&](std::size_t r) {
    auto integration = seeds.stream(r, Role::Integration);
    auto sx = seeds.stream(r, Role::X);
    auto sp = seeds.stream(r, Role::XPrime);
    auto si = seeds.stream(r, Role::Inner);
    const auto f = factory(integration);
    const auto x = law.sample(n, sx);
    auto& rep = reps[r];
    rep.value = f->evaluate(x);
    rep.inner = sample_T_terms(*f, law, x, config.k_inner, si);
    if (!moments) return;
    const auto xp = law.sample(n, sp);
    const bool sym = config.use_symmetry && f->symmetric();
    symmetric[r] = sym;
    const std::size_t coords = sym ? 1 : n;
    const double scale = sym ? static_cast<double>(n) : 1.0;
    rep.sixth.resize(coords);
    for (std::size_t j = 0; j < coords; ++j) {
      const double d = std::fabs(f->replace_difference(x, j, xp[j]));
      rep.third += scale * d * d * d;
      rep.sixth[j] = d * d * d * d * d * d;
    }
  });
  shortcut = moments && std::all_of(symmetric.begin(), symmetric.end(), [](auto s) { return s != 0; });
  return reps;
}

RecombinationSelector alternating(std::size_t n, Source a, Source b) {
  RecombinationSelector s;
  for (std::size_t i = 0; i < n; ++i) s.choices.push_back(i % 2 == 0 ? a : b);
  return s;
}

std::string source_name(Source s) {
  switch (s) {
    case Source::Base: return "base";
    case Source::Prime: return "prime";
    case Source::Tilde: return "tilde";
  }
  return "?";
}

struct Pattern {
  std::string label;
  RecombinationSelector selector;
};

std::vector<Pattern> fixed_patterns(std::size_t n) {
  std::vector<Pattern> out;
  for (Source s : {Source::Base, Source::Prime, Source::Tilde})
    out.push_back({source_name(s), RecombinationSelector::constant(n, s)});
  const std::array<std::pair<Source, Source>, 6> pairs{{{Source::Base, Source::Tilde},
                                                        {Source::Tilde, Source::Base},
                                                        {Source::Base, Source::Prime},
                                                        {Source::Prime, Source::Base},
                                                        {Source::Tilde, Source::Prime},
                                                        {Source::Prime, Source::Tilde}}};
  for (const auto& [a, b] : pairs)
    out.push_back({"alt-" + source_name(a) + "-" + source_name(b), alternating(n, a, b)});
  return out;
}

RecombinationSelector random_selector(std::size_t n, RandomStream& stream) {
  RecombinationSelector s;
  for (std::size_t i = 0; i < n; ++i) s.choices.push_back(static_cast<Source>(stream.below(3)));
  return s;
}

std::vector<Candidate> make_candidates(std::size_t n, std::size_t arity, std::size_t random, RandomStream& stream) {
  std::vector<Candidate> out;
  const auto patterns = fixed_patterns(n);
  for (const auto& p : patterns) out.push_back({p.label, std::vector<RecombinationSelector>(arity, p.selector), {}});
  // Mixed base/tilde tuples: the Z slots see an independent copy of Y.
  for (std::size_t slot = 0; slot < arity; ++slot) {
    std::vector<RecombinationSelector> sel(arity, patterns[0].selector);
    sel[slot] = patterns[2].selector;
    std::string label;
    for (std::size_t k = 0; k < arity; ++k) label += (k ? "/" : "") + std::string(k == slot ? "tilde" : "base");
    out.push_back({label, sel, {}});
  }
  for (std::size_t k = 0; k < random; ++k) {
    std::vector<RecombinationSelector> sel;
    for (std::size_t a = 0; a < arity; ++a) sel.push_back(random_selector(n, stream));
    out.push_back({"random-" + std::to_string(k), sel, {}});
  }
  return out;
}

double fourth(double d) { return d * d * d * d; }

}  // namespace

SubsetSampler::SubsetSampler(std::size_t n) : n_(n), harmonic_(0.0) {
  require(n >= 1, ErrorCode::InvalidArgument, "SubsetSampler needs n >= 1");
  for (std::size_t a = 0; a < n; ++a) harmonic_ += 1.0 / static_cast<double>(n - a);
  double acc = 0.0;
  cumulative_.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    acc += size_probability(a);
    cumulative_[a] = acc;
  }
  cumulative_.back() = 1.0;
}

double SubsetSampler::size_probability(std::size_t a) const {
  if (a >= n_) return 0.0;
  return 1.0 / static_cast<double>(n_ - a) / harmonic_;
}

std::size_t SubsetSampler::draw_size(RandomStream& stream) const {
  const double u = stream.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), n_ - 1);
}

void SubsetSampler::draw(RandomStream& stream, std::vector<std::uint8_t>& member,
                         std::vector<std::size_t>& outside) const {
  const std::size_t k = n_ - draw_size(stream);
  member.assign(n_, 1);
  // Floyd's algorithm picks the complement uniformly among k-subsets.
  for (std::size_t j = n_ - k; j < n_; ++j) {
    const auto t = static_cast<std::size_t>(stream.below(j + 1));
    if (member[t]) member[t] = 0;
    else member[j] = 0;
  }
  outside.clear();
  for (std::size_t i = 0; i < n_; ++i)
    if (!member[i]) outside.push_back(i);
}

Configuration substituted(const Configuration& x, const Configuration& xp, const std::vector<std::uint8_t>& member) {
  require(x.size() == xp.size() && member.size() == x.size(), ErrorCode::LengthMismatch, "substituted: lengths differ");
  Configuration out = x;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (member[i]) out.set(i, xp[i]);
  return out;
}

TTerm t_term(const Functional& f, const Configuration& x, const Configuration& xp, const Configuration& xa,
             const std::vector<std::size_t>& outside) {
  TTerm out;
  for (std::size_t j : outside) {
    const double d = f.replace_difference(x, j, xp[j]);
    if (d == 0.0) continue;
    const double da = f.replace_difference(xa, j, xp[j]);
    out.t += d * da;
    out.t_prime += d * std::fabs(da);
    out.mixed += d * d * std::fabs(da);
  }
  return out;
}

InnerTerms sample_T_terms(const Functional& f, const PointLaw& law, const Configuration& x, std::size_t k_inner,
                          RandomStream& inner) {
  require(k_inner >= 2, ErrorCode::InvalidArgument, "sample_T_terms needs k_inner >= 2");
  const std::size_t n = x.size();
  const SubsetSampler sampler(n);
  const double half_h = 0.5 * sampler.harmonic();
  Configuration xp(x.width(), n), xa(x.width(), n);
  std::vector<std::uint8_t> member;
  std::vector<std::size_t> outside;
  RunningStats t, tp, mixed;
  for (std::size_t k = 0; k < k_inner; ++k) {
    draw_into(law, inner, xp);
    sampler.draw(inner, member, outside);
    // x^A agrees with xp on A and with x off A.
    xa = xp;
    for (std::size_t j : outside) xa.set(j, x[j]);
    const auto term = t_term(f, x, xp, xa, outside);
    t.add(half_h * term.t);
    tp.add(half_h * term.t_prime);
    mixed.add(sampler.harmonic() * term.mixed);
  }
  return {t.mean(), t.variance(), tp.mean(), tp.variance(), mixed.mean(), k_inner};
}

InnerTerms sample_T_terms(const Functional& f, const PointLaw& law, std::size_t n, std::size_t k_inner,
                          RandomStream& x_stream, RandomStream& inner) {
  return sample_T_terms(f, law, law.sample(n, x_stream), k_inner, inner);
}

NestedVariance nested_variance(const std::vector<double>& means, const std::vector<double>& within, std::size_t k_inner,
                               std::size_t bootstrap, RandomStream& stream) {
  require(means.size() == within.size() && means.size() >= 2, ErrorCode::TooFewSamples,
          "nested variance needs two or more outer samples");
  const std::size_t r = means.size();
  auto estimate = [&](auto index) {
    RunningStats m;
    double w = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      m.add(means[index(i)]);
      w += within[index(i)];
    }
    return m.variance() - w / static_cast<double>(r) / static_cast<double>(k_inner);
  };
  NestedVariance out;
  out.raw = estimate([](std::size_t i) { return i; });
  out.value = std::max(0.0, out.raw);
  RunningStats boot;
  std::vector<std::size_t> pick(r);
  for (std::size_t b = 0; b < bootstrap; ++b) {
    for (auto& p : pick) p = static_cast<std::size_t>(stream.below(r));
    boot.add(estimate([&](std::size_t i) { return pick[i]; }));
  }
  out.se = std::sqrt(boot.variance());
  return out;
}

NestedVariance estimate_var_conditional(const FunctionalFactory& factory, const PointLaw& law, std::size_t n,
                                        TWhich which, const BoundConfig& config, const SeedPolicy& seeds) {
  bool shortcut = false;
  const auto reps = run_outer(factory, law, n, config, seeds, false, shortcut);
  std::vector<double> means, within;
  for (const auto& rep : reps) {
    means.push_back(which == TWhich::T ? rep.inner.t_mean : rep.inner.t_prime_mean);
    within.push_back(which == TWhich::T ? rep.inner.t_var : rep.inner.t_prime_var);
  }
  auto boot = seeds.stream(0, Role::Selector, which == TWhich::T ? kBootstrapT : kBootstrapTPrime);
  return nested_variance(means, within, config.k_inner, config.bootstrap, boot);
}

BoundReport kolmogorov_bound(const FunctionalFactory& factory, const PointLaw& law, std::size_t n,
                             const BoundConfig& config, const SeedPolicy& seeds) {
  BoundReport out;
  out.n = n;
  out.seed = seeds.master_seed();
  out.outer = config.outer;
  out.k_inner = config.k_inner;
  const auto reps = run_outer(factory, law, n, config, seeds, true, out.symmetric_shortcut);
  {
    auto integration = seeds.stream(0, Role::Integration);
    out.functional = factory(integration)->name();
  }

  RunningStats mean_t, mean_tp, third;
  std::vector<double> t_means, t_within, tp_means, tp_within;
  std::vector<RunningStats> sixth(reps.front().sixth.size());
  for (const auto& rep : reps) {
    out.values.push_back(rep.value);
    mean_t.add(rep.inner.t_mean);
    mean_tp.add(rep.inner.t_prime_mean);
    t_means.push_back(rep.inner.t_mean);
    t_within.push_back(rep.inner.t_var);
    tp_means.push_back(rep.inner.t_prime_mean);
    tp_within.push_back(rep.inner.t_prime_var);
    third.add(rep.third);
    for (std::size_t j = 0; j < sixth.size(); ++j) sixth[j].add(rep.sixth[j]);
  }
  out.mean_f = summarize(out.values).mean_estimate();
  out.sigma2_hat = variance_estimate(out.values);
  require_variance(out.sigma2_hat);

  out.mean_T = mean_t.mean_estimate();
  out.mean_T_prime = mean_tp.mean_estimate();
  auto boot_t = seeds.stream(0, Role::Selector, kBootstrapT);
  auto boot_tp = seeds.stream(0, Role::Selector, kBootstrapTPrime);
  out.var_ET_given_X = nested_variance(t_means, t_within, config.k_inner, config.bootstrap, boot_t);
  out.var_ETprime_given_X = nested_variance(tp_means, tp_within, config.k_inner, config.bootstrap, boot_tp);
  out.third_moment_term = third.mean_estimate();

  RunningStats mixed;
  for (const auto& rep : reps) mixed.add(std::fabs(rep.value - out.mean_f.value) * rep.inner.mixed_mean);
  out.mixed_term = mixed.mean_estimate();

  const double scale = out.symmetric_shortcut ? static_cast<double>(n) : 1.0;
  double sixth_se2 = 0.0;
  for (const auto& s : sixth) {
    const Estimate e = s.mean_estimate();
    out.sixth_moment_term.value += scale * std::sqrt(e.value);
    sixth_se2 += std::pow(scale * sqrt_se(e), 2);
  }
  out.sixth_moment_term.se = std::sqrt(sixth_se2);

  const double s2 = out.sigma2_hat.value, s2se = out.sigma2_hat.se;
  const double a = std::sqrt(out.var_ET_given_X.value), b = std::sqrt(out.var_ETprime_given_X.value);
  const double ase = sqrt_se(out.var_ET_given_X), bse = sqrt_se(out.var_ETprime_given_X);
  const double s3 = std::pow(s2, 1.5), s4 = s2 * s2;
  const double third_v = out.third_moment_term.value, third_se = out.third_moment_term.se;

  out.kolmogorov_bound_intermed = (a + b) / s2 + out.mixed_term.value / (4.0 * s4) + kStein * third_v / s3;
  out.kolmogorov_bound_loose = (a + b) / s2 + out.sixth_moment_term.value / (4.0 * s3) + kStein * third_v / s3;
  out.wasserstein_bound = a / s2 + third_v / (2.0 * s3);

  // First-order propagation, including the uncertainty in σ̂².
  const double d_intermed_ds2 = -(a + b) / s4 - out.mixed_term.value / (2.0 * s4 * s2) - 1.5 * kStein * third_v / (s3 * s2);
  out.kolmogorov_bound_intermed_se =
      std::sqrt(std::pow((ase + bse) / s2, 2) + std::pow(out.mixed_term.se / (4.0 * s4), 2) +
                std::pow(kStein * third_se / s3, 2) + std::pow(d_intermed_ds2 * s2se, 2));
  const double d_loose_ds2 = -(a + b) / s4 - 1.5 * out.sixth_moment_term.value / (4.0 * s3 * s2) -
                             1.5 * kStein * third_v / (s3 * s2);
  out.kolmogorov_bound_loose_se =
      std::sqrt(std::pow((ase + bse) / s2, 2) + std::pow(out.sixth_moment_term.se / (4.0 * s3), 2) +
                std::pow(kStein * third_se / s3, 2) + std::pow(d_loose_ds2 * s2se, 2));
  const double d_w_ds2 = -a / s4 - 1.5 * third_v / (2.0 * s3 * s2);
  out.wasserstein_bound_se = std::sqrt(std::pow(ase / s2, 2) + std::pow(third_se / (2.0 * s3), 2) +
                                       std::pow(d_w_ds2 * s2se, 2));
  out.empirical_dK = distance_if_enough(out.values);
  return out;
}

double wasserstein_bound(const BoundReport& report) { return report.wasserstein_bound; }

double wasserstein_bound(const FunctionalFactory& factory, const PointLaw& law, std::size_t n,
                         const BoundConfig& config, const SeedPolicy& seeds) {
  return wasserstein_bound(kolmogorov_bound(factory, law, n, config, seeds));
}

GeometricBoundReport geometric_bound(const FunctionalFactory& factory, const PointLaw& law, std::size_t n,
                                     const GeometricConfig& config, const SeedPolicy& seeds) {
  require(n >= 3, ErrorCode::InvalidArgument, "geometric bound needs n >= 3");
  require(config.reps >= 2, ErrorCode::InvalidArgument, "geometric bound needs reps >= 2");
  GeometricBoundReport out;
  out.n = n;
  out.seed = seeds.master_seed();
  out.reps = config.reps;
  out.constant = config.constant;
  {
    auto integration = seeds.stream(0, Role::Integration);
    const auto f0 = factory(integration);
    require(f0->symmetric(), ErrorCode::AsymmetricFunctional, "geometric bound needs a symmetric functional");
    out.functional = f0->name();
  }

  auto selector_stream = seeds.stream(0, Role::Selector, kCandidates);
  out.b_candidates = make_candidates(n, 2, config.random_candidates, selector_stream);
  out.b_prime_candidates = make_candidates(n, 3, config.random_candidates, selector_stream);
  for (std::size_t a : {std::size_t{0}, (n - 1) / 4, (n - 1) / 2, 3 * (n - 1) / 4, n - 1})
    if (std::find(out.probed_sizes.begin(), out.probed_sizes.end(), a) == out.probed_sizes.end())
      out.probed_sizes.push_back(a);

  const std::size_t nb = out.b_candidates.size(), nbp = out.b_prime_candidates.size(), ns = out.probed_sizes.size();
  struct Rep {
    double value = 0.0, fourth = 0.0, third = 0.0;
    std::vector<double> b, bp, cube;
  };
  std::vector<Rep> reps(config.reps);
  const std::array<std::size_t, 2> i01{0, 1}, i02{0, 2};
  parallel_for(config.reps, [&](std::size_t r) {
    auto integration = seeds.stream(r, Role::Integration);
    auto sx = seeds.stream(r, Role::X);
    auto sp = seeds.stream(r, Role::XPrime);
    auto st = seeds.stream(r, Role::XTilde);
    const auto f = factory(integration);
    const auto x = law.sample(n, sx), xp = law.sample(n, sp), xt = law.sample(n, st);
    auto& rep = reps[r];
    rep.value = f->evaluate(x);
    const double d0 = f->replace_difference(x, 0, xp[0]);
    rep.fourth = fourth(d0);
    rep.third = std::fabs(d0 * d0 * d0);

    rep.b.resize(nb);
    for (std::size_t c = 0; c < nb; ++c) {
      const auto& sel = out.b_candidates[c].selectors;
      const double d = f->replace_difference(recombine(x, xp, xt, sel[1]), 0, xp[0]);
      if (d == 0.0) continue;
      if (delta_iterated(*f, recombine(x, xp, xt, sel[0]), xp, i01) != 0.0) rep.b[c] = fourth(d);
    }
    rep.bp.resize(nbp);
    for (std::size_t c = 0; c < nbp; ++c) {
      const auto& sel = out.b_prime_candidates[c].selectors;
      const double d = f->replace_difference(recombine(x, xp, xt, sel[2]), 1, xp[1]);
      if (d == 0.0) continue;
      if (delta_iterated(*f, recombine(x, xp, xt, sel[0]), xp, i01) == 0.0) continue;
      if (delta_iterated(*f, recombine(x, xp, xt, sel[1]), xp, i02) != 0.0) rep.bp[c] = fourth(d);
    }

    rep.cube.resize(ns);
    Configuration xa = x;
    std::size_t filled = 0;
    for (std::size_t s = 0; s < ns; ++s) {
      // A = {1..a}: the symmetric functional only sees its size.
      for (; filled < out.probed_sizes[s]; ++filled) xa.set(filled + 1, xp[filled + 1]);
      const double da = std::fabs(f->replace_difference(xa, 0, xp[0]));
      rep.cube[s] = da * da * da;
    }
  });

  RunningStats fourth_s, third_s;
  std::vector<RunningStats> b(nb), bp(nbp), mixed(ns);
  for (const auto& rep : reps) {
    out.values.push_back(rep.value);
    fourth_s.add(rep.fourth);
    third_s.add(rep.third);
    for (std::size_t c = 0; c < nb; ++c) b[c].add(rep.b[c]);
    for (std::size_t c = 0; c < nbp; ++c) bp[c].add(rep.bp[c]);
  }
  out.mean_f = summarize(out.values).mean_estimate();
  out.sigma2_hat = config.sigma2 ? *config.sigma2 : variance_estimate(out.values);
  require_variance(out.sigma2_hat);
  for (const auto& rep : reps)
    for (std::size_t s = 0; s < ns; ++s) mixed[s].add(std::fabs(rep.value - out.mean_f.value) * rep.cube[s]);

  auto take_max = [](std::vector<Candidate>& cands, const std::vector<RunningStats>& stats, std::string& label) {
    Estimate best{-1.0, 0.0};
    for (std::size_t c = 0; c < cands.size(); ++c) {
      cands[c].value = stats[c].mean_estimate();
      if (cands[c].value.value > best.value) {
        best = cands[c].value;
        label = cands[c].label;
      }
    }
    return best;
  };
  out.b_n = take_max(out.b_candidates, b, out.b_n_argmax);
  out.b_prime_n = take_max(out.b_prime_candidates, bp, out.b_prime_n_argmax);
  out.fourth_moment = fourth_s.mean_estimate();
  out.third_moment = third_s.mean_estimate();
  out.sup_mixed = {-1.0, 0.0};
  for (std::size_t s = 0; s < ns; ++s)
    if (mixed[s].mean() > out.sup_mixed.value) {
      out.sup_mixed = mixed[s].mean_estimate();
      out.sup_mixed_size = out.probed_sizes[s];
    }

  const double nn = static_cast<double>(n);
  const double s2 = out.sigma2_hat.value, s3 = std::pow(s2, 1.5), s4 = s2 * s2;
  const double lead = config.constant * std::sqrt(nn) / s2;
  const double r1 = std::sqrt(nn * out.b_n.value), r2 = std::sqrt(nn * nn * out.b_prime_n.value),
               r3 = std::sqrt(out.fourth_moment.value);
  out.first_term = lead * (r1 + r2 + r3);
  out.second_term = nn / (4.0 * s4) * out.sup_mixed.value;
  out.third_term = kStein / s3 * nn * out.third_moment.value;
  out.bound = out.first_term + out.second_term + out.third_term;

  const double r1se = std::sqrt(nn) * sqrt_se(out.b_n), r2se = nn * sqrt_se(out.b_prime_n),
               r3se = sqrt_se(out.fourth_moment);
  const double d_ds2 = -out.first_term / s2 - 2.0 * out.second_term / s2 - 1.5 * out.third_term / s2;
  out.bound_se = std::sqrt(std::pow(lead * r1se, 2) + std::pow(lead * r2se, 2) + std::pow(lead * r3se, 2) +
                           std::pow(nn / (4.0 * s4) * out.sup_mixed.se, 2) +
                           std::pow(kStein / s3 * nn * out.third_moment.se, 2) +
                           std::pow(d_ds2 * out.sigma2_hat.se, 2));
  out.empirical_dK = distance_if_enough(out.values);
  return out;
}

double rhee_talagrand_constant(double q) {
  require(q >= 1.0, ErrorCode::InvalidArgument, "moment order q must be >= 1");
  if (q == 2.0) return 0.5;
  if (q == 1.0) return std::numeric_limits<double>::infinity();
  const double qp = q / (q - 1.0);
  return std::pow(2.0, q) * std::pow(18.0 * std::sqrt(q) * qp, qp);
}

MomentCheck moment_bound_check(const FunctionalFactory& factory, const PointLaw& law, std::size_t n, double q,
                               std::size_t reps, const SeedPolicy& seeds) {
  require(reps >= 2, ErrorCode::TooFewSamples, "moment check needs reps >= 2");
  MomentCheck out;
  out.q = q;
  out.c_q = rhee_talagrand_constant(q);
  std::vector<double> values(reps), diffs(reps);
  parallel_for(reps, [&](std::size_t r) {
    auto integration = seeds.stream(r, Role::Integration);
    auto sx = seeds.stream(r, Role::X);
    auto sp = seeds.stream(r, Role::XPrime);
    const auto f = factory(integration);
    const auto x = law.sample(n, sx);
    values[r] = f->evaluate(x);
    if (q == 2.0) {
      const auto xp = law.sample(n, sp);
      const double d = f->replace_difference(x, 0, xp[0]);
      diffs[r] = d * d;
    } else {
      diffs[r] = std::pow(std::fabs(f->delete_difference(x, 0)), q);
    }
  });
  const double mean = summarize(values).mean();
  RunningStats lhs;
  for (double v : values) lhs.add(std::pow(std::fabs(v - mean), q));
  out.lhs = lhs.mean_estimate();
  const auto d = summarize(diffs).mean_estimate();
  const double factor = std::pow(static_cast<double>(n), q / 2.0) * out.c_q;
  out.rhs = {factor * d.value, factor * d.se};
  out.slack = out.rhs.value - out.lhs.value;
  out.holds = out.lhs.value <= out.rhs.value + 3.0 * std::hypot(out.lhs.se, out.rhs.se);
  return out;
}

nlohmann::json to_json(const Estimate& e) { return {{"value", e.value}, {"se", e.se}}; }

nlohmann::json to_json(const NestedVariance& v) { return {{"value", v.value}, {"raw", v.raw}, {"se", v.se}}; }

nlohmann::json to_json(const KolmogorovDistance& d) {
  return {{"value", d.value}, {"dkw_band", d.band}, {"samples", d.samples}};
}

nlohmann::json to_json(const BoundReport& r) {
  return {{"kind", "kolmogorov_bound"},
          {"functional", r.functional},
          {"n", r.n},
          {"seed", r.seed},
          {"outer", r.outer},
          {"k_inner", r.k_inner},
          {"symmetric_shortcut", r.symmetric_shortcut},
          {"mean_f", to_json(r.mean_f)},
          {"sigma2_hat", to_json(r.sigma2_hat)},
          {"mean_T", to_json(r.mean_T)},
          {"mean_T_prime", to_json(r.mean_T_prime)},
          {"var_ET_given_X", to_json(r.var_ET_given_X)},
          {"var_ETprime_given_X", to_json(r.var_ETprime_given_X)},
          {"third_moment_term", to_json(r.third_moment_term)},
          {"mixed_term", to_json(r.mixed_term)},
          {"sixth_moment_term", to_json(r.sixth_moment_term)},
          {"kolmogorov_bound_intermed", {{"value", r.kolmogorov_bound_intermed}, {"se", r.kolmogorov_bound_intermed_se}}},
          {"kolmogorov_bound_loose", {{"value", r.kolmogorov_bound_loose}, {"se", r.kolmogorov_bound_loose_se}}},
          {"wasserstein_bound", {{"value", r.wasserstein_bound}, {"se", r.wasserstein_bound_se}}},
          {"empirical_dK", to_json(r.empirical_dK)}};
}

nlohmann::json to_json(const GeometricBoundReport& r) {
  auto candidates = [](const std::vector<Candidate>& cs) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : cs) out.push_back({{"label", c.label}, {"estimate", to_json(c.value)}});
    return out;
  };
  return {{"kind", "geometric_bound"},
          {"functional", r.functional},
          {"n", r.n},
          {"seed", r.seed},
          {"reps", r.reps},
          {"constant", r.constant},
          {"mean_f", to_json(r.mean_f)},
          {"sigma2_hat", to_json(r.sigma2_hat)},
          {"b_n", {{"estimate", to_json(r.b_n)}, {"argmax", r.b_n_argmax}, {"candidates", r.b_candidates.size()},
                   {"lower_confidence", true}}},
          {"b_prime_n", {{"estimate", to_json(r.b_prime_n)}, {"argmax", r.b_prime_n_argmax},
                         {"candidates", r.b_prime_candidates.size()}, {"lower_confidence", true}}},
          {"b_candidates", candidates(r.b_candidates)},
          {"b_prime_candidates", candidates(r.b_prime_candidates)},
          {"fourth_moment", to_json(r.fourth_moment)},
          {"third_moment", to_json(r.third_moment)},
          {"sup_mixed", {{"estimate", to_json(r.sup_mixed)}, {"size", r.sup_mixed_size}, {"probed_sizes", r.probed_sizes}}},
          {"terms", {r.first_term, r.second_term, r.third_term}},
          {"bound", {{"value", r.bound}, {"se", r.bound_se}}},
          {"empirical_dK", to_json(r.empirical_dK)}};
}

nlohmann::json to_json(const MomentCheck& m) {
  return {{"q", m.q}, {"c_q", m.c_q}, {"lhs", to_json(m.lhs)}, {"rhs", to_json(m.rhs)}, {"slack", m.slack},
          {"holds", m.holds}};
}

}  // namespace bebp
