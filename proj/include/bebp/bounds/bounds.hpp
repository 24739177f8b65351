#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bebp/core/functional.hpp"
#include "bebp/core/rng.hpp"
#include "bebp/core/sample_space.hpp"
#include "bebp/core/stats.hpp"
#include "bebp/diffops/diffops.hpp"
#include "bebp/mc/mc.hpp"
#include "json.hpp"

namespace bebp {

// Strict subsets A of {0..n-1} with P(A) = κ_{n,A} / H_n.
class SubsetSampler {
 public:
  explicit SubsetSampler(std::size_t n);

  std::size_t n() const { return n_; }
  double harmonic() const { return harmonic_; }
  // P(|A| = a) = (1/(n-a)) / H_n.
  double size_probability(std::size_t a) const;
  std::size_t draw_size(RandomStream& stream) const;
  // member[i] = 1 for i in A; outside lists the complement in increasing order.
  void draw(RandomStream& stream, std::vector<std::uint8_t>& member, std::vector<std::size_t>& outside) const;

 private:
  std::size_t n_;
  double harmonic_;
  std::vector<double> cumulative_;
};

// x with the elements in A taken from xp.
Configuration substituted(const Configuration& x, const Configuration& xp, const std::vector<std::uint8_t>& member);

// t_A = Σ_{j∉A} Δ_j f(x,xp) Δ_j f(x^A,xp); the primed form takes |Δ_j f(x^A,xp)|.
struct TTerm {
  double t = 0.0;
  double t_prime = 0.0;
  // Σ_{j∉A} Δ_j f(x,xp)^2 |Δ_j f(x^A,xp)|.
  double mixed = 0.0;
};
TTerm t_term(const Functional& f, const Configuration& x, const Configuration& xp, const Configuration& xa,
             const std::vector<std::size_t>& outside);

// Inner Monte Carlo for one outer X: means and within-X variances of
// (H_n/2) t_A and (H_n/2) t'_A over k_inner draws of (X', A), plus the mean of H_n·mixed.
struct InnerTerms {
  double t_mean = 0.0;
  double t_var = 0.0;
  double t_prime_mean = 0.0;
  double t_prime_var = 0.0;
  double mixed_mean = 0.0;
  std::size_t k_inner = 0;
};
InnerTerms sample_T_terms(const Functional& f, const PointLaw& law, const Configuration& x, std::size_t k_inner,
                          RandomStream& inner);
InnerTerms sample_T_terms(const Functional& f, const PointLaw& law, std::size_t n, std::size_t k_inner,
                          RandomStream& x_stream, RandomStream& inner);

// Variance estimate that may go slightly negative; value is clamped at 0.
struct NestedVariance {
  double raw = 0.0;
  double value = 0.0;
  double se = 0.0;
};

// Between-X variance of inner means minus mean within-X variance / k_inner,
// with a bootstrap se over outer replications.
NestedVariance nested_variance(const std::vector<double>& means, const std::vector<double>& within, std::size_t k_inner,
                               std::size_t bootstrap, RandomStream& stream);

enum class TWhich { T, TPrime };

struct BoundConfig {
  std::size_t outer = 1000;
  std::size_t k_inner = 8;
  std::size_t bootstrap = 200;
  // Replace Σ_j by n × (j = 0) for symmetric functionals.
  bool use_symmetry = true;
};

NestedVariance estimate_var_conditional(const FunctionalFactory& factory, const PointLaw& law, std::size_t n,
                                        TWhich which, const BoundConfig& config, const SeedPolicy& seeds);

struct BoundReport {
  std::string functional;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t outer = 0;
  std::size_t k_inner = 0;
  bool symmetric_shortcut = false;

  Estimate mean_f;
  Estimate sigma2_hat;
  Estimate mean_T;
  Estimate mean_T_prime;
  NestedVariance var_ET_given_X;
  NestedVariance var_ETprime_given_X;
  // Σ_j E|Δ_j f|^3.
  Estimate third_moment_term;
  // E Σ_{j,A∌j} κ_{n,A} |f(X)| Δ_j f(X)^2 |Δ_j f(X^A)| with f centred.
  Estimate mixed_term;
  // Σ_j sqrt(E Δ_j f^6).
  Estimate sixth_moment_term;

  double kolmogorov_bound_intermed = 0.0;
  double kolmogorov_bound_intermed_se = 0.0;
  double kolmogorov_bound_loose = 0.0;
  double kolmogorov_bound_loose_se = 0.0;
  double wasserstein_bound = 0.0;
  double wasserstein_bound_se = 0.0;
  KolmogorovDistance empirical_dK;
  std::vector<double> values;
};

// Throws DegenerateVariance when σ̂² <= 2 se.
BoundReport kolmogorov_bound(const FunctionalFactory& factory, const PointLaw& law, std::size_t n,
                             const BoundConfig& config, const SeedPolicy& seeds);
// (1/σ²) sqrt(Var E[T|X]) + (1/(2σ³)) Σ_j E|Δ_j f|^3, from the same estimates.
double wasserstein_bound(const BoundReport& report);
double wasserstein_bound(const FunctionalFactory& factory, const PointLaw& law, std::size_t n,
                         const BoundConfig& config, const SeedPolicy& seeds);

struct GeometricConfig {
  std::size_t reps = 200;
  std::size_t random_candidates = 16;
  // Leading constant of the first bracket.
  double constant = 4.0 * std::sqrt(2.0);
  // Use an external variance estimate instead of the one from these reps.
  std::optional<Estimate> sigma2;
};

struct Candidate {
  std::string label;
  std::vector<RecombinationSelector> selectors;
  Estimate value;
};

struct GeometricBoundReport {
  std::string functional;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  double constant = 0.0;

  Estimate mean_f;
  Estimate sigma2_hat;
  // Candidate-set maxima: lower-confidence estimates of the suprema.
  Estimate b_n;
  Estimate b_prime_n;
  std::string b_n_argmax;
  std::string b_prime_n_argmax;
  std::vector<Candidate> b_candidates;
  std::vector<Candidate> b_prime_candidates;
  // E Δ_0 f(X)^4 and E|Δ_0 f(X)|^3.
  Estimate fourth_moment;
  Estimate third_moment;
  // max over |A| in the probed sizes of E|f(X) Δ_0 f(X^A)^3|, f centred.
  Estimate sup_mixed;
  std::size_t sup_mixed_size = 0;
  std::vector<std::size_t> probed_sizes;

  double first_term = 0.0;
  double second_term = 0.0;
  double third_term = 0.0;
  double bound = 0.0;
  double bound_se = 0.0;
  KolmogorovDistance empirical_dK;
  std::vector<double> values;
};

// Throws AsymmetricFunctional unless f is symmetric; needs n >= 3.
GeometricBoundReport geometric_bound(const FunctionalFactory& factory, const PointLaw& law, std::size_t n,
                                     const GeometricConfig& config, const SeedPolicy& seeds);

struct MomentCheck {
  double q = 0.0;
  double c_q = 0.0;
  Estimate lhs;
  Estimate rhs;
  double slack = 0.0;
  bool holds = false;
};

// c_q = 2^q (18 sqrt(q) q')^{q'} with 1/q + 1/q' = 1.
double rhee_talagrand_constant(double q);

// lhs = E|f - Ef|^q. For q = 2 the right side is the Efron-Stein form
// (n/2) E Δ_0 f^2; otherwise n^{q/2} c_q E|D_0 f|^q.
MomentCheck moment_bound_check(const FunctionalFactory& factory, const PointLaw& law, std::size_t n, double q,
                               std::size_t reps, const SeedPolicy& seeds);

nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const NestedVariance& v);
nlohmann::json to_json(const KolmogorovDistance& d);
nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const GeometricBoundReport& r);
nlohmann::json to_json(const MomentCheck& m);

}  // namespace bebp
