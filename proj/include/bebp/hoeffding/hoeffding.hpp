#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bebp/core/configuration.hpp"
#include "bebp/core/enumerate.hpp"
#include "bebp/core/functional.hpp"
#include "bebp/core/rng.hpp"
#include "bebp/core/sample_space.hpp"
#include "bebp/core/stats.hpp"

namespace bebp {

// κ_{n,A} for |A| = a < n.
double kappa(std::size_t n, std::size_t a);
// H_n = Σ_{a=0}^{n-1} 1/(n-a).
double harmonic(std::size_t n);

// f tabulated on E^n (coordinate 0 most significant) with the weights of dist.
class ExactModel {
 public:
  ExactModel(const Functional& f, const Distribution& dist, std::size_t n, std::uint64_t cap = kEnumerationCap);

  std::size_t n() const { return n_; }
  std::size_t alphabet() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& table() const { return table_; }
  std::size_t stride(std::size_t i) const { return strides_[i]; }
  std::size_t digit(std::size_t index, std::size_t i) const { return index / strides_[i] % weights_.size(); }
  double probability(std::size_t index) const;

  double mean() const;
  double variance() const;

 private:
  std::size_t n_;
  std::vector<double> weights_;
  std::vector<std::size_t> strides_;
  std::vector<double> table_;
};

// φ_B tabulated on E^|B|, first member of B most significant; entries are
// indexed by symbol indices, not symbol values.
struct HoeffdingKernel {
  std::vector<std::size_t> index_set;
  std::size_t alphabet = 0;
  std::vector<double> table;

  double at(std::span<const std::size_t> symbols) const;
  // φ_B evaluated at the coordinates of a full-length configuration index.
  double at_full(const ExactModel& model, std::size_t full_index) const;
};

struct DecompositionReport {
  double mean = 0.0;
  std::vector<HoeffdingKernel> kernels;  // all nonempty B, ordered by bitmask
  std::vector<double> second_moments;    // E[φ_B^2], parallel to kernels
};

// (-1)^k E[Δ_{i1}..Δ_{ik} f(X',X) | X], computed by applying the averaged
// one-coordinate difference (E_i - S_i) to the marginal table of f over B.
HoeffdingKernel hoeffding_kernel(const ExactModel& model, std::span<const std::size_t> index_set);
HoeffdingKernel hoeffding_kernel(const Functional& f, const Distribution& dist, std::size_t n,
                                 std::span<const std::size_t> index_set);

DecompositionReport decompose(const ExactModel& model);
DecompositionReport decompose(const Functional& f, const Distribution& dist, std::size_t n);

// Largest |conditional mean over one coordinate| of the kernel.
double degeneracy_violation(const HoeffdingKernel& kernel, std::span<const double> weights);
// max_x |mean + Σ_B φ_B(x_B) - f(x)|.
double reconstruction_residual(const DecompositionReport& report, const ExactModel& model);

// Exact E[φ_B φ_C] for every pair of kernels.
std::vector<std::vector<double>> orthogonality_matrix(const DecompositionReport& report,
                                                      std::span<const double> weights);

double variance_expansion(const DecompositionReport& report);

// Σ_i E[(E[Δ_i f(X',X)|X])^2] and (1/2) Σ_i E[Δ_i f(X,X')^2], exact.
double variance_lower_bound(const ExactModel& model);
double efron_stein_upper(const ExactModel& model);

// |Cov(f,g) - (1/2) Σ_{A⊊[n]} κ_{n,A} Σ_{j∉A} E[Δ_j g(X,X') Δ_j f(X^A,X')]|.
struct CovarianceIdentity {
  double covariance = 0.0;
  double interpolation = 0.0;
  double residual = 0.0;
};
CovarianceIdentity covariance_identity(const ExactModel& f, const ExactModel& g);

// Monte Carlo sandwich for cube or large-n laws.
struct VarianceSandwich {
  Estimate variance;
  Estimate lower;
  Estimate upper;
};

struct SandwichConfig {
  std::size_t reps = 200;
  std::size_t k_inner = 8;
};

// Uses the factor-n shortcut for symmetric functionals, an explicit Σ_i otherwise.
VarianceSandwich variance_sandwich_mc(const FunctionalFactory& factory, const PointLaw& law, std::size_t n,
                                      const SandwichConfig& config, const SeedPolicy& seeds);

}  // namespace bebp
