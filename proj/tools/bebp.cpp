#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bebp/bounds/bounds.hpp"
#include "bebp/core/enumerate.hpp"
#include "bebp/core/error.hpp"
#include "bebp/core/parallel.hpp"
#include "bebp/diffops/diffops.hpp"
#include "bebp/geometry/covering.hpp"
#include "bebp/geometry/nearest_neighbor.hpp"
#include "bebp/geometry/voronoi.hpp"
#include "bebp/hoeffding/hoeffding.hpp"
#include "bebp/mc/mc.hpp"
#include "bebp/stein/stein.hpp"
#include "json.hpp"

using namespace bebp;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kIdentity = 3, kDegenerate = 4 };

const std::vector<std::string> kFunctionals{"sum",         "pairwise-products", "constant", "voronoi",
                                            "covering-volume", "isolated-count",  "nn-distance"};
const std::vector<std::string> kShapes{"ball", "box", "koch", "half-interval"};

struct Common {
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string output;
  std::size_t threads = 0;
};

struct ModelOptions {
  std::string functional = "sum";
  std::string shape = "ball";
  double radius = 0.3;
  int depth = 4;
  std::size_t grid_m = 200000;
  double grain_radius = 0.5;
};

struct Model {
  FunctionalFactory factory;
  std::shared_ptr<PointLaw> law;
};

ShapeSet make_shape(const ModelOptions& o) {
  if (o.shape == "ball") return ShapeSet::ball({0.5, 0.5}, o.radius);
  if (o.shape == "box") return ShapeSet::box({0.5 - o.radius, 0.5 - o.radius}, {0.5 + o.radius, 0.5 + o.radius});
  if (o.shape == "koch") return ShapeSet::koch(o.depth);
  if (o.shape == "half-interval") return ShapeSet::half_interval(o.radius);
  fail(ErrorCode::UnknownId, "unknown shape '" + o.shape + "'");
}

Model make_model(const ModelOptions& o, std::size_t n) {
  const auto signs = std::make_shared<Distribution>(Distribution::uniform(SampleSpace::numeric_alphabet({-1, 1})));
  if (o.functional == "sum")
    return {fixed_functional(std::make_shared<functionals::Sum>(1.0 / std::sqrt(static_cast<double>(n)))), signs};
  if (o.functional == "pairwise-products")
    return {fixed_functional(std::make_shared<functionals::PairwiseProducts>(1.0 / static_cast<double>(n))), signs};
  if (o.functional == "constant") return {fixed_functional(std::make_shared<functionals::Constant>(1.0)), signs};
  if (o.functional == "voronoi") {
    const auto K = make_shape(o);
    return {voronoi_factory(K, o.grid_m), std::make_shared<Distribution>(Distribution::uniform(SampleSpace::cube(K.dim())))};
  }
  if (o.functional == "covering-volume")
    return {covering_volume_factory(2, n), std::make_shared<GermGrainLaw>(2, n, RadiusLaw::constant(o.grain_radius))};
  if (o.functional == "isolated-count")
    return {fixed_functional(std::make_shared<IsolatedCount>(2)),
            std::make_shared<GermGrainLaw>(2, n, RadiusLaw::constant(o.grain_radius))};
  if (o.functional == "nn-distance")
    return {fixed_functional(std::make_shared<NearestNeighborDistance>()),
            std::make_shared<Distribution>(Distribution::uniform(SampleSpace::cube(2)))};
  fail(ErrorCode::UnknownId, "unknown functional '" + o.functional + "'");
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
  sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  sub->add_option("--output,-o", c.output, "output file (stdout when empty)");
  sub->add_option("--threads", c.threads, "worker threads, 0 = hardware")->capture_default_str();
}

void add_model(CLI::App* sub, ModelOptions& o) {
  sub->add_option("--functional", o.functional, "functional id")->check(CLI::IsMember(kFunctionals))->capture_default_str();
  sub->add_option("--shape", o.shape, "shape id for voronoi")->check(CLI::IsMember(kShapes))->capture_default_str();
  sub->add_option("--radius", o.radius, "ball radius, box half-width or half-interval threshold")->capture_default_str();
  sub->add_option("--depth", o.depth, "Koch depth")->check(CLI::Range(0, 7))->capture_default_str();
  sub->add_option("--grid-m", o.grid_m, "integration grid size")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--grain-radius", o.grain_radius, "covering grain radius")->capture_default_str();
}

json envelope(const CLI::App* sub, const Common& c, json result) {
  return {{"command", sub->get_name()},
          {"seed", c.seed},
          {"config", sub->config_to_str(true, false)},
          {"result", std::move(result)},
          {"metadata", {{"tool", "bebp"}, {"format_version", 1}}}};
}

void emit(const Common& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.output);
  require(static_cast<bool>(f), ErrorCode::InvalidArgument, "cannot open output file " + c.output);
  f << text;
}

void emit_json(const CLI::App* sub, const Common& c, json result) { emit(c, envelope(sub, c, std::move(result)).dump(2) + "\n"); }

void emit_rows(const CLI::App* sub, const Common& c, const std::vector<CsvRow>& rows, json result) {
  if (c.format == "csv") {
    std::ostringstream s;
    write_csv(s, rows);
    emit(c, s.str());
  } else {
    emit_json(sub, c, std::move(result));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normal approximation bounds for functionals of independent samples"};
  app.set_config("--config", "", "INI file; sections are subcommand names, flags override it");
  app.require_subcommand(1);

  Common common;
  ModelOptions model;

  // verify-identities
  std::size_t alphabet = 3, arity = 3, trials = 100;
  double tolerance = 1e-10;
  auto* verify = app.add_subcommand("verify-identities", "exact identity suite on random tables");
  verify->add_option("--alphabet", alphabet, "alphabet size")->check(CLI::Range(2, 6))->capture_default_str();
  verify->add_option("--n", arity, "arity")->check(CLI::Range(1, 6))->capture_default_str();
  verify->add_option("--trials", trials, "random functionals")->capture_default_str();
  verify->add_option("--tolerance", tolerance, "maximum residual")->capture_default_str();
  add_common(verify, common);

  // stein-check
  stein::SweepConfig sweep;
  auto* stein_cmd = app.add_subcommand("stein-check", "sweep the Stein solution inequalities");
  stein_cmd->add_option("--lo", sweep.lo)->capture_default_str();
  stein_cmd->add_option("--hi", sweep.hi)->capture_default_str();
  stein_cmd->add_option("--step", sweep.step)->check(CLI::PositiveNumber)->capture_default_str();
  add_common(stein_cmd, common);

  // bound
  std::size_t bound_n = 256, reps = 2000, k_inner = 8;
  std::string kind = "kolmogorov";
  double constant = 4.0 * std::sqrt(2.0);
  auto* bound = app.add_subcommand("bound", "estimate a normal approximation bound");
  bound->add_option("--n", bound_n, "sample size")->check(CLI::Range(1, 1 << 20))->capture_default_str();
  bound->add_option("--reps", reps, "outer replications")->check(CLI::Range(30, 1 << 24))->capture_default_str();
  bound->add_option("--k-inner", k_inner, "inner samples per replication")->check(CLI::Range(2, 1 << 16))->capture_default_str();
  bound->add_option("--kind", kind, "kolmogorov or geometric")->check(CLI::IsMember({"kolmogorov", "geometric"}))->capture_default_str();
  bound->add_option("--constant", constant, "leading constant of the geometric bound")->capture_default_str();
  add_model(bound, model);
  add_common(bound, common);

  // rates, voronoi, covering
  std::vector<std::size_t> n_list{250, 500, 1000, 2000};
  std::size_t bound_reps = 0;
  auto* rates = app.add_subcommand("rates", "variance and distance to normal across sample sizes");
  auto* voronoi = app.add_subcommand("voronoi", "Voronoi volume experiment with geometric bounds");
  auto* covering = app.add_subcommand("covering", "Boolean model volume and isolated grains");
  for (auto* sub : {rates, voronoi, covering}) {
    sub->add_option("--n", n_list, "sample sizes, comma separated")->delimiter(',')->capture_default_str();
    sub->add_option("--reps", reps, "replications per size")->capture_default_str();
    add_common(sub, common);
  }
  add_model(rates, model);
  for (auto* sub : {voronoi}) {
    sub->add_option("--shape", model.shape, "shape id")->check(CLI::IsMember(kShapes))->capture_default_str();
    sub->add_option("--radius", model.radius)->capture_default_str();
    sub->add_option("--depth", model.depth)->check(CLI::Range(0, 7))->capture_default_str();
    sub->add_option("--grid-m", model.grid_m)->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--bound-reps", bound_reps, "replications for the geometric bound, 0 to skip")->capture_default_str();
  }
  covering->add_option("--grain-radius", model.grain_radius)->capture_default_str();

  // hoeffding
  std::string weights = "uniform";
  std::string hfunctional = "sum";
  auto* hoeffding = app.add_subcommand("hoeffding", "exact Hoeffding decomposition on a finite alphabet");
  hoeffding->add_option("--functional", hfunctional, "sum, pairwise-products, max or table")
      ->check(CLI::IsMember({"sum", "pairwise-products", "max", "table"}))
      ->capture_default_str();
  hoeffding->add_option("--alphabet", alphabet)->check(CLI::Range(2, 6))->capture_default_str();
  hoeffding->add_option("--n", arity)->check(CLI::Range(1, 8))->capture_default_str();
  hoeffding->add_option("--weights", weights, "uniform or skewed")->check(CLI::IsMember({"uniform", "skewed"}))->capture_default_str();
  add_common(hoeffding, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  set_thread_count(common.threads);

  auto alphabet_dist = [&](bool skewed) {
    std::vector<double> values, w;
    for (std::size_t k = 0; k < alphabet; ++k) {
      values.push_back(static_cast<double>(k));
      w.push_back(skewed ? static_cast<double>(k + 1) : 1.0);
    }
    double total = 0.0;
    for (double x : w) total += x;
    for (double& x : w) x /= total;
    return Distribution::weighted(SampleSpace::numeric_alphabet(values), w);
  };

  try {
    if (verify->parsed()) {
      auto stream = SeedPolicy(common.seed).stream(0, Role::Integration);
      double lemma = 0, recon = 0, orth = 0, expansion = 0, cov = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        const auto dist = alphabet_dist(t % 2 == 1);
        const auto f = functionals::Table::random(dist, arity, stream);
        const auto g = functionals::Table::random(dist, arity, stream);
        std::vector<Configuration> words;
        for_each_configuration(dist, arity, [&](const Configuration& y, double) { words.push_back(y); });
        for (std::size_t i = 0; i < words.size(); i += 1 + words.size() / 32)
          for (std::size_t j = 0; j < words.size(); j += 1 + words.size() / 32)
            lemma = std::max(lemma, telescoping_residual(f, words[i], words[j]));
        const ExactModel mf(f, dist, arity), mg(g, dist, arity);
        const auto report = decompose(mf);
        recon = std::max(recon, reconstruction_residual(report, mf));
        const auto m = orthogonality_matrix(report, dist.weights());
        for (std::size_t i = 0; i < m.size(); ++i)
          for (std::size_t j = 0; j < m.size(); ++j)
            if (i != j) orth = std::max(orth, std::fabs(m[i][j]));
        expansion = std::max(expansion, std::fabs(variance_expansion(report) - mf.variance()));
        cov = std::max(cov, covariance_identity(mf, mg).residual);
      }
      const double worst = std::max({lemma, recon, orth, expansion, cov});
      const bool ok = worst <= tolerance;
      emit_json(verify, common,
                {{"telescoping", lemma}, {"reconstruction", recon}, {"orthogonality", orth},
                 {"variance_expansion", expansion}, {"covariance_identity", cov}, {"tolerance", tolerance}, {"pass", ok}});
      return ok ? kOk : kIdentity;
    }

    if (stein_cmd->parsed()) {
      const auto r = stein::sweep(sweep);
      const bool ok = r.max_equation_residual <= 1e-10 && r.max_closed_form_residual <= 1e-10 && r.min_g > 0.0 &&
                      r.max_g <= std::sqrt(2.0 * std::numbers::pi) / 4.0 + 1e-12 && r.max_abs_g_prime <= 1.0 + 1e-12 &&
                      r.min_taylor_slack >= 0.0 && r.min_lipschitz_slack >= 0.0;
      emit_json(stein_cmd, common,
                {{"points", r.points}, {"equation_residual", r.max_equation_residual},
                 {"closed_form_residual", r.max_closed_form_residual}, {"min_g", r.min_g}, {"max_g", r.max_g},
                 {"max_abs_g_prime", r.max_abs_g_prime}, {"min_taylor_slack", r.min_taylor_slack},
                 {"min_lipschitz_slack", r.min_lipschitz_slack}, {"pass", ok}});
      return ok ? kOk : kIdentity;
    }

    if (bound->parsed()) {
      const auto m = make_model(model, bound_n);
      const SeedPolicy seeds(common.seed);
      if (kind == "kolmogorov") {
        BoundConfig config;
        config.outer = reps;
        config.k_inner = k_inner;
        const auto r = kolmogorov_bound(m.factory, *m.law, bound_n, config, seeds);
        const std::vector<CsvRow> rows{{"bound", bound_n, "kolmogorov_bound_intermed", r.kolmogorov_bound_intermed,
                                        r.kolmogorov_bound_intermed_se},
                                       {"bound", bound_n, "kolmogorov_bound_loose", r.kolmogorov_bound_loose,
                                        r.kolmogorov_bound_loose_se},
                                       {"bound", bound_n, "wasserstein_bound", r.wasserstein_bound, r.wasserstein_bound_se},
                                       {"bound", bound_n, "empirical_dK", r.empirical_dK.value, r.empirical_dK.band}};
        emit_rows(bound, common, rows, to_json(r));
      } else {
        GeometricConfig config;
        config.reps = reps;
        config.constant = constant;
        const auto r = geometric_bound(m.factory, *m.law, bound_n, config, seeds);
        const std::vector<CsvRow> rows{{"bound", bound_n, "geometric_bound", r.bound, r.bound_se},
                                       {"bound", bound_n, "empirical_dK", r.empirical_dK.value, r.empirical_dK.band}};
        emit_rows(bound, common, rows, to_json(r));
      }
      return kOk;
    }

    if (rates->parsed() || voronoi->parsed() || covering->parsed()) {
      CLI::App* sub = rates->parsed() ? rates : voronoi->parsed() ? voronoi : covering;
      ExperimentConfig exp;
      exp.n_list = n_list;
      exp.reps = reps;
      exp.seed = common.seed;
      exp.validate();
      if (voronoi->parsed()) model.functional = "voronoi";
      std::vector<std::string> functional_ids{model.functional};
      if (covering->parsed()) functional_ids = {"covering-volume", "isolated-count"};
      if (rates->parsed() && model.functional == "voronoi") make_shape(model);

      std::vector<CsvRow> rows;
      json result = json::array();
      for (const auto& id : functional_ids) {
        ModelOptions mo = model;
        mo.functional = id;
        std::vector<double> sizes;
        std::vector<Estimate> variances;
        json per_n = json::array();
        for (std::size_t n : n_list) {
          const auto m = make_model(mo, n);
          const auto seeds = SeedPolicy(common.seed).child(n);
          const auto rep = replicate(m.factory, *m.law, n, reps, seeds);
          json entry{{"n", n}, {"mean", to_json(rep.mean)}, {"variance", to_json(rep.variance)}};
          rows.push_back({id, n, "mean", rep.mean.value, rep.mean.se});
          rows.push_back({id, n, "variance", rep.variance.value, rep.variance.se});
          if (rep.values.size() >= 100 && rep.variance.value > 0.0) {
            const auto dk = empirical_kolmogorov(rep.values, true);
            entry["empirical_dK"] = to_json(dk);
            rows.push_back({id, n, "empirical_dK", dk.value, dk.band});
          }
          if (voronoi->parsed() && bound_reps > 0) {
            GeometricConfig gc;
            gc.reps = bound_reps;
            gc.sigma2 = rep.variance;
            const auto gb = geometric_bound(m.factory, *m.law, n, gc, seeds.child(1));
            entry["geometric_bound"] = to_json(gb);
            rows.push_back({id, n, "geometric_bound", gb.bound, gb.bound_se});
          }
          per_n.push_back(entry);
          sizes.push_back(static_cast<double>(n));
          variances.push_back(rep.variance);
        }
        json item{{"functional", id}, {"sizes", per_n}};
        if (sizes.size() >= 3) {
          const auto fit = fit_rate(sizes, variances);
          item["variance_fit"] = {{"exponent", fit.exponent}, {"exponent_se", fit.exponent_se},
                                  {"intercept", fit.intercept}, {"r2", fit.r2}};
          rows.push_back({id, 0, "variance_exponent", fit.exponent, fit.exponent_se});
        }
        result.push_back(item);
      }
      emit_rows(sub, common, rows, result);
      return kOk;
    }

    if (hoeffding->parsed()) {
      const auto dist = alphabet_dist(weights == "skewed");
      std::shared_ptr<Functional> f;
      if (hfunctional == "sum") f = std::make_shared<functionals::Sum>();
      else if (hfunctional == "pairwise-products") f = std::make_shared<functionals::PairwiseProducts>();
      else if (hfunctional == "max") f = std::make_shared<functionals::Max>();
      else {
        auto stream = SeedPolicy(common.seed).stream(0, Role::Integration);
        f = std::make_shared<functionals::Table>(functionals::Table::random(dist, arity, stream));
      }
      const ExactModel mf(*f, dist, arity);
      const auto report = decompose(mf);
      json kernels = json::array();
      std::vector<CsvRow> rows;
      for (std::size_t k = 0; k < report.kernels.size(); ++k) {
        kernels.push_back({{"index_set", report.kernels[k].index_set}, {"second_moment", report.second_moments[k]}});
        std::string label = "phi";
        for (auto i : report.kernels[k].index_set) label += "_" + std::to_string(i);
        rows.push_back({hfunctional, arity, label, report.second_moments[k], 0.0});
      }
      rows.push_back({hfunctional, arity, "variance", mf.variance(), 0.0});
      emit_rows(hoeffding, common, rows,
                {{"mean", mf.mean()}, {"variance", mf.variance()}, {"variance_expansion", variance_expansion(report)},
                 {"reconstruction_residual", reconstruction_residual(report, mf)},
                 {"lower_bound", variance_lower_bound(mf)}, {"efron_stein_upper", efron_stein_upper(mf)},
                 {"kernels", kernels}});
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::DegenerateVariance: return kDegenerate;
      case ErrorCode::ConfigParse:
      case ErrorCode::UnknownId:
      case ErrorCode::InvalidArgument: return kConfig;
      default: return kFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
