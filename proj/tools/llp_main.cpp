// Command-line front end: dataset generation, training, prediction and
// evaluation for the group-statistics classifier.

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "llp/data.hpp"
#include "llp/errors.hpp"
#include "llp/eval.hpp"
#include "llp/model_io.hpp"
#include "llp/predict.hpp"
#include "llp/sampler.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct HyperOptions {
  std::string kernel = "gaussian";
  double sigma = 1.0;
  double kappa = 1.0;
  double theta = 0.0;
  double a = 1.0, b = 1.0, mu = 1.0, nu = 1.0;
  double chi = 1000.0;
  std::string delta2_shape_rule = "derived";

  llp::Hyperparams to_hyperparams() const {
    llp::Hyperparams h;
    if (kernel == "gaussian") {
      h.kernel.kind = llp::KernelKind::gaussian;
    } else if (kernel == "sigmoidal") {
      h.kernel.kind = llp::KernelKind::sigmoidal;
    } else {
      throw llp::InputError("unknown kernel '" + kernel + "'");
    }
    h.kernel.sigma = sigma;
    h.kernel.kappa = kappa;
    h.kernel.theta = theta;
    h.a = a;
    h.b = b;
    h.mu = mu;
    h.nu = nu;
    h.chi = chi;
    if (delta2_shape_rule == "derived") {
      h.delta2_shape_rule = llp::Delta2ShapeRule::derived;
    } else if (delta2_shape_rule == "paper") {
      h.delta2_shape_rule = llp::Delta2ShapeRule::paper;
    } else {
      throw llp::InputError("delta2-shape-rule must be derived or paper");
    }
    h.validate();
    return h;
  }
};

struct ChainOptions {
  int burn_in = 1000;
  int n_samples = 1000;
  int thin = 1;
  std::uint64_t seed = 0;
  int gamma_sweeps = 1;
  int z_steps = 1;
  int n_chains = 1;

  llp::ChainConfig to_config(std::uint64_t chain_seed) const {
    llp::ChainConfig c;
    c.burn_in = burn_in;
    c.n_samples = n_samples;
    c.thin = thin;
    c.seed = chain_seed;
    c.gamma_sweeps_per_iter = gamma_sweeps;
    c.z_steps_per_iter = z_steps;
    c.validate();
    return c;
  }
};

void add_hyper_flags(CLI::App* cmd, HyperOptions& h) {
  cmd->add_option("--kernel", h.kernel, "Kernel kind: gaussian|sigmoidal");
  cmd->add_option("--sigma", h.sigma, "Gaussian kernel bandwidth");
  cmd->add_option("--kappa", h.kappa, "Sigmoidal kernel slope");
  cmd->add_option("--theta", h.theta, "Sigmoidal kernel offset");
  cmd->add_option("--a", h.a, "Selection prior a (>= 1)");
  cmd->add_option("--b", h.b, "Selection prior b (>= 1)");
  cmd->add_option("--mu", h.mu, "delta^2 prior shape parameter");
  cmd->add_option("--nu", h.nu, "delta^2 prior scale parameter");
  cmd->add_option("--chi", h.chi, "Global fraction confidence (>= 0)");
  cmd->add_option("--delta2-shape-rule", h.delta2_shape_rule,
                  "delta^2 conditional shape: derived|paper");
}

void add_chain_flags(CLI::App* cmd, ChainOptions& c) {
  cmd->add_option("--burn-in", c.burn_in, "Discarded initial iterations");
  cmd->add_option("--samples", c.n_samples, "Retained samples per chain");
  cmd->add_option("--thin", c.thin, "Keep every thin-th sample");
  cmd->add_option("--seed", c.seed, "RNG seed");
  cmd->add_option("--gamma-sweeps", c.gamma_sweeps,
                  "Selection sweeps per iteration");
  cmd->add_option("--z-steps", c.z_steps, "Z Metropolis steps per iteration");
  cmd->add_option("--chains", c.n_chains, "Independent chains to run")
      ->check(CLI::PositiveNumber);
}

std::uint64_t chain_seed(std::uint64_t base, std::uint64_t chain) {
  // splitmix64 step keyed by chain index
  std::uint64_t x = base + 0x9E3779B97F4A7C15ULL * (chain + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

/// Runs the configured chains (concurrently when more than one) and
/// returns the concatenated, chain-tagged samples plus per-chain reports.
std::pair<std::vector<llp::PosteriorSample>, std::vector<llp::ChainReport>>
run_chains(const llp::Dataset& data, const llp::Hyperparams& hyper,
           const ChainOptions& copts) {
  using Result =
      std::pair<std::vector<llp::PosteriorSample>, llp::ChainReport>;
  std::vector<std::future<Result>> futures;
  futures.reserve(static_cast<std::size_t>(copts.n_chains));
  for (int c = 0; c < copts.n_chains; ++c) {
    const auto config =
        copts.to_config(chain_seed(copts.seed, static_cast<std::uint64_t>(c)));
    futures.push_back(std::async(
        copts.n_chains > 1 ? std::launch::async : std::launch::deferred,
        [&data, &hyper, config] { return llp::run_chain(data, hyper, config); }));
  }
  std::vector<llp::PosteriorSample> samples;
  std::vector<llp::ChainReport> reports;
  for (int c = 0; c < copts.n_chains; ++c) {
    auto [chain_samples, report] =
        futures[static_cast<std::size_t>(c)].get();
    for (llp::PosteriorSample& s : chain_samples) s.chain = c;
    samples.insert(samples.end(),
                   std::make_move_iterator(chain_samples.begin()),
                   std::make_move_iterator(chain_samples.end()));
    reports.push_back(std::move(report));
  }
  return {std::move(samples), std::move(reports)};
}

int cmd_gen(const std::string& spec_name, std::uint64_t seed,
            const std::string& out_dir) {
  llp::Rng rng(seed);
  llp::Dataset data;
  if (spec_name == "a") {
    llp::SyntheticSpecA spec;
    spec.seed = seed;
    data = llp::gen_dataset_a(spec, rng);
  } else if (spec_name == "b") {
    llp::SyntheticSpecB spec;
    spec.seed = seed;
    data = llp::gen_dataset_b(spec, rng);
  } else {
    throw llp::InputError("gen: spec must be 'a' or 'b'");
  }
  const auto ds = llp::with_default_ids(std::move(data));
  llp::save_instances(ds, out_dir + "/instances.csv");
  llp::save_groups(ds, out_dir + "/groups.csv");
  llp::save_labels(ds, out_dir + "/labels.csv");

  std::printf("group  n   m     true_pos\n");
  for (std::size_t j = 0; j < ds.data.groups.size(); ++j) {
    const llp::Group& g = ds.data.groups[j];
    int n_pos = 0;
    for (int i : g.members) {
      n_pos += (*ds.data.true_labels)[static_cast<std::size_t>(i)];
    }
    std::printf("%-6ld %-3zu %-5.2f %d\n", ds.group_ids[j], g.members.size(),
                g.m, n_pos);
  }
  std::printf("wrote %s/{instances,groups,labels}.csv (%d instances)\n",
              out_dir.c_str(), ds.data.n());
  return 0;
}

int cmd_train(const std::string& instances_path,
              const std::string& groups_path, const std::string& model_path,
              const std::string& report_path, const HyperOptions& hopts,
              const ChainOptions& copts) {
  const auto hyper = hopts.to_hyperparams();
  const auto ds = llp::load_dataset(instances_path, groups_path,
                                    llp::LabelColumn::refuse);
  auto [samples, reports] = run_chains(ds.data, hyper, copts);

  llp::TrainedModel model;
  model.samples = std::move(samples);
  model.training_x = ds.data.X;
  model.kernel = hyper.kernel;
  llp::save_model(model, model_path);
  if (!report_path.empty()) llp::save_chain_reports(reports, report_path);

  double total_time = 0.0;
  for (const auto& r : reports) total_time += r.wall_time_sec;
  std::printf("trained %d chain(s), %zu samples, wall time %.2fs\n",
              copts.n_chains, model.samples.size(), total_time);
  return 0;
}

int cmd_predict(const std::string& model_path,
                const std::string& instances_path,
                const std::string& out_path,
                const std::vector<double>& grid_bounds, int res_x, int res_y,
                const std::string& pgm_path) {
  const auto model = llp::load_model(model_path);
  if (!grid_bounds.empty()) {
    if (model.dim() != 2) {
      throw llp::InputError("--grid requires a 2-D feature space");
    }
    const auto grid = llp::predictive_grid(
        model, {grid_bounds[0], grid_bounds[2]},
        {grid_bounds[1], grid_bounds[3]}, res_x, res_y > 0 ? res_y : res_x);
    llp::save_grid_csv(grid, out_path);
    if (!pgm_path.empty()) llp::save_grid_pgm(grid, pgm_path);
    std::printf("wrote %dx%d grid to %s\n", grid.nx, grid.ny,
                out_path.c_str());
    return 0;
  }
  if (instances_path.empty()) {
    throw llp::InputError("predict: need --instances or --grid");
  }
  const auto table = llp::load_instances(instances_path);
  if (table.X.rows() != model.dim()) {
    throw llp::InputError("predict: feature dimension mismatch");
  }
  std::vector<double> probs(table.ids.size());
  for (std::size_t i = 0; i < table.ids.size(); ++i) {
    probs[i] = llp::predictive_prob(model,
                                    table.X.col(static_cast<Eigen::Index>(i)));
  }
  llp::save_scores(table.ids, probs, out_path);
  std::printf("wrote %zu scores to %s\n", probs.size(), out_path.c_str());
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& instances_path,
             const std::string& labels_path, const std::string& groups_path,
             const std::string& out_path, bool ablation,
             const HyperOptions& hopts, const ChainOptions& copts) {
  std::string report_json;
  if (ablation) {
    if (groups_path.empty()) {
      throw llp::InputError("eval --ablation: needs --groups to retrain");
    }
    auto ds = llp::load_dataset(instances_path, groups_path,
                                llp::LabelColumn::accept);
    if (!ds.data.true_labels) {
      if (labels_path.empty()) {
        throw llp::InputError("eval --ablation: true labels required");
      }
      ds.data.true_labels = llp::load_labels(labels_path, ds.instance_ids);
    }
    const auto result = llp::ablation_compare(
        ds.data, hopts.to_hyperparams(), copts.to_config(copts.seed));
    report_json = "{\n  \"full\": " + llp::eval_report_json(result.full) +
                  ",\n  \"ablated\": " +
                  llp::eval_report_json(result.ablated) + "\n}";
  } else {
    const auto model = llp::load_model(model_path);
    const auto table = llp::load_instances(instances_path);
    std::vector<int> labels;
    if (table.labels) {
      labels = *table.labels;
    } else if (!labels_path.empty()) {
      labels = llp::load_labels(labels_path, table.ids);
    } else {
      throw llp::InputError("eval: labels required (column or --labels)");
    }
    std::vector<double> scores(table.ids.size());
    for (std::size_t i = 0; i < table.ids.size(); ++i) {
      scores[i] = llp::predictive_prob(
          model, table.X.col(static_cast<Eigen::Index>(i)));
    }
    llp::EvalReport report;
    report.auc = llp::auc(scores, labels);
    report.n_pos = static_cast<int>(
        std::count(labels.begin(), labels.end(), 1));
    report.n_neg = static_cast<int>(labels.size()) - report.n_pos;
    report.mean_active_kernels = llp::sparsity_summary(model.samples).mean;
    report_json = llp::eval_report_json(report);
  }
  std::printf("%s\n", report_json.c_str());
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw llp::RuntimeFailure(out_path + ": cannot write");
    out << report_json << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Instance-level probabilistic classification from group "
               "label proportions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file (INI; subcommand options go in a [subcommand] section)");

  // gen
  std::string gen_spec, gen_out = ".";
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen->add_option("spec", gen_spec, "Dataset spec: a|b")->required();
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--out-dir", gen_out, "Output directory");

  // train
  std::string tr_instances, tr_groups, tr_model = "model.jsonl", tr_report;
  HyperOptions tr_hyper;
  ChainOptions tr_chain;
  auto* train = app.add_subcommand("train", "Run the Gibbs sampler");
  train->configurable();
  train->fallthrough();
  train->add_option("--instances", tr_instances, "Instances CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--groups", tr_groups, "Groups CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--model", tr_model, "Output model file (JSON lines)");
  train->add_option("--report", tr_report, "Output diagnostics JSON");
  add_hyper_flags(train, tr_hyper);
  add_chain_flags(train, tr_chain);

  // predict
  std::string pr_model, pr_instances, pr_out = "scores.csv", pr_pgm;
  std::vector<double> pr_grid;
  int pr_res_x = 0, pr_res_y = 0;
  auto* predict = app.add_subcommand("predict", "Score instances or a grid");
  predict->add_option("--model", pr_model, "Model file")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--instances", pr_instances, "Instances CSV to score");
  predict->add_option("--out", pr_out, "Output CSV");
  predict
      ->add_option("--grid", pr_grid,
                   "Grid bounds: lo_x hi_x lo_y hi_y (2-D models only)")
      ->expected(4);
  predict->add_option("--res", pr_res_x, "Grid resolution (columns)");
  predict->add_option("--res-y", pr_res_y,
                      "Grid rows (defaults to --res)");
  predict->add_option("--pgm", pr_pgm, "Also write an 8-bit grayscale PGM");

  // eval
  std::string ev_model, ev_instances, ev_labels, ev_groups, ev_out;
  bool ev_ablation = false;
  HyperOptions ev_hyper;
  ChainOptions ev_chain;
  auto* eval = app.add_subcommand("eval", "Evaluate a model (AUC, sparsity)");
  eval->configurable();
  eval->fallthrough();
  eval->add_option("--model", ev_model, "Model file");
  eval->add_option("--instances", ev_instances, "Instances CSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--labels", ev_labels, "Labels CSV (id,label)");
  eval->add_option("--groups", ev_groups, "Groups CSV (for --ablation)");
  eval->add_option("--out", ev_out, "Output report JSON");
  eval->add_flag("--ablation", ev_ablation,
                 "Paired full-fraction vs chi=0 supervision comparison");
  add_hyper_flags(eval, ev_hyper);
  add_chain_flags(eval, ev_chain);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_spec, gen_seed, gen_out);
    if (train->parsed()) {
      return cmd_train(tr_instances, tr_groups, tr_model, tr_report,
                       tr_hyper, tr_chain);
    }
    if (predict->parsed()) {
      if (!pr_grid.empty() && pr_res_x < 1) {
        throw llp::InputError("predict --grid: needs --res >= 1");
      }
      return cmd_predict(pr_model, pr_instances, pr_out, pr_grid, pr_res_x,
                         pr_res_y, pr_pgm);
    }
    if (eval->parsed()) {
      if (!ev_ablation && ev_model.empty()) {
        throw llp::InputError("eval: --model required");
      }
      return cmd_eval(ev_model, ev_instances, ev_labels, ev_groups, ev_out,
                      ev_ablation, ev_hyper, ev_chain);
    }
  } catch (const llp::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}
