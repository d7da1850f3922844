// robosnn: train, sweep, search and inspect robust-loss forecasting networks.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "robosnn/experiment.hpp"

namespace {

using robosnn::ExperimentConfig;
using robosnn::LossSpec;

struct Common {
  std::string config_path;
  std::string preset;
  std::string dataset;
  std::string name;
  std::string column;
  std::string out;
  std::optional<std::size_t> seq_size, layers, units, batch_size, jobs;
  std::optional<double> lr, l2, magnitude_lo, magnitude_hi;
  std::optional<int> patience, max_epochs;
};

struct RunArgs {
  std::vector<std::string> losses;
  std::string params;
  std::optional<double> level;
  std::optional<std::uint64_t> seed;
  std::vector<double> levels;
  std::vector<std::uint64_t> seeds;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON config, or any provenance-bearing output to replay");
  cmd->add_option("--preset", c.preset, "Dataset preset")
      ->check(CLI::IsMember(robosnn::preset_names()));
  cmd->add_option("--dataset", c.dataset, "Series CSV");
  cmd->add_option("--name", c.name, "Dataset name used in reports");
  cmd->add_option("--column", c.column, "Value column (header name or zero-based index)");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--seq-size", c.seq_size);
  cmd->add_option("--layers", c.layers, "Hidden layers");
  cmd->add_option("--units", c.units, "Units per hidden layer");
  cmd->add_option("--batch-size", c.batch_size);
  cmd->add_option("--lr", c.lr, "Adam learning rate");
  cmd->add_option("--l2", c.l2, "L2 penalty coefficient");
  cmd->add_option("--patience", c.patience);
  cmd->add_option("--max-epochs", c.max_epochs);
  cmd->add_option("--magnitude-lo", c.magnitude_lo, "Smallest outlier size in training sigmas");
  cmd->add_option("--magnitude-hi", c.magnitude_hi, "Largest outlier size in training sigmas");
  cmd->add_option("--jobs", c.jobs, "Concurrent runs");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) robosnn::raise(robosnn::Errc::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Run fields (loss, level, seed) stored next to the config in a provenance document.
nlohmann::json replay_fields;

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg;
  if (!c.config_path.empty()) {
    const std::string text = slurp(c.config_path);
    cfg = robosnn::config_from_json(text);
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_object()) {
      replay_fields = doc.contains("provenance") ? doc.at("provenance") : doc;
    }
  }
  if (!c.preset.empty()) {
    const ExperimentConfig p = robosnn::preset(c.preset);
    cfg.dataset_name = p.dataset_name;
    cfg.seq_size = p.seq_size;
    cfg.dense_layers = p.dense_layers;
    cfg.units = p.units;
    cfg.batch_size = p.batch_size;
    cfg.learning_rate = p.learning_rate;
    cfg.patience = p.patience;
  }
  if (!c.dataset.empty()) cfg.dataset_path = c.dataset;
  if (!c.name.empty()) cfg.dataset_name = c.name;
  if (!c.column.empty()) cfg.value_column = c.column;
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.seq_size) cfg.seq_size = *c.seq_size;
  if (c.layers) cfg.dense_layers = *c.layers;
  if (c.units) cfg.units = *c.units;
  if (c.batch_size) cfg.batch_size = *c.batch_size;
  if (c.jobs) cfg.jobs = *c.jobs;
  if (c.lr) cfg.learning_rate = *c.lr;
  if (c.l2) cfg.l2_coeff = *c.l2;
  if (c.magnitude_lo) cfg.magnitude_lo = *c.magnitude_lo;
  if (c.magnitude_hi) cfg.magnitude_hi = *c.magnitude_hi;
  if (c.patience) cfg.patience = *c.patience;
  if (c.max_epochs) cfg.max_epochs = *c.max_epochs;
  return cfg;
}

double level_or_replay(const RunArgs& r) {
  if (r.level) return *r.level;
  if (replay_fields.contains("level")) return replay_fields.at("level").get<double>();
  return 0.0;
}

std::uint64_t seed_or_replay(const RunArgs& r) {
  if (r.seed) return *r.seed;
  if (replay_fields.contains("seed")) return replay_fields.at("seed").get<std::uint64_t>();
  return 0;
}

std::vector<LossSpec> parse_losses(const std::vector<std::string>& texts) {
  std::vector<LossSpec> out;
  for (const auto& t : texts) out.push_back(robosnn::parse_loss_spec(t));
  return out;
}

void print_json(const std::string& text) { std::cout << text << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust bounded-loss neural forecasting experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "robosnn 0.1.0");

  Common common;
  RunArgs run;

  auto* train = app.add_subcommand("train", "Train one network and write checkpoint, history and metrics");
  add_common(train, common);
  train->add_option("--loss", run.losses, "Loss spec, e.g. robos:a=3,lambda=1,eps=0.03")->expected(0, 1);
  train->add_option("--params", run.params, "best_params.json from hpo; sets the RoBoS loss");
  train->add_option("--level", run.level, "Contamination fraction in [0, 0.5)");
  train->add_option("--seed", run.seed);

  auto* sweep = app.add_subcommand("sweep", "Losses x contamination levels x seeds, aggregated into tables");
  add_common(sweep, common);
  sweep->add_option("--loss", run.losses, "Loss spec (repeatable); defaults to all five");
  sweep->add_option("--params", run.params, "best_params.json; replaces the RoBoS entry");
  sweep->add_option("--levels", run.levels, "Contamination fractions")->delimiter(',');
  sweep->add_option("--seeds", run.seeds, "Run seeds")->delimiter(',');

  std::string strategy = "random";
  std::size_t trials = 20;
  auto* hpo = app.add_subcommand("hpo", "Search RoBoS (a, eps, lambda) on validation MAE");
  add_common(hpo, common);
  hpo->add_option("--strategy", strategy, "random or tpe")->capture_default_str();
  hpo->add_option("--trials", trials)->capture_default_str();
  hpo->add_option("--level", run.level);
  hpo->add_option("--seed", run.seed);

  std::vector<double> range{-5.0, 5.0};
  std::size_t points = 201;
  std::string family;
  std::vector<double> family_values{0.25, 0.5, 1.0};
  double family_a = 1.0, family_lambda = 1.0, family_eps = 0.01;
  auto* profile = app.add_subcommand("profile", "Export loss and gradient curves as CSV");
  profile->add_option("--loss", run.losses, "Loss spec (repeatable)");
  profile->add_option("--family", family, "RoBoS family varying 'lambda' or 'a'")
      ->check(CLI::IsMember({"lambda", "a"}));
  profile->add_option("--values", family_values, "Family parameter values")->delimiter(',');
  profile->add_option("--a", family_a, "Fixed a for a lambda family");
  profile->add_option("--lambda", family_lambda, "Fixed lambda for an a family");
  profile->add_option("--eps", family_eps, "Fixed eps for a family");
  profile->add_option("--range", range, "Residual range")->expected(2);
  profile->add_option("--points", points)->capture_default_str();
  profile->add_option("--out", common.out, "Output directory");

  std::string checkpoint;
  double eps_conf = 0.05;
  auto* bound = app.add_subcommand("bound", "Generalization bound for a checkpoint");
  add_common(bound, common);
  bound->add_option("--checkpoint", checkpoint)->required();
  bound->add_option("--eps-conf", eps_conf, "Bound holds with probability 1 - eps-conf")->capture_default_str();
  bound->add_option("--loss", run.losses, "Override the checkpoint's loss")->expected(0, 1);
  bound->add_option("--level", run.level, "Contamination used to rebuild the training windows");
  bound->add_option("--seed", run.seed);

  auto* inject = app.add_subcommand("inject", "Write the contaminated series used by a run");
  add_common(inject, common);
  inject->add_option("--level", run.level)->required();
  inject->add_option("--seed", run.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*profile) {
      std::vector<LossSpec> specs = parse_losses(run.losses);
      if (family == "lambda") {
        for (const auto& s : robosnn::robos_lambda_family(family_a, family_eps, family_values)) specs.push_back(s);
      } else if (family == "a") {
        for (const auto& s : robosnn::robos_a_family(family_lambda, family_eps, family_values)) specs.push_back(s);
      }
      const auto paths = robosnn::cmd_profile(specs, range[0], range[1], points,
                                              common.out.empty() ? std::string("out") : common.out);
      for (const auto& p : paths) std::cout << p.string() << '\n';
      return 0;
    }

    ExperimentConfig cfg = resolve(common);

    if (*train) {
      LossSpec loss = robosnn::default_robos();
      if (!run.params.empty()) {
        loss = robosnn::load_best_params(run.params);
      } else if (!run.losses.empty()) {
        loss = robosnn::parse_loss_spec(run.losses.front());
      } else if (replay_fields.contains("loss")) {
        loss = robosnn::parse_loss_spec(replay_fields.at("loss").get<std::string>());
      }
      const auto art = robosnn::cmd_train(cfg, loss, level_or_replay(run), seed_or_replay(run));
      print_json(slurp(art.metrics_file.string()));
    } else if (*sweep) {
      if (!run.losses.empty()) cfg.losses = parse_losses(run.losses);
      if (!run.params.empty()) {
        const LossSpec tuned = robosnn::load_best_params(run.params);
        if (cfg.losses.empty()) cfg.losses = robosnn::default_losses();
        for (auto& l : cfg.losses) {
          if (l.kind == robosnn::LossKind::RoBoS) l = tuned;
        }
      }
      if (!run.levels.empty()) cfg.levels = run.levels;
      if (!run.seeds.empty()) cfg.seeds = run.seeds;
      const auto table = robosnn::cmd_sweep(cfg);
      std::cout << robosnn::render_table(table);
      const auto failed = table.failures();
      if (!failed.empty()) {
        // Remaining cells ran; report the first failure's class.
        return robosnn::exit_code_for(failed.front()->error_code.value_or(robosnn::Errc::objective_failure));
      }
    } else if (*hpo) {
      const auto res = robosnn::cmd_hpo(cfg, robosnn::parse_strategy(strategy), trials, level_or_replay(run),
                                        seed_or_replay(run));
      print_json(slurp((std::filesystem::path(cfg.output_dir) / "best_params.json").string()));
      (void)res;
    } else if (*bound) {
      std::optional<LossSpec> loss;
      if (!run.losses.empty()) loss = robosnn::parse_loss_spec(run.losses.front());
      const auto report =
          robosnn::cmd_bound(checkpoint, cfg, eps_conf, loss, level_or_replay(run), seed_or_replay(run));
      print_json(robosnn::to_json(report));
    } else if (*inject) {
      std::cout << robosnn::cmd_inject(cfg, level_or_replay(run), seed_or_replay(run)).string() << '\n';
    }
  } catch (const robosnn::Error& e) {
    std::cerr << "robosnn: " << e.what() << '\n';
    return robosnn::exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "robosnn: malformed JSON: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "robosnn: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
