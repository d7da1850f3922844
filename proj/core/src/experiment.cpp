#include "robosnn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "json_io.hpp"
#include "robosnn/rng.hpp"

namespace robosnn {

using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

// Sub-seed streams of a run seed.
constexpr std::uint64_t kContaminationStream = 1;
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kShuffleStream = 3;

json config_json(const ExperimentConfig& cfg) {
  std::vector<std::string> losses;
  for (const auto& l : cfg.effective_losses()) losses.push_back(l.to_string());
  return {{"dataset_path", cfg.dataset_path},
          {"dataset_name", cfg.dataset_name},
          {"value_column", cfg.value_column},
          {"seq_size", cfg.seq_size},
          {"dense_layers", cfg.dense_layers},
          {"units", cfg.units},
          {"batch_size", cfg.batch_size},
          {"learning_rate", cfg.learning_rate},
          {"patience", cfg.patience},
          {"max_epochs", cfg.max_epochs},
          {"l2_coeff", cfg.l2_coeff},
          {"train_frac", cfg.train_frac},
          {"validation_fraction", cfg.validation_fraction},
          {"magnitude_lo", cfg.magnitude_lo},
          {"magnitude_hi", cfg.magnitude_hi},
          {"levels", cfg.levels},
          {"losses", losses},
          {"seeds", cfg.seeds},
          {"output_dir", cfg.output_dir},
          {"jobs", cfg.jobs}};
}

json provenance(const ExperimentConfig& cfg, std::string_view command, json extra = json::object()) {
  json c = config_json(cfg);
  // Neither affects results; dropping them lets a replay write elsewhere and still match.
  c.erase("output_dir");
  c.erase("jobs");
  json p{{"tool", "robosnn"}, {"version", kToolVersion}, {"command", command}, {"config", c}};
  for (auto it = extra.begin(); it != extra.end(); ++it) p[it.key()] = it.value();
  return p;
}

std::string provenance_comment(const json& p) { return "provenance: " + p.dump(); }

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) raise(Errc::io, "cannot create directory '" + path.parent_path().string() + "'");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::io, "cannot write '" + path.string() + "'");
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    raise(Errc::parse, what + " is not valid JSON: " + e.what());
  }
}

std::string percent(double level) {
  std::ostringstream os;
  os << std::round(level * 1000.0) / 10.0 << '%';
  return os.str();
}

TrainConfig train_config(const ExperimentConfig& cfg, const LossSpec& loss, std::uint64_t seed) {
  TrainConfig tc;
  tc.max_epochs = cfg.max_epochs;
  tc.batch_size = cfg.batch_size;
  tc.patience = cfg.patience;
  tc.l2_coeff = cfg.l2_coeff;
  tc.seed = derive_seed(seed, kShuffleStream);
  tc.loss = loss;
  tc.adam.eta = cfg.learning_rate;
  tc.validation_fraction = cfg.validation_fraction;
  return tc;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

}  // namespace

// ---------------------------------------------------------------- config

LossSpec default_robos() { return LossSpec::robos(3.0, 1.0, 0.03); }

std::vector<LossSpec> default_losses() {
  return {LossSpec::absolute(), LossSpec::square(), LossSpec::huber(1.0), LossSpec::log_cosh(),
          default_robos()};
}

std::vector<LossSpec> ExperimentConfig::effective_losses() const {
  return losses.empty() ? default_losses() : losses;
}

void ExperimentConfig::validate() const {
  if (seq_size == 0 || units == 0 || batch_size == 0) {
    raise(Errc::invalid_parameter, "seq_size, units and batch_size must be positive");
  }
  if (!(learning_rate > 0.0)) raise(Errc::invalid_parameter, "learning rate must be positive");
  if (patience <= 0 || max_epochs <= 0) raise(Errc::invalid_parameter, "patience and max_epochs must be positive");
  if (!(train_frac > 0.0 && train_frac < 1.0)) raise(Errc::invalid_parameter, "train_frac must lie in (0, 1)");
  if (levels.empty()) raise(Errc::usage, "at least one contamination level is required");
  if (seeds.empty()) raise(Errc::usage, "at least one seed is required");
  for (double l : levels) ContaminationSpec{l, magnitude_lo, magnitude_hi, 0}.validate();
  for (const auto& l : losses) l.validate();
}

std::vector<std::string> preset_names() {
  return {"Daily_Min_Temperature", "Electricity_Load", "Monthly_Sunspots", "Daily_Gold_Price"};
}

ExperimentConfig preset(std::string_view name) {
  struct Row {
    std::string_view name;
    std::size_t seq_size, dense_layers, batch_size, units;
    double learning_rate;
    int patience;
  };
  static constexpr Row kRows[] = {
      {"Daily_Min_Temperature", 30, 2, 32, 64, 0.001, 5},
      {"Electricity_Load", 96, 3, 256, 64, 0.001, 5},
      {"Monthly_Sunspots", 132, 3, 32, 64, 0.001, 5},
      {"Daily_Gold_Price", 30, 2, 16, 32, 0.001, 5},
  };
  for (const auto& row : kRows) {
    if (row.name != name) continue;
    ExperimentConfig cfg;
    cfg.dataset_name = std::string(row.name);
    cfg.seq_size = row.seq_size;
    cfg.dense_layers = row.dense_layers;
    cfg.batch_size = row.batch_size;
    cfg.units = row.units;
    cfg.learning_rate = row.learning_rate;
    cfg.patience = row.patience;
    return cfg;
  }
  raise(Errc::usage, "unknown preset '" + std::string(name) + "'");
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2); }

ExperimentConfig config_from_json(const std::string& text) {
  const json j = parse_json(text, "config");
  // Accept a bare config, a provenance block, or an output document carrying one.
  const json& p = j.contains("provenance") && j.at("provenance").is_object() ? j.at("provenance") : j;
  const json& c = p.contains("config") && p.at("config").is_object() ? p.at("config") : p;
  ExperimentConfig cfg;
  try {
    auto get = [&](const char* key, auto& field) {
      if (c.contains(key)) c.at(key).get_to(field);
    };
    get("dataset_path", cfg.dataset_path);
    get("dataset_name", cfg.dataset_name);
    get("value_column", cfg.value_column);
    get("seq_size", cfg.seq_size);
    get("dense_layers", cfg.dense_layers);
    get("units", cfg.units);
    get("batch_size", cfg.batch_size);
    get("learning_rate", cfg.learning_rate);
    get("patience", cfg.patience);
    get("max_epochs", cfg.max_epochs);
    get("l2_coeff", cfg.l2_coeff);
    get("train_frac", cfg.train_frac);
    get("validation_fraction", cfg.validation_fraction);
    get("magnitude_lo", cfg.magnitude_lo);
    get("magnitude_hi", cfg.magnitude_hi);
    get("levels", cfg.levels);
    get("seeds", cfg.seeds);
    get("output_dir", cfg.output_dir);
    get("jobs", cfg.jobs);
    if (c.contains("losses")) {
      cfg.losses.clear();
      for (const auto& s : c.at("losses")) cfg.losses.push_back(parse_loss_spec(s.get<std::string>()));
    }
  } catch (const json::exception& e) {
    raise(Errc::parse, std::string("malformed config: ") + e.what());
  }
  return cfg;
}

// ---------------------------------------------------------------- single run

Series load_series(const ExperimentConfig& cfg) {
  if (cfg.dataset_path.empty()) raise(Errc::usage, "no dataset given");
  Series s = ingest_csv(cfg.dataset_path, cfg.value_column, cfg.seq_size + 2);
  if (!cfg.dataset_name.empty()) s.name = cfg.dataset_name;
  return s;
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const Series& clean, const LossSpec& loss,
                          double level, std::uint64_t seed) {
  cfg.validate();
  loss.validate();
  const std::size_t region = training_region_length(clean.values.size(), cfg.seq_size, cfg.train_frac);
  const ContaminationSpec contamination{level, cfg.magnitude_lo, cfg.magnitude_hi,
                                        derive_seed(seed, kContaminationStream)};
  const Series contaminated = inject_outliers(clean, contamination, region);

  RunOutcome out;
  out.data = window_and_split(contaminated, cfg.seq_size, cfg.train_frac);
  const auto& data = out.data;

  const auto dims = mlp_dims(cfg.seq_size, cfg.dense_layers, cfg.units);
  Network net = init_network(dims, derive_seed(seed, kInitStream));
  const TrainConfig tc = train_config(cfg, loss, seed);
  out.trained = train(std::move(net), data, tc);

  auto original_units = [&](std::vector<double> v) {
    for (auto& x : v) x = denormalize(data, x);
    return v;
  };
  const auto test_hat = original_units(predict(out.trained.network, data, data.split_index, data.size()));
  const auto test_y = original_units(
      std::vector<double>(data.targets.begin() + static_cast<std::ptrdiff_t>(data.split_index), data.targets.end()));
  out.test = evaluate(test_y, test_hat, data.train_values);

  const TrainPartition part = partition(data, tc.validation_fraction);
  const auto val_hat = original_units(predict(out.trained.network, data, part.fit_end, part.val_end));
  const auto val_y = original_units(std::vector<double>(
      data.targets.begin() + static_cast<std::ptrdiff_t>(part.fit_end),
      data.targets.begin() + static_cast<std::ptrdiff_t>(part.val_end)));
  out.val_mae = mae(val_y, val_hat);
  return out;
}

std::string run_tag(const LossSpec& loss, double level, std::uint64_t seed) {
  std::ostringstream os;
  os << label(loss.kind) << "_lvl" << std::llround(level * 100.0) << "_seed" << seed;
  return os.str();
}

void write_checkpoint(const std::filesystem::path& path, const Network& net, const LossSpec& loss,
                      const std::string& provenance_json) {
  json doc{{"network", detail::network_json(net)}, {"loss", loss.to_string()}};
  if (!provenance_json.empty()) doc["provenance"] = parse_json(provenance_json, "provenance");
  write_text(path, doc.dump(2));
}

Network read_checkpoint(const std::filesystem::path& path, std::optional<LossSpec>* loss) {
  const json doc = parse_json(read_file(path), path.string());
  if (loss != nullptr && doc.contains("loss")) *loss = parse_loss_spec(doc.at("loss").get<std::string>());
  return detail::network_from(doc.contains("network") ? doc.at("network") : doc);
}

TrainArtifacts cmd_train(const ExperimentConfig& cfg, const LossSpec& loss, double level,
                         std::uint64_t seed) {
  const Series clean = load_series(cfg);
  const RunOutcome run = run_experiment(cfg, clean, loss, level, seed);

  const json prov = provenance(cfg, "train", {{"loss", loss.to_string()}, {"level", level}, {"seed", seed}});
  const std::filesystem::path dir(cfg.output_dir);
  const std::string tag = run_tag(loss, level, seed);

  TrainArtifacts art;
  art.metrics = run.test;
  art.checkpoint = dir / (tag + "_checkpoint.json");
  art.history = dir / (tag + "_history.csv");
  art.metrics_file = dir / (tag + "_metrics.json");

  write_checkpoint(art.checkpoint, run.trained.network, loss, prov.dump());
  {
    auto out = open_output(art.history);
    out << "# " << provenance_comment(prov) << '\n';
    write_history_csv(out, run.trained.history);
  }
  const json metrics{{"mae", run.test.mae},
                     {"rmse", run.test.rmse},
                     {"mase", run.test.mase},
                     {"n_test", run.test.n_test},
                     {"val_mae", run.val_mae},
                     {"epochs", run.trained.history.epochs.size()},
                     {"best_epoch", run.trained.history.best_epoch},
                     {"provenance", prov}};
  write_text(art.metrics_file, metrics.dump(2));
  return art;
}

// ---------------------------------------------------------------- sweep

std::optional<MetricReport> ResultsTable::mean(std::size_t loss_index, std::size_t level_index) const {
  MetricReport sum;
  std::size_t count = 0;
  for (const auto& c : cells) {
    if (c.loss_index != loss_index || c.level_index != level_index || !c.metrics) continue;
    sum.mae += c.metrics->mae;
    sum.rmse += c.metrics->rmse;
    sum.mase += c.metrics->mase;
    sum.n_test = c.metrics->n_test;
    ++count;
  }
  if (count == 0) return std::nullopt;
  const double k = static_cast<double>(count);
  return MetricReport{sum.mae / k, sum.rmse / k, sum.mase / k, sum.n_test};
}

std::optional<MetricReport> ResultsTable::total_average(std::size_t loss_index) const {
  MetricReport sum;
  std::size_t count = 0;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const auto m = mean(loss_index, li);
    if (!m) continue;
    sum.mae += m->mae;
    sum.rmse += m->rmse;
    sum.mase += m->mase;
    sum.n_test = m->n_test;
    ++count;
  }
  if (count == 0) return std::nullopt;
  const double k = static_cast<double>(count);
  return MetricReport{sum.mae / k, sum.rmse / k, sum.mase / k, sum.n_test};
}

std::vector<const CellResult*> ResultsTable::failures() const {
  std::vector<const CellResult*> out;
  for (const auto& c : cells) {
    if (!c.metrics) out.push_back(&c);
  }
  return out;
}

std::vector<std::string> ResultsTable::column_names() const {
  std::vector<std::string> names;
  for (const auto& l : losses) names.emplace_back(label(l.kind));
  // Fall back to the full spec when two columns share a label.
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (std::count(names.begin(), names.end(), std::string(label(losses[i].kind))) > 1) {
      for (std::size_t j = 0; j < losses.size(); ++j) {
        if (losses[j].kind == losses[i].kind) {
          names[j] = losses[j].to_string();
          std::replace(names[j].begin(), names[j].end(), ',', ';');
        }
      }
    }
  }
  return names;
}

ResultsTable run_sweep(const ExperimentConfig& cfg, const Series& clean) {
  cfg.validate();
  ResultsTable table;
  table.dataset = cfg.dataset_name.empty() ? clean.name : cfg.dataset_name;
  table.losses = cfg.effective_losses();
  table.levels = cfg.levels;
  table.seeds = cfg.seeds;

  for (std::size_t l = 0; l < table.losses.size(); ++l) {
    for (std::size_t v = 0; v < table.levels.size(); ++v) {
      for (auto seed : table.seeds) table.cells.push_back({l, v, seed, std::nullopt, 0, std::nullopt, {}});
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < table.cells.size(); i = next++) {
      auto& cell = table.cells[i];
      try {
        const auto run = run_experiment(cfg, clean, table.losses[cell.loss_index],
                                        table.levels[cell.level_index], cell.seed);
        cell.metrics = run.test;
        cell.epochs = static_cast<int>(run.trained.history.epochs.size());
      } catch (const Error& e) {
        cell.error_code = e.code();
        cell.error = e.what();
      } catch (const std::exception& e) {
        cell.error_code = Errc::objective_failure;
        cell.error = e.what();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(cfg.jobs, 1, table.cells.size());
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  return table;
}

void write_runs_csv(std::ostream& out, const ResultsTable& table) {
  out << "dataset,level,loss,seed,mae,rmse,mase,n_test,epochs,status\n" << std::setprecision(17);
  const auto names = table.column_names();
  for (const auto& c : table.cells) {
    out << table.dataset << ',' << table.levels[c.level_index] << ',' << names[c.loss_index] << ','
        << c.seed << ',';
    if (c.metrics) {
      out << c.metrics->mae << ',' << c.metrics->rmse << ',' << c.metrics->mase << ','
          << c.metrics->n_test << ',' << c.epochs << ",ok\n";
    } else {
      out << ",,,,," << to_string(c.error_code.value_or(Errc::objective_failure)) << '\n';
    }
  }
}

void write_wide_csv(std::ostream& out, const ResultsTable& table) {
  const auto names = table.column_names();
  out << "dataset,outliers,metric";
  for (const auto& n : names) out << ',' << n;
  out << '\n' << std::fixed << std::setprecision(3);

  auto row = [&](const std::string& level, const char* metric, auto&& pick) {
    out << table.dataset << ',' << level << ',' << metric;
    for (std::size_t l = 0; l < names.size(); ++l) {
      out << ',';
      if (auto m = pick(l)) out << *m;
    }
    out << '\n';
  };
  auto metric_rows = [&](const std::string& level, auto&& report) {
    row(level, "MAE", [&](std::size_t l) { auto r = report(l); return r ? std::optional(r->mae) : std::nullopt; });
    row(level, "RMSE", [&](std::size_t l) { auto r = report(l); return r ? std::optional(r->rmse) : std::nullopt; });
    row(level, "MASE", [&](std::size_t l) { auto r = report(l); return r ? std::optional(r->mase) : std::nullopt; });
  };
  for (std::size_t v = 0; v < table.levels.size(); ++v) {
    metric_rows(percent(table.levels[v]), [&](std::size_t l) { return table.mean(l, v); });
  }
  metric_rows("Total Avg.", [&](std::size_t l) { return table.total_average(l); });
}

std::string render_table(const ResultsTable& table) {
  const auto names = table.column_names();
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  std::size_t width = 10;
  for (const auto& n : names) width = std::max(width, n.size() + 2);

  os << "Dataset: " << table.dataset << "  (mean over " << table.seeds.size() << " seed"
     << (table.seeds.size() == 1 ? "" : "s") << ")\n";
  os << std::left << std::setw(12) << "Outliers" << std::setw(8) << "Metric" << std::right;
  for (const auto& n : names) os << std::setw(static_cast<int>(width)) << n;
  os << '\n';

  auto block = [&](const std::string& level, auto&& report) {
    const char* metrics[] = {"MAE", "RMSE", "MASE"};
    for (int k = 0; k < 3; ++k) {
      os << std::left << std::setw(12) << (k == 0 ? level : "") << std::setw(8) << metrics[k] << std::right;
      for (std::size_t l = 0; l < names.size(); ++l) {
        const auto r = report(l);
        os << std::setw(static_cast<int>(width));
        if (!r) {
          os << "n/a";
        } else {
          os << (k == 0 ? r->mae : k == 1 ? r->rmse : r->mase);
        }
      }
      os << '\n';
    }
  };
  for (std::size_t v = 0; v < table.levels.size(); ++v) {
    block(percent(table.levels[v]), [&](std::size_t l) { return table.mean(l, v); });
  }
  block("Total Avg.", [&](std::size_t l) { return table.total_average(l); });

  const auto failed = table.failures();
  if (!failed.empty()) os << failed.size() << " cell(s) failed; see sweep_failures.csv\n";
  return os.str();
}

ResultsTable cmd_sweep(const ExperimentConfig& cfg) {
  const Series clean = load_series(cfg);
  ResultsTable table = run_sweep(cfg, clean);

  const json prov = provenance(cfg, "sweep");
  const std::filesystem::path dir(cfg.output_dir);
  {
    auto out = open_output(dir / "sweep_runs.csv");
    out << "# " << provenance_comment(prov) << '\n';
    write_runs_csv(out, table);
  }
  {
    auto out = open_output(dir / "sweep_table.csv");
    out << "# " << provenance_comment(prov) << '\n';
    write_wide_csv(out, table);
  }
  write_text(dir / "sweep_table.txt", "# " + provenance_comment(prov) + "\n" + render_table(table));

  const auto failed = table.failures();
  if (!failed.empty()) {
    auto out = open_output(dir / "sweep_failures.csv");
    out << "loss,level,seed,error\n";
    const auto names = table.column_names();
    for (const auto* c : failed) {
      std::string msg = c->error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      out << names[c->loss_index] << ',' << table.levels[c->level_index] << ',' << c->seed << ','
          << msg << '\n';
    }
  }
  return table;
}

// ---------------------------------------------------------------- hpo

SearchStrategy parse_strategy(std::string_view name) {
  if (name == "random") return SearchStrategy::Random;
  if (name == "tpe") return SearchStrategy::Tpe;
  raise(Errc::usage, "unknown search strategy '" + std::string(name) + "' (expected random or tpe)");
}

SearchResult cmd_hpo(const ExperimentConfig& cfg, SearchStrategy strategy, std::size_t n_trials,
                     double level, std::uint64_t seed, const SearchSpace& space) {
  const Series clean = load_series(cfg);
  const Objective objective = [&](const HyperPoint& p, std::uint64_t trial_seed) {
    const auto run = run_experiment(cfg, clean, LossSpec::robos(p.a, p.lambda, p.eps), level, trial_seed);
    return TrialOutcome{run.val_mae, static_cast<int>(run.trained.history.epochs.size())};
  };
  SearchResult result = strategy == SearchStrategy::Random
                            ? random_search(space, n_trials, objective, seed, cfg.jobs)
                            : tpe_search(space, n_trials, objective, seed);

  const json prov = provenance(cfg, "hpo",
                               {{"strategy", strategy == SearchStrategy::Random ? "random" : "tpe"},
                                {"trials", n_trials},
                                {"level", level},
                                {"seed", seed}});
  const std::filesystem::path dir(cfg.output_dir);
  {
    auto out = open_output(dir / "hpo_trials.csv");
    out << "# " << provenance_comment(prov) << '\n';
    write_trials_csv(out, result.trials);
  }
  const auto& best = result.best;
  const json doc{{"a", best.params.a},
                 {"eps", best.params.eps},
                 {"lambda", best.params.lambda},
                 {"val_mae", best.val_metric},
                 {"trial", best.trial},
                 {"loss", LossSpec::robos(best.params.a, best.params.lambda, best.params.eps).to_string()},
                 {"provenance", prov}};
  write_text(dir / "best_params.json", doc.dump(2));
  return result;
}

LossSpec load_best_params(const std::filesystem::path& path) {
  const json doc = parse_json(read_file(path), path.string());
  try {
    return LossSpec::robos(doc.at("a").get<double>(), doc.at("lambda").get<double>(),
                           doc.at("eps").get<double>());
  } catch (const json::exception& e) {
    raise(Errc::parse, "malformed best-params file: " + std::string(e.what()));
  }
}

// ---------------------------------------------------------------- profile, bound, inject

std::vector<LossSpec> robos_lambda_family(double a, double eps, const std::vector<double>& lambdas) {
  std::vector<LossSpec> out;
  for (double l : lambdas) out.push_back(LossSpec::robos(a, l, eps));
  return out;
}

std::vector<LossSpec> robos_a_family(double lambda, double eps, const std::vector<double>& as) {
  std::vector<LossSpec> out;
  for (double a : as) out.push_back(LossSpec::robos(a, lambda, eps));
  return out;
}

std::vector<std::filesystem::path> cmd_profile(const std::vector<LossSpec>& specs, double r_min,
                                               double r_max, std::size_t n_points,
                                               const std::filesystem::path& out_dir) {
  if (specs.empty()) raise(Errc::usage, "profile needs at least one loss spec");
  std::vector<std::filesystem::path> paths;
  for (const auto& spec : specs) {
    const auto points = loss_profile(spec, r_min, r_max, n_points);
    std::string name = spec.to_string();
    std::replace_if(name.begin(), name.end(), [](char c) { return c == ':' || c == ',' || c == '='; }, '_');
    const auto path = out_dir / ("profile_" + name + ".csv");
    auto out = open_output(path);
    write_profile_csv(out, points);
    paths.push_back(path);
  }
  return paths;
}

BoundReport cmd_bound(const std::filesystem::path& checkpoint, const ExperimentConfig& cfg,
                      double eps_conf, std::optional<LossSpec> loss, double level, std::uint64_t seed) {
  std::optional<LossSpec> stored;
  const Network net = read_checkpoint(checkpoint, &stored);
  const LossSpec spec = loss ? *loss : stored.value_or(default_robos());

  ExperimentConfig local = cfg;
  local.seq_size = net.input_dim();
  const Series clean = load_series(local);
  const std::size_t region = training_region_length(clean.values.size(), local.seq_size, local.train_frac);
  const Series series = inject_outliers(
      clean, {level, local.magnitude_lo, local.magnitude_hi, derive_seed(seed, kContaminationStream)}, region);
  const WindowedDataset data = window_and_split(series, local.seq_size, local.train_frac);
  return bound_report(net, data, spec, eps_conf);
}

std::filesystem::path cmd_inject(const ExperimentConfig& cfg, double level, std::uint64_t seed) {
  const Series clean = load_series(cfg);
  const std::size_t region = training_region_length(clean.values.size(), cfg.seq_size, cfg.train_frac);
  const Series out_series = inject_outliers(
      clean, {level, cfg.magnitude_lo, cfg.magnitude_hi, derive_seed(seed, kContaminationStream)}, region);

  const json prov = provenance(cfg, "inject", {{"level", level}, {"seed", seed}});
  const auto path = std::filesystem::path(cfg.output_dir) /
                    (clean.name + "_lvl" + std::to_string(std::llround(level * 100.0)) + "_seed" +
                     std::to_string(seed) + ".csv");
  auto out = open_output(path);
  write_series_csv(out, out_series,
                   {provenance_comment(prov), "training_region=" + std::to_string(region)});
  return path;
}

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::divergence:
      return 3;
    case Errc::io:
    case Errc::column_missing:
    case Errc::series_too_short:
    case Errc::parse:
    case Errc::constant_series:
    case Errc::dataset_too_small:
    case Errc::invalid_fraction:
    case Errc::non_finite:
    case Errc::empty_input:
      return 2;
    default:
      return 1;
  }
}

}  // namespace robosnn
