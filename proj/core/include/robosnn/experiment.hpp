#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robosnn/data.hpp"
#include "robosnn/error.hpp"
#include "robosnn/loss.hpp"
#include "robosnn/metrics.hpp"
#include "robosnn/optim.hpp"
#include "robosnn/search.hpp"
#include "robosnn/theory.hpp"

namespace robosnn {

/// Everything needed to reproduce a run or a sweep. Defaults follow the
/// Daily_Min_Temperature preset.
struct ExperimentConfig {
  std::string dataset_path;
  std::string dataset_name;
  std::string value_column;  ///< header name or zero-based index; empty = last column

  std::size_t seq_size = 30;
  std::size_t dense_layers = 2;  ///< hidden layers
  std::size_t units = 64;        ///< width of every hidden layer
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  int patience = 5;
  int max_epochs = 200;
  double l2_coeff = 0.0;
  double train_frac = 0.8;
  double validation_fraction = 0.1;

  double magnitude_lo = 3.0;
  double magnitude_hi = 5.0;
  std::vector<double> levels{0.0, 0.05, 0.10, 0.20, 0.30};
  std::vector<LossSpec> losses;  ///< empty means default_losses()
  std::vector<std::uint64_t> seeds{0};

  std::string output_dir = "out";
  std::size_t jobs = 1;

  void validate() const;
  std::vector<LossSpec> effective_losses() const;
};

/// MAE, MSE, Huber(delta = 1), log-cosh and RoBoS with its default parameters.
std::vector<LossSpec> default_losses();
LossSpec default_robos();

std::vector<std::string> preset_names();
/// Architecture and training settings of a named dataset row; throws usage on unknown names.
ExperimentConfig preset(std::string_view name);

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

/// One contaminate -> window -> train -> evaluate pass.
struct RunOutcome {
  MetricReport test;
  double val_mae = 0.0;  ///< MAE on the early-stopping windows, original units
  TrainResult trained;
  WindowedDataset data;
};

/// Contamination, initialization and shuffling are all derived from `seed`, so
/// every loss sees the same contaminated series for a given (level, seed).
RunOutcome run_experiment(const ExperimentConfig& cfg, const Series& clean, const LossSpec& loss,
                          double level, std::uint64_t seed);

Series load_series(const ExperimentConfig& cfg);

struct TrainArtifacts {
  MetricReport metrics;
  std::filesystem::path checkpoint;
  std::filesystem::path history;
  std::filesystem::path metrics_file;
};

/// Runs one experiment and writes checkpoint JSON, history CSV and metrics JSON
/// into cfg.output_dir.
TrainArtifacts cmd_train(const ExperimentConfig& cfg, const LossSpec& loss, double level,
                         std::uint64_t seed);

struct CellResult {
  std::size_t loss_index = 0;
  std::size_t level_index = 0;
  std::uint64_t seed = 0;
  std::optional<MetricReport> metrics;
  int epochs = 0;
  std::optional<Errc> error_code;
  std::string error;
};

struct ResultsTable {
  std::string dataset;
  std::vector<LossSpec> losses;
  std::vector<double> levels;
  std::vector<std::uint64_t> seeds;
  std::vector<CellResult> cells;  ///< ordered by (loss, level, seed)

  /// Mean over seeds of the successful runs of one (loss, level) cell.
  std::optional<MetricReport> mean(std::size_t loss_index, std::size_t level_index) const;
  /// Arithmetic mean of the per-level means ("Total Avg.").
  std::optional<MetricReport> total_average(std::size_t loss_index) const;
  std::vector<const CellResult*> failures() const;
  std::vector<std::string> column_names() const;
};

/// Runs |losses| x |levels| x |seeds| cells, up to cfg.jobs at a time. Failed
/// cells are recorded and the remaining cells still run. Writes
/// sweep_runs.csv, sweep_table.csv, sweep_table.txt (and sweep_failures.csv).
ResultsTable cmd_sweep(const ExperimentConfig& cfg);

ResultsTable run_sweep(const ExperimentConfig& cfg, const Series& clean);
void write_wide_csv(std::ostream& out, const ResultsTable& table);
void write_runs_csv(std::ostream& out, const ResultsTable& table);
/// Fixed three-decimal layout: one block of MAE/RMSE/MASE rows per outlier level,
/// then the Total Avg. rows.
std::string render_table(const ResultsTable& table);

enum class SearchStrategy { Random, Tpe };
SearchStrategy parse_strategy(std::string_view name);

/// Searches RoBoS (a, eps, lambda) on validation MAE; writes hpo_trials.csv
/// and best_params.json.
SearchResult cmd_hpo(const ExperimentConfig& cfg, SearchStrategy strategy, std::size_t n_trials,
                     double level, std::uint64_t seed, const SearchSpace& space = {});

/// Reads best_params.json as written by cmd_hpo.
LossSpec load_best_params(const std::filesystem::path& path);

/// One CSV (r,value,grad) per spec; returns the written paths.
std::vector<std::filesystem::path> cmd_profile(const std::vector<LossSpec>& specs, double r_min,
                                               double r_max, std::size_t n_points,
                                               const std::filesystem::path& out_dir);

/// RoBoS curves with lambda (or a) varied and the other parameters fixed.
std::vector<LossSpec> robos_lambda_family(double a, double eps, const std::vector<double>& lambdas);
std::vector<LossSpec> robos_a_family(double lambda, double eps, const std::vector<double>& as);

/// Evaluates the generalization bound for a checkpoint on the dataset's
/// training windows. The loss comes from `loss` or, if absent, the checkpoint.
BoundReport cmd_bound(const std::filesystem::path& checkpoint, const ExperimentConfig& cfg,
                      double eps_conf, std::optional<LossSpec> loss = std::nullopt,
                      double level = 0.0, std::uint64_t seed = 0);

/// Writes the contaminated series (with provenance comments) for auditing.
std::filesystem::path cmd_inject(const ExperimentConfig& cfg, double level, std::uint64_t seed);

/// Checkpoint document: network plus the loss and provenance of the run.
void write_checkpoint(const std::filesystem::path& path, const Network& net, const LossSpec& loss,
                      const std::string& provenance_json);
Network read_checkpoint(const std::filesystem::path& path, std::optional<LossSpec>* loss = nullptr);

/// 0 success, 1 usage, 2 data error, 3 training divergence.
int exit_code_for(Errc code) noexcept;

std::string run_tag(const LossSpec& loss, double level, std::uint64_t seed);

}  // namespace robosnn
