#pragma once

// Experiment harness: architecture construction, the training loop with
// balanced batches and validation-based snapshot selection, test evaluation
// and multi-repetition experiments with fully deterministic, byte-stable
// machine reports.
//
// Repetition r derives every stochastic stream (split, init, sampler, mask)
// from base_seed + r through named sub-streams, so the streams never
// interact and reports are reproducible bit for bit.

#include "binotab/adam.hpp"
#include "binotab/checkpoint.hpp"
#include "binotab/config.hpp"
#include "binotab/data.hpp"
#include "binotab/losses.hpp"
#include "binotab/metrics.hpp"
#include "binotab/network.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace binotab {

inline Network build_network(const ArchitectureSpec& arch, std::size_t feature_count,
                             std::uint64_t seed) {
  if (feature_count == 0) throw std::invalid_argument("build_network: no features");
  Network net;
  switch (arch.kind) {
    case ArchitectureKind::proposed: {
      const std::uint64_t total = total_combinations(feature_count);
      DenseLayer first;
      if (total <= arch.binomial_neurons) {
        first = init_binomial_full(feature_count, arch.binomial_neurons);
      } else {
        std::clog << "proposed: " << total << " feature combinations exceed "
                  << arch.binomial_neurons << " neurons; truncating to the first "
                  << arch.binomial_neurons << " in canonical order\n";
        first = init_binomial_prefix(feature_count, arch.binomial_neurons);
      }
      const std::size_t width = first.out_units();
      net.add(std::move(first), Activation::relu);
      net.add(init_xavier(width, 1, derive_seed(seed, "init:output")), Activation::identity);
      break;
    }
    case ArchitectureKind::prop_rnd: {
      net.add(init_binomial_random(feature_count, arch.binomial_neurons,
                                   derive_seed(seed, "init:binomial")),
              Activation::relu);
      net.add(init_xavier(arch.binomial_neurons, 1, derive_seed(seed, "init:output")),
              Activation::identity);
      break;
    }
    case ArchitectureKind::prop_ens: {
      net.add(init_xavier(feature_count, arch.hidden_units, derive_seed(seed, "init:hidden")),
              Activation::relu);
      net.add(init_linear_pair(arch.hidden_units, arch.ensemble_outputs), Activation::identity);
      break;
    }
    case ArchitectureKind::mlp: {
      net.add(init_xavier(feature_count, arch.hidden_units, derive_seed(seed, "init:hidden")),
              Activation::relu);
      net.add(init_xavier(arch.hidden_units, 1, derive_seed(seed, "init:output")),
              Activation::identity);
      break;
    }
  }
  return net;
}

// Batched inference: scores one row at a time via the configured
// aggregation, thresholds at zero.
inline std::vector<BinaryLabel> predict(const Network& net, const TabularDataset& data,
                                        const EnsembleLossConfig& loss_cfg) {
  if (data.feature_count() != net.input_units()) {
    throw std::invalid_argument("predict: dataset has " + std::to_string(data.feature_count()) +
                                " features, network expects " +
                                std::to_string(net.input_units()));
  }
  std::size_t widest = net.output_units();
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    widest = std::max(widest, net.layer(i).out_units());
  }
  const std::size_t chunk = std::max<std::size_t>(1, 4'000'000 / widest);
  std::vector<BinaryLabel> predictions;
  predictions.reserve(data.rows());
  const std::size_t M = net.output_units();
  for (std::size_t start = 0; start < data.rows(); start += chunk) {
    const std::size_t count = std::min(chunk, data.rows() - start);
    Matrix x(count, data.feature_count());
    for (std::size_t r = 0; r < count; ++r) {
      for (std::size_t f = 0; f < data.feature_count(); ++f) {
        x(r, f) = data.features(start + r, f);
      }
    }
    const auto [out, cache] = forward(net, x);
    for (std::size_t r = 0; r < count; ++r) {
      Matrix row(1, M);
      for (std::size_t m = 0; m < M; ++m) row(0, m) = out(r, m);
      predictions.push_back(predicted_label(aggregate_score(row, loss_cfg)));
    }
  }
  return predictions;
}

inline BinaryMetrics evaluate(const Network& net, const TabularDataset& test,
                              const EnsembleLossConfig& loss_cfg) {
  return compute_metrics(confusion(predict(net, test, loss_cfg), test.labels));
}

struct EpochStat {
  double monitor_loss = 0.0;
  BinaryMetrics validation;
  double selection_value = 0.0;
};

struct TrainResult {
  Network best;
  std::size_t selected_epoch = 0;  // 0-based index into trace
  std::vector<EpochStat> trace;
  std::uint64_t steps = 0;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::vector<EpochStat> trace)
      : std::runtime_error(what), trace(std::move(trace)) {}
  std::vector<EpochStat> trace;
};

inline double selection_value(const BinaryMetrics& m, SelectionMetric metric) {
  const double v = metric == SelectionMetric::f1 ? m.f1 : m.accuracy;
  return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
}

// Trains a copy of `initial` for cfg.epochs epochs of ceil(N/B) balanced
// batches and returns the snapshot with the best validation metric (ties
// keep the earlier epoch).
inline TrainResult train(const Network& initial, const TabularDataset& train_data,
                         const TabularDataset& val_data, const ExperimentConfig& cfg,
                         std::uint64_t run_seed) {
  validate(cfg.optimizer);
  const EnsembleLossConfig& loss_cfg = cfg.architecture.loss;
  validate(loss_cfg);

  Network net = initial;
  std::vector<Matrix*> params;
  std::vector<const Matrix*> param_views;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    params.push_back(&net.layer(i).weights);
    params.push_back(&net.layer(i).bias);
    param_views.push_back(&net.layer(i).weights);
    param_views.push_back(&net.layer(i).bias);
    names.push_back("layer " + std::to_string(i) + " weights");
    names.push_back("layer " + std::to_string(i) + " bias");
  }
  AdamState state = AdamState::for_params(param_views, names);

  BalancedBatchSampler sampler(train_data, cfg.batch_size,
                               make_rng(run_seed, "sampler"));
  Rng mask_stream = make_rng(run_seed, "mask");
  const bool use_mask = loss_cfg.mask_rate > 0.0 && loss_cfg.aggregation != Aggregation::single;

  const std::size_t batches_per_epoch =
      (train_data.rows() + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t M = net.output_units();

  TrainResult result;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches_per_epoch; ++b) {
      const auto batch = sampler.next();
      const auto [out, cache] = forward(net, batch.features);
      const BatchMask mask = use_mask
                                 ? make_mask(batch.labels.size(), M, loss_cfg.mask_rate,
                                             mask_stream())
                                 : BatchMask::all_kept(batch.labels.size(), M);
      const EnsembleGradient grad = ensemble_gradient(out, batch.labels, loss_cfg, mask);
      if (!std::isfinite(grad.monitor_loss)) {
        throw TrainingError("training diverged: non-finite loss at epoch " +
                                std::to_string(epoch) + ", batch " + std::to_string(b),
                            result.trace);
      }
      loss_sum += grad.monitor_loss;
      const BackwardResult grads = backward(net, cache, grad.gradient);
      std::vector<Matrix> flat;
      flat.reserve(grads.layers.size() * 2);
      for (const auto& layer : grads.layers) {
        flat.push_back(layer.weights);
        flat.push_back(layer.bias);
      }
      try {
        adam_step(params, flat, state, cfg.optimizer);
      } catch (const std::runtime_error& err) {
        throw TrainingError(std::string("training diverged: ") + err.what() + " at epoch " +
                                std::to_string(epoch),
                            result.trace);
      }
    }

    EpochStat stat;
    stat.monitor_loss = loss_sum / static_cast<double>(batches_per_epoch);
    stat.validation = evaluate(net, val_data, loss_cfg);
    stat.selection_value = selection_value(stat.validation, cfg.selection_metric);
    result.trace.push_back(stat);
    if (epoch == 0 || stat.selection_value > best_value) {
      best_value = stat.selection_value;
      result.best = net;
      result.selected_epoch = epoch;
    }
  }
  result.steps = state.t;
  return result;
}

struct RepetitionResult {
  bool ok = false;
  std::string error;
  BinaryMetrics test_metrics;
  std::size_t selected_epoch = 0;
  std::vector<EpochStat> trace;
  double wall_seconds = 0.0;
};

struct RunReport {
  ExperimentConfig config;
  std::size_t feature_count = 0;
  std::vector<RepetitionResult> runs;
  BinaryMetrics mean;  // over successful runs; NaN in any run propagates
  double wall_seconds = 0.0;
};

namespace detail {

inline BinaryMetrics mean_metrics(const std::vector<RepetitionResult>& runs) {
  BinaryMetrics mean;
  std::size_t n = 0;
  for (const auto& run : runs) {
    if (!run.ok) continue;
    mean.accuracy += run.test_metrics.accuracy;
    mean.precision += run.test_metrics.precision;
    mean.recall += run.test_metrics.recall;
    mean.f1 += run.test_metrics.f1;
    ++n;
  }
  if (n == 0) throw std::runtime_error("experiment: all repetitions failed");
  const double d = static_cast<double>(n);
  mean.accuracy /= d;
  mean.precision /= d;
  mean.recall /= d;
  mean.f1 /= d;
  return mean;
}

}  // namespace detail

// Machine-readable payload: full precision, NaN spelled "NaN", no
// wall-clock fields, so identical configs reproduce identical bytes.
inline std::string render_metrics_payload(const RunReport& report) {
  const ExperimentConfig& cfg = report.config;
  std::ostringstream os;
  os << "format = binotab-metrics-v1\n";
  os << "name = " << cfg.name << "\n\n";
  os << "[config]\n";
  os << "manifest = " << cfg.manifest_path << "\n";
  os << "normalize = " << (cfg.normalize ? "true" : "false") << "\n";
  os << "kind = " << to_string(cfg.architecture.kind) << "\n";
  os << "hidden_units = " << cfg.architecture.hidden_units << "\n";
  os << "binomial_neurons = " << cfg.architecture.binomial_neurons << "\n";
  os << "ensemble_outputs = " << cfg.architecture.ensemble_outputs << "\n";
  os << "loss = " << to_string(cfg.architecture.loss.loss_kind) << "\n";
  os << "aggregation = " << to_string(cfg.architecture.loss.aggregation) << "\n";
  os << "mask_rate = " << format_metric_full(cfg.architecture.loss.mask_rate) << "\n";
  os << "learning_rate = " << format_metric_full(cfg.optimizer.learning_rate) << "\n";
  os << "weight_decay = " << format_metric_full(cfg.optimizer.weight_decay) << "\n";
  os << "beta1 = " << format_metric_full(cfg.optimizer.beta1) << "\n";
  os << "beta2 = " << format_metric_full(cfg.optimizer.beta2) << "\n";
  os << "epsilon = " << format_metric_full(cfg.optimizer.epsilon) << "\n";
  os << "epochs = " << cfg.epochs << "\n";
  os << "batch_size = " << cfg.batch_size << "\n";
  os << "repetitions = " << cfg.repetitions << "\n";
  os << "base_seed = " << cfg.base_seed << "\n";
  os << "selection_metric = " << to_string(cfg.selection_metric) << "\n";
  os << "feature_count = " << report.feature_count << "\n";
  for (std::size_t r = 0; r < report.runs.size(); ++r) {
    const RepetitionResult& run = report.runs[r];
    os << "\n[run " << r << "]\n";
    if (!run.ok) {
      os << "status = failed\n";
      os << "error = " << run.error << "\n";
      continue;
    }
    os << "status = ok\n";
    os << "accuracy = " << format_metric_full(run.test_metrics.accuracy) << "\n";
    os << "precision = " << format_metric_full(run.test_metrics.precision) << "\n";
    os << "recall = " << format_metric_full(run.test_metrics.recall) << "\n";
    os << "f1 = " << format_metric_full(run.test_metrics.f1) << "\n";
    os << "selected_epoch = " << run.selected_epoch << "\n";
  }
  os << "\n[mean]\n";
  os << "accuracy = " << format_metric_full(report.mean.accuracy) << "\n";
  os << "precision = " << format_metric_full(report.mean.precision) << "\n";
  os << "recall = " << format_metric_full(report.mean.recall) << "\n";
  os << "f1 = " << format_metric_full(report.mean.f1) << "\n";
  return os.str();
}

// Human-readable table in acc / prec / rec / f1 column order.
inline std::string render_human_report(const RunReport& report) {
  const ExperimentConfig& cfg = report.config;
  std::ostringstream os;
  os << "experiment: " << cfg.name << "\n";
  os << "dataset: " << cfg.manifest_path << (cfg.normalize ? "" : " (raw)") << "\n";
  os << "architecture: " << to_string(cfg.architecture.kind)
     << " (loss=" << to_string(cfg.architecture.loss.loss_kind)
     << ", aggregation=" << to_string(cfg.architecture.loss.aggregation)
     << ", mask_rate=" << format_metric_full(cfg.architecture.loss.mask_rate) << ")\n";
  os << "epochs=" << cfg.epochs << " batch_size=" << cfg.batch_size
     << " repetitions=" << cfg.repetitions << " base_seed=" << cfg.base_seed
     << " selection=" << to_string(cfg.selection_metric) << "\n\n";
  char line[160];
  os << "         acc     prec    rec     f1      epoch  seconds\n";
  for (std::size_t r = 0; r < report.runs.size(); ++r) {
    const RepetitionResult& run = report.runs[r];
    if (!run.ok) {
      std::snprintf(line, sizeof(line), "run %-4zu failed: %s\n", r, run.error.c_str());
      os << line;
      continue;
    }
    std::snprintf(line, sizeof(line), "run %-4zu %-7s %-7s %-7s %-7s %-6zu %.1f\n", r,
                  format_metric(run.test_metrics.accuracy).c_str(),
                  format_metric(run.test_metrics.precision).c_str(),
                  format_metric(run.test_metrics.recall).c_str(),
                  format_metric(run.test_metrics.f1).c_str(), run.selected_epoch,
                  run.wall_seconds);
    os << line;
  }
  std::snprintf(line, sizeof(line), "mean     %-7s %-7s %-7s %-7s\n",
                format_metric(report.mean.accuracy).c_str(),
                format_metric(report.mean.precision).c_str(),
                format_metric(report.mean.recall).c_str(),
                format_metric(report.mean.f1).c_str());
  os << line;
  std::snprintf(line, sizeof(line), "total seconds: %.1f\n", report.wall_seconds);
  os << line;
  return os.str();
}

inline std::string render_traces(const RunReport& report) {
  std::ostringstream os;
  for (std::size_t r = 0; r < report.runs.size(); ++r) {
    os << "[run " << r << "]\n";
    const auto& trace = report.runs[r].trace;
    for (std::size_t e = 0; e < trace.size(); ++e) {
      os << "epoch " << e << ": loss=" << format_metric_full(trace[e].monitor_loss)
         << " val_acc=" << format_metric_full(trace[e].validation.accuracy)
         << " val_f1=" << format_metric_full(trace[e].validation.f1) << "\n";
    }
  }
  return os.str();
}

namespace detail {

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace detail

// Runs cfg.repetitions independent repetitions (seed base_seed + r), writes
// metrics.txt (machine payload), report.txt (human table), traces.txt and
// per-run checkpoints into out_dir unless it is empty.
inline RunReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir = "") {
  validate(cfg);
  const auto t_start = std::chrono::steady_clock::now();
  const DatasetManifest manifest = load_manifest(cfg.manifest_path);
  LoadedData data = load_dataset(manifest);
  if (cfg.normalize) {
    impute_and_normalize(data.train, {&data.test});
  } else {
    impute_only(data.train, {&data.test});
  }

  RunReport report;
  report.config = cfg;
  report.feature_count = data.train.feature_count();

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  for (std::size_t r = 0; r < cfg.repetitions; ++r) {
    const std::uint64_t run_seed = cfg.base_seed + r;
    const auto t_run = std::chrono::steady_clock::now();
    RepetitionResult rep;
    try {
      const auto [train_split, val_split] =
          split_train_val(data.train, SplitSpec{0.20, derive_seed(run_seed, "split")});
      const Network net =
          build_network(cfg.architecture, data.train.feature_count(),
                        derive_seed(run_seed, "init"));
      TrainResult trained = train(net, train_split, val_split, cfg, run_seed);
      rep.test_metrics = evaluate(trained.best, data.test, cfg.architecture.loss);
      rep.selected_epoch = trained.selected_epoch;
      rep.trace = std::move(trained.trace);
      rep.ok = true;
      if (!out_dir.empty()) {
        save_checkpoint(trained.best,
                        (std::filesystem::path(out_dir) / ("run" + std::to_string(r) + ".ckpt"))
                            .string());
      }
    } catch (const TrainingError& err) {
      rep.ok = false;
      rep.error = err.what();
      rep.trace = err.trace;
    }
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_run).count();
    report.runs.push_back(std::move(rep));
  }

  report.mean = detail::mean_metrics(report.runs);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  if (!out_dir.empty()) {
    const std::filesystem::path dir(out_dir);
    detail::write_text_file((dir / "metrics.txt").string(), render_metrics_payload(report));
    detail::write_text_file((dir / "report.txt").string(), render_human_report(report));
    detail::write_text_file((dir / "traces.txt").string(), render_traces(report));
  }
  return report;
}

}  // namespace binotab
