#pragma once

// Experiment configuration: INI file with [dataset], [architecture],
// [optimizer] and [training] sections. Architecture kinds carry their own
// defaults; any key can override them.

#include "binotab/adam.hpp"
#include "binotab/ini.hpp"
#include "binotab/losses.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace binotab {

enum class ArchitectureKind { proposed, prop_rnd, prop_ens, mlp };

inline const char* to_string(ArchitectureKind k) {
  switch (k) {
    case ArchitectureKind::proposed: return "proposed";
    case ArchitectureKind::prop_rnd: return "prop_rnd";
    case ArchitectureKind::prop_ens: return "prop_ens";
    case ArchitectureKind::mlp: return "mlp";
  }
  return "?";
}

inline ArchitectureKind architecture_kind_from(const std::string& name) {
  if (name == "proposed") return ArchitectureKind::proposed;
  if (name == "prop_rnd") return ArchitectureKind::prop_rnd;
  if (name == "prop_ens") return ArchitectureKind::prop_ens;
  if (name == "mlp") return ArchitectureKind::mlp;
  throw std::runtime_error("unknown architecture '" + name +
                           "' (expected proposed | prop_rnd | prop_ens | mlp)");
}

struct ArchitectureSpec {
  ArchitectureKind kind = ArchitectureKind::proposed;
  std::size_t hidden_units = 256;        // mlp width, prop_ens hidden layer
  std::size_t binomial_neurons = 100000; // prop_rnd count / proposed truncation cap
  std::size_t ensemble_outputs = 1024;   // prop_ens head width
  EnsembleLossConfig loss;
};

// Kind-specific defaults; single-output networks train with the plain
// (single) loss, the ensemble head with hinge + boosting.
inline ArchitectureSpec make_architecture(ArchitectureKind kind) {
  ArchitectureSpec arch;
  arch.kind = kind;
  arch.loss.loss_kind = LossKind::hinge;
  switch (kind) {
    case ArchitectureKind::proposed:
      arch.binomial_neurons = 100000;
      arch.loss.aggregation = Aggregation::single;
      break;
    case ArchitectureKind::prop_rnd:
      arch.binomial_neurons = 20000;
      arch.loss.aggregation = Aggregation::single;
      break;
    case ArchitectureKind::prop_ens:
      arch.hidden_units = 256;
      arch.ensemble_outputs = 1024;
      arch.loss.aggregation = Aggregation::boosting;
      break;
    case ArchitectureKind::mlp:
      arch.hidden_units = 256;
      arch.loss.aggregation = Aggregation::single;
      break;
  }
  return arch;
}

enum class SelectionMetric { f1, accuracy };

inline const char* to_string(SelectionMetric m) {
  return m == SelectionMetric::f1 ? "f1" : "accuracy";
}

struct ExperimentConfig {
  std::string name = "experiment";
  std::string manifest_path;
  bool normalize = true;
  ArchitectureSpec architecture;
  AdamConfig optimizer;
  std::size_t epochs = 30;
  std::size_t batch_size = 1000;
  std::size_t repetitions = 5;
  std::uint64_t base_seed = 1;
  SelectionMetric selection_metric = SelectionMetric::f1;
};

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.repetitions == 0) throw std::invalid_argument("config: repetitions must be >= 1");
  if (cfg.epochs == 0) throw std::invalid_argument("config: epochs must be >= 1");
  if (cfg.batch_size < 2) throw std::invalid_argument("config: batch_size must be >= 2");
  if (cfg.manifest_path.empty()) throw std::invalid_argument("config: dataset manifest missing");
  validate(cfg.optimizer);
  validate(cfg.architecture.loss);
}

inline ExperimentConfig parse_experiment_config(const IniFile& ini,
                                                const std::string& base_dir = ".",
                                                const std::string& default_name = "experiment") {
  ExperimentConfig cfg;
  cfg.name = ini.get_or("", "name", default_name);

  std::string manifest = ini.get("dataset", "manifest");
  const std::filesystem::path mp(manifest);
  cfg.manifest_path = mp.is_absolute() ? manifest
                                       : (std::filesystem::path(base_dir) / mp).string();
  cfg.normalize = parse_bool(ini.get_or("dataset", "normalize", "true"), "normalize");

  cfg.architecture =
      make_architecture(architecture_kind_from(ini.get_or("architecture", "kind", "proposed")));
  ArchitectureSpec& arch = cfg.architecture;
  if (ini.has("architecture", "hidden_units")) {
    arch.hidden_units = static_cast<std::size_t>(
        parse_int(ini.get("architecture", "hidden_units"), "hidden_units"));
  }
  if (ini.has("architecture", "binomial_neurons")) {
    arch.binomial_neurons = static_cast<std::size_t>(
        parse_int(ini.get("architecture", "binomial_neurons"), "binomial_neurons"));
  }
  if (ini.has("architecture", "ensemble_outputs")) {
    arch.ensemble_outputs = static_cast<std::size_t>(
        parse_int(ini.get("architecture", "ensemble_outputs"), "ensemble_outputs"));
  }
  if (ini.has("architecture", "loss")) {
    const std::string loss = ini.get("architecture", "loss");
    if (loss == "hinge") arch.loss.loss_kind = LossKind::hinge;
    else if (loss == "binary_log") arch.loss.loss_kind = LossKind::binary_log;
    else throw std::runtime_error("config: unknown loss '" + loss + "'");
  }
  if (ini.has("architecture", "aggregation")) {
    const std::string agg = ini.get("architecture", "aggregation");
    if (agg == "single") arch.loss.aggregation = Aggregation::single;
    else if (agg == "bagging") arch.loss.aggregation = Aggregation::bagging;
    else if (agg == "boosting") arch.loss.aggregation = Aggregation::boosting;
    else throw std::runtime_error("config: unknown aggregation '" + agg + "'");
  }
  if (ini.has("architecture", "mask_rate")) {
    arch.loss.mask_rate = parse_double(ini.get("architecture", "mask_rate"), "mask_rate");
  }

  if (ini.has("optimizer", "learning_rate")) {
    cfg.optimizer.learning_rate =
        parse_double(ini.get("optimizer", "learning_rate"), "learning_rate");
  }
  if (ini.has("optimizer", "weight_decay")) {
    cfg.optimizer.weight_decay =
        parse_double(ini.get("optimizer", "weight_decay"), "weight_decay");
  }
  if (ini.has("optimizer", "beta1")) {
    cfg.optimizer.beta1 = parse_double(ini.get("optimizer", "beta1"), "beta1");
  }
  if (ini.has("optimizer", "beta2")) {
    cfg.optimizer.beta2 = parse_double(ini.get("optimizer", "beta2"), "beta2");
  }
  if (ini.has("optimizer", "epsilon")) {
    cfg.optimizer.epsilon = parse_double(ini.get("optimizer", "epsilon"), "epsilon");
  }

  if (ini.has("training", "epochs")) {
    cfg.epochs = static_cast<std::size_t>(parse_int(ini.get("training", "epochs"), "epochs"));
  }
  if (ini.has("training", "batch_size")) {
    cfg.batch_size =
        static_cast<std::size_t>(parse_int(ini.get("training", "batch_size"), "batch_size"));
  }
  if (ini.has("training", "repetitions")) {
    cfg.repetitions = static_cast<std::size_t>(
        parse_int(ini.get("training", "repetitions"), "repetitions"));
  }
  if (ini.has("training", "base_seed")) {
    cfg.base_seed =
        static_cast<std::uint64_t>(parse_int(ini.get("training", "base_seed"), "base_seed"));
  }
  if (ini.has("training", "selection_metric")) {
    const std::string metric = ini.get("training", "selection_metric");
    if (metric == "f1") cfg.selection_metric = SelectionMetric::f1;
    else if (metric == "accuracy") cfg.selection_metric = SelectionMetric::accuracy;
    else throw std::runtime_error("config: unknown selection_metric '" + metric + "'");
  }

  validate(cfg);
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  const std::filesystem::path p(path);
  return parse_experiment_config(IniFile::parse_file(path), p.parent_path().string(),
                                 p.stem().string());
}

}  // namespace binotab
