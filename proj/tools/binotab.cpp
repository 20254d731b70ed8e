// Command-line front end: train experiments from a config file, evaluate
// saved checkpoints against a dataset manifest, and merge run directories
// into one table.

#include "binotab/checkpoint.hpp"
#include "binotab/config.hpp"
#include "binotab/experiment.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int cmd_train(const std::string& config_path, const std::string& out_dir,
              long long repetitions, long long seed, const std::string& arch) {
  binotab::ExperimentConfig cfg = binotab::load_experiment_config(config_path);
  if (repetitions > 0) cfg.repetitions = static_cast<std::size_t>(repetitions);
  if (seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed);
  if (!arch.empty()) {
    // Overriding the architecture resets its kind-specific defaults; the
    // loss/optimizer sections of the config still apply.
    const auto kind = binotab::architecture_kind_from(arch);
    binotab::ArchitectureSpec fresh = binotab::make_architecture(kind);
    fresh.loss.mask_rate = cfg.architecture.loss.mask_rate;
    fresh.loss.loss_kind = cfg.architecture.loss.loss_kind;
    cfg.architecture = fresh;
    cfg.name += "_" + arch;
  }
  const binotab::RunReport report = binotab::run_experiment(cfg, out_dir);
  std::cout << binotab::render_human_report(report);
  std::cout << "wrote " << (fs::path(out_dir) / "metrics.txt").string() << "\n";
  return 0;
}

int cmd_evaluate(const std::string& checkpoint_path, const std::string& manifest_path,
                 bool raw) {
  const binotab::Network net = binotab::load_checkpoint(checkpoint_path);
  const binotab::DatasetManifest manifest = binotab::load_manifest(manifest_path);
  binotab::LoadedData data = binotab::load_dataset(manifest);
  if (raw) {
    binotab::impute_only(data.train, {&data.test});
  } else {
    binotab::impute_and_normalize(data.train, {&data.test});
  }
  binotab::EnsembleLossConfig loss_cfg;
  loss_cfg.aggregation = net.output_units() == 1 ? binotab::Aggregation::single
                                                 : binotab::Aggregation::bagging;
  const binotab::BinaryMetrics m = binotab::evaluate(net, data.test, loss_cfg);
  std::printf("acc %s  prec %s  rec %s  f1 %s\n", binotab::format_metric(m.accuracy).c_str(),
              binotab::format_metric(m.precision).c_str(),
              binotab::format_metric(m.recall).c_str(),
              binotab::format_metric(m.f1).c_str());
  return 0;
}

int cmd_report(const std::string& runs_dir) {
  std::vector<fs::path> metric_files;
  const fs::path root(runs_dir);
  if (fs::exists(root / "metrics.txt")) metric_files.push_back(root / "metrics.txt");
  if (fs::is_directory(root)) {
    for (const auto& entry : fs::directory_iterator(root)) {
      if (entry.is_directory() && fs::exists(entry.path() / "metrics.txt")) {
        metric_files.push_back(entry.path() / "metrics.txt");
      }
    }
  }
  std::sort(metric_files.begin(), metric_files.end());
  if (metric_files.empty()) {
    std::cerr << "no metrics.txt found under " << runs_dir << "\n";
    return 1;
  }
  std::printf("%-28s %-7s %-7s %-7s %-7s\n", "experiment", "acc", "prec", "rec", "f1");
  for (const auto& file : metric_files) {
    const binotab::IniFile ini = binotab::IniFile::parse_file(file.string());
    auto metric = [&](const char* key) {
      const std::string v = ini.get("mean", key);
      return v == "NaN" ? std::string("NaN")
                        : binotab::format_metric(binotab::parse_double(v, key));
    };
    std::printf("%-28s %-7s %-7s %-7s %-7s\n", ini.get_or("", "name", "?").c_str(),
                metric("accuracy").c_str(), metric("precision").c_str(),
                metric("recall").c_str(), metric("f1").c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binomially initialized networks for tabular binary classification"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  long long repetitions = -1, seed = -1;
  std::string arch;
  auto* train = app.add_subcommand("train", "Run an experiment from a config file");
  train->add_option("--config", config_path, "Experiment config (INI)")->required();
  train->add_option("--out", out_dir, "Output directory for reports and checkpoints")
      ->required();
  train->add_option("--repetitions", repetitions, "Override repetition count");
  train->add_option("--seed", seed, "Override base seed");
  train->add_option("--arch", arch, "Override architecture kind");

  std::string checkpoint_path, manifest_path;
  bool raw = false;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint on a dataset");
  evaluate->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
  evaluate->add_option("--manifest", manifest_path, "Dataset manifest")->required();
  evaluate->add_flag("--raw", raw, "Skip normalization (impute only)");

  std::string runs_dir;
  auto* report = app.add_subcommand("report", "Merge run directories into one table");
  report->add_option("--runs", runs_dir, "Directory of run outputs")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(config_path, out_dir, repetitions, seed, arch);
    if (evaluate->parsed()) return cmd_evaluate(checkpoint_path, manifest_path, raw);
    if (report->parsed()) return cmd_report(runs_dir);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
