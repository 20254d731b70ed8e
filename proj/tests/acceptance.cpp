// Acceptance suite. Runs every gate end to end and prints one line per
// criterion; exits nonzero if any gate fails. The Adult reproduction gate
// is skipped when the dataset has not been downloaded.

#include "binotab/experiment.hpp"

#include "synthetic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace binotab;
namespace fs = std::filesystem;

namespace {

#ifndef BINOTAB_SOURCE_DIR
#define BINOTAB_SOURCE_DIR "."
#endif

struct Gate {
  int id;
  std::string name;
  std::function<std::string()> run;  // returns "" on pass, reason on failure
  bool skip = false;
  std::string skip_reason;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// ---- criterion 1: gradient oracles -----------------------------------

std::string check_loss_gradients() {
  for (const BinaryLabel label : {BinaryLabel::positive(), BinaryLabel::negative()}) {
    for (const double sc : {0.5, 1.0, 2.0}) {
      for (double out = -3.0; out <= 3.0; out += 0.00791) {
        if (std::abs(1.0 - label.value * out) >= 1e-3) {
          const double h = 1e-6;
          const double numeric =
              sc * (hinge_loss(out + h, label) - hinge_loss(out - h, label)) / (2.0 * h);
          if (std::abs(hinge_gradient(out, label, sc) - numeric) >= 1e-6) {
            return "hinge gradient mismatch at out=" + std::to_string(out);
          }
        }
      }
      for (double out = -15.0; out <= 15.0; out += 0.0397) {
        const double h = 1e-5;
        const double numeric =
            sc * (binary_log_loss(out + h, label) - binary_log_loss(out - h, label)) /
            (2.0 * h);
        if (std::abs(binary_log_gradient(out, label, sc) - numeric) >= 1e-6) {
          return "binary log gradient mismatch at out=" + std::to_string(out);
        }
      }
    }
  }
  return "";
}

std::string check_network_gradients() {
  // 4 features, 8 hidden, 1 output; smooth activations keep the finite
  // differences clean everywhere.
  Network net;
  net.add(init_xavier(4, 8, 2024), Activation::sigmoid);
  net.add(init_xavier(8, 1, 2025), Activation::identity);

  Rng rng(7);
  Matrix x(6, 4);
  std::vector<BinaryLabel> labels;
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 4; ++c) x(r, c) = uniform_in(rng, -1.5, 1.5);
    labels.push_back(uniform_real(rng) < 0.5 ? BinaryLabel::positive()
                                             : BinaryLabel::negative());
  }

  const auto loss_of = [&]() {
    const auto [out, cache] = forward(net, x);
    double sum = 0.0;
    for (std::size_t b = 0; b < x.rows(); ++b) sum += binary_log_loss(out(b, 0), labels[b]);
    return sum / static_cast<double>(x.rows());
  };

  const auto [out, cache] = forward(net, x);
  Matrix out_grad(x.rows(), 1);
  for (std::size_t b = 0; b < x.rows(); ++b) {
    out_grad(b, 0) =
        binary_log_gradient(out(b, 0), labels[b], 1.0) / static_cast<double>(x.rows());
  }
  const BackwardResult grads = backward(net, cache, out_grad);

  const double h = 1e-6;
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    for (Matrix DenseLayer::*member : {&DenseLayer::weights, &DenseLayer::bias}) {
      Matrix& param = net.layer(i).*member;
      const Matrix& analytic =
          member == &DenseLayer::weights ? grads.layers[i].weights : grads.layers[i].bias;
      for (std::size_t r = 0; r < param.rows(); ++r) {
        for (std::size_t c = 0; c < param.cols(); ++c) {
          const double saved = param(r, c);
          param(r, c) = saved + h;
          const double up = loss_of();
          param(r, c) = saved - h;
          const double down = loss_of();
          param(r, c) = saved;
          const double numeric = (up - down) / (2.0 * h);
          const double a = analytic(r, c);
          if (std::abs(numeric - a) / std::max({1.0, std::abs(numeric), std::abs(a)}) >=
              1e-5) {
            return "network gradient mismatch, layer " + std::to_string(i);
          }
        }
      }
    }
  }
  return "";
}

std::string criterion_gradients() {
  const auto start = std::chrono::steady_clock::now();
  std::string err = check_loss_gradients();
  if (err.empty()) err = check_network_gradients();
  if (!err.empty()) return err;
  const double elapsed = seconds_since(start);
  if (elapsed >= 10.0) return "took " + std::to_string(elapsed) + " s, budget 10 s";
  return "";
}

// ---- criterion 2: combinatorics oracle --------------------------------

std::string criterion_combinatorics() {
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t f = 1; f <= 12; ++f) {
    // Brute-force subset oracle, independent of unrank.
    std::vector<std::vector<std::size_t>> expected;
    for (std::uint64_t bits = 1; bits < (1ull << f); ++bits) {
      std::vector<std::size_t> indices;
      for (std::size_t i = 0; i < f; ++i) {
        if (bits & (1ull << i)) indices.push_back(i);
      }
      expected.push_back(std::move(indices));
    }
    std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
      if (a.size() != b.size()) return a.size() < b.size();
      return a < b;
    });

    const auto got = enumerate_prefix(f, static_cast<std::size_t>(total_combinations(f)));
    if (got.size() != expected.size()) {
      return "F=" + std::to_string(f) + ": enumeration size " + std::to_string(got.size());
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (got[i].indices != expected[i]) {
        return "F=" + std::to_string(f) + ": combination " + std::to_string(i) + " differs";
      }
      if (rank_of(f, got[i]) != i) {
        return "F=" + std::to_string(f) + ": rank roundtrip failed at " + std::to_string(i);
      }
      if (!(unrank(f, i) == got[i])) {
        return "F=" + std::to_string(f) + ": unrank disagrees at " + std::to_string(i);
      }
    }
  }
  if (total_combinations(8) != 255) return "count(8) != 255";
  if (total_combinations(14) != 16383) return "count(14) != 16383";
  if (total_combinations(31) != 2147483647ull) return "count(31) != 2147483647";
  const double elapsed = seconds_since(start);
  if (elapsed >= 10.0) return "took " + std::to_string(elapsed) + " s, budget 10 s";
  return "";
}

// ---- criterion 3: synthetic interaction task --------------------------

std::string criterion_interaction() {
  const auto start = std::chrono::steady_clock::now();
  TempDir dir("binotab_acc_xor");
  const std::string manifest = testing::write_dataset(
      dir.path.string(), testing::make_xor(5000, 1001), testing::make_xor(2000, 1002), 8);
  ExperimentConfig cfg;
  cfg.name = "accept_xor";
  cfg.manifest_path = manifest;
  cfg.architecture = make_architecture(ArchitectureKind::proposed);
  cfg.epochs = 30;
  cfg.batch_size = 500;
  cfg.repetitions = 5;
  cfg.base_seed = 100;
  const RunReport report = run_experiment(cfg);
  for (std::size_t r = 0; r < report.runs.size(); ++r) {
    if (!report.runs[r].ok) return "run " + std::to_string(r) + " failed";
    if (report.runs[r].test_metrics.accuracy < 0.95) {
      return "run " + std::to_string(r) + " accuracy " +
             format_metric_full(report.runs[r].test_metrics.accuracy) + " < 0.95";
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 120.0) return "took " + std::to_string(elapsed) + " s, budget 120 s";
  return "";
}

// ---- criterion 4: separable sanity ------------------------------------

std::string criterion_separable() {
  const auto start = std::chrono::steady_clock::now();
  TempDir dir("binotab_acc_sep");
  const std::string manifest = testing::write_dataset(
      dir.path.string(), testing::make_separable(2000, 2001), testing::make_separable(500, 2002),
      2);
  for (const ArchitectureKind kind :
       {ArchitectureKind::proposed, ArchitectureKind::prop_rnd, ArchitectureKind::prop_ens,
        ArchitectureKind::mlp}) {
    ExperimentConfig cfg;
    cfg.name = std::string("accept_sep_") + to_string(kind);
    cfg.manifest_path = manifest;
    cfg.architecture = make_architecture(kind);
    cfg.epochs = 30;
    cfg.batch_size = 250;
    cfg.repetitions = 1;
    cfg.base_seed = 7;
    const RunReport report = run_experiment(cfg);
    if (!report.runs[0].ok) return std::string(to_string(kind)) + " failed";
    if (report.mean.f1 != 1.0) {
      return std::string(to_string(kind)) + " f1 " + format_metric_full(report.mean.f1) +
             " != 1.0";
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 60.0) return "took " + std::to_string(elapsed) + " s, budget 60 s";
  return "";
}

// ---- criterion 5: Adult reproduction ----------------------------------

std::string adult_manifest_path() {
  if (const char* env = std::getenv("BINOTAB_ADULT_MANIFEST")) return env;
  const fs::path in_repo = fs::path(BINOTAB_SOURCE_DIR) / "datasets" / "adult" / "manifest.cfg";
  return in_repo.string();
}

bool adult_available(std::string& reason) {
  const std::string manifest = adult_manifest_path();
  if (!fs::exists(manifest)) {
    reason = "manifest not found at " + manifest;
    return false;
  }
  try {
    load_manifest(manifest);
  } catch (const std::exception& err) {
    reason = err.what();
    return false;
  }
  return true;
}

std::string criterion_adult() {
  struct Target {
    ArchitectureKind kind;
    double f1;
  };
  const Target targets[] = {{ArchitectureKind::proposed, 0.658},
                            {ArchitectureKind::prop_rnd, 0.659},
                            {ArchitectureKind::prop_ens, 0.661},
                            {ArchitectureKind::mlp, 0.651}};
  std::string summary;
  for (const Target& target : targets) {
    ExperimentConfig cfg;
    cfg.name = std::string("adult_") + to_string(target.kind);
    cfg.manifest_path = adult_manifest_path();
    cfg.architecture = make_architecture(target.kind);
    cfg.repetitions = 5;
    cfg.base_seed = 1;
    const RunReport report = run_experiment(cfg);
    const double f1 = report.mean.f1;
    std::fprintf(stderr, "    adult %-9s mean f1 %.3f (target %.3f +- 0.03)\n",
                 to_string(target.kind), f1, target.f1);
    if (!(std::abs(f1 - target.f1) <= 0.03)) {
      summary += std::string(to_string(target.kind)) + " f1 " + format_metric(f1) +
                 " outside " + format_metric(target.f1) + " +- 0.03; ";
    }
  }
  return summary;
}

// ---- criterion 6: NaN report semantics ---------------------------------

std::string criterion_nan_semantics() {
  Network net;
  DenseLayer layer;
  layer.weights = Matrix(1, 2, 0.0);
  layer.bias = Matrix(1, 1, 0.0);
  layer.bias(0, 0) = -1.0;  // constant negative score
  net.add(std::move(layer), Activation::identity);

  TabularDataset data;
  data.schema.columns = {{"x0", ColumnKind::numeric, ""},
                         {"x1", ColumnKind::numeric, ""},
                         {"y", ColumnKind::label, "pos"}};
  data.features = Matrix(50, 2, 0.0);
  for (std::size_t r = 0; r < 50; ++r) {
    data.labels.push_back(r < 20 ? BinaryLabel::positive() : BinaryLabel::negative());
  }
  data.normalized = true;

  EnsembleLossConfig loss;
  loss.aggregation = Aggregation::single;
  const BinaryMetrics m = evaluate(net, data, loss);

  RunReport report;
  report.config.name = "constant_negative";
  report.config.manifest_path = "synthetic";
  report.config.architecture = make_architecture(ArchitectureKind::mlp);
  report.config.repetitions = 1;
  RepetitionResult rep;
  rep.ok = true;
  rep.test_metrics = m;
  report.runs.push_back(rep);
  report.mean = m;

  const std::string machine = render_metrics_payload(report);
  const std::string human = render_human_report(report);
  if (machine.find("precision = NaN") == std::string::npos) {
    return "machine payload lacks 'precision = NaN'";
  }
  if (machine.find("f1 = NaN") == std::string::npos) return "machine payload lacks 'f1 = NaN'";
  if (machine.find("recall = 0\n") == std::string::npos) {
    return "machine payload recall is not 0";
  }
  if (human.find("NaN") == std::string::npos) return "human table lacks NaN";
  if (human.find("0.000") == std::string::npos) return "human table lacks 0.000 recall";
  return "";
}

// ---- criterion 7: determinism ------------------------------------------

std::string criterion_determinism() {
  TempDir data_dir("binotab_acc_det_data");
  TempDir out_a("binotab_acc_det_a");
  TempDir out_b("binotab_acc_det_b");
  const std::string manifest = testing::write_dataset(
      data_dir.path.string(), testing::make_separable(600, 3001), testing::make_separable(200, 3002),
      2);
  ExperimentConfig cfg;
  cfg.name = "accept_det";
  cfg.manifest_path = manifest;
  cfg.architecture = make_architecture(ArchitectureKind::prop_ens);
  cfg.epochs = 4;
  cfg.batch_size = 200;
  cfg.repetitions = 2;
  cfg.base_seed = 12;
  run_experiment(cfg, out_a.path.string());
  run_experiment(cfg, out_b.path.string());
  const std::string a = slurp(out_a.path / "metrics.txt");
  const std::string b = slurp(out_b.path / "metrics.txt");
  if (a.empty()) return "no payload written";
  if (a != b) return "metric payloads differ between identical invocations";
  return "";
}

// ---- criterion 8: balanced sampler --------------------------------------

std::string criterion_balanced_sampler() {
  const TabularDataset data = testing::make_imbalanced(20000, 0.05, 4004);
  BalancedBatchSampler sampler(data, 1000, Rng(11));
  for (int i = 0; i < 1000; ++i) {
    const auto batch = sampler.next();
    std::size_t positives = 0;
    for (const auto& label : batch.labels) positives += label.is_positive() ? 1 : 0;
    if (batch.labels.size() != 1000 || positives != 500) {
      return "batch " + std::to_string(i) + " has " + std::to_string(positives) +
             " positives of " + std::to_string(batch.labels.size());
    }
  }
  return "";
}

}  // namespace

int main() {
  std::string adult_skip;
  const bool adult_ok = adult_available(adult_skip);

  std::vector<Gate> gates = {
      {1, "gradient oracle suite", criterion_gradients},
      {2, "combinatorics oracle", criterion_combinatorics},
      {3, "synthetic interaction task", criterion_interaction},
      {4, "separable sanity", criterion_separable},
      {5, "adult reproduction", criterion_adult, !adult_ok, adult_skip},
      {6, "NaN report semantics", criterion_nan_semantics},
      {7, "determinism", criterion_determinism},
      {8, "balanced sampler", criterion_balanced_sampler},
  };

  int failures = 0;
  for (const Gate& gate : gates) {
    if (gate.skip) {
      std::printf("[%d] SKIP %s (%s)\n", gate.id, gate.name.c_str(), gate.skip_reason.c_str());
      std::fflush(stdout);
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    std::string reason;
    try {
      reason = gate.run();
    } catch (const std::exception& err) {
      reason = std::string("exception: ") + err.what();
    }
    const double elapsed = seconds_since(start);
    if (reason.empty()) {
      std::printf("[%d] PASS %s (%.1f s)\n", gate.id, gate.name.c_str(), elapsed);
    } else {
      std::printf("[%d] FAIL %s: %s (%.1f s)\n", gate.id, gate.name.c_str(), reason.c_str(),
                  elapsed);
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
