#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "winreg/cli.hpp"
#include "winreg/errors.hpp"
#include "winreg/experiment.hpp"

using namespace winreg;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kSmall = R"({
  "image_size": 16, "xi": 4, "snr_db": 20, "corpus": "mixed", "corpus_count": 3,
  "window_kind": ["none", "lin", "logcos"], "windows": 2,
  "estimators": ["mse", "upre", "gcv_true"], "r_train": [1, 2], "grid_points": 24, "seed": 5
})";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("winreg_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "winreg");
  return run_cli(args);
}

}  // namespace

TEST_CASE("config parsing accepts scalars or arrays") {
  const ExperimentConfig c = parse_config(kSmall);
  CHECK(c.image_size == 16);
  CHECK(c.window_kinds.size() == 3);
  CHECK(c.window_kinds[2] == WindowKind::cosine_log);
  CHECK(c.estimators[2] == Estimator::gcv_true);
  CHECK(c.r_train == std::vector<int>{1, 2});
  CHECK(c.search.grid_points == 24);
  const ExperimentConfig d = parse_config(R"({"window_kind": "log", "estimators": "gcv", "r_train": 3, "penalty": "laplacian"})");
  CHECK(d.window_kinds == std::vector<WindowKind>{WindowKind::nonoverlap_log});
  CHECK(d.estimators == std::vector<Estimator>{Estimator::gcv_decoupled});
  CHECK(d.r_train == std::vector<int>{3});
  CHECK(d.penalty == PenaltyKind::laplacian);
  CHECK(parse_config("{}").image_size == 256);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config("[]"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"imagesize": 16})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"image_size": "16"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"penalty": "tv"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"image_size": 4})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"xi": -1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"window_kind": "lincos", "windows": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"window_kind": "lincos", "estimators": "gcv_decoupled"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"corpus": "manifest"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"alpha_min": 2, "alpha_max": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"r_train": [0]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"estimators": "lasso"})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("experiment training and validation are self-consistent") {
  const Experiment ex(parse_config(kSmall));
  CHECK(ex.split(SplitId::train).sets.size() == 3);
  CHECK(ex.corpus().labels[1][0] == "mixed_validation_1_00");
  const auto params = train_all(ex);
  CHECK(params.size() == 2 * 3 * 3);
  for (const TrainedParams& tp : params) {
    CHECK(tp.alphas.size() == ex.window_count(tp.kind));
    CHECK(objective_value(ex, tp.estimator, tp.kind, tp.R, tp.alphas) == doctest::Approx(tp.objective).epsilon(1e-12));
    CHECK(tp.boundary.size() == static_cast<std::size_t>(tp.alphas.size()));
    CHECK_FALSE(tp.trace.empty());
  }
  const EstimatorReport rep = validate(ex, params);
  REQUIRE(rep.entries.size() == params.size());
  for (const ValidationEntry& e : rep.entries) {
    CHECK(e.errors[0].size() == static_cast<std::size_t>(e.params.R));
    CHECK(e.errors[1].size() == 3);
    for (int s = 0; s < 3; ++s) {
      double sum = 0.0;
      for (double v : e.errors[s]) sum += v;
      CHECK(std::abs(e.mean[s] - sum / static_cast<double>(e.errors[s].size())) <= 1e-12 * e.mean[s]);
    }
  }
  // The MSE-trained parameters minimize the training MSE over their own search.
  for (const ValidationEntry& e : rep.entries) {
    if (e.params.estimator != Estimator::mse) continue;
    for (const ValidationEntry& o : rep.entries) {
      if (o.params.kind == e.params.kind && o.params.R == e.params.R)
        CHECK(objective_value(ex, Estimator::mse, e.params.kind, e.params.R, e.params.alphas) <=
              objective_value(ex, Estimator::mse, o.params.kind, o.params.R, o.params.alphas) * (1 + 1e-9));
    }
  }
  REQUIRE(rep.baselines.size() == 3);
  for (const BaselineEntry& b : rep.baselines)
    for (int s = 0; s < 3; ++s) CHECK(b.errors[s].size() == 3);
}

TEST_CASE("parameter files round trip") {
  const Experiment ex(parse_config(kSmall));
  const auto params = std::vector<TrainedParams>{train(ex, Estimator::upre, WindowKind::cosine_log, 2)};
  const json doc = params_to_json(params);
  const auto back = params_from_json(json::parse(doc.dump()));
  REQUIRE(back.size() == 1);
  CHECK(back[0].estimator == Estimator::upre);
  CHECK(back[0].kind == WindowKind::cosine_log);
  CHECK(back[0].R == 2);
  CHECK((back[0].alphas - params[0].alphas).norm() == 0.0);
  CHECK(back[0].objective == params[0].objective);
}

TEST_CASE("table csv has one row per R and window kind") {
  const Experiment ex(parse_config(kSmall));
  const EstimatorReport rep = validate(ex, train_all(ex));
  const std::string csv = table_csv(rep);
  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  CHECK(header.rfind("R,window,", 0) == 0);
  CHECK(std::count(header.begin(), header.end(), ',') == 1 + 3 * 3);
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2 * 3);
  CHECK_THROWS_AS(percent_relative_error(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(2)), DomainError);
  const auto f = five_numbers({4.0, 1.0, 3.0, 2.0, 5.0});
  CHECK(f == std::array<double, 5>{1.0, 2.0, 3.0, 4.0, 5.0});
  CHECK(five_numbers({1.0, 2.0})[1] == doctest::Approx(1.25));
}

TEST_CASE("command line pipeline and exit codes") {
  TempDir tmp("pipeline");
  const fs::path cfg = write_config(tmp.path, kSmall);
  const std::string out1 = (tmp.path / "a" / "run").string(), out2 = (tmp.path / "b" / "run").string();
  for (const std::string& out : {out1, out2}) {
    CHECK(cli({"gen", "--config", cfg.string(), "--out", out}) == kExitOk);
    CHECK(cli({"train", "--config", cfg.string(), "--out", out}) == kExitOk);
    CHECK(cli({"validate", "--config", cfg.string(), "--out", out}) == kExitOk);
    CHECK(cli({"report", "--config", cfg.string(), "--out", out}) == kExitOk);
  }
  for (const char* f : {"params.json", "report.json", "table.csv", "summary.md", "param_vs_R.csv",
                        "boxplot_errors.csv", "data/datasets.json", "data/psf.pgm"}) {
    CHECK(fs::exists(fs::path(out1) / f));
    CHECK(slurp(fs::path(out1) / f) == slurp(fs::path(out2) / f));
  }
  const json datasets = json::parse(slurp(fs::path(out1) / "data/datasets.json"));
  CHECK(datasets.at("datasets").size() == 9);

  CHECK(cli({"train", "--config", cfg.string(), "--out", out1, "--seed", "6"}) == kExitOk);
  CHECK(slurp(fs::path(out1) / "params.json") != slurp(fs::path(out2) / "params.json"));

  CHECK(cli({"train", "--config", (tmp.path / "none.json").string()}) == kExitIo);
  CHECK(cli({"train", "--config", write_config(tmp.path, R"({"bogus": 1})").string()}) == kExitConfig);
  CHECK(cli({"frobnicate"}) == kExitConfig);
  CHECK(cli({"train", "--seed", "abc"}) == kExitConfig);
  const fs::path crowded = write_config(tmp.path, R"({"image_size": 8, "xi": 4, "corpus": "mixed", "corpus_count": 1,
    "window_kind": "lin", "windows": 60, "estimators": "upre", "r_train": 1})");
  CHECK(cli({"train", "--config", crowded.string(), "--out", (tmp.path / "c").string()}) == kExitNumerical);
  const fs::path empty = tmp.path / "empty";
  fs::create_directories(empty);
  CHECK(cli({"report", "--config", cfg.string(), "--out", empty.string()}) == kExitConfig);
  CHECK(cli({"report", "--config", cfg.string(), "--out", empty.string(), (empty / "x.json").string()}) == kExitIo);
}
