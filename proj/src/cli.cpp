#include "winreg/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "winreg/errors.hpp"

namespace winreg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd json_vec(const json& a) {
  const auto values = a.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  return out;
}

std::string trace_name(const TrainedParams& tp) {
  return estimator_name(tp.estimator) + "_" + window_kind_name(tp.kind) + "_R" + std::to_string(tp.R);
}

class Stopwatch {
 public:
  explicit Stopwatch(bool verbose) : verbose_(verbose), start_(std::chrono::steady_clock::now()) {}
  void lap(const std::string& what) {
    if (!verbose_) return;
    const auto now = std::chrono::steady_clock::now();
    std::cerr << "[" << std::chrono::duration<double>(now - start_).count() << " s] " << what << "\n";
  }

 private:
  bool verbose_;
  std::chrono::steady_clock::time_point start_;
};

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool verbose = false;
  std::string params_path;
  std::vector<std::string> reports;
};

ExperimentConfig resolve_config(const Options& o) {
  if (o.config_path.empty()) throw ConfigError("--config is required");
  ExperimentConfig c = load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.output_dir = o.out;
  if (c.corpus == CorpusSource::manifest && fs::path(c.manifest).is_relative())
    c.manifest = (fs::path(o.config_path).parent_path() / c.manifest).string();
  return c;
}

json config_summary(const ExperimentConfig& c) {
  json kinds = json::array();
  for (WindowKind k : c.window_kinds) kinds.push_back(window_kind_name(k));
  json ests = json::array();
  for (Estimator e : c.estimators) ests.push_back(estimator_name(e));
  return json{{"image_size", c.image_size},
              {"xi", c.xi},
              {"blur", blur_label(c.xi)},
              {"snr_db", c.snr_db},
              {"penalty", c.penalty == PenaltyKind::identity ? "identity" : "laplacian"},
              {"window_kind", kinds},
              {"windows", c.windows},
              {"estimators", ests},
              {"r_train", c.r_train},
              {"seed", c.seed},
              {"sigma_mode", c.estimate_sigma ? "estimate" : "known"}};
}

// ---- gen ---------------------------------------------------------------------

void cmd_gen(const Options& o) {
  Stopwatch clock(o.verbose);
  const ExperimentConfig cfg = resolve_config(o);
  const Experiment ex(cfg);
  clock.lap("data generated");
  const fs::path out = cfg.output_dir;
  const fs::path data = out / "data";
  ensure_dir(data);

  Image psf = ex.psf();
  psf /= psf.maxCoeff();
  write_pgm(data / "psf.pgm", psf);

  json sets = json::array();
  for (SplitId s : kSplits) {
    const auto& sd = ex.split(s);
    const auto si = static_cast<std::size_t>(s);
    const fs::path dir = data / split_name(s);
    ensure_dir(dir);
    for (std::size_t i = 0; i < sd.sets.size(); ++i) {
      const DataSet& ds = sd.sets[i];
      const std::string stem = safe_name(ex.corpus().labels[si][i]);
      write_pgm(dir / (stem + "_x.pgm"), ds.x_true);
      write_pgm(dir / (stem + "_b.pgm"), ds.b);
      write_pgm(dir / (stem + "_d.pgm"), ds.d);
      sets.push_back(json{{"split", split_name(s)},
                          {"label", ex.corpus().labels[si][i]},
                          {"index", i},
                          {"noise_seed", ds.seed},
                          {"sigma2", ds.sigma2},
                          {"snr_db", ds.snr_db},
                          {"x_fingerprint", fingerprint(ds.x_true)},
                          {"d_fingerprint", fingerprint(ds.d)},
                          {"files", json::array({split_name(s) + "/" + stem + "_x.pgm",
                                                 split_name(s) + "/" + stem + "_b.pgm",
                                                 split_name(s) + "/" + stem + "_d.pgm"})}});
    }
  }
  json doc{{"config", config_summary(cfg)},
           {"corpus_fingerprint", ex.corpus().fingerprint},
           {"corpus_exact", ex.corpus().exact},
           {"datasets", sets}};
  write_text(data / "datasets.json", doc.dump(2) + "\n");
  clock.lap("gen outputs written");
}

// ---- corpus ------------------------------------------------------------------

void cmd_corpus(const Options& o) {
  const ExperimentConfig cfg = resolve_config(o);
  if (cfg.corpus == CorpusSource::manifest) throw ConfigError("corpus subcommand needs a procedural corpus");
  const Corpus corpus = build_corpus(cfg);
  const fs::path out = fs::path(cfg.output_dir) / "corpus";
  ensure_dir(out);
  std::ostringstream manifest;
  manifest << "# path, split, seed\n";
  for (SplitId s : kSplits) {
    const auto si = static_cast<std::size_t>(s);
    for (std::size_t i = 0; i < corpus.images[si].size(); ++i) {
      const std::string file = corpus.labels[si][i] + ".pgm";
      write_pgm(out / file, corpus.images[si][i]);
      manifest << file << ", " << split_name(s) << ", " << corpus.seeds[si][i] << "\n";
    }
  }
  write_text(out / "manifest.txt", manifest.str());
}

// ---- train -------------------------------------------------------------------

void cmd_train(const Options& o) {
  Stopwatch clock(o.verbose);
  const ExperimentConfig cfg = resolve_config(o);
  const Experiment ex(cfg);
  clock.lap("experiment ready");
  const std::vector<TrainedParams> all = train_all(ex);
  if (o.verbose)
    for (const auto& tp : all) std::fprintf(stderr, "[train] %s %.3f s\n", trace_name(tp).c_str(), tp.seconds);
  clock.lap("training done");

  const fs::path out = cfg.output_dir;
  json doc = params_to_json(all);
  doc["config"] = config_summary(cfg);
  doc["corpus_fingerprint"] = ex.corpus().fingerprint;
  write_text(out / "params.json", doc.dump(2) + "\n");

  for (const auto& tp : all) {
    std::ostringstream csv;
    csv << "stage,evaluation,value";
    for (Index p = 0; p < tp.alphas.size(); ++p) csv << ",alpha_" << p + 1;
    csv << "\n";
    for (std::size_t k = 0; k < tp.trace.size(); ++k) {
      const auto& row = tp.trace[k];
      csv << row.stage << "," << k << "," << num(row.value);
      for (Index p = 0; p < row.alphas.size(); ++p) csv << "," << num(row.alphas[p]);
      csv << "\n";
    }
    write_text(out / "traces" / (trace_name(tp) + ".csv"), csv.str());
  }
  clock.lap("train outputs written");
}

// ---- validate ----------------------------------------------------------------

void cmd_validate(const Options& o) {
  Stopwatch clock(o.verbose);
  const ExperimentConfig cfg = resolve_config(o);
  const fs::path out = cfg.output_dir;
  const fs::path params_path = o.params_path.empty() ? out / "params.json" : fs::path(o.params_path);
  const auto params = params_from_json(read_json_file(params_path));
  const Experiment ex(cfg);
  for (const auto& tp : params) {
    if (tp.alphas.size() != ex.window_count(tp.kind))
      throw ConfigError("parameters for " + trace_name(tp) + " do not match the configured window count");
    if (tp.R > static_cast<int>(ex.split(SplitId::train).sets.size()))
      throw ConfigError("parameters for " + trace_name(tp) + " use more training sets than available");
  }
  clock.lap("experiment ready");
  const EstimatorReport rep = validate(ex, params);
  if (o.verbose)
    for (const auto& e : rep.entries)
      std::fprintf(stderr, "[validate] %s %.3f s\n", trace_name(e.params).c_str(), e.seconds);
  clock.lap("validation done");

  write_text(out / "report.json", report_to_json(cfg, rep).dump(2) + "\n");
  write_text(out / "table.csv", table_csv(rep));

  std::ostringstream errs;
  errs << "estimator,window,R,split,image,label,error\n";
  for (const auto& e : rep.entries)
    for (SplitId s : kSplits) {
      const auto si = static_cast<std::size_t>(s);
      for (std::size_t i = 0; i < e.errors[si].size(); ++i)
        errs << estimator_name(e.params.estimator) << "," << window_kind_name(e.params.kind) << "," << e.params.R
             << "," << split_name(s) << "," << i << "," << ex.corpus().labels[si][i] << "," << num(e.errors[si][i])
             << "\n";
    }
  write_text(out / "errors.csv", errs.str());

  if (!rep.baselines.empty()) {
    std::ostringstream base;
    base << "window,split,image,label,error,alphas\n";
    for (const auto& b : rep.baselines)
      for (SplitId s : kSplits) {
        const auto si = static_cast<std::size_t>(s);
        for (std::size_t i = 0; i < b.errors[si].size(); ++i) {
          base << window_kind_name(b.kind) << "," << split_name(s) << "," << i << "," << ex.corpus().labels[si][i]
               << "," << num(b.errors[si][i]) << ",";
          for (Index p = 0; p < b.alphas[si][i].size(); ++p) base << (p ? ";" : "") << num(b.alphas[si][i][p]);
          base << "\n";
        }
      }
    write_text(out / "baseline.csv", base.str());
  }

  // Reconstructions of the first validation image for each learned parameter set.
  const auto& v1 = ex.split(SplitId::validation_1);
  const Index rows = cfg.image_size;
  ensure_dir(out / "solutions");
  for (const auto& e : rep.entries) {
    const auto sol = solve_windowed_spectral(ex.system(), v1.spectral[0].dhat, ex.windows(e.params.kind),
                                             e.params.alphas);
    Image img = Eigen::Map<const Image>(sol.x.data(), rows, rows);
    write_pgm(out / "solutions" / (trace_name(e.params) + ".pgm"), img);
  }
  clock.lap("validate outputs written");
}

// ---- report ------------------------------------------------------------------

struct ReportDoc {
  std::string name;
  json doc;
};

void cmd_report(const Options& o) {
  std::vector<std::string> paths = o.reports;
  fs::path out = o.out;
  if (paths.empty()) {
    if (!o.config_path.empty()) {
      const ExperimentConfig cfg = resolve_config(o);
      out = cfg.output_dir;
    }
    if (out.empty()) throw ConfigError("report needs --out, --config or report files");
    if (fs::exists(out / "report.json")) paths.push_back((out / "report.json").string());
  } else if (out.empty()) {
    if (!o.config_path.empty()) out = resolve_config(o).output_dir;
    else out = fs::path(paths.front()).parent_path();
  }
  if (paths.empty()) throw ConfigError("empty report set");

  std::vector<ReportDoc> docs;
  for (const auto& p : paths) {
    json d = read_json_file(p);
    if (!d.contains("entries") || !d["entries"].is_array()) throw ConfigError(p + " is not a validation report");
    docs.push_back({fs::path(p).parent_path().filename().string(), std::move(d)});
  }
  for (std::size_t i = 0; i < docs.size(); ++i)
    if (docs[i].name.empty() || docs.size() > 1) docs[i].name = "report" + std::to_string(i + 1);

  const std::array<std::string, 3> split_keys{"train", "validation_1", "validation_2"};
  std::ostringstream md;
  md << "# Averaged percent relative errors\n\n";
  std::ostringstream trend, boxes, boxparams;
  trend << "report,estimator,window,R,p,alpha,at_boundary\n";
  boxes << "report,estimator,window,R,split,min,q1,median,q3,max\n";
  boxparams << "report,estimator,window,R,split,p,min,q1,median,q3,max\n";

  for (const auto& rd : docs) {
    const json& d = rd.doc;
    const json& cfg = d.value("config", json::object());
    md << "## " << rd.name << "\n\n";
    if (!cfg.empty())
      md << "Blur " << cfg.value("blur", std::string("custom")) << " (xi " << num(cfg.value("xi", 0.0)) << "), SNR "
         << num(cfg.value("snr_db", 0.0)) << " dB, penalty " << cfg.value("penalty", std::string("identity"))
         << ", " << cfg.value("windows", 0) << " windows.\n\n";
    md << "Corpus fingerprint `" << d.value("corpus_fingerprint", std::string()) << "` ("
       << (d.value("corpus_exact", false) ? "exact corpus" : "substitute corpus") << ").\n\n";

    // Table rows keyed by (R, window); columns by estimator.
    std::vector<std::string> est_order;
    std::map<std::pair<int, std::string>, std::map<std::string, json>> rows;
    std::vector<std::pair<int, std::string>> row_order;
    for (const auto& e : d["entries"]) {
      const std::string est = e.at("estimator").get<std::string>();
      const std::string kind = e.at("window_kind").get<std::string>();
      const int R = e.at("R").get<int>();
      if (std::find(est_order.begin(), est_order.end(), est) == est_order.end()) est_order.push_back(est);
      const auto key = std::make_pair(R, kind);
      if (!rows.count(key)) row_order.push_back(key);
      rows[key][est] = e;

      const auto alphas = e.at("alphas").get<std::vector<double>>();
      const auto boundary = e.value("boundary", std::vector<bool>(alphas.size(), false));
      for (std::size_t p = 0; p < alphas.size(); ++p)
        trend << rd.name << "," << est << "," << kind << "," << R << "," << p + 1 << "," << num(alphas[p]) << ","
              << (p < boundary.size() && boundary[p] ? 1 : 0) << "\n";
      for (const auto& sk : split_keys) {
        const auto errs = e.at("errors").at(sk).get<std::vector<double>>();
        if (errs.empty()) continue;
        const auto q = five_numbers(errs);
        boxes << rd.name << "," << est << "," << kind << "," << R << "," << sk;
        for (double v : q) boxes << "," << num(v);
        boxes << "\n";
      }
    }
    for (const auto& b : d.value("baselines", json::array())) {
      const std::string kind = b.at("window_kind").get<std::string>();
      for (const auto& sk : split_keys) {
        const auto errs = b.at("errors").at(sk).get<std::vector<double>>();
        if (errs.empty()) continue;
        const auto q = five_numbers(errs);
        boxes << rd.name << ",best," << kind << ",1," << sk;
        for (double v : q) boxes << "," << num(v);
        boxes << "\n";
        const auto alphas = b.at("alphas").at(sk).get<std::vector<std::vector<double>>>();
        const std::size_t P = alphas.front().size();
        for (std::size_t p = 0; p < P; ++p) {
          std::vector<double> col;
          for (const auto& a : alphas) col.push_back(a[p]);
          const auto qa = five_numbers(col);
          boxparams << rd.name << ",best," << kind << ",1," << sk << "," << p + 1;
          for (double v : qa) boxparams << "," << num(v);
          boxparams << "\n";
        }
      }
    }
    std::stable_sort(row_order.begin(), row_order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    md << "| R | Window |";
    for (const auto& est : est_order)
      for (const auto& sk : split_keys) md << " " << est << " " << sk << " |";
    md << "\n|---|---|";
    for (std::size_t i = 0; i < est_order.size() * split_keys.size(); ++i) md << "---|";
    md << "\n";
    for (const auto& key : row_order) {
      md << "| " << key.first << " | " << key.second << " |";
      for (const auto& est : est_order)
        for (const auto& sk : split_keys) {
          const auto it = rows[key].find(est);
          md << " " << (it == rows[key].end() ? std::string("-") : fixed2(it->second.at("mean").at(sk).get<double>()))
             << " |";
        }
      md << "\n";
    }
    const json baselines = d.value("baselines", json::array());
    if (!baselines.empty()) {
      md << "\nPer-image optimal parameters (mean error):\n\n| Window |";
      for (const auto& sk : split_keys) md << " " << sk << " |";
      md << "\n|---|---|---|---|\n";
      for (const auto& b : baselines) {
        md << "| " << b.at("window_kind").get<std::string>() << " |";
        for (const auto& sk : split_keys) md << " " << fixed2(b.at("mean").at(sk).get<double>()) << " |";
        md << "\n";
      }
    }
    md << "\n";
  }

  write_text(out / "summary.md", md.str());
  write_text(out / "param_vs_R.csv", trend.str());
  write_text(out / "boxplot_errors.csv", boxes.str());
  write_text(out / "boxplot_params.csv", boxparams.str());
}

}  // namespace

// ---- serialization -------------------------------------------------------------

json params_to_json(const std::vector<TrainedParams>& params) {
  json arr = json::array();
  for (const auto& tp : params) {
    json e{{"estimator", estimator_name(tp.estimator)},
           {"window_kind", window_kind_name(tp.kind)},
           {"R", tp.R},
           {"alphas", vec_json(tp.alphas)},
           {"objective", tp.objective},
           {"boundary", tp.boundary}};
    if (tp.warm_start) e["warm_start"] = vec_json(*tp.warm_start);
    arr.push_back(std::move(e));
  }
  return json{{"parameters", arr}};
}

std::vector<TrainedParams> params_from_json(const json& doc) {
  if (!doc.contains("parameters") || !doc["parameters"].is_array())
    throw ConfigError("parameter file lacks a 'parameters' array");
  std::vector<TrainedParams> out;
  try {
    for (const auto& e : doc["parameters"]) {
      TrainedParams tp;
      tp.estimator = parse_estimator(e.at("estimator").get<std::string>());
      tp.kind = parse_window_kind(e.at("window_kind").get<std::string>());
      tp.R = e.at("R").get<int>();
      tp.alphas = json_vec(e.at("alphas"));
      tp.objective = e.value("objective", 0.0);
      tp.boundary = e.value("boundary", std::vector<bool>(static_cast<std::size_t>(tp.alphas.size()), false));
      if (e.contains("warm_start")) tp.warm_start = json_vec(e["warm_start"]);
      for (Index p = 0; p < tp.alphas.size(); ++p)
        if (!(tp.alphas[p] > 0.0) || !std::isfinite(tp.alphas[p]))
          throw ConfigError("stored parameters must be positive and finite");
      out.push_back(std::move(tp));
    }
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("malformed parameter file: ") + ex.what());
  }
  return out;
}

json report_to_json(const ExperimentConfig& config, const EstimatorReport& report) {
  auto per_split = [](const auto& arr) {
    json o = json::object();
    for (SplitId s : kSplits) o[split_name(s)] = arr[static_cast<std::size_t>(s)];
    return o;
  };
  json entries = json::array();
  for (const auto& e : report.entries) {
    json j = params_to_json({e.params})["parameters"][0];
    j["errors"] = per_split(e.errors);
    j["mean"] = per_split(e.mean);
    entries.push_back(std::move(j));
  }
  json baselines = json::array();
  for (const auto& b : report.baselines) {
    std::array<json, 3> alphas;
    for (SplitId s : kSplits) {
      json a = json::array();
      for (const auto& v : b.alphas[static_cast<std::size_t>(s)]) a.push_back(vec_json(v));
      alphas[static_cast<std::size_t>(s)] = a;
    }
    baselines.push_back(json{{"window_kind", window_kind_name(b.kind)},
                             {"errors", per_split(b.errors)},
                             {"alphas", per_split(alphas)},
                             {"mean", per_split(b.mean)}});
  }
  return json{{"config", config_summary(config)},
              {"corpus_fingerprint", report.corpus_fingerprint},
              {"corpus_exact", report.corpus_exact},
              {"entries", entries},
              {"baselines", baselines}};
}

std::string table_csv(const EstimatorReport& report) {
  std::vector<Estimator> ests;
  std::vector<std::pair<int, WindowKind>> rows;
  std::map<std::pair<int, WindowKind>, std::map<Estimator, const ValidationEntry*>> cells;
  for (const auto& e : report.entries) {
    if (std::find(ests.begin(), ests.end(), e.params.estimator) == ests.end()) ests.push_back(e.params.estimator);
    const auto key = std::make_pair(e.params.R, e.params.kind);
    if (!cells.count(key)) rows.push_back(key);
    cells[key][e.params.estimator] = &e;
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::ostringstream out;
  out << "R,window";
  for (Estimator est : ests)
    for (SplitId s : kSplits) out << "," << estimator_name(est) << "_" << split_name(s);
  out << "\n";
  for (const auto& key : rows) {
    out << key.first << "," << window_kind_name(key.second);
    for (Estimator est : ests)
      for (SplitId s : kSplits) {
        const auto it = cells[key].find(est);
        out << ",";
        if (it != cells[key].end()) out << num(it->second->mean[static_cast<std::size_t>(s)]);
      }
    out << "\n";
  }
  return out.str();
}

// ---- entry point ---------------------------------------------------------------

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Windowed Tikhonov regularization: learn and validate regularization parameters"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON experiment configuration");
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--out", o.out, "output directory (overrides output_dir)");
    sub->add_flag("--verbose", o.verbose, "progress and timings on stderr");
  };
  auto* gen = app.add_subcommand("gen", "generate blurred, noisy data sets");
  auto* trn = app.add_subcommand("train", "learn regularization parameters");
  auto* val = app.add_subcommand("validate", "apply learned parameters to training and validation sets");
  auto* rep = app.add_subcommand("report", "render summary tables and plot data");
  auto* cor = app.add_subcommand("corpus", "write the procedural corpus and a manifest");
  for (auto* s : {gen, trn, val, rep, cor}) common(s);
  val->add_option("--params", o.params_path, "parameter file (default <out>/params.json)");
  rep->add_option("reports", o.reports, "report.json files (default <out>/report.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  for (auto* s : {gen, trn, val, rep, cor})
    if (s->parsed() && s->count("--seed")) o.seed = seed;

  try {
    if (*gen) cmd_gen(o);
    else if (*trn) cmd_train(o);
    else if (*val) cmd_validate(o);
    else if (*rep) cmd_report(o);
    else if (*cor) cmd_corpus(o);
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace winreg
