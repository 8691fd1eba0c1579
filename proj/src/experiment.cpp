#include "winreg/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "json.hpp"
#include "winreg/errors.hpp"

namespace winreg {

using nlohmann::json;

std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::mse: return "mse";
    case Estimator::upre: return "upre";
    case Estimator::gcv_decoupled: return "gcv_decoupled";
    case Estimator::gcv_true: return "gcv_true";
  }
  return "mse";
}

Estimator parse_estimator(const std::string& name) {
  if (name == "mse") return Estimator::mse;
  if (name == "upre") return Estimator::upre;
  if (name == "gcv_decoupled" || name == "gcv") return Estimator::gcv_decoupled;
  if (name == "gcv_true") return Estimator::gcv_true;
  throw ConfigError("unknown estimator '" + name + "'");
}

std::string split_name(SplitId s) {
  switch (s) {
    case SplitId::train: return "train";
    case SplitId::validation_1: return "validation_1";
    case SplitId::validation_2: return "validation_2";
  }
  return "train";
}

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  if (image_size < 8) throw ConfigError("image_size must be at least 8");
  if (!(xi > 0.0)) throw ConfigError("xi must be positive");
  if (!std::isfinite(snr_db)) throw ConfigError("snr_db must be finite");
  if (window_kinds.empty()) throw ConfigError("window_kind must name at least one kind");
  if (windows < 1) throw ConfigError("windows must be at least 1");
  if (estimators.empty()) throw ConfigError("estimators must not be empty");
  if (r_train.empty()) throw ConfigError("r_train must not be empty");
  for (int r : r_train)
    if (r < 1) throw ConfigError("r_train values must be positive");
  if (corpus_count < 1) throw ConfigError("corpus_count must be positive");
  if (corpus == CorpusSource::manifest && manifest.empty())
    throw ConfigError("corpus 'manifest' requires the manifest key");
  for (WindowKind k : window_kinds) {
    if (is_overlapping(k) && windows < 2) throw ConfigError("cosine windows need windows >= 2");
    for (Estimator e : estimators)
      if (is_overlapping(k) && e == Estimator::gcv_decoupled)
        throw ConfigError("gcv_decoupled is only defined for non-overlapping windows");
  }
  search.validate();
}

namespace {

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

template <typename T, typename F>
std::vector<T> one_or_many(const json& v, const std::string& key, F convert) {
  std::vector<T> out;
  if (v.is_array()) {
    for (const auto& item : v) out.push_back(convert(item));
  } else {
    out.push_back(convert(v));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "' must not be empty");
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig c;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "image_size") {
      c.image_size = get_as<Index>(v, k);
    } else if (k == "xi") {
      c.xi = get_as<double>(v, k);
    } else if (k == "snr_db") {
      c.snr_db = get_as<double>(v, k);
    } else if (k == "penalty") {
      const auto s = get_as<std::string>(v, k);
      if (s == "identity") c.penalty = PenaltyKind::identity;
      else if (s == "laplacian") c.penalty = PenaltyKind::laplacian;
      else throw ConfigError("penalty must be 'identity' or 'laplacian'");
    } else if (k == "window_kind") {
      c.window_kinds = one_or_many<WindowKind>(v, k, [&](const json& x) {
        return parse_window_kind(get_as<std::string>(x, k));
      });
    } else if (k == "windows") {
      c.windows = get_as<Index>(v, k);
    } else if (k == "estimators") {
      c.estimators = one_or_many<Estimator>(v, k, [&](const json& x) {
        return parse_estimator(get_as<std::string>(x, k));
      });
    } else if (k == "r_train") {
      c.r_train = one_or_many<int>(v, k, [&](const json& x) { return get_as<int>(x, k); });
    } else if (k == "corpus") {
      const auto s = get_as<std::string>(v, k);
      if (s == "craters") c.corpus = CorpusSource::craters;
      else if (s == "mixed") c.corpus = CorpusSource::mixed;
      else if (s == "manifest") c.corpus = CorpusSource::manifest;
      else throw ConfigError("corpus must be 'craters', 'mixed' or 'manifest'");
    } else if (k == "corpus_count") {
      c.corpus_count = get_as<int>(v, k);
    } else if (k == "manifest") {
      c.manifest = get_as<std::string>(v, k);
    } else if (k == "subimages") {
      c.subimages = get_as<bool>(v, k);
    } else if (k == "seed") {
      c.seed = get_as<std::uint64_t>(v, k);
    } else if (k == "alpha_min") {
      c.search.alpha_min = get_as<double>(v, k);
    } else if (k == "alpha_max") {
      c.search.alpha_max = get_as<double>(v, k);
    } else if (k == "grid_points") {
      c.search.grid_points = get_as<int>(v, k);
    } else if (k == "tol") {
      c.search.tol = get_as<double>(v, k);
    } else if (k == "max_iter") {
      c.search.max_iter = get_as<int>(v, k);
    } else if (k == "sigma_mode") {
      const auto s = get_as<std::string>(v, k);
      if (s == "known") c.estimate_sigma = false;
      else if (s == "estimate") c.estimate_sigma = true;
      else throw ConfigError("sigma_mode must be 'known' or 'estimate'");
    } else if (k == "output_dir") {
      c.output_dir = get_as<std::string>(v, k);
    } else if (k == "reference_fingerprints") {
      c.reference_fingerprints = get_as<std::vector<std::string>>(v, k);
    } else if (k == "baseline") {
      c.baseline = get_as<bool>(v, k);
    } else {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Corpus

namespace {

std::string fnv_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string two_digits(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu", i);
  return buf;
}

}  // namespace

Corpus build_corpus(const ExperimentConfig& config) {
  Corpus c;
  if (config.corpus == CorpusSource::manifest) {
    const auto entries = read_manifest(config.manifest);
    std::array<std::vector<ManifestEntry>, 3> by_split;
    for (const auto& e : entries) {
      if (e.split == "train") by_split[0].push_back(e);
      else if (e.split == "validation_1") by_split[1].push_back(e);
      else if (e.split == "validation_2") by_split[2].push_back(e);
      else throw ConfigError("manifest split must be train, validation_1 or validation_2 (got '" + e.split + "')");
    }
    CorpusOptions opt;
    opt.size = config.image_size;
    opt.subimages = config.subimages;
    for (int s = 0; s < 3; ++s) {
      auto& list = by_split[static_cast<std::size_t>(s)];
      std::stable_sort(list.begin(), list.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
        return std::filesystem::path(a.path).filename() < std::filesystem::path(b.path).filename();
      });
      for (const auto& e : list) {
        const auto crops = crop_image(read_image(e.path), opt);
        const std::string name = std::filesystem::path(e.path).filename().string();
        for (std::size_t k = 0; k < crops.size(); ++k) {
          c.images[static_cast<std::size_t>(s)].push_back(crops[k]);
          c.labels[static_cast<std::size_t>(s)].push_back(crops.size() == 1 ? name : name + (k == 0 ? "#nw" : "#se"));
          c.seeds[static_cast<std::size_t>(s)].push_back(derive_seed(e.seed, 0x5eb1ULL, k));
        }
      }
      if (c.images[static_cast<std::size_t>(s)].empty())
        throw IoError("manifest has no images for split " + split_name(static_cast<SplitId>(s)));
    }
  } else {
    const bool craters = config.corpus == CorpusSource::craters;
    const std::string prefix = craters ? "craters" : "mixed";
    for (int s = 0; s < 3; ++s) {
      for (int i = 0; i < config.corpus_count; ++i) {
        const std::uint64_t id = derive_seed(craters ? 0xc0a7e5ULL : 0x313dULL, static_cast<std::uint64_t>(s),
                                             static_cast<std::uint64_t>(i));
        c.images[static_cast<std::size_t>(s)].push_back(craters ? synth_crater_field(config.image_size, id)
                                                                : synth_mixed_scene(config.image_size, id));
        c.labels[static_cast<std::size_t>(s)].push_back(prefix + "_" + split_name(static_cast<SplitId>(s)) + "_" +
                                                        two_digits(static_cast<std::size_t>(i)));
        c.seeds[static_cast<std::size_t>(s)].push_back(static_cast<std::uint64_t>(i));
      }
    }
  }

  std::string all;
  std::vector<std::string> fps;
  for (const auto& split : c.images)
    for (const auto& img : split) {
      fps.push_back(fingerprint(img));
      all += fps.back();
    }
  c.fingerprint = fnv_hex(all);
  if (!config.reference_fingerprints.empty()) {
    auto a = fps;
    auto b = config.reference_fingerprints;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    c.exact = a == b;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Experiment

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config)) {
  config_.validate();
  corpus_ = build_corpus(config_);
  const int n_train = static_cast<int>(corpus_.split(SplitId::train).size());
  for (int r : config_.r_train)
    if (r > n_train)
      throw ConfigError("r_train " + std::to_string(r) + " exceeds the " + std::to_string(n_train) +
                        " training images");

  const Index size = config_.image_size;
  for (const auto& split : corpus_.images)
    for (const auto& img : split)
      if (img.rows() != size || img.cols() != size) throw DimensionError("corpus image has the wrong size");

  psf_ = gaussian_psf(config_.xi, size, size);
  op_ = std::make_unique<ReflexiveOperator>(psf_);
  system_ = std::make_unique<SpectralSystem>(dct_decompose(psf_, config_.penalty));

  const std::uint64_t noise_stream =
      std::bit_cast<std::uint64_t>(config_.xi) ^ std::rotl(std::bit_cast<std::uint64_t>(config_.snr_db), 29);
  const Index n = size * size;
  for (int s = 0; s < 3; ++s) {
    auto& sd = splits_[static_cast<std::size_t>(s)];
    const auto& imgs = corpus_.images[static_cast<std::size_t>(s)];
    for (std::size_t i = 0; i < imgs.size(); ++i) {
      const std::uint64_t seed =
          derive_seed(config_.seed ^ noise_stream, static_cast<std::uint64_t>(s + 1),
                      corpus_.seeds[static_cast<std::size_t>(s)][i]);
      DataSet ds = make_dataset(imgs[i], *op_, config_.snr_db, seed);
      const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(ds.d.data(), n);
      const Eigen::VectorXd dhat = system_->analyze(d);
      const double sigma2 = config_.estimate_sigma ? estimate_sigma2_mad(*system_, dhat) : ds.sigma2;
      sd.spectral.push_back(SpectralData{*system_, dhat, sigma2});
      sd.truths.push_back(Eigen::Map<const Eigen::VectorXd>(ds.x_true.data(), n));
      sd.sets.push_back(std::move(ds));
    }
  }
}

const WindowSet& Experiment::windows(WindowKind kind) const {
  return window_list(kind, 1)[0];
}

std::span<const WindowSet> Experiment::window_list(WindowKind kind, std::size_t count) const {
  const std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = windows_.find(kind);
  if (it == windows_.end()) {
    std::size_t most = 1;
    for (const auto& sd : splits_) most = std::max(most, sd.spectral.size());
    const WindowSet w = make_windows(*system_, kind, window_count(kind));
    it = windows_.emplace(kind, std::vector<WindowSet>(most, w)).first;
  }
  if (count > it->second.size()) throw DimensionError("more window sets requested than data sets");
  return std::span<const WindowSet>(it->second.data(), count);
}

const SpectralMse& Experiment::mse(SplitId split, int first, int R) const {
  const std::array<int, 3> key{static_cast<int>(split), first, R};
  const std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = mse_.find(key);
  if (it == mse_.end()) {
    const auto& sd = this->split(split);
    auto sets = std::span<const SpectralData>(sd.spectral).subspan(static_cast<std::size_t>(first),
                                                                    static_cast<std::size_t>(R));
    auto truths = std::span<const Eigen::VectorXd>(sd.truths).subspan(static_cast<std::size_t>(first),
                                                                      static_cast<std::size_t>(R));
    it = mse_.emplace(key, std::make_unique<SpectralMse>(sets, truths)).first;
  }
  return *it->second;
}

// ---------------------------------------------------------------------------
// Training

namespace {

std::span<const SpectralData> subsets(const Experiment& ex, SplitId split, int first, int R) {
  const auto& all = ex.split(split).spectral;
  if (first < 0 || R < 1 || static_cast<std::size_t>(first + R) > all.size())
    throw ConfigError("requested data sets exceed the " + split_name(split) + " split");
  return std::span<const SpectralData>(all).subspan(static_cast<std::size_t>(first), static_cast<std::size_t>(R));
}

WindowKind indicator_counterpart(WindowKind kind) {
  if (kind == WindowKind::cosine_linear) return WindowKind::nonoverlap_linear;
  if (kind == WindowKind::cosine_log) return WindowKind::nonoverlap_log;
  return kind;
}

void append_trace(std::vector<TraceRow>& dst, const std::string& stage, const std::vector<TracePoint>& src) {
  for (const auto& t : src) dst.push_back({stage, t.alphas, t.value});
}

}  // namespace

double objective_value(const Experiment& ex, Estimator est, WindowKind kind, int R, const ParamVector& alphas,
                       SplitId split, int first) {
  const auto sets = subsets(ex, split, first, R);
  const auto wins = ex.window_list(kind, static_cast<std::size_t>(R));
  check_params(alphas, ex.window_count(kind));
  switch (est) {
    case Estimator::mse:
      return ex.mse(split, first, R).value(wins, alphas);
    case Estimator::upre:
      return upre_md_windowed(sets, wins, alphas);
    case Estimator::gcv_decoupled: {
      if (kind == WindowKind::none) return gcv_md_scalar(sets, alphas[0]);
      if (is_overlapping(kind)) throw ConfigError("gcv_decoupled is only defined for non-overlapping windows");
      double total = 0.0;
      for (Index p = 0; p < alphas.size(); ++p) total += gcv_windowed_decoupled(sets, wins, p, alphas[p]);
      return total;
    }
    case Estimator::gcv_true:
      if (kind == WindowKind::none) return gcv_md_scalar(sets, alphas[0]);
      return gcv_md_windowed_true(sets, wins, alphas);
  }
  throw ConfigError("unknown estimator");
}

TrainedParams train(const Experiment& ex, Estimator est, WindowKind kind, int R, SplitId split, int first) {
  const SearchConfig& search = ex.config().search;
  const auto sets = subsets(ex, split, first, R);
  const auto wins = ex.window_list(kind, static_cast<std::size_t>(R));
  const Index P = ex.window_count(kind);
  const auto started = std::chrono::steady_clock::now();

  TrainedParams tp;
  tp.estimator = est;
  tp.kind = kind;
  tp.R = R;
  tp.alphas = ParamVector(P);

  auto full = [&](const Eigen::VectorXd& a) { return objective_value(ex, est, kind, R, a, split, first); };

  if (kind == WindowKind::none) {
    const ScalarResult res = minimize_scalar([&](double a) { return full(Eigen::VectorXd::Constant(1, a)); }, search);
    tp.alphas[0] = res.alpha;
    append_trace(tp.trace, "scalar", res.trace);
  } else if (!is_overlapping(kind) && est != Estimator::gcv_true &&
             (est != Estimator::mse || ex.mse(split, first, R).fast())) {
    for (Index p = 0; p < P; ++p) {
      ScalarObjective f;
      switch (est) {
        case Estimator::upre:
          f = [&, p](double a) { return upre_window_separable(sets, wins, p, a); };
          break;
        case Estimator::gcv_decoupled:
          f = [&, p](double a) { return gcv_windowed_decoupled(sets, wins, p, a); };
          break;
        case Estimator::mse: {
          const SpectralMse& m = ex.mse(split, first, R);
          f = [&m, wins, p](double a) { return m.window_value(wins, p, a); };
          break;
        }
        case Estimator::gcv_true:
          break;
      }
      const ScalarResult res = minimize_scalar(f, search);
      tp.alphas[p] = res.alpha;
      append_trace(tp.trace, "window_" + std::to_string(p + 1), res.trace);
    }
  } else {
    if (is_overlapping(kind) && est == Estimator::gcv_decoupled)
      throw ConfigError("gcv_decoupled is only defined for non-overlapping windows");
    const Estimator warm_est = est == Estimator::gcv_true ? Estimator::gcv_decoupled : est;
    const WindowKind warm_kind = indicator_counterpart(kind);
    std::optional<ParamVector> warm;
    if (warm_kind != kind || warm_est != est) warm = train(ex, warm_est, warm_kind, R, split, first).alphas;
    tp.warm_start = warm;
    const VectorResult res = minimize_vector(full, P, search, warm);
    tp.alphas = res.alphas;
    append_trace(tp.trace, "simplex", res.trace);
  }

  tp.objective = full(tp.alphas);
  tp.boundary.resize(static_cast<std::size_t>(P));
  for (Index p = 0; p < P; ++p) tp.boundary[static_cast<std::size_t>(p)] = near_bound(tp.alphas[p], search);
  tp.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return tp;
}

std::vector<TrainedParams> train_all(const Experiment& ex) {
  const auto& cfg = ex.config();
  std::vector<std::future<std::vector<TrainedParams>>> tasks;
  for (int R : cfg.r_train)
    for (Estimator est : cfg.estimators)
      tasks.push_back(std::async(std::launch::async, [&ex, &cfg, R, est] {
        std::vector<TrainedParams> mine;
        for (WindowKind kind : cfg.window_kinds) mine.push_back(train(ex, est, kind, R));
        return mine;
      }));
  std::vector<std::vector<TrainedParams>> done;
  for (auto& t : tasks) done.push_back(t.get());

  std::vector<TrainedParams> out;
  const std::size_t n_est = cfg.estimators.size();
  for (std::size_t r = 0; r < cfg.r_train.size(); ++r)
    for (std::size_t k = 0; k < cfg.window_kinds.size(); ++k)
      for (std::size_t e = 0; e < n_est; ++e) out.push_back(std::move(done[r * n_est + e][k]));
  return out;
}

// ---------------------------------------------------------------------------
// Validation

double percent_relative_error(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x) {
  const double nx = x.norm();
  if (!(nx > 0.0)) throw DomainError("relative error undefined for a zero reference");
  return 100.0 * (x_hat - x).norm() / nx;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::array<double, 5> five_numbers(std::vector<double> v) {
  if (v.empty()) throw DomainError("quantiles of an empty sample");
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {v.front(), q(0.25), q(0.5), q(0.75), v.back()};
}

namespace {

double solution_error(const Experiment& ex, SplitId s, std::size_t i, WindowKind kind, const ParamVector& alphas) {
  const auto& sd = ex.split(s);
  const auto sol = solve_windowed_spectral(ex.system(), sd.spectral[i].dhat, ex.windows(kind), alphas);
  return percent_relative_error(sol.x, sd.truths[i]);
}

}  // namespace

EstimatorReport validate(const Experiment& ex, const std::vector<TrainedParams>& params) {
  EstimatorReport rep;
  rep.corpus_fingerprint = ex.corpus().fingerprint;
  rep.corpus_exact = ex.corpus().exact;
  for (const auto& tp : params) {
    if (tp.alphas.size() != ex.window_count(tp.kind))
      throw ConfigError("parameter count does not match window kind " + window_kind_name(tp.kind));
    const auto started = std::chrono::steady_clock::now();
    ValidationEntry e;
    e.params = tp;
    e.params.trace.clear();
    for (SplitId s : kSplits) {
      const std::size_t count = s == SplitId::train ? static_cast<std::size_t>(tp.R) : ex.split(s).sets.size();
      auto& errs = e.errors[static_cast<std::size_t>(s)];
      for (std::size_t i = 0; i < count; ++i) errs.push_back(solution_error(ex, s, i, tp.kind, tp.alphas));
      e.mean[static_cast<std::size_t>(s)] = mean_of(errs);
    }
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    rep.entries.push_back(std::move(e));
  }
  if (ex.config().baseline) {
    for (WindowKind kind : ex.config().window_kinds) {
      BaselineEntry b;
      b.kind = kind;
      for (SplitId s : kSplits) {
        const auto si = static_cast<std::size_t>(s);
        for (std::size_t i = 0; i < ex.split(s).sets.size(); ++i) {
          const TrainedParams best = train(ex, Estimator::mse, kind, 1, s, static_cast<int>(i));
          b.errors[si].push_back(solution_error(ex, s, i, kind, best.alphas));
          b.alphas[si].push_back(best.alphas);
        }
        b.mean[si] = mean_of(b.errors[si]);
      }
      rep.baselines.push_back(std::move(b));
    }
  }
  return rep;
}

}  // namespace winreg
