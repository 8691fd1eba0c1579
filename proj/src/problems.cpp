#include "winreg/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "winreg/errors.hpp"

namespace winreg {

namespace fs = std::filesystem;

Image gaussian_psf(double xi, Index rows, Index cols) {
  if (!(xi > 0.0)) throw DomainError("gaussian_psf: xi must be positive");
  if (rows < 3 || cols < 3) throw DimensionError("gaussian_psf: kernel must be at least 3x3");
  const Index cr = rows / 2;
  const Index cc = cols / 2;
  const Index kr = std::min(cr, rows - 1 - cr);
  const Index kc = std::min(cc, cols - 1 - cc);
  Image k = Image::Zero(rows, cols);
  for (Index s = -kr; s <= kr; ++s) {
    for (Index t = -kc; t <= kc; ++t) {
      const double r2 = static_cast<double>(s * s + t * t);
      k(cr + s, cc + t) = std::exp(-r2 / (2.0 * xi));
    }
  }
  k /= k.sum();
  return k;
}

std::string blur_label(double xi) {
  if (xi == 4.0) return "mild";
  if (xi == 16.0) return "medium";
  if (xi == 36.0) return "severe";
  return "custom";
}

Image laplacian_penalty(Index rows, Index cols) {
  return penalty_eigenvalues(PenaltyKind::laplacian, rows, cols);
}

Image blur(const Image& image, const Image& psf) {
  if (image.rows() != psf.rows() || image.cols() != psf.cols())
    throw DimensionError("blur: image and kernel dimensions differ");
  return ReflexiveOperator(psf).apply(image);
}

NoisyData add_noise(const Image& b, double target_snr_db, std::uint64_t seed) {
  const double power = b.squaredNorm();
  if (!(power > 0.0)) throw DomainError("zero-signal SNR undefined");
  NoisyData out;
  out.snr_db = target_snr_db;
  if (std::isinf(target_snr_db) && target_snr_db > 0.0) {
    out.d = b;
    out.sigma2 = 0.0;
    return out;
  }
  if (!std::isfinite(target_snr_db)) throw DomainError("target SNR must be finite or +infinity");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Image e(b.rows(), b.cols());
  for (Index i = 0; i < e.size(); ++i) e.data()[i] = normal(rng);
  const double target_noise = power / std::pow(10.0, target_snr_db / 10.0);
  e *= std::sqrt(target_noise / e.squaredNorm());
  out.d = b + e;
  out.sigma2 = e.squaredNorm() / static_cast<double>(e.size());
  out.snr_db = 10.0 * std::log10(power / e.squaredNorm());
  return out;
}

DataSet make_dataset(const Image& x_true, const ReflexiveOperator& op, double snr_db, std::uint64_t seed) {
  DataSet ds;
  ds.x_true = x_true;
  ds.b = op.apply(x_true);
  NoisyData nd = add_noise(ds.b, snr_db, seed);
  ds.d = std::move(nd.d);
  ds.sigma2 = nd.sigma2;
  ds.snr_db = nd.snr_db;
  ds.seed = seed;
  return ds;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ stream) ^ index);
}

// ---------------------------------------------------------------------------
// Image I/O

namespace {

std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

long parse_positive(const std::string& tok, const fs::path& path) {
  try {
    std::size_t used = 0;
    const long v = std::stol(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError("malformed PGM header in " + path.string());
  }
}

}  // namespace

Image read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = next_token(in);
  if (magic != "P5" && magic != "P2") throw IoError("not a grayscale PGM: " + path.string());
  const long w = parse_positive(next_token(in), path);
  const long h = parse_positive(next_token(in), path);
  const long maxval = parse_positive(next_token(in), path);
  if (maxval > 65535) throw IoError("unsupported PGM maxval in " + path.string());
  Image img(h, w);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (magic == "P5") {
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(static_cast<std::size_t>(w * h * bytes));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) throw IoError("truncated PGM: " + path.string());
    for (long i = 0; i < w * h; ++i) {
      const unsigned v = bytes == 1 ? buf[static_cast<std::size_t>(i)]
                                    : (static_cast<unsigned>(buf[static_cast<std::size_t>(2 * i)]) << 8) |
                                          buf[static_cast<std::size_t>(2 * i + 1)];
      img.data()[i] = static_cast<double>(v) * scale;
    }
  } else {
    for (long i = 0; i < w * h; ++i) {
      const std::string tok = next_token(in);
      if (tok.empty()) throw IoError("truncated PGM: " + path.string());
      img.data()[i] = static_cast<double>(std::stol(tok)) * scale;
    }
  }
  return img;
}

void write_pgm(const fs::path& path, const Image& image, int maxval) {
  if (maxval != 255 && maxval != 65535) throw DomainError("PGM maxval must be 255 or 65535");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << image.cols() << ' ' << image.rows() << '\n' << maxval << '\n';
  std::vector<unsigned char> buf;
  buf.reserve(static_cast<std::size_t>(image.size() * (maxval > 255 ? 2 : 1)));
  for (Index i = 0; i < image.size(); ++i) {
    const double v = std::clamp(image.data()[i], 0.0, 1.0);
    const auto q = static_cast<unsigned>(std::lround(v * maxval));
    if (maxval > 255) buf.push_back(static_cast<unsigned char>(q >> 8));
    buf.push_back(static_cast<unsigned char>(q & 0xff));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

Image read_csv_matrix(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError("non-numeric CSV cell in " + path.string());
      }
    }
    if (!rows.empty() && row.size() != rows[0].size()) throw IoError("ragged CSV matrix: " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows[0].empty()) throw IoError("empty CSV matrix: " + path.string());
  Image img(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
  for (Index i = 0; i < img.rows(); ++i)
    for (Index j = 0; j < img.cols(); ++j) img(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return img;
}

void write_csv_matrix(const fs::path& path, const Image& image) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  char buf[32];
  for (Index i = 0; i < image.rows(); ++i) {
    for (Index j = 0; j < image.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", image(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Image read_image(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".pgm") return read_pgm(path);
  if (ext == ".csv") {
    Image img = read_csv_matrix(path);
    const double lo = img.minCoeff();
    const double hi = img.maxCoeff();
    if (lo < 0.0 || hi > 1.0) {
      if (hi > lo) img = (img.array() - lo) / (hi - lo);
      else img.setZero();
    }
    return img;
  }
  throw IoError("unsupported image format (expected .pgm or .csv): " + path.string());
}

// ---------------------------------------------------------------------------
// Corpora

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> parts;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) parts.push_back(trim(cell));
    if (parts.size() != 3)
      throw IoError("manifest " + path.string() + " line " + std::to_string(lineno) + ": expected path, split, seed");
    ManifestEntry e;
    fs::path p(parts[0]);
    e.path = (p.is_relative() ? path.parent_path() / p : p).lexically_normal().string();
    e.split = parts[1];
    try {
      e.seed = std::stoull(parts[2]);
    } catch (const std::exception&) {
      throw IoError("manifest " + path.string() + " line " + std::to_string(lineno) + ": bad seed");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".csv")) out.push_back(entry.path());
  }
  if (out.empty()) throw IoError("no images in " + dir.string());
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

std::vector<Image> crop_image(const Image& image, const CorpusOptions& options) {
  const Index s = options.size;
  if (options.subimages) {
    if (image.rows() < s || image.cols() < s) throw DimensionError("image smaller than the requested size");
    return {Image(image.topLeftCorner(s, s)), Image(image.bottomRightCorner(s, s))};
  }
  if (image.rows() < s || image.cols() < s) throw DimensionError("image smaller than the requested size");
  const Index r0 = (image.rows() - s) / 2;
  const Index c0 = (image.cols() - s) / 2;
  return {Image(image.block(r0, c0, s, s))};
}

std::vector<Image> load_corpus(std::vector<fs::path> paths, Split split, const CorpusOptions& options) {
  if (paths.empty()) throw IoError("empty corpus");
  std::sort(paths.begin(), paths.end(), [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  const std::size_t n_train = options.train_count ? std::min(options.train_count, paths.size()) : paths.size() / 2;
  const std::size_t begin = split == Split::train ? 0 : n_train;
  const std::size_t end = split == Split::train ? n_train : paths.size();
  std::vector<Image> out;
  for (std::size_t i = begin; i < end; ++i) {
    for (auto& img : crop_image(read_image(paths[i]), options)) out.push_back(std::move(img));
  }
  if (out.empty()) throw IoError("corpus split is empty");
  return out;
}

namespace {

// Smooth random field with amplitude spectrum (1 + k^2 + l^2)^(-decay), unit variance.
Image random_field(Index size, double decay, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Image c(size, size);
  for (Index k = 0; k < size; ++k)
    for (Index l = 0; l < size; ++l)
      c(k, l) = normal(rng) * std::pow(1.0 + static_cast<double>(k * k + l * l), -decay);
  c(0, 0) = 0.0;
  Image f = Dct2D(size, size).inverse(c);
  const double sd = std::sqrt(f.squaredNorm() / static_cast<double>(f.size()));
  if (sd > 0.0) f /= sd;
  return f;
}

Image shade(const Image& h, double azimuth, double elevation) {
  const Index n = h.rows();
  const double lx = std::cos(elevation) * std::cos(azimuth);
  const double ly = std::cos(elevation) * std::sin(azimuth);
  const double lz = std::sin(elevation);
  Image out(n, h.cols());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < h.cols(); ++j) {
      const double gx = 0.5 * (h(i, std::min(j + 1, h.cols() - 1)) - h(i, std::max<Index>(j - 1, 0)));
      const double gy = 0.5 * (h(std::min(i + 1, n - 1), j) - h(std::max<Index>(i - 1, 0), j));
      const double norm = std::sqrt(gx * gx + gy * gy + 1.0);
      out(i, j) = std::max(0.0, (-gx * lx - gy * ly + lz) / norm);
    }
  }
  return out;
}

}  // namespace

Image synth_crater_field(Index size, std::uint64_t seed) {
  if (size < 8) throw DimensionError("synthetic images need at least 8x8 pixels");
  std::mt19937_64 rng(derive_seed(seed, 0xc7a7e5ULL, static_cast<std::uint64_t>(size)));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double sz = static_cast<double>(size);

  Image h = random_field(size, 1.1, rng) * (0.012 * sz);
  const Image albedo = random_field(size, 0.9, rng);

  const double rmin = std::max(1.5, sz / 170.0);
  const double rmax = sz / 7.0;
  const int count = static_cast<int>(std::lround(70.0 * (sz / 256.0) * (sz / 256.0))) + 4;
  for (int c = 0; c < count; ++c) {
    const double u = uni(rng);
    const double r = 1.0 / (1.0 / rmin - u * (1.0 / rmin - 1.0 / rmax));
    const double cy = uni(rng) * sz;
    const double cx = uni(rng) * sz;
    const double depth = 0.22 * r;
    const double rim = 0.07 * r;
    const Index i0 = std::max<Index>(0, static_cast<Index>(cy - 1.6 * r));
    const Index i1 = std::min<Index>(size - 1, static_cast<Index>(cy + 1.6 * r));
    const Index j0 = std::max<Index>(0, static_cast<Index>(cx - 1.6 * r));
    const Index j1 = std::min<Index>(size - 1, static_cast<Index>(cx + 1.6 * r));
    for (Index i = i0; i <= i1; ++i) {
      for (Index j = j0; j <= j1; ++j) {
        const double rho = std::hypot(static_cast<double>(i) - cy, static_cast<double>(j) - cx) / r;
        double dh = rim * std::exp(-std::pow((rho - 1.0) / 0.22, 2));
        if (rho < 1.0) dh -= depth * (1.0 - rho * rho);
        h(i, j) += dh;
      }
    }
  }

  const Image lit = shade(h, -std::numbers::pi / 4.0, 35.0 * std::numbers::pi / 180.0);
  Image img(size, size);
  for (Index i = 0; i < img.size(); ++i) {
    const double a = 0.85 + 0.08 * std::tanh(albedo.data()[i]);
    img.data()[i] = std::clamp(0.04 + 0.9 * a * lit.data()[i], 0.0, 1.0);
  }
  return img;
}

Image synth_mixed_scene(Index size, std::uint64_t seed) {
  if (size < 8) throw DimensionError("synthetic images need at least 8x8 pixels");
  std::mt19937_64 rng(derive_seed(seed, 0x313dULL, static_cast<std::uint64_t>(size)));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double sz = static_cast<double>(size);

  const double g0 = 0.2 + 0.5 * uni(rng);
  const double gx = (uni(rng) - 0.5) * 0.6;
  const double gy = (uni(rng) - 0.5) * 0.6;
  Image img(size, size);
  for (Index i = 0; i < size; ++i)
    for (Index j = 0; j < size; ++j)
      img(i, j) = g0 + gx * (static_cast<double>(j) / sz - 0.5) + gy * (static_cast<double>(i) / sz - 0.5);

  const int shapes = 2 + static_cast<int>(uni(rng) * 40.0);
  for (int s = 0; s < shapes; ++s) {
    const double value = uni(rng);
    const double cy = uni(rng) * sz;
    const double cx = uni(rng) * sz;
    const double ry = (0.02 + 0.25 * uni(rng)) * sz;
    const double rx = (0.02 + 0.25 * uni(rng)) * sz;
    const bool ellipse = uni(rng) < 0.5;
    for (Index i = 0; i < size; ++i) {
      for (Index j = 0; j < size; ++j) {
        const double dy = (static_cast<double>(i) - cy) / ry;
        const double dx = (static_cast<double>(j) - cx) / rx;
        const bool inside = ellipse ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        if (inside) img(i, j) = value;
      }
    }
  }

  const double texture = 0.25 * uni(rng) * uni(rng);
  const double roughness = 0.4 + 0.8 * uni(rng);
  img += texture * random_field(size, roughness, rng);
  return img.cwiseMax(0.0).cwiseMin(1.0);
}

std::string fingerprint(const Image& image) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  for (std::uint64_t v : {static_cast<std::uint64_t>(image.rows()), static_cast<std::uint64_t>(image.cols())})
    for (int k = 0; k < 8; ++k) feed(static_cast<unsigned char>(v >> (8 * k)));
  for (Index i = 0; i < image.size(); ++i) {
    const auto q = static_cast<unsigned>(std::lround(std::clamp(image.data()[i], 0.0, 1.0) * 65535.0));
    feed(static_cast<unsigned char>(q & 0xff));
    feed(static_cast<unsigned char>(q >> 8));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace winreg
