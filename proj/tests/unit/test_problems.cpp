#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "winreg/errors.hpp"
#include "winreg/problems.hpp"

using namespace winreg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("winreg_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

}  // namespace

TEST_CASE("Gaussian PSF") {
  const Image k = gaussian_psf(4.0, 9, 9);
  CHECK(k.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(is_doubly_symmetric(k));
  CHECK(k(4, 4) == k.maxCoeff());
  CHECK(k(4, 6) / k(4, 4) == doctest::Approx(std::exp(-4.0 / 8.0)));
  CHECK(k(5, 6) / k(4, 4) == doctest::Approx(std::exp(-5.0 / 8.0)));
  const Image even = gaussian_psf(4.0, 8, 6);
  CHECK(even.row(0).cwiseAbs().maxCoeff() == 0.0);  // offset -4 has no mirrored partner
  CHECK(even.col(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(is_doubly_symmetric(even));
  CHECK_THROWS_AS(gaussian_psf(0.0, 5, 5), DomainError);
  CHECK(blur_label(4.0) == "mild");
  CHECK(blur_label(16.0) == "medium");
  CHECK(blur_label(36.0) == "severe");
  CHECK(blur_label(5.0) == "custom");
}

TEST_CASE("Laplacian penalty eigenvalues") {
  const Image e = laplacian_penalty(4, 5);
  CHECK(e(0, 0) == 0.0);
  CHECK(e(1, 0) == doctest::Approx(2.0 - 2.0 * std::cos(M_PI / 4.0)));
  CHECK(e(3, 4) == doctest::Approx(4.0 - 2.0 * std::cos(3.0 * M_PI / 4.0) - 2.0 * std::cos(4.0 * M_PI / 5.0)));
}

TEST_CASE("noise hits the requested SNR exactly") {
  const Image b = synth_mixed_scene(32, 7);
  for (double snr : {10.0, 25.0, 40.0}) {
    const NoisyData nd = add_noise(b, snr, 123);
    const double e2 = (nd.d - b).squaredNorm();
    CHECK(10.0 * std::log10(b.squaredNorm() / e2) == doctest::Approx(snr).epsilon(1e-12));
    CHECK(nd.sigma2 == doctest::Approx(e2 / b.size()));
    CHECK(nd.snr_db == doctest::Approx(snr));
  }
  const NoisyData a = add_noise(b, 10.0, 5), a2 = add_noise(b, 10.0, 5), c = add_noise(b, 10.0, 6);
  CHECK((a.d - a2.d).norm() == 0.0);
  CHECK((a.d - c.d).norm() > 0.0);
  const NoisyData clean = add_noise(b, INFINITY, 1);
  CHECK((clean.d - b).norm() == 0.0);
  CHECK(clean.sigma2 == 0.0);
  CHECK_THROWS_AS(add_noise(Image::Zero(4, 4), 10.0, 1), DomainError);
  CHECK_THROWS_AS(add_noise(b, NAN, 1), DomainError);
}

TEST_CASE("noise is approximately white Gaussian") {
  const Image b = Image::Ones(128, 128);
  const NoisyData nd = add_noise(b, 0.0, 42);
  const Image e = nd.d - b;
  const double mean = e.mean();
  CHECK(std::abs(mean) < 4.0 * std::sqrt(nd.sigma2 / e.size()));
  double lag = 0.0;
  for (Index i = 0; i + 1 < e.size(); ++i) lag += e.data()[i] * e.data()[i + 1];
  CHECK(std::abs(lag / (e.size() - 1)) < 4.0 * nd.sigma2 / std::sqrt(static_cast<double>(e.size())));
}

TEST_CASE("data sets and seeds") {
  const Image psf = gaussian_psf(2.0, 16, 16);
  const ReflexiveOperator op(psf);
  const Image x = synth_crater_field(16, 1);
  const DataSet ds = make_dataset(x, op, 15.0, 77);
  CHECK(ds.has_truth());
  CHECK(ds.rows() == 16);
  CHECK((ds.b - op.apply(x)).norm() == 0.0);
  CHECK(ds.seed == 77);
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(1, s, i));
  CHECK(seen.size() == 200);
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("PGM round trips") {
  TempDir tmp("pgm");
  std::mt19937_64 rng(8);
  Image img(5, 7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Index i = 0; i < img.size(); ++i) img.data()[i] = u(rng);
  write_pgm(tmp.path / "a.pgm", img);
  const Image back16 = read_pgm(tmp.path / "a.pgm");
  CHECK(back16.rows() == 5);
  CHECK(back16.cols() == 7);
  CHECK((back16 - img).cwiseAbs().maxCoeff() <= 0.5 / 65535.0 + 1e-15);
  write_pgm(tmp.path / "b.pgm", img, 255);
  CHECK((read_pgm(tmp.path / "b.pgm") - img).cwiseAbs().maxCoeff() <= 0.5 / 255.0 + 1e-15);
  CHECK(fs::file_size(tmp.path / "b.pgm") == std::string("P5\n7 5\n255\n").size() + 35);
  CHECK_THROWS_AS(write_pgm(tmp.path / "c.pgm", img, 1000), DomainError);

  write_file(tmp.path / "plain.pgm", "P2\n# comment\n3 2\n# another\n10\n0 5 10\n10 5 0\n");
  const Image plain = read_pgm(tmp.path / "plain.pgm");
  CHECK(plain(0, 1) == doctest::Approx(0.5));
  CHECK(plain(1, 0) == doctest::Approx(1.0));
  write_file(tmp.path / "short.pgm", "P5\n4 4\n255\nabc");
  CHECK_THROWS_AS(read_pgm(tmp.path / "short.pgm"), IoError);
  write_file(tmp.path / "color.ppm", "P6\n1 1\n255\nabc");
  CHECK_THROWS_AS(read_pgm(tmp.path / "color.ppm"), IoError);
  CHECK_THROWS_AS(read_pgm(tmp.path / "missing.pgm"), IoError);
}

TEST_CASE("CSV matrices") {
  TempDir tmp("csv");
  Image img(2, 3);
  img << 0.1, 1.0 / 3.0, 2.0, -1.0, 0.0, 1e-20;
  write_csv_matrix(tmp.path / "m.csv", img);
  CHECK((read_csv_matrix(tmp.path / "m.csv") - img).norm() == 0.0);
  const Image scaled = read_image(tmp.path / "m.csv");
  CHECK(scaled.minCoeff() == 0.0);
  CHECK(scaled.maxCoeff() == 1.0);
  write_file(tmp.path / "ragged.csv", "1,2\n3\n");
  CHECK_THROWS_AS(read_csv_matrix(tmp.path / "ragged.csv"), IoError);
  write_file(tmp.path / "text.csv", "1,x\n");
  CHECK_THROWS_AS(read_csv_matrix(tmp.path / "text.csv"), IoError);
  CHECK_THROWS_AS(read_image(tmp.path / "m.tif"), IoError);
}

TEST_CASE("manifests and corpora") {
  TempDir tmp("corpus");
  fs::create_directories(tmp.path / "img");
  for (int i = 0; i < 4; ++i) write_pgm(tmp.path / "img" / ("im" + std::to_string(3 - i) + ".pgm"), synth_mixed_scene(20, i));
  write_file(tmp.path / "img" / "notes.txt", "ignored");
  write_file(tmp.path / "manifest.txt", "# path, split, seed\n\nimg/im0.pgm, train, 3\n  img/im1.pgm ,validation_1, 4\n");
  const auto entries = read_manifest(tmp.path / "manifest.txt");
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].path == (tmp.path / "img" / "im0.pgm").string());
  CHECK(entries[1].split == "validation_1");
  CHECK(entries[1].seed == 4);
  write_file(tmp.path / "bad.txt", "img/im0.pgm, train\n");
  CHECK_THROWS_AS(read_manifest(tmp.path / "bad.txt"), IoError);
  CHECK_THROWS_AS(read_manifest(tmp.path / "none.txt"), IoError);

  const auto files = list_images(tmp.path / "img");
  REQUIRE(files.size() == 4);
  CHECK(files.front().filename() == "im0.pgm");
  CHECK_THROWS_AS(list_images(tmp.path / "missing"), IoError);

  CorpusOptions opt;
  opt.size = 16;
  const auto train = load_corpus(files, Split::train, opt);
  const auto val = load_corpus(files, Split::validate, opt);
  CHECK(train.size() == 2);
  CHECK(val.size() == 2);
  CHECK(train[0].rows() == 16);
  opt.subimages = true;
  CHECK(load_corpus(files, Split::train, opt).size() == 4);
}

TEST_CASE("cropping") {
  Image img(6, 8);
  for (Index i = 0; i < img.size(); ++i) img.data()[i] = static_cast<double>(i);
  CorpusOptions opt;
  opt.size = 4;
  const auto center = crop_image(img, opt);
  REQUIRE(center.size() == 1);
  CHECK(center[0](0, 0) == img(1, 2));
  opt.subimages = true;
  const auto corners = crop_image(img, opt);
  REQUIRE(corners.size() == 2);
  CHECK(corners[0](0, 0) == img(0, 0));
  CHECK(corners[1](3, 3) == img(5, 7));
  opt.size = 7;
  CHECK_THROWS_AS(crop_image(img, opt), DimensionError);
}

TEST_CASE("procedural corpora are deterministic images in the unit range") {
  for (auto gen : {&synth_crater_field, &synth_mixed_scene}) {
    const Image a = gen(48, 3);
    const Image b = gen(48, 3);
    const Image c = gen(48, 4);
    CHECK((a - b).norm() == 0.0);
    CHECK((a - c).norm() > 0.0);
    CHECK(a.minCoeff() >= 0.0);
    CHECK(a.maxCoeff() <= 1.0);
    CHECK(a.maxCoeff() - a.minCoeff() > 0.2);
    CHECK(fingerprint(a) == fingerprint(b));
    CHECK(fingerprint(a) != fingerprint(c));
    CHECK(fingerprint(a).size() == 16);
  }
}
