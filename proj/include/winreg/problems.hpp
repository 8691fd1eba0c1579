#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "winreg/dct.hpp"
#include "winreg/spectral.hpp"

namespace winreg {

// ---- operators ---------------------------------------------------------------

/// exp(-(s^2 + t^2) / (2 xi)) on the integer grid centered at (rows/2, cols/2),
/// zero where the mirrored partner falls outside the array, scaled to unit sum.
Image gaussian_psf(double xi, Index rows, Index cols);

/// "mild", "medium", "severe" for xi = 4, 16, 36; "custom" otherwise.
std::string blur_label(double xi);

/// Penalty eigenvalues in DCT layout (identity or reflexive Laplacian).
Image laplacian_penalty(Index rows, Index cols);

/// Reflexive-boundary convolution of an image with a centered symmetric kernel.
Image blur(const Image& image, const Image& psf);

// ---- noise ----------------------------------------------------------------------

struct NoisyData {
  Image d;
  double sigma2 = 0.0;
  double snr_db = 0.0;
};

/// Adds white Gaussian noise scaled so that 10 log10(||b||^2 / ||e||^2) equals
/// the target exactly. An infinite target returns b unchanged with sigma2 = 0.
NoisyData add_noise(const Image& b, double target_snr_db, std::uint64_t seed);

struct DataSet {
  Image x_true;  // empty when the truth is unknown
  Image b;
  Image d;
  double sigma2 = 0.0;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  Index rows() const { return d.rows(); }
  Index cols() const { return d.cols(); }
  bool has_truth() const { return x_true.size() > 0; }
};

DataSet make_dataset(const Image& x_true, const ReflexiveOperator& op, double snr_db, std::uint64_t seed);

/// Deterministic 64-bit mixing of a base seed with a stream label and index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

// ---- image I/O ----------------------------------------------------------------

/// Reads binary (P5) or plain (P2) PGM, returning intensities divided by maxval.
Image read_pgm(const std::filesystem::path& path);

/// Writes binary PGM; values are clipped to [0, 1] and scaled to maxval (255 or 65535).
void write_pgm(const std::filesystem::path& path, const Image& image, int maxval = 65535);

Image read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(const std::filesystem::path& path, const Image& image);

/// PGM or CSV by extension. CSV values outside [0, 1] are min-max rescaled.
Image read_image(const std::filesystem::path& path);

// ---- corpora --------------------------------------------------------------------

struct ManifestEntry {
  std::string path;
  std::string split;
  std::uint64_t seed = 0;
};

/// Plain-text manifest, one record per line: path, split, seed. Blank lines and
/// lines starting with '#' are skipped. Relative paths resolve against the manifest directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// Image files (*.pgm, *.csv) in a directory, sorted by filename.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

enum class Split { train, validate };

struct CorpusOptions {
  Index size = 256;
  bool subimages = false;  // take northwest and southeast corners instead of the center
  std::size_t train_count = 0;  // 0 means half of the files
};

/// Loads the requested half of the filename-sorted paths, cropped to size x size.
std::vector<Image> load_corpus(std::vector<std::filesystem::path> paths, Split split,
                               const CorpusOptions& options);

/// Crops one image to the configured size (center crop, or both corners in subimage mode).
std::vector<Image> crop_image(const Image& image, const CorpusOptions& options);

/// Procedural substitute corpora. Crater fields are statistically homogeneous
/// (shaded fractal terrain with power-law craters); mixed scenes combine
/// geometric shapes, gradients and texture in seed-dependent proportions.
Image synth_crater_field(Index size, std::uint64_t seed);
Image synth_mixed_scene(Index size, std::uint64_t seed);

/// FNV-1a hash of the image samples (quantized to 16 bits) as 16 hex digits.
std::string fingerprint(const Image& image);

}  // namespace winreg
