#pragma once

#include "lngca/estimator.hpp"
#include "lngca/linalg.hpp"
#include "lngca/qtest.hpp"

#include <string>
#include <vector>

namespace lngca {

/// Grayscale image; pixels(r, c) with r the row from the top.
struct GrayImage {
    Matrix pixels;
    Index rows() const { return pixels.rows(); }
    Index cols() const { return pixels.cols(); }
};

/// Binary PGM (P5), maxval <= 255.
GrayImage read_pgm(const std::string& path);
/// Writes pixels clamped and rounded to 0..255 as P5.
void write_pgm(const std::string& path, const GrayImage& image);
/// Linearly rescales values to 0..255 before writing.
void write_pgm_scaled(const std::string& path, const Matrix& pixels);
/// .pgm files as PGM, anything else as a plain numeric CSV matrix.
GrayImage read_image(const std::string& path);

/// Column-major vectorization and its inverse.
Vector vectorize(const Matrix& pixels);
Matrix unvectorize(const Vector& v, Index rows, Index cols);

/// Three structured test images (rings, bars, shapes) of size x size.
std::vector<GrayImage> demo_images(Index size = 128);

/// Three size x size images whose pixel values depend on separate digits of
/// the pixel index, so they are exactly independent over the pixel grid.
/// size must be a power of two.
std::vector<GrayImage> independent_images(Index size = 64);

struct ImageUnmixConfig {
    TestConfig test;                 ///< q selection (kind, B, alpha, mode, seed)
    SearchMode search = SearchMode::Sweep;
    EstimatorOptions estimator = [] {
        EstimatorOptions o;
        o.restarts = 3;
        return o;
    }();                             ///< kind is taken from test.kind
    int noise_images = 3;
    bool identity_mixing = false;
    bool select_q = true;            ///< run the sequential test
    std::uint64_t seed = 0;

    void validate() const;
};

struct ImageUnmixResult {
    Index rows = 0;
    Index cols = 0;
    int true_images = 0;
    Matrix truth;                    ///< n x p standardized [images, noise]
    Matrix A;
    SelectionResult selection;       ///< empty when select_q is off
    Estimate estimate;               ///< max-min with q = true_images
    SignedPermutation alignment;     ///< truth row i matched with estimate row perm[i]
    Matrix recovered;                ///< n x p aligned, standardized recovered components
    Vector error_norms;              ///< ||recovered_i - truth_i|| for the true images
    Vector image_norms;              ///< ||truth_i||
    double alignment_error = 0.0;
    bool exact_recovery = false;     ///< every error norm below 1e-6
};

ImageUnmixResult image_unmix(const std::vector<GrayImage>& images, const ImageUnmixConfig& cfg);

}  // namespace lngca
