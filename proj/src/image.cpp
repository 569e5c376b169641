#include "lngca/image.hpp"

#include "lngca/io.hpp"
#include "lngca/sources.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace lngca {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in, const std::string& path) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok += static_cast<char>(c);
    }
    if (tok.empty()) throw InputError(path + ": truncated PGM header");
    return tok;
}

int pgm_int(std::istream& in, const std::string& path, const char* what) {
    const std::string tok = pgm_token(in, path);
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw InputError(path + ": bad PGM " + what + " '" + tok + "'");
    }
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open for reading");
    if (pgm_token(in, path) != "P5") throw InputError(path + ": not a binary PGM (P5) file");
    const int width = pgm_int(in, path, "width");
    const int height = pgm_int(in, path, "height");
    const int maxval = pgm_int(in, path, "maxval");
    if (maxval > 255) throw InputError(path + ": only 8-bit PGM (maxval <= 255) is supported");
    std::vector<unsigned char> buf(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) throw InputError(path + ": truncated PGM pixel data");
    GrayImage img;
    img.pixels.resize(height, width);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) img.pixels(r, c) = buf[static_cast<std::size_t>(r) * width + c];
    return img;
}

void write_pgm(const std::string& path, const GrayImage& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path + ": cannot open for writing");
    out << "P5\n" << image.cols() << " " << image.rows() << "\n255\n";
    std::vector<unsigned char> buf(static_cast<std::size_t>(image.rows() * image.cols()));
    for (Index r = 0; r < image.rows(); ++r)
        for (Index c = 0; c < image.cols(); ++c)
            buf[static_cast<std::size_t>(r * image.cols() + c)] =
                static_cast<unsigned char>(std::clamp(std::lround(image.pixels(r, c)), 0L, 255L));
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw InputError(path + ": write failed");
}

void write_pgm_scaled(const std::string& path, const Matrix& pixels) {
    const double lo = pixels.minCoeff();
    const double hi = pixels.maxCoeff();
    const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
    write_pgm(path, GrayImage{((pixels.array() - lo) * scale).matrix()});
}

GrayImage read_image(const std::string& path) {
    std::string ext = path.size() >= 4 ? path.substr(path.size() - 4) : "";
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".pgm") return read_pgm(path);
    return GrayImage{read_csv(path).data};
}

Vector vectorize(const Matrix& pixels) {
    return Eigen::Map<const Vector>(pixels.data(), pixels.size());
}

Matrix unvectorize(const Vector& v, Index rows, Index cols) {
    if (v.size() != rows * cols) throw InputError("unvectorize: size mismatch");
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

std::vector<GrayImage> demo_images(Index size) {
    if (size < 8) throw InputError("demo_images: size must be at least 8");
    const double s = static_cast<double>(size);
    std::vector<GrayImage> out(3);
    for (auto& img : out) img.pixels.resize(size, size);
    for (Index r = 0; r < size; ++r) {
        for (Index c = 0; c < size; ++c) {
            const double y = (r + 0.5) / s - 0.5;
            const double x = (c + 0.5) / s - 0.5;
            // Thin bright rings on a dark field, fading toward the border.
            const double rad = std::hypot(x - 0.08, y + 0.05);
            const double ring = std::max(0.0, std::cos(2.0 * std::numbers::pi * 6.0 * rad));
            out[0].pixels(r, c) = 25.0 + 220.0 * std::pow(ring, 4) * std::exp(-2.0 * rad);
            // Diagonal bars over a horizontal ramp.
            const bool bar = std::fmod(std::abs(x + 0.6 * y) * 7.0, 1.0) < 0.3;
            out[1].pixels(r, c) = (bar ? 210.0 : 40.0) + 30.0 * x;
            // A bright disk and a dark square on a mid-gray field.
            double v = 120.0;
            if (std::hypot(x + 0.18, y - 0.15) < 0.17) v = 235.0;
            if (std::abs(x - 0.2) < 0.13 && std::abs(y + 0.2) < 0.13) v = 15.0;
            if (std::abs(y - 0.32) < 0.04) v = 200.0;
            out[2].pixels(r, c) = v;
        }
    }
    return out;
}

std::vector<GrayImage> independent_images(Index size) {
    if (size < 8 || (size & (size - 1)) != 0)
        throw InputError("independent_images: size must be a power of two, at least 8");
    // Split the column-major pixel index into three digits with radices L1, L2, L3.
    int bits = 0;
    while ((Index{1} << bits) < size * size) ++bits;
    const Index L1 = Index{1} << (bits / 3);
    const Index L2 = Index{1} << ((bits - bits / 3) / 2);
    const Index L3 = size * size / (L1 * L2);
    std::vector<GrayImage> out(3);
    for (auto& img : out) img.pixels.resize(size, size);
    for (Index c = 0; c < size; ++c) {
        for (Index r = 0; r < size; ++r) {
            const Index i = c * size + r;
            const Index a = i % L1;
            const Index b = (i / L1) % L2;
            const Index d = i / (L1 * L2);
            out[0].pixels(r, c) = a < L1 / 2 ? 50.0 : 210.0;
            out[1].pixels(r, c) = std::round(10.0 + 235.0 * static_cast<double>(b) / (L2 - 1));
            const double t = static_cast<double>(d) / (L3 - 1);
            out[2].pixels(r, c) = std::round(20.0 + 230.0 * t * t * t);
        }
    }
    return out;
}

void ImageUnmixConfig::validate() const {
    test.validate();
    estimator.validate();
    if (noise_images < 0) throw InputError("noise_images must be non-negative");
}

ImageUnmixResult image_unmix(const std::vector<GrayImage>& images, const ImageUnmixConfig& cfg) {
    cfg.validate();
    if (images.empty()) throw InputError("image_unmix: no images");
    const Index rows = images[0].rows();
    const Index cols = images[0].cols();
    for (const auto& img : images)
        if (img.rows() != rows || img.cols() != cols) throw InputError("image_unmix: images differ in size");
    const Index n = rows * cols;
    const int q = static_cast<int>(images.size());
    const Index p = q + cfg.noise_images;

    ImageUnmixResult out;
    out.rows = rows;
    out.cols = cols;
    out.true_images = q;

    Rng noise_rng(derive_seed(cfg.seed, "noise"));
    Rng mix_rng(derive_seed(cfg.seed, "mixing"));
    Matrix X(n, p);
    for (int i = 0; i < q; ++i) X.col(i) = standardize(vectorize(images[i].pixels));
    if (cfg.noise_images > 0) X.rightCols(cfg.noise_images) = gaussian_noise(n, cfg.noise_images, noise_rng);
    out.A = cfg.identity_mixing ? Matrix::Identity(p, p) : random_mixing(p, mix_rng);
    out.truth = X;

    const WhiteningResult white = whiten(SampleMatrix(X * out.A.transpose()));

    if (cfg.select_q) {
        TestConfig tc = cfg.test;
        tc.seed = derive_seed(cfg.seed, "test");
        out.selection = cfg.search == SearchMode::Sweep ? select_q_sweep(white.Z, tc) : select_q_binary(white.Z, tc);
    }

    EstimatorOptions opts = cfg.estimator;
    opts.kind = cfg.test.kind;
    opts.seed = derive_seed(cfg.seed, "estimate");
    out.estimate = multi_restart(white.Z, q, opts, EstimatorType::MaxMin);

    // Truth row i of the unmixing matrix reproduces truth column i from Z.
    const Matrix W0 = out.A.inverse() * white.Hinv;
    const SignedPermError aligned = signed_perm_error(W0, out.estimate.W.matrix());
    out.alignment = aligned.Q;
    out.alignment_error = aligned.err;
    out.recovered = aligned.Q.apply_cols(out.estimate.components.data());

    out.error_norms.resize(q);
    out.image_norms.resize(q);
    for (int i = 0; i < q; ++i) {
        out.error_norms(i) = (out.recovered.col(i) - X.col(i)).norm();
        out.image_norms(i) = X.col(i).norm();
    }
    out.exact_recovery = out.error_norms.maxCoeff() < 1e-6;
    return out;
}

}  // namespace lngca
