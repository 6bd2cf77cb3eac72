#include "oamao/pgm.hpp"

#include <cctype>
#include <cmath>

#include "oamao/io.hpp"

namespace oamao {

std::string encode_pgm(const Image& img) {
    std::string out = "P5\n" + std::to_string(img.n()) + " " + std::to_string(img.n()) + "\n65535\n";
    out.reserve(out.size() + 2 * img.size());
    for (double v : img) {
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("export_image: values must lie in [0, 1]");
        const auto q = static_cast<unsigned>(std::lround(v * 65535.0));
        out.push_back(static_cast<char>(q >> 8));
        out.push_back(static_cast<char>(q & 0xff));
    }
    return out;
}

namespace {

class HeaderReader {
public:
    HeaderReader(std::string_view bytes, std::size_t start) : bytes_(bytes), pos_(start) {}

    std::size_t pos() const noexcept { return pos_; }
    std::size_t token_start() const noexcept { return token_; }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long read_uint(const char* what) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        token_ = start;
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000) throw ParseError(std::string("PGM ") + what + " too large", start);
            ++pos_;
        }
        if (pos_ == start) throw ParseError(std::string("PGM header: expected ") + what, start);
        return value;
    }

    void expect_single_whitespace() {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
            throw ParseError("PGM header: expected whitespace before raster", pos_);
        ++pos_;
    }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
    std::size_t token_ = 0;
};

}  // namespace

Image decode_pgm(std::string_view bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw ParseError("not a binary PGM (missing P5 magic)", 0);
    HeaderReader header(bytes, 2);
    const long width = header.read_uint("width");
    const std::size_t width_at = header.token_start();
    const long height = header.read_uint("height");
    const std::size_t height_at = header.token_start();
    const long maxval = header.read_uint("maxval");
    const std::size_t maxval_at = header.token_start();
    header.expect_single_whitespace();
    const std::size_t raster = header.pos();

    if (width < 1) throw ParseError("PGM image has zero size", width_at);
    if (width != height) throw ParseError("PGM image is not square", height_at);
    if (maxval < 1 || maxval > 65535) throw ParseError("PGM maxval out of range", maxval_at);

    const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() < raster + count * bytes_per_sample)
        throw ParseError("PGM raster truncated", bytes.size());

    Image img(static_cast<int>(width));
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + raster);
    for (std::size_t i = 0; i < count; ++i) {
        unsigned q = bytes_per_sample == 2 ? (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1] : p[i];
        if (q > static_cast<unsigned>(maxval))
            throw ParseError("PGM sample exceeds maxval", raster + i * bytes_per_sample);
        img[i] = static_cast<double>(q) / static_cast<double>(maxval);
    }
    return img;
}

void export_image(const Image& img, const std::filesystem::path& path) {
    io::write_file_atomic(path, encode_pgm(img));
}

Image import_image(const std::filesystem::path& path) { return decode_pgm(io::read_file(path)); }

Image resize_bilinear(const Image& img, int n_target) {
    const int n_src = img.n();
    if (n_src < 8 || n_target < 8) throw ConfigError("resize_bilinear: sizes must be at least 8");
    if (n_src == n_target) return img;

    const double scale = static_cast<double>(n_src - 1) / (n_target - 1);
    std::vector<int> lo(static_cast<std::size_t>(n_target));
    std::vector<double> frac(static_cast<std::size_t>(n_target));
    for (int i = 0; i < n_target; ++i) {
        const double s = i * scale;
        int i0 = static_cast<int>(std::floor(s));
        if (i0 >= n_src - 1) i0 = n_src - 2;
        lo[static_cast<std::size_t>(i)] = i0;
        frac[static_cast<std::size_t>(i)] = s - i0;
    }

    // Rows first, then columns.
    std::vector<double> tmp(static_cast<std::size_t>(n_src) * n_target);
    for (int r = 0; r < n_src; ++r)
        for (int c = 0; c < n_target; ++c) {
            const int c0 = lo[static_cast<std::size_t>(c)];
            const double a = frac[static_cast<std::size_t>(c)];
            tmp[static_cast<std::size_t>(r) * n_target + c] = (1 - a) * img(r, c0) + a * img(r, c0 + 1);
        }
    Image out(n_target);
    for (int r = 0; r < n_target; ++r) {
        const int r0 = lo[static_cast<std::size_t>(r)];
        const double a = frac[static_cast<std::size_t>(r)];
        for (int c = 0; c < n_target; ++c)
            out(r, c) = (1 - a) * tmp[static_cast<std::size_t>(r0) * n_target + c] +
                        a * tmp[static_cast<std::size_t>(r0 + 1) * n_target + c];
    }
    return out;
}

}  // namespace oamao
