#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "oamao/field.hpp"

namespace oamao {

// Binary portable graymap (P5). Export always writes maxval 65535 with
// big-endian 16-bit samples, row-major, top row first. Import also accepts
// 8-bit files (maxval <= 255) and header comments.

/// Throws DomainError if any value is outside [0, 1].
std::string encode_pgm(const Image& img);
/// Throws ParseError with the byte offset of the first malformed token.
Image decode_pgm(std::string_view bytes);

void export_image(const Image& img, const std::filesystem::path& path);
Image import_image(const std::filesystem::path& path);

/// Separable bilinear resampling with corners aligned: destination pixel i maps
/// to source coordinate i * (n_src - 1) / (n_dst - 1). Both sizes must be >= 8.
Image resize_bilinear(const Image& img, int n_target);

}  // namespace oamao
