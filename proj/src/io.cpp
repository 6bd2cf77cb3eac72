#include "oamao/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "oamao/error.hpp"

namespace oamao::io {

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out.flush()) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

std::string sha256_bytes(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    return std::string(reinterpret_cast<const char*>(digest.data()), len);
}

std::string sha256_hex(std::string_view bytes) {
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned char c : sha256_bytes(bytes)) {
        out.push_back(hex[c >> 4]);
        out.push_back(hex[c & 0xf]);
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view text, std::size_t offset, const char* what) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty())
        throw ParseError("expected " + std::string(what) + ", got '" + std::string(text) + "'", offset);
    return value;
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::string_view text) {
    std::vector<KeyValue> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(pos, end - pos));
        if (!line.empty() && line.front() != '#') {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", pos);
            const auto key = trim(line.substr(0, eq));
            if (key.empty()) throw ParseError("empty key", pos);
            out.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), pos});
        }
        pos = end + 1;
    }
    return out;
}

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) throw Error("format_double failed");
    return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text, std::size_t offset) {
    return parse_number<double>(text, offset, "a number");
}

long long parse_int(std::string_view text, std::size_t offset) {
    return parse_number<long long>(text, offset, "an integer");
}

std::uint64_t parse_u64(std::string_view text, std::size_t offset) {
    return parse_number<std::uint64_t>(text, offset, "an unsigned integer");
}

}  // namespace oamao::io
