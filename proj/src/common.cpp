#include "misinfo/common.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cstdlib>
#include <limits>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace misinfo {

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError(fmt::format("read failed on '{}'", path.string()));
    }
    return buffer.str();
}

void write_file_atomic(const std::filesystem::path &path, std::string_view content) {
    namespace fs = std::filesystem;
    const fs::path parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    if (!fs::is_directory(parent, ec)) {
        throw IoError(fmt::format("directory '{}' does not exist", parent.string()));
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError(fmt::format("cannot open '{}' for writing", tmp.string()));
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw IoError(fmt::format("write failed on '{}'", tmp.string()));
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError(fmt::format("cannot move output into place at '{}': {}", path.string(), ec.message()));
    }
}

std::filesystem::path data_dir() {
    if (const char *env = std::getenv("MISINFO_DATA_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return MISINFO_DEFAULT_DATA_DIR;
}

std::string trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(ws);
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(s.substr(start));
            return parts;
        }
        parts.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string join(const std::vector<std::string> &parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i != 0) {
            out += sep;
        }
        out += parts[i];
    }
    return out;
}

std::size_t utf8_length(std::string_view s) {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        const auto lead = static_cast<unsigned char>(s[i]);
        std::size_t width = 1;
        if (lead >= 0xF0 && lead < 0xF8) {
            width = 4;
        } else if (lead >= 0xE0) {
            width = 3;
        } else if (lead >= 0xC0) {
            width = 2;
        }
        bool valid = lead < 0x80 || (width > 1 && i + width <= s.size() && lead < 0xF8);
        for (std::size_t k = 1; valid && k < width; ++k) {
            valid = (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
        }
        i += valid ? width : 1;
        ++count;
    }
    return count;
}

std::string nfc_normalize(std::string_view s) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2 *nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) {
        throw Error("ICU NFC normalizer unavailable");
    }
    const auto input = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    icu::UnicodeString normalized = nfc->normalize(input, status);
    if (U_FAILURE(status)) {
        return std::string(s);
    }
    std::string out;
    normalized.toUTF8String(out);
    return out;
}

std::string to_lower_utf8(std::string_view s) {
    auto text = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    text.toLower(icu::Locale::getRoot());
    std::string out;
    text.toUTF8String(out);
    return out;
}

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    int32_t i = 0;
    const auto length = static_cast<int32_t>(s.size());
    const auto *bytes = reinterpret_cast<const uint8_t *>(s.data());
    while (i < length) {
        UChar32 cp = 0;
        U8_NEXT(bytes, i, length, cp);
        out.push_back(cp < 0 ? U'\uFFFD' : static_cast<char32_t>(cp));
    }
    return out;
}

void append_utf8(std::string &out, char32_t cp) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
    if (error) {
        out += "\xEF\xBF\xBD";
        return;
    }
    out.append(reinterpret_cast<const char *>(buf), static_cast<std::size_t>(len));
}

bool is_alnum_cp(char32_t cp) { return u_isalnum(static_cast<UChar32>(cp)) != 0; }

bool is_digit_cp(char32_t cp) { return u_isdigit(static_cast<UChar32>(cp)) != 0; }

bool is_mark_cp(char32_t cp) {
    const auto mask = U_GET_GC_MASK(static_cast<UChar32>(cp));
    return (mask & U_GC_M_MASK) != 0;
}

bool is_space_cp(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)) != 0; }

std::uint64_t Rng::below(std::uint64_t bound) {
    // Rejection sampling on the top of the range keeps the draw unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return x % bound;
}

double Rng::unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
    for (const char c : bytes) {
        state ^= static_cast<unsigned char>(c);
        state *= 0x100000001b3ULL;
    }
    return state;
}

std::string hex64(std::uint64_t value) {
    return fmt::format("{:016x}", value);
}

}  // namespace misinfo
