#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace misinfo {

// Error hierarchy. Everything the library throws on bad input derives from
// Error; the CLI maps Error to exit code 1 and anything else to 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class ContractError : public Error {
public:
    using Error::Error;
};

class DegenerateDataError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    NumericError(const std::string &what, std::size_t epoch) : Error(what), epoch_(epoch) {}
    [[nodiscard]] std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

class CompletenessError : public Error {
public:
    CompletenessError(const std::string &what, std::vector<std::string> ids)
        : Error(what), ids_(std::move(ids)) {}
    [[nodiscard]] const std::vector<std::string> &offending_ids() const noexcept { return ids_; }

private:
    std::vector<std::string> ids_;
};

// ---- files -----------------------------------------------------------------

std::string read_file(const std::filesystem::path &path);

/// Writes to a sibling temp file and renames over `path`, so readers never
/// observe a half-written artifact.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);

/// Directory holding the bundled glossary and stopword lists.
/// `MISINFO_DATA_DIR` overrides the compiled-in default.
std::filesystem::path data_dir();

// ---- text ------------------------------------------------------------------

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string> &parts, std::string_view sep);

/// Number of Unicode code points in a UTF-8 string. Invalid sequences count
/// one per byte.
std::size_t utf8_length(std::string_view s);

std::string nfc_normalize(std::string_view s);

/// Decodes UTF-8; malformed bytes become U+FFFD.
std::u32string decode_utf8(std::string_view s);
void append_utf8(std::string &out, char32_t cp);
bool is_alnum_cp(char32_t cp);
bool is_digit_cp(char32_t cp);
/// Combining marks stay attached to the word they modify.
bool is_mark_cp(char32_t cp);
bool is_space_cp(char32_t cp);
std::string to_lower_utf8(std::string_view s);

// ---- randomness ------------------------------------------------------------

/// Seeded engine plus the handful of draws the library needs. Distribution
/// code is local so results are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);
    /// Uniform double in [0, 1).
    double unit();

    template <typename T>
    void shuffle(std::vector<T> &items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent stream seeds from (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// 64-bit FNV-1a, used for feature-space digests.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t value);

}  // namespace misinfo
