#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace misinfo {

/// Five-way annotation label. Only M and T reach the classifiers.
enum class LabelClass { T, M, I, N, U };

inline constexpr std::array<LabelClass, 5> kAllLabels{LabelClass::T, LabelClass::M, LabelClass::I, LabelClass::N,
                                                      LabelClass::U};

constexpr std::string_view to_string(LabelClass label) {
    switch (label) {
        case LabelClass::T: return "T";
        case LabelClass::M: return "M";
        case LabelClass::I: return "I";
        case LabelClass::N: return "N";
        case LabelClass::U: return "U";
    }
    return "?";
}

/// Accepts the single-letter codes, case-insensitively.
constexpr std::optional<LabelClass> parse_label(std::string_view text) {
    if (text.size() != 1) {
        return std::nullopt;
    }
    switch (text[0]) {
        case 'T': case 't': return LabelClass::T;
        case 'M': case 'm': return LabelClass::M;
        case 'I': case 'i': return LabelClass::I;
        case 'N': case 'n': return LabelClass::N;
        case 'U': case 'u': return LabelClass::U;
        default: return std::nullopt;
    }
}

constexpr bool is_binary(LabelClass label) { return label == LabelClass::M || label == LabelClass::T; }

constexpr std::size_t label_index(LabelClass label) { return static_cast<std::size_t>(label); }

}  // namespace misinfo
