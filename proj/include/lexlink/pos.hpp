#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace lexlink {

/// The 41-tag part-of-speech set, plus Unknown for external sources that
/// carry no POS.
enum class PosTag : std::uint8_t {
    // nominal
    NOUN, NOUN_PROP, ADJ, ADJ_COMP, ADJ_NUM, NOUN_NUM, NOUN_QUANT, DIGIT, NOUN_VOICE, ABBREV,
    // verb
    PV, IV, CV, PV_PASS, IV_PASS,
    // functional words
    PRON, DEM_PRON, EMOJI, REL_PRON, REL_ADV, ADV, INTERROG_PART, INTERROG_ADV, PREP, CONJ,
    INTERROG_PRON, PART, RESTRIC_PART, PUNC, INTERJ, FOCUS_PART, DET, VERB, VOC_PART, PROG_PART,
    SUB_CONJ, VERB_PART, FUT_PART, EXCLAM_PRON, PSEUDO_VERB, NEG_PART,
    UNKNOWN,
};

enum class PosCategory : std::uint8_t { Nominal, Verb, Functional, Unknown };

inline constexpr std::size_t kPosTagCount = 41;

inline constexpr std::array<std::string_view, kPosTagCount + 1> kPosNames = {
    "NOUN", "NOUN_PROP", "ADJ", "ADJ_COMP", "ADJ_NUM", "NOUN_NUM", "NOUN_QUANT", "DIGIT", "NOUN_VOICE", "ABBREV",
    "PV", "IV", "CV", "PV_PASS", "IV_PASS",
    "PRON", "DEM_PRON", "EMOJI", "REL_PRON", "REL_ADV", "ADV", "INTERROG_PART", "INTERROG_ADV", "PREP", "CONJ",
    "INTERROG_PRON", "PART", "RESTRIC_PART", "PUNC", "INTERJ", "FOCUS_PART", "DET", "VERB", "VOC_PART", "PROG_PART",
    "SUB_CONJ", "VERB_PART", "FUT_PART", "EXCLAM_PRON", "PSEUDO_VERB", "NEG_PART",
    "UNKNOWN",
};

constexpr std::string_view to_string(PosTag t) { return kPosNames[static_cast<std::size_t>(t)]; }

constexpr std::optional<PosTag> parse_pos(std::string_view s) {
    for (std::size_t i = 0; i < kPosNames.size(); ++i)
        if (kPosNames[i] == s) return static_cast<PosTag>(i);
    return std::nullopt;
}

constexpr PosCategory category_of(PosTag t) {
    const auto i = static_cast<std::size_t>(t);
    if (i <= static_cast<std::size_t>(PosTag::ABBREV)) return PosCategory::Nominal;
    if (i <= static_cast<std::size_t>(PosTag::IV_PASS)) return PosCategory::Verb;
    if (t == PosTag::UNKNOWN) return PosCategory::Unknown;
    return PosCategory::Functional;
}

constexpr std::string_view to_string(PosCategory c) {
    switch (c) {
    case PosCategory::Nominal: return "NOMINAL";
    case PosCategory::Verb: return "VERB";
    case PosCategory::Functional: return "FUNCTIONAL";
    case PosCategory::Unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

/// All 41 real tags in table order.
constexpr std::array<PosTag, kPosTagCount> all_pos_tags() {
    std::array<PosTag, kPosTagCount> out{};
    for (std::size_t i = 0; i < kPosTagCount; ++i) out[i] = static_cast<PosTag>(i);
    return out;
}

}  // namespace lexlink
