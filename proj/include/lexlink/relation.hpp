#pragma once

#include "lexlink/error.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace lexlink {

/// Mapping relations. R1-R6 are the confirmable core; X1-X5 are the
/// extended, lower-precision relations.
enum class Relation : std::uint8_t {
    R1,  // same exactly
    R2,  // same, singular/plural difference
    R3,  // same, singular/dual difference
    R4,  // same, masculine/feminine difference
    R5,  // same, case difference
    R6,  // same, but proper noun
    X1,  // same in all forms, some meanings
    X2,  // different wording, same meaning
    X3,  // different, same meanings
    X4,  // different, synonymous in some meanings
    X5,  // different, derivational reference
};

inline constexpr std::array<Relation, 11> kAllRelations = {
    Relation::R1, Relation::R2, Relation::R3, Relation::R4, Relation::R5, Relation::R6,
    Relation::X1, Relation::X2, Relation::X3, Relation::X4, Relation::X5,
};

inline constexpr std::array<Relation, 6> kCoreRelations = {
    Relation::R1, Relation::R2, Relation::R3, Relation::R4, Relation::R5, Relation::R6,
};

constexpr std::string_view code_of(Relation r) {
    constexpr std::array<std::string_view, 11> codes = {"R1", "R2", "R3", "R4", "R5", "R6",
                                                        "X1", "X2", "X3", "X4", "X5"};
    return codes[static_cast<std::size_t>(r)];
}

constexpr std::string_view label_of(Relation r) {
    switch (r) {
    case Relation::R1: return "Same Exactly";
    case Relation::R2: return "Same, Singular-Plural difference";
    case Relation::R3: return "Same, Singular-Dual difference";
    case Relation::R4: return "Same, Male-Female difference";
    case Relation::R5: return "Same, Case difference";
    case Relation::R6: return "Same, but Proper Noun";
    case Relation::X1: return "Same all forms, some meanings";
    case Relation::X2: return "Different wording, same meaning";
    case Relation::X3: return "Different, same meanings";
    case Relation::X4: return "Different, synonym in some meanings";
    case Relation::X5: return "Different, derivational reference";
    }
    return "";
}

constexpr std::optional<Relation> parse_relation(std::string_view code) {
    for (auto r : kAllRelations)
        if (code_of(r) == code) return r;
    return std::nullopt;
}

inline Relation relation_or_throw(std::string_view code) {
    if (const auto r = parse_relation(code)) return *r;
    throw Error(ErrorCode::UnknownRelation, std::string(code));
}

/// Precision weight (percent) attached to each relation. X2 has no
/// published weight and is configurable.
struct PrecisionTable {
    int x2_weight = 30;

    int operator()(Relation r) const {
        switch (r) {
        case Relation::R1: return 100;
        case Relation::R2: return 90;
        case Relation::R3: return 80;
        case Relation::R4: return 70;
        case Relation::R5: return 60;
        case Relation::R6: return 40;
        case Relation::X1: return 50;
        case Relation::X2: return x2_weight;
        case Relation::X3: return 30;
        case Relation::X4: return 20;
        case Relation::X5: return 10;
        }
        return 0;
    }
};

}  // namespace lexlink
