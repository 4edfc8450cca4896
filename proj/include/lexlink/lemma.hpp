#pragma once

#include "lexlink/orthography.hpp"
#include "lexlink/pos.hpp"

#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lexlink {

/// Lexicon id under which canonical lemmas are addressed (`qabas:<id>`).
inline constexpr std::string_view kCanonicalLexicon = "qabas";

enum class Gender : std::uint8_t { NA, Masc, Fem };
enum class Number : std::uint8_t { NA, Sing, Dual, Plural };
enum class Aspect : std::uint8_t { NA, PV, IV, CV, PV_PASS, IV_PASS };
enum class Person : std::uint8_t { NA, First, Second, Third };
enum class Augmentation : std::uint8_t { NA, Augmented, Unaugmented };
enum class Transitivity : std::uint8_t { NA, Transitive, Intransitive };

template <typename E>
struct EnumNames;

template <>
struct EnumNames<Gender> {
    static constexpr std::array<std::string_view, 3> names = {"NA", "MASC", "FEM"};
};
template <>
struct EnumNames<Number> {
    static constexpr std::array<std::string_view, 4> names = {"NA", "SING", "DUAL", "PLURAL"};
};
template <>
struct EnumNames<Aspect> {
    static constexpr std::array<std::string_view, 6> names = {"NA", "PV", "IV", "CV", "PV_PASS", "IV_PASS"};
};
template <>
struct EnumNames<Person> {
    static constexpr std::array<std::string_view, 4> names = {"NA", "1", "2", "3"};
};
template <>
struct EnumNames<Augmentation> {
    static constexpr std::array<std::string_view, 3> names = {"NA", "AUGMENTED", "UNAUGMENTED"};
};
template <>
struct EnumNames<Transitivity> {
    static constexpr std::array<std::string_view, 3> names = {"NA", "TRANSITIVE", "INTRANSITIVE"};
};

template <typename E>
constexpr std::string_view enum_name(E e) {
    return EnumNames<E>::names[static_cast<std::size_t>(e)];
}

/// Empty text parses as NA.
template <typename E>
constexpr std::optional<E> parse_enum(std::string_view s) {
    if (s.empty()) return E{};
    const auto& names = EnumNames<E>::names;
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == s) return static_cast<E>(i);
    return std::nullopt;
}

constexpr Aspect aspect_for_verb_pos(PosTag pos) {
    switch (pos) {
    case PosTag::PV: return Aspect::PV;
    case PosTag::IV: return Aspect::IV;
    case PosTag::CV: return Aspect::CV;
    case PosTag::PV_PASS: return Aspect::PV_PASS;
    case PosTag::IV_PASS: return Aspect::IV_PASS;
    default: return Aspect::NA;
    }
}

/// Inflected-form sets used by the mapping heuristics.
struct FormSets {
    WordSet singulars, duals, plurals;
    WordSet pv, iv, cv;

    bool empty() const {
        return singulars.empty() && duals.empty() && plurals.empty() && pv.empty() && iv.empty() && cv.empty();
    }
    bool operator==(const FormSets&) const = default;
};

/// Compares local ids so that purely numeric ids sort numerically and
/// everything else sorts bytewise.
struct LocalIdLess {
    using is_transparent = void;
    bool operator()(std::string_view a, std::string_view b) const {
        const bool na = is_numeric(a), nb = is_numeric(b);
        if (na && nb) {
            const auto ta = strip_zeros(a), tb = strip_zeros(b);
            if (ta.size() != tb.size()) return ta.size() < tb.size();
            return ta < tb;
        }
        if (na != nb) return na;
        return a < b;
    }
    static bool is_numeric(std::string_view s) {
        if (s.empty()) return false;
        for (char c : s)
            if (c < '0' || c > '9') return false;
        return true;
    }
    static std::string_view strip_zeros(std::string_view s) {
        while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
        return s;
    }
};

/// Address of a lemma: `lexicon:local_id`. Canonical lemmas use the
/// canonical lexicon id and their numeric id as local id.
struct LemmaRef {
    std::string lexicon;
    std::string local_id;

    static LemmaRef canonical(std::uint64_t id) { return {std::string(kCanonicalLexicon), std::to_string(id)}; }

    static std::optional<LemmaRef> parse(std::string_view s) {
        const auto colon = s.find(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 == s.size()) return std::nullopt;
        return LemmaRef{std::string(s.substr(0, colon)), std::string(s.substr(colon + 1))};
    }

    bool is_canonical() const { return lexicon == kCanonicalLexicon; }

    std::optional<std::uint64_t> canonical_id() const {
        if (!is_canonical()) return std::nullopt;
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(local_id.data(), local_id.data() + local_id.size(), v);
        if (ec != std::errc{} || p != local_id.data() + local_id.size()) return std::nullopt;
        return v;
    }

    std::string str() const { return lexicon + ":" + local_id; }

    bool operator==(const LemmaRef&) const = default;
    bool operator<(const LemmaRef& o) const {
        if (lexicon != o.lexicon) return lexicon < o.lexicon;
        return LocalIdLess{}(local_id, o.local_id);
    }
};

/// Canonical lexicon entry carrying the eight morphological features.
struct CanonicalLemma {
    std::uint64_t id = 0;
    std::vector<AnalyzedWord> spellings;  // frequency order
    PosTag pos = PosTag::UNKNOWN;
    Gender gender = Gender::NA;
    Number number = Number::NA;
    Aspect aspect = Aspect::NA;
    Person person = Person::NA;
    WordSet roots;
    Augmentation augmentation = Augmentation::NA;
    Transitivity transitivity = Transitivity::NA;
    std::optional<std::string> dialect;
    std::optional<std::uint64_t> msa_counterpart;
    FormSets forms;

    LemmaRef ref() const { return LemmaRef::canonical(id); }
    bool operator==(const CanonicalLemma&) const = default;
};

/// A lemma from an external, read-only source lexicon. Feature values the
/// source provides are kept verbatim in `free_features`.
struct ExternalLemma {
    std::string lexicon_id;
    std::string local_id;
    std::vector<AnalyzedWord> spellings;
    PosTag pos = PosTag::UNKNOWN;
    FormSets forms;
    WordSet roots;
    std::map<std::string, std::string> free_features;

    LemmaRef ref() const { return {lexicon_id, local_id}; }
    bool operator==(const ExternalLemma&) const = default;
};

inline bool is_named_dialect(const std::optional<std::string>& d) {
    return d && !d->empty() && *d != "MSA" && *d != "Classical";
}

/// Category-agnostic view used by the mapping heuristics. When the head
/// form set of a lemma's category (singulars for nominals, PV for verbs) is
/// empty, the lemma's spellings stand in for it.
struct LemmaForms {
    LemmaRef ref;
    PosTag pos = PosTag::UNKNOWN;
    FormSets forms;
    WordSet roots;

    bool verbal() const { return category_of(pos) == PosCategory::Verb || (pos == PosTag::UNKNOWN && !forms.pv.empty()); }
    bool nominal() const {
        return category_of(pos) == PosCategory::Nominal || (pos == PosTag::UNKNOWN && !forms.singulars.empty());
    }
};

inline void fill_head_forms(LemmaForms& lf, const std::vector<AnalyzedWord>& spellings) {
    const auto cat = category_of(lf.pos);
    WordSet* head = cat == PosCategory::Nominal ? &lf.forms.singulars : cat == PosCategory::Verb ? &lf.forms.pv : nullptr;
    if (head && head->empty())
        for (const auto& s : spellings) head->insert(s);
}

inline LemmaForms forms_of(const CanonicalLemma& l) {
    LemmaForms lf{l.ref(), l.pos, l.forms, l.roots};
    fill_head_forms(lf, l.spellings);
    return lf;
}

inline LemmaForms forms_of(const ExternalLemma& l) {
    LemmaForms lf{l.ref(), l.pos, l.forms, l.roots};
    fill_head_forms(lf, l.spellings);
    return lf;
}

}  // namespace lexlink
