#pragma once

// Decomposition and comparison of fully or partially diacritized Arabic
// word forms.
//
// A word is split into a letter skeleton and one diacritic cluster per
// letter. Two words are diacritic-compatible when their skeletons are
// identical and no aligned pair of clusters contradicts. An unmarked
// component never contradicts anything, so a bare form like يكتب is
// compatible with every diacritized spelling of the same letters.

#include "lexlink/error.hpp"
#include "lexlink/utf8.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexlink {

enum class Vowel : std::uint8_t { Fatha, Damma, Kasra, Sukun, Fathatan, Dammatan, Kasratan };

namespace chars {
inline constexpr char32_t kFathatan = 0x064B;
inline constexpr char32_t kDammatan = 0x064C;
inline constexpr char32_t kKasratan = 0x064D;
inline constexpr char32_t kFatha = 0x064E;
inline constexpr char32_t kDamma = 0x064F;
inline constexpr char32_t kKasra = 0x0650;
inline constexpr char32_t kShadda = 0x0651;
inline constexpr char32_t kSukun = 0x0652;
inline constexpr char32_t kTatweel = 0x0640;

inline constexpr char32_t kAlef = 0x0627;
inline constexpr char32_t kAlefMadda = 0x0622;
inline constexpr char32_t kAlefHamzaAbove = 0x0623;
inline constexpr char32_t kAlefHamzaBelow = 0x0625;
inline constexpr char32_t kAlefWasla = 0x0671;
inline constexpr char32_t kAlefMaqsura = 0x0649;
inline constexpr char32_t kWaw = 0x0648;
inline constexpr char32_t kYa = 0x064A;

constexpr bool is_letter(char32_t c) {
    return (c >= 0x0621 && c <= 0x063A) || (c >= 0x0641 && c <= 0x064A) || c == 0x0671 ||
           c == 0x067E || c == 0x0686 || c == 0x06A4 || c == 0x06AF;
}

constexpr std::optional<Vowel> vowel_of(char32_t c) {
    switch (c) {
    case kFatha: return Vowel::Fatha;
    case kDamma: return Vowel::Damma;
    case kKasra: return Vowel::Kasra;
    case kSukun: return Vowel::Sukun;
    case kFathatan: return Vowel::Fathatan;
    case kDammatan: return Vowel::Dammatan;
    case kKasratan: return Vowel::Kasratan;
    default: return std::nullopt;
    }
}

constexpr char32_t mark_of(Vowel v) {
    switch (v) {
    case Vowel::Fatha: return kFatha;
    case Vowel::Damma: return kDamma;
    case Vowel::Kasra: return kKasra;
    case Vowel::Sukun: return kSukun;
    case Vowel::Fathatan: return kFathatan;
    case Vowel::Dammatan: return kDammatan;
    case Vowel::Kasratan: return kKasratan;
    }
    return kSukun;
}

constexpr bool is_harakah(char32_t c) { return c == kShadda || vowel_of(c).has_value(); }
}  // namespace chars

struct DiacriticCluster {
    bool shadda = false;
    std::optional<Vowel> vowel;

    bool empty() const { return !shadda && !vowel; }
    bool operator==(const DiacriticCluster&) const = default;
};

/// A word form split into base letters and the marks attached to each.
/// Equality ignores `raw`: two spellings that differ only by tatweel or
/// mark order analyze to equal words.
struct AnalyzedWord {
    std::u32string skeleton;
    std::vector<DiacriticCluster> clusters;
    std::string raw;

    bool operator==(const AnalyzedWord& o) const {
        return skeleton == o.skeleton && clusters == o.clusters;
    }
};

/// Canonical serialization: each letter followed by shadda, then vowel.
inline std::string serialize(const AnalyzedWord& w) {
    std::u32string out;
    out.reserve(w.skeleton.size() * 3);
    for (std::size_t i = 0; i < w.skeleton.size(); ++i) {
        out.push_back(w.skeleton[i]);
        if (w.clusters[i].shadda) out.push_back(chars::kShadda);
        if (w.clusters[i].vowel) out.push_back(chars::mark_of(*w.clusters[i].vowel));
    }
    return utf8::encode(out);
}

inline std::string_view trim(std::string_view s) {
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

inline AnalyzedWord analyze(std::string_view raw) {
    const std::string_view text = trim(raw);
    if (text.empty()) throw Error(ErrorCode::EmptyInput, "word is empty");
    const auto cps = utf8::decode(text);
    if (!cps) throw Error(ErrorCode::NonArabicCharacter, "invalid UTF-8 in '" + std::string(text) + "'");

    AnalyzedWord w;
    w.raw = std::string(text);
    for (char32_t c : *cps) {
        if (c == chars::kTatweel) continue;
        if (chars::is_letter(c)) {
            w.skeleton.push_back(c);
            w.clusters.emplace_back();
            continue;
        }
        if (!chars::is_harakah(c)) {
            std::string bad;
            utf8::append(bad, c);
            throw Error(ErrorCode::NonArabicCharacter, "'" + bad + "' in '" + w.raw + "'");
        }
        if (w.clusters.empty()) throw Error(ErrorCode::LeadingDiacritic, "mark before any letter in '" + w.raw + "'");
        auto& cl = w.clusters.back();
        if (c == chars::kShadda) {
            if (cl.shadda) throw Error(ErrorCode::ConflictingMarks, "repeated shadda in '" + w.raw + "'");
            if (cl.vowel == Vowel::Sukun) throw Error(ErrorCode::ConflictingMarks, "shadda with sukun in '" + w.raw + "'");
            cl.shadda = true;
            continue;
        }
        const Vowel v = *chars::vowel_of(c);
        if (cl.vowel) throw Error(ErrorCode::DoubleVowel, "two vowel marks on one letter in '" + w.raw + "'");
        if (v == Vowel::Sukun && cl.shadda) throw Error(ErrorCode::ConflictingMarks, "shadda with sukun in '" + w.raw + "'");
        cl.vowel = v;
    }
    if (w.skeleton.empty()) throw Error(ErrorCode::EmptyInput, "no letters in '" + w.raw + "'");
    return w;
}

/// Returns the word with every diacritic removed.
inline AnalyzedWord strip(const AnalyzedWord& w) {
    AnalyzedWord out;
    out.skeleton = w.skeleton;
    out.clusters.assign(w.skeleton.size(), DiacriticCluster{});
    out.raw = utf8::encode(w.skeleton);
    return out;
}

enum class ShaddaPolicy {
    /// A missing shadda is unspecified and never contradicts.
    AbsentIsUnspecified,
    /// Shadda mismatches contradict when both words are fully diacritized.
    StrictWhenFullyDiacritized,
};

struct CompareOptions {
    /// Fold أ إ آ ٱ onto bare alef before comparing letters.
    bool fold_hamza = false;
    ShaddaPolicy shadda = ShaddaPolicy::AbsentIsUnspecified;
};

inline char32_t fold_letter(char32_t c, const CompareOptions& opt) {
    if (opt.fold_hamza && (c == chars::kAlefHamzaAbove || c == chars::kAlefHamzaBelow ||
                           c == chars::kAlefMadda || c == chars::kAlefWasla))
        return chars::kAlef;
    return c;
}

/// Undiacritized skeleton as UTF-8. Equal keys are necessary for
/// compatibility under the same options.
inline std::string skeleton_key(const AnalyzedWord& w, const CompareOptions& opt = {}) {
    std::u32string folded;
    folded.reserve(w.skeleton.size());
    for (char32_t c : w.skeleton) folded.push_back(fold_letter(c, opt));
    return utf8::encode(folded);
}

/// True when every letter carries a vowel, the last letter included.
/// Letters that conventionally stay bare are exempt: alef, alef madda,
/// alef wasla, alef maqsura, and waw/ya acting as long vowels after
/// damma/kasra.
inline bool is_fully_diacritized(const AnalyzedWord& w) {
    for (std::size_t i = 0; i < w.skeleton.size(); ++i) {
        const auto& cl = w.clusters[i];
        if (cl.vowel) continue;
        const char32_t c = w.skeleton[i];
        if (cl.shadda) return false;
        if (c == chars::kAlef || c == chars::kAlefMadda || c == chars::kAlefWasla || c == chars::kAlefMaqsura)
            continue;
        if (i > 0) {
            const auto& prev = w.clusters[i - 1].vowel;
            if (c == chars::kWaw && prev == Vowel::Damma) continue;
            if (c == chars::kYa && prev == Vowel::Kasra) continue;
        }
        return false;
    }
    return true;
}

inline bool clusters_contradict(const DiacriticCluster& a, const DiacriticCluster& b) {
    return a.vowel && b.vowel && *a.vowel != *b.vowel;
}

inline bool diacritic_compatible(const AnalyzedWord& a, const AnalyzedWord& b, const CompareOptions& opt = {}) {
    if (a.skeleton.size() != b.skeleton.size()) return false;
    for (std::size_t i = 0; i < a.skeleton.size(); ++i)
        if (fold_letter(a.skeleton[i], opt) != fold_letter(b.skeleton[i], opt)) return false;

    const bool shadda_strict = opt.shadda == ShaddaPolicy::StrictWhenFullyDiacritized &&
                               is_fully_diacritized(a) && is_fully_diacritized(b);
    for (std::size_t i = 0; i < a.clusters.size(); ++i) {
        if (clusters_contradict(a.clusters[i], b.clusters[i])) return false;
        if (shadda_strict && a.clusters[i].shadda != b.clusters[i].shadda) return false;
    }
    return true;
}

/// Unordered collection of analyzed words, unique by raw spelling.
/// Insertion order is kept so serialization stays deterministic.
class WordSet {
public:
    WordSet() = default;
    WordSet(std::initializer_list<AnalyzedWord> words) {
        for (const auto& w : words) insert(w);
    }

    static WordSet parse(std::initializer_list<std::string_view> raws) {
        WordSet s;
        for (auto r : raws) s.insert(analyze(r));
        return s;
    }

    /// Returns false when a word with the same raw string is present.
    bool insert(AnalyzedWord w) {
        if (contains_raw(w.raw)) return false;
        words_.push_back(std::move(w));
        return true;
    }

    bool contains_raw(std::string_view raw) const {
        return std::any_of(words_.begin(), words_.end(), [&](const AnalyzedWord& w) { return w.raw == raw; });
    }

    void erase_raw(std::string_view raw) {
        std::erase_if(words_, [&](const AnalyzedWord& w) { return w.raw == raw; });
    }

    bool empty() const { return words_.empty(); }
    std::size_t size() const { return words_.size(); }
    auto begin() const { return words_.begin(); }
    auto end() const { return words_.end(); }
    const std::vector<AnalyzedWord>& words() const { return words_; }

    bool operator==(const WordSet&) const = default;

private:
    std::vector<AnalyzedWord> words_;
};

inline bool sets_compatible(const WordSet& a, const WordSet& b, const CompareOptions& opt = {}) {
    for (const auto& x : a)
        for (const auto& y : b)
            if (diacritic_compatible(x, y, opt)) return true;
    return false;
}

/// A root is written as space-separated radicals ("ي و م"). It is analyzed
/// as one word over the radicals; `raw` keeps the spaced form.
inline AnalyzedWord analyze_root(std::string_view raw) {
    const std::string_view text = trim(raw);
    std::string joined;
    for (char c : text)
        if (c != ' ') joined.push_back(c);
    AnalyzedWord w = analyze(joined);
    w.raw = std::string(text);
    return w;
}

}  // namespace lexlink
