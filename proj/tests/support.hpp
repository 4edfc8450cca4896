#pragma once

// Test-only helpers: fixture paths, random word generators and oracles that
// re-derive library results by independent, naive means.

#include "lexlink/lemma.hpp"
#include "lexlink/utf8.hpp"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace testsupport {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(LEXLINK_FIXTURES) / name; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
    static int counter = 0;
    auto p = std::filesystem::temp_directory_path() /
             ("lexlink-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

// -- random words ---------------------------------------------------------

inline const std::vector<char32_t>& letter_pool() {
    // small alphabet so that skeleton collisions are common
    static const std::vector<char32_t> pool = {U'ك', U'ت', U'ب', U'ع', U'ل', U'م',
                                               U'ي', U'و', U'ا', U'أ', U'ة'};
    return pool;
}

inline const std::vector<char32_t>& vowel_pool() {
    static const std::vector<char32_t> pool = {0x064E, 0x064F, 0x0650, 0x0652, 0x064B, 0x064C, 0x064D};
    return pool;
}

/// Random word over a small alphabet. Each letter carries a vowel with
/// probability `density` and a shadda with a smaller probability.
inline std::string random_word(std::mt19937& rng, double density, std::size_t min_len = 2, std::size_t max_len = 4) {
    std::uniform_int_distribution<std::size_t> len(min_len, max_len);
    std::uniform_int_distribution<std::size_t> letter(0, letter_pool().size() - 1);
    std::uniform_int_distribution<std::size_t> vowel(0, vowel_pool().size() - 1);
    std::bernoulli_distribution has_vowel(density), has_shadda(density / 4), tatweel(0.03);
    std::u32string out;
    const auto n = len(rng);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(letter_pool()[letter(rng)]);
        if (tatweel(rng)) out.push_back(0x0640);
        const bool shadda = has_shadda(rng);
        std::optional<char32_t> v;
        if (has_vowel(rng)) v = vowel_pool()[vowel(rng)];
        if (shadda && v == char32_t{0x0652}) v.reset();
        if (shadda) out.push_back(0x0651);
        if (v) out.push_back(*v);
    }
    return lexlink::utf8::encode(out);
}

/// Re-diacritizes a skeleton-equal variant of `raw`: keeps its letters,
/// re-rolls marks. Used to force compatible-looking pairs.
inline std::string rediacritize(std::mt19937& rng, const std::string& raw, double density) {
    const auto cps = *lexlink::utf8::decode(raw);
    std::uniform_int_distribution<std::size_t> vowel(0, vowel_pool().size() - 1);
    std::bernoulli_distribution has_vowel(density);
    std::u32string out;
    for (char32_t c : cps) {
        if ((c >= 0x064B && c <= 0x0652) || c == 0x0640) continue;
        out.push_back(c);
        if (has_vowel(rng)) out.push_back(vowel_pool()[vowel(rng)]);
    }
    return lexlink::utf8::encode(out);
}

// -- oracles ----------------------------------------------------------------

/// Skeleton by character filter over the raw code points.
inline std::string filter_skeleton(const std::string& raw) {
    const auto cps = *lexlink::utf8::decode(raw);
    std::u32string out;
    for (char32_t c : cps)
        if (!(c >= 0x064B && c <= 0x0652) && c != 0x0640 && c != U' ') out.push_back(c);
    return lexlink::utf8::encode(out);
}

/// Letters with the set of marks following each, read straight off the raw
/// string.
inline std::vector<std::pair<char32_t, std::set<char32_t>>> letters_with_marks(const std::string& raw) {
    const auto cps = *lexlink::utf8::decode(raw);
    std::vector<std::pair<char32_t, std::set<char32_t>>> out;
    for (char32_t c : cps) {
        if (c == 0x0640) continue;
        if (c >= 0x064B && c <= 0x0652)
            out.back().second.insert(c);
        else
            out.push_back({c, {}});
    }
    return out;
}

/// Compatibility straight from the definition: same letters, and no letter
/// where both words commit to different vowels. Shadda never contradicts.
inline bool oracle_compatible(const std::string& a, const std::string& b) {
    const auto x = letters_with_marks(a), y = letters_with_marks(b);
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].first != y[i].first) return false;
        std::set<char32_t> vx, vy;
        for (auto m : x[i].second)
            if (m != 0x0651) vx.insert(m);
        for (auto m : y[i].second)
            if (m != 0x0651) vy.insert(m);
        if (!vx.empty() && !vy.empty() && vx != vy) return false;
    }
    return true;
}

inline bool oracle_sets(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    for (const auto& x : a)
        for (const auto& y : b)
            if (oracle_compatible(x, y)) return true;
    return false;
}

/// A lemma as plain strings, for the brute-force mapping oracle.
struct PlainLemma {
    std::string local_id;
    bool verb = false;
    std::vector<std::string> spellings, singulars, duals, plurals, pv, iv, cv, roots;
};

/// Root strings compare with spaces removed.
inline std::vector<std::string> unspaced(const std::vector<std::string>& roots) {
    std::vector<std::string> out;
    for (auto r : roots) {
        std::erase(r, ' ');
        out.push_back(r);
    }
    return out;
}

inline bool oracle_optional(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return a.empty() || b.empty() || oracle_sets(a, b);
}

/// h1 / h2 over every pair, no blocking. Returns (source id, target id,
/// "h1"|"h2") for each match.
inline std::set<std::tuple<std::string, std::string, std::string>> brute_force_matches(
    const std::vector<PlainLemma>& src, const std::vector<PlainLemma>& tgt) {
    auto head = [](const PlainLemma& l, bool verb) {
        const auto& f = verb ? l.pv : l.singulars;
        return f.empty() ? l.spellings : f;
    };
    std::set<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& s : src)
        for (const auto& t : tgt) {
            if (s.verb && t.verb && oracle_sets(head(s, true), head(t, true)) &&
                oracle_optional(unspaced(s.roots), unspaced(t.roots)) && oracle_optional(s.iv, t.iv) &&
                oracle_optional(s.cv, t.cv)) {
                out.insert({s.local_id, t.local_id, "h1"});
                continue;
            }
            if (!s.verb && !t.verb && oracle_sets(head(s, false), head(t, false)) &&
                oracle_optional(unspaced(s.roots), unspaced(t.roots)) && oracle_optional(s.duals, t.duals) &&
                oracle_optional(s.plurals, t.plurals))
                out.insert({s.local_id, t.local_id, "h2"});
        }
    return out;
}

inline std::string join_list(const std::vector<std::string>& v, char sep) {
    if (v.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? std::string(1, sep) : "") + v[i];
    return out;
}

/// One external-lexicon TSV row for a PlainLemma.
inline std::string tsv_row(const PlainLemma& l) {
    std::vector<std::string> cells = {l.local_id,
                                      join_list(l.spellings, '|'),
                                      l.verb ? "PV" : "NOUN",
                                      "-", "-", "-", "-",
                                      join_list(l.roots, ';'),
                                      "-", "-",
                                      join_list(l.singulars, ';'),
                                      join_list(l.duals, ';'),
                                      join_list(l.plurals, ';'),
                                      join_list(l.pv, ';'),
                                      join_list(l.iv, ';'),
                                      join_list(l.cv, ';'),
                                      "-", "-"};
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "\t" : "") + cells[i];
    return out + "\n";
}

inline std::vector<std::string> distinct_words(std::mt19937& rng, std::size_t n, double density,
                                               const std::vector<std::string>& seeds) {
    std::vector<std::string> out;
    std::bernoulli_distribution reuse(0.5);
    for (std::size_t i = 0; i < n; ++i) {
        std::string w;
        if (!seeds.empty() && reuse(rng))
            w = rediacritize(rng, seeds[std::uniform_int_distribution<std::size_t>(0, seeds.size() - 1)(rng)], density);
        else
            w = random_word(rng, density, 2, 3);
        if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    }
    return out;
}

/// Random lexicon of `n` lemmas, roughly half verbs. Words are drawn partly
/// from `seeds` so that cross-lexicon matches actually occur.
inline std::vector<PlainLemma> random_lexicon(std::mt19937& rng, std::size_t n, double density,
                                              const std::vector<std::string>& seeds, const std::string& prefix) {
    std::vector<PlainLemma> out;
    std::bernoulli_distribution verb(0.5), present(0.5), has_root(0.6);
    std::uniform_int_distribution<std::size_t> count(1, 2);
    for (std::size_t i = 0; i < n; ++i) {
        PlainLemma l;
        l.local_id = prefix + std::to_string(i + 1);
        l.verb = verb(rng);
        if (l.verb) {
            l.pv = distinct_words(rng, count(rng), density, seeds);
            if (present(rng)) l.iv = distinct_words(rng, count(rng), density, seeds);
            if (present(rng)) l.cv = distinct_words(rng, 1, density, seeds);
            l.spellings = {l.pv.front()};
        } else {
            l.singulars = distinct_words(rng, count(rng), density, seeds);
            if (present(rng)) l.duals = distinct_words(rng, 1, density, seeds);
            if (present(rng)) l.plurals = distinct_words(rng, count(rng), density, seeds);
            l.spellings = {l.singulars.front()};
        }
        if (has_root(rng)) {
            const auto skel = *lexlink::utf8::decode(filter_skeleton(l.spellings.front()));
            std::string root;
            for (std::size_t k = 0; k < skel.size() && k < 3; ++k) {
                if (k) root += ' ';
                root += lexlink::utf8::encode(std::u32string(1, skel[k]));
            }
            l.roots = {root};
        }
        out.push_back(std::move(l));
    }
    return out;
}

inline std::string lexicon_tsv(const std::vector<PlainLemma>& lemmas) {
    std::string out;
    for (const auto& l : lemmas) out += tsv_row(l);
    return out;
}

}  // namespace testsupport
