#pragma once

// Row-level encoding of lemmas for the lexicon TSV and its JSON-lines
// mirror. Both formats share the same 18 fields; list-valued fields use
// "|" (spellings) or ";" (form sets, roots) inside a TSV cell and JSON
// arrays in JSON-lines.

#include "lexlink/error.hpp"
#include "lexlink/lemma.hpp"
#include "lexlink/tsv.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace lexlink {

enum class LemmaColumn : std::size_t {
    LocalId, Spellings, Pos, Gender, Number, Aspect, Person, Roots, Augmentation, Transitivity,
    Singulars, Duals, Plurals, Pv, Iv, Cv, Dialect, MsaCounterpart,
};

inline constexpr std::size_t kLemmaColumnCount = 18;

inline constexpr std::array<std::string_view, kLemmaColumnCount> kLemmaColumns = {
    "local_id", "spellings", "pos", "gender", "number", "aspect", "person", "roots", "augmentation",
    "transitivity", "singulars", "duals", "plurals", "pv", "iv", "cv", "dialect", "msa_counterpart",
};

using LemmaRow = std::array<std::string, kLemmaColumnCount>;

constexpr bool is_list_column(std::size_t c) {
    const auto col = static_cast<LemmaColumn>(c);
    return col == LemmaColumn::Spellings || col == LemmaColumn::Roots ||
           (c >= static_cast<std::size_t>(LemmaColumn::Singulars) && c <= static_cast<std::size_t>(LemmaColumn::Cv));
}

constexpr char list_separator(std::size_t c) { return static_cast<LemmaColumn>(c) == LemmaColumn::Spellings ? '|' : ';'; }

/// A problem with one field of an input row. `reason` is a stable code
/// such as MultiWordLemma or NonArabicCharacter.
struct RowIssue {
    std::string reason;
    std::string field;
    std::string message;
};

class RowParseError : public Error {
public:
    RowParseError(std::string reason, std::string field, const std::string& message)
        : RowParseError(std::vector<RowIssue>{{std::move(reason), std::move(field), message}}) {}

    explicit RowParseError(std::vector<RowIssue> issues)
        : Error(ErrorCode::MalformedRow, describe(issues)), issues_(std::move(issues)) {}

    const std::vector<RowIssue>& issues() const { return issues_; }
    const RowIssue& first() const { return issues_.front(); }

private:
    static std::string describe(const std::vector<RowIssue>& issues) {
        std::string out;
        for (const auto& i : issues) {
            if (!out.empty()) out += "; ";
            out += i.reason + " (" + i.field + "): " + i.message;
        }
        return out;
    }

    std::vector<RowIssue> issues_;
};

namespace codec {

inline std::string_view cell(const LemmaRow& row, LemmaColumn c) { return row[static_cast<std::size_t>(c)]; }
inline std::string column_name(LemmaColumn c) { return std::string(kLemmaColumns[static_cast<std::size_t>(c)]); }

inline bool is_blank(std::string_view s) {
    s = trim(s);
    return s.empty() || s == "-";
}

inline std::vector<std::string> list_items(std::string_view text, char sep) {
    std::vector<std::string> out;
    if (is_blank(text)) return out;
    for (auto& part : tsv::split(text, sep)) {
        const auto t = trim(part);
        if (t.empty() || t == "-") continue;
        out.emplace_back(t);
    }
    return out;
}

inline bool has_space(std::string_view s) { return s.find_first_of(" \t\n\r\v\f") != std::string_view::npos; }

/// Runs per-field parsers and gathers every failure instead of stopping at
/// the first one.
class IssueCollector {
public:
    template <typename F>
    void field(LemmaColumn c, F&& parse) {
        try {
            parse();
        } catch (const RowParseError& e) {
            for (auto issue : e.issues()) {
                if (issue.field.empty()) issue.field = column_name(c);
                issues_.push_back(std::move(issue));
            }
        } catch (const Error& e) {
            issues_.push_back({std::string(to_string(e.code())), column_name(c), e.what()});
        }
    }

    void add(std::string reason, LemmaColumn c, std::string message) {
        issues_.push_back({std::move(reason), column_name(c), std::move(message)});
    }

    void throw_if_any() {
        if (!issues_.empty()) throw RowParseError(std::move(issues_));
    }

private:
    std::vector<RowIssue> issues_;
};

inline AnalyzedWord parse_word(std::string_view token) {
    if (has_space(token)) throw RowParseError("MultiWordLemma", "", "'" + std::string(token) + "' has several words");
    return analyze(token);
}

inline std::vector<AnalyzedWord> parse_spellings(std::string_view text) {
    std::vector<AnalyzedWord> out;
    for (const auto& t : list_items(text, '|')) {
        auto w = parse_word(t);
        bool dup = false;
        for (const auto& existing : out) dup = dup || existing.raw == w.raw;
        if (!dup) out.push_back(std::move(w));
    }
    return out;
}

inline WordSet parse_word_set(std::string_view text) {
    WordSet out;
    for (const auto& t : list_items(text, ';')) out.insert(parse_word(t));
    return out;
}

inline WordSet parse_roots(std::string_view text) {
    WordSet out;
    for (const auto& t : list_items(text, ';')) out.insert(analyze_root(t));
    return out;
}

template <typename E>
E parse_feature(std::string_view text) {
    text = trim(text);
    const auto v = parse_enum<E>(text == "-" ? std::string_view{} : text);
    if (!v) throw RowParseError("MalformedRow", "", "unknown value '" + std::string(text) + "'");
    return *v;
}

inline std::optional<std::uint64_t> parse_id(std::string_view text) {
    text = trim(text);
    if (text.starts_with(kCanonicalLexicon) && text.size() > kCanonicalLexicon.size() &&
        text[kCanonicalLexicon.size()] == ':')
        text.remove_prefix(kCanonicalLexicon.size() + 1);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size() || v == 0) return std::nullopt;
    return v;
}

inline void parse_forms(IssueCollector& issues, const LemmaRow& row, FormSets& f) {
    const std::pair<LemmaColumn, WordSet*> sets[] = {
        {LemmaColumn::Singulars, &f.singulars}, {LemmaColumn::Duals, &f.duals}, {LemmaColumn::Plurals, &f.plurals},
        {LemmaColumn::Pv, &f.pv},               {LemmaColumn::Iv, &f.iv},       {LemmaColumn::Cv, &f.cv},
    };
    for (const auto& [col, target] : sets) issues.field(col, [&] { *target = parse_word_set(cell(row, col)); });
}

inline PosTag parse_pos_cell(std::string_view text) {
    text = trim(text);
    if (text.empty() || text == "-") return PosTag::UNKNOWN;
    const auto p = parse_pos(text);
    if (!p) throw RowParseError("MalformedRow", "", "unknown pos '" + std::string(text) + "'");
    return *p;
}

inline std::string join_words(const std::vector<AnalyzedWord>& words, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += sep;
        out += words[i].raw;
    }
    return out;
}

inline std::string join_set(const WordSet& s) { return join_words(s.words(), ";"); }

inline void write_forms(LemmaRow& row, const FormSets& f) {
    row[static_cast<std::size_t>(LemmaColumn::Singulars)] = join_set(f.singulars);
    row[static_cast<std::size_t>(LemmaColumn::Duals)] = join_set(f.duals);
    row[static_cast<std::size_t>(LemmaColumn::Plurals)] = join_set(f.plurals);
    row[static_cast<std::size_t>(LemmaColumn::Pv)] = join_set(f.pv);
    row[static_cast<std::size_t>(LemmaColumn::Iv)] = join_set(f.iv);
    row[static_cast<std::size_t>(LemmaColumn::Cv)] = join_set(f.cv);
}

inline constexpr std::array<LemmaColumn, 8> kExternalFeatureColumns = {
    LemmaColumn::Gender, LemmaColumn::Number, LemmaColumn::Aspect, LemmaColumn::Person,
    LemmaColumn::Augmentation, LemmaColumn::Transitivity, LemmaColumn::Dialect, LemmaColumn::MsaCounterpart,
};

}  // namespace codec

/// Fills a row from TSV cells. Missing trailing cells count as empty;
/// extra cells are an error.
inline LemmaRow lemma_row_from_cells(const std::vector<std::string>& cells) {
    if (cells.size() > kLemmaColumnCount)
        throw RowParseError("MalformedRow", "row", "expected " + std::to_string(kLemmaColumnCount) +
                                                       " columns, got " + std::to_string(cells.size()));
    LemmaRow row;
    for (std::size_t i = 0; i < cells.size(); ++i) row[i] = cells[i];
    return row;
}

/// Parses a canonical lemma row. `id` is taken from local_id when present
/// (0 means "assign on insert"). Guideline invariants are checked by the
/// store, not here.
inline CanonicalLemma canonical_from_row(const LemmaRow& row) {
    using codec::cell;
    CanonicalLemma l;
    codec::IssueCollector issues;
    issues.field(LemmaColumn::LocalId, [&] {
        const auto local = trim(cell(row, LemmaColumn::LocalId));
        if (local.empty()) return;
        const auto id = codec::parse_id(local);
        if (!id) throw RowParseError("MalformedRow", "", "canonical local_id must be a positive integer");
        l.id = *id;
    });
    issues.field(LemmaColumn::Spellings, [&] { l.spellings = codec::parse_spellings(cell(row, LemmaColumn::Spellings)); });
    issues.field(LemmaColumn::Pos, [&] { l.pos = codec::parse_pos_cell(cell(row, LemmaColumn::Pos)); });
    issues.field(LemmaColumn::Gender, [&] { l.gender = codec::parse_feature<Gender>(cell(row, LemmaColumn::Gender)); });
    issues.field(LemmaColumn::Number, [&] { l.number = codec::parse_feature<Number>(cell(row, LemmaColumn::Number)); });
    issues.field(LemmaColumn::Aspect, [&] { l.aspect = codec::parse_feature<Aspect>(cell(row, LemmaColumn::Aspect)); });
    issues.field(LemmaColumn::Person, [&] { l.person = codec::parse_feature<Person>(cell(row, LemmaColumn::Person)); });
    issues.field(LemmaColumn::Roots, [&] { l.roots = codec::parse_roots(cell(row, LemmaColumn::Roots)); });
    issues.field(LemmaColumn::Augmentation,
                 [&] { l.augmentation = codec::parse_feature<Augmentation>(cell(row, LemmaColumn::Augmentation)); });
    issues.field(LemmaColumn::Transitivity,
                 [&] { l.transitivity = codec::parse_feature<Transitivity>(cell(row, LemmaColumn::Transitivity)); });
    codec::parse_forms(issues, row, l.forms);
    const auto dialect = trim(cell(row, LemmaColumn::Dialect));
    if (!codec::is_blank(dialect)) l.dialect = std::string(dialect);
    issues.field(LemmaColumn::MsaCounterpart, [&] {
        const auto msa = trim(cell(row, LemmaColumn::MsaCounterpart));
        if (codec::is_blank(msa)) return;
        const auto id = codec::parse_id(msa);
        if (!id) throw RowParseError("MalformedRow", "", "must be a canonical lemma id");
        l.msa_counterpart = *id;
    });
    issues.throw_if_any();
    return l;
}

inline ExternalLemma external_from_row(const LemmaRow& row, std::string_view lexicon_id) {
    using codec::cell;
    ExternalLemma l;
    l.lexicon_id = std::string(lexicon_id);
    codec::IssueCollector issues;
    l.local_id = std::string(trim(cell(row, LemmaColumn::LocalId)));
    if (l.local_id.empty()) issues.add("MalformedRow", LemmaColumn::LocalId, "local_id is empty");
    if (codec::has_space(l.local_id) || l.local_id.find(':') != std::string::npos)
        issues.add("MalformedRow", LemmaColumn::LocalId, "local_id may not contain ':' or whitespace");
    issues.field(LemmaColumn::Spellings, [&] { l.spellings = codec::parse_spellings(cell(row, LemmaColumn::Spellings)); });
    issues.field(LemmaColumn::Pos, [&] { l.pos = codec::parse_pos_cell(cell(row, LemmaColumn::Pos)); });
    issues.field(LemmaColumn::Roots, [&] { l.roots = codec::parse_roots(cell(row, LemmaColumn::Roots)); });
    codec::parse_forms(issues, row, l.forms);
    for (auto col : codec::kExternalFeatureColumns) {
        const auto text = trim(cell(row, col));
        if (!codec::is_blank(text)) l.free_features[codec::column_name(col)] = std::string(text);
    }
    issues.throw_if_any();
    if (l.forms.empty() && l.roots.empty())
        throw RowParseError("EmptyLemma", "row", "no form set or root is given");
    return l;
}

inline LemmaRow row_of(const CanonicalLemma& l) {
    LemmaRow row;
    auto set = [&](LemmaColumn c, std::string v) { row[static_cast<std::size_t>(c)] = std::move(v); };
    set(LemmaColumn::LocalId, std::to_string(l.id));
    set(LemmaColumn::Spellings, codec::join_words(l.spellings, "|"));
    set(LemmaColumn::Pos, std::string(to_string(l.pos)));
    set(LemmaColumn::Gender, std::string(enum_name(l.gender)));
    set(LemmaColumn::Number, std::string(enum_name(l.number)));
    set(LemmaColumn::Aspect, std::string(enum_name(l.aspect)));
    set(LemmaColumn::Person, std::string(enum_name(l.person)));
    set(LemmaColumn::Roots, codec::join_set(l.roots));
    set(LemmaColumn::Augmentation, std::string(enum_name(l.augmentation)));
    set(LemmaColumn::Transitivity, std::string(enum_name(l.transitivity)));
    codec::write_forms(row, l.forms);
    set(LemmaColumn::Dialect, l.dialect.value_or(""));
    set(LemmaColumn::MsaCounterpart, l.msa_counterpart ? std::to_string(*l.msa_counterpart) : "");
    return row;
}

inline LemmaRow row_of(const ExternalLemma& l) {
    LemmaRow row;
    row[static_cast<std::size_t>(LemmaColumn::LocalId)] = l.local_id;
    row[static_cast<std::size_t>(LemmaColumn::Spellings)] = codec::join_words(l.spellings, "|");
    row[static_cast<std::size_t>(LemmaColumn::Pos)] = l.pos == PosTag::UNKNOWN ? "" : std::string(to_string(l.pos));
    row[static_cast<std::size_t>(LemmaColumn::Roots)] = codec::join_set(l.roots);
    codec::write_forms(row, l.forms);
    for (auto col : codec::kExternalFeatureColumns) {
        const auto it = l.free_features.find(std::string(kLemmaColumns[static_cast<std::size_t>(col)]));
        if (it != l.free_features.end()) row[static_cast<std::size_t>(col)] = it->second;
    }
    return row;
}

inline nlohmann::ordered_json row_to_json(const LemmaRow& row) {
    nlohmann::ordered_json j;
    for (std::size_t c = 0; c < kLemmaColumnCount; ++c) {
        const auto name = std::string(kLemmaColumns[c]);
        if (is_list_column(c)) {
            j[name] = codec::list_items(row[c], list_separator(c));
        } else {
            j[name] = row[c];
        }
    }
    return j;
}

/// Inverse of row_to_json. Absent or null keys are empty cells; keys that
/// are not lemma columns are ignored.
inline LemmaRow row_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw RowParseError("MalformedRow", "lemma", "must be a JSON object");
    LemmaRow row;
    for (const auto& [key, value] : j.items()) {
        std::size_t c = kLemmaColumnCount;
        for (std::size_t i = 0; i < kLemmaColumnCount; ++i)
            if (kLemmaColumns[i] == key) c = i;
        if (c == kLemmaColumnCount) continue;
        if (value.is_null()) continue;
        if (is_list_column(c)) {
            if (!value.is_array()) throw RowParseError("MalformedRow", key, "must be an array");
            std::vector<std::string> items;
            for (const auto& v : value) {
                if (!v.is_string()) throw RowParseError("MalformedRow", key, "items must be strings");
                const auto s = v.get<std::string>();
                if (s.find(list_separator(c)) != std::string::npos)
                    throw RowParseError("MalformedRow", key, "item contains a separator");
                items.push_back(s);
            }
            row[c] = tsv::join(items, std::string(1, list_separator(c)));
        } else if (value.is_string()) {
            row[c] = value.get<std::string>();
        } else if (value.is_number_unsigned() || value.is_number_integer()) {
            row[c] = value.dump();
        } else {
            throw RowParseError("MalformedRow", key, "must be a string");
        }
    }
    return row;
}

}  // namespace lexlink
