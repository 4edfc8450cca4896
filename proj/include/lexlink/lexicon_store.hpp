#pragma once

#include "lexlink/error.hpp"
#include "lexlink/lemma.hpp"
#include "lexlink/lemma_codec.hpp"
#include "lexlink/tsv.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lexlink {

struct LexiconDescriptor {
    std::string id;
    std::string name;
    std::string category;  // source grouping, e.g. "Thesauri" or "Arab Academies"
    bool canonical = false;
    std::size_t lemma_count = 0;

    bool operator==(const LexiconDescriptor&) const = default;
};

struct RowError {
    std::size_t row = 0;  // 1-based line number in the input
    std::string reason;
    std::string message;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::vector<RowError> rejected;

    std::size_t total() const { return accepted + rejected.size(); }
};

struct IngestOptions {
    /// Require fully diacritized spellings. Defaults to on for the canonical
    /// lexicon and off for external ones.
    std::optional<bool> strict;
    /// Re-ingest an already registered lexicon, dropping its old lemmas.
    bool replace = false;
};

struct InsertOptions {
    bool strict = true;
    /// Curator asserts that every sense of the lemma is a proper noun;
    /// required for NOUN_PROP.
    bool all_senses_proper = false;
};

struct InsertResult {
    std::uint64_t id = 0;
    std::vector<std::string> warnings;
};

struct SearchFilters {
    std::optional<PosTag> pos;
    std::optional<std::string> lexicon;
    std::optional<bool> mapped;
};

struct LemmaSummary {
    LemmaRef ref;
    std::vector<std::string> spellings;
    PosTag pos = PosTag::UNKNOWN;
    FormSets forms;
    WordSet roots;
};

template <typename T>
struct Page {
    std::vector<T> items;
    std::size_t total = 0;
    std::size_t page = 1;  // 1-based
    std::size_t page_size = 0;
};

/// Checks the canonical-lemma guideline rules and returns every violation.
/// `counterpart_exists` resolves msa_counterpart ids.
inline std::vector<Violation> validate_canonical(const CanonicalLemma& l, const InsertOptions& opt,
                                                 const std::function<bool(std::uint64_t)>& counterpart_exists) {
    std::vector<Violation> out;
    if (l.spellings.empty()) out.push_back({"spellings", "at least one spelling is required"});
    if (opt.strict)
        for (const auto& s : l.spellings)
            if (!is_fully_diacritized(s)) out.push_back({"spellings", "'" + s.raw + "' is not fully diacritized"});
    if (l.pos == PosTag::UNKNOWN) out.push_back({"pos", "a POS tag is required"});
    if (l.pos == PosTag::NOUN_PROP && !opt.all_senses_proper)
        out.push_back({"pos", "NOUN_PROP requires that all senses are proper nouns"});
    const bool verb = category_of(l.pos) == PosCategory::Verb;
    if (verb && l.aspect == Aspect::NA) out.push_back({"aspect", "verbs need an aspect"});
    if (!verb && l.aspect != Aspect::NA) out.push_back({"aspect", "only verbs carry an aspect"});
    if (is_named_dialect(l.dialect) && !l.msa_counterpart)
        out.push_back({"msa_counterpart", "dialect lemmas must name their MSA counterpart"});
    if (l.msa_counterpart) {
        if (*l.msa_counterpart == l.id && l.id != 0)
            out.push_back({"msa_counterpart", "a lemma cannot be its own counterpart"});
        else if (!counterpart_exists(*l.msa_counterpart))
            out.push_back({"msa_counterpart", "unknown lemma " + std::to_string(*l.msa_counterpart)});
    }
    return out;
}

/// Storage for the canonical lexicon and read-only external lexicons.
///
/// Single-writer: callers serialize mutation (the workspace holds the
/// lock). Const member functions are safe to call concurrently.
class LexiconStore {
public:
    explicit LexiconStore(CompareOptions compare = {}) : compare_(compare) {
        lexicons_.emplace(std::string(kCanonicalLexicon),
                          LexiconDescriptor{std::string(kCanonicalLexicon), "Canonical lexicon", "canonical", true, 0});
    }

    const CompareOptions& compare_options() const { return compare_; }

    // -- ingestion --------------------------------------------------------

    IngestReport ingest_lexicon(LexiconDescriptor descriptor, std::istream& tsv_in, const IngestOptions& opt = {}) {
        return ingest_lines(std::move(descriptor), tsv::read_lines(tsv_in), opt);
    }

    /// Ingests pre-split lines. A first line whose first cell is `local_id`
    /// is treated as a header.
    IngestReport ingest_lines(LexiconDescriptor descriptor, std::vector<tsv::Line> lines, const IngestOptions& opt = {}) {
        if (!lines.empty() && !lines.front().cells.empty() && lines.front().cells.front() == "local_id")
            lines.erase(lines.begin());
        std::vector<std::pair<std::size_t, LemmaRow>> rows;
        IngestReport report;
        for (auto& line : lines) {
            try {
                rows.emplace_back(line.number, lemma_row_from_cells(line.cells));
            } catch (const RowParseError& e) {
                report.rejected.push_back({line.number, e.first().reason, e.what()});
            }
        }
        IngestReport rest = descriptor.canonical || descriptor.id == kCanonicalLexicon
                                ? ingest_canonical_rows(rows, opt)
                                : ingest_external_rows(std::move(descriptor), rows, opt);
        report.accepted = rest.accepted;
        report.rejected.insert(report.rejected.end(), rest.rejected.begin(), rest.rejected.end());
        std::sort(report.rejected.begin(), report.rejected.end(),
                  [](const RowError& a, const RowError& b) { return a.row < b.row; });
        return report;
    }

    // -- canonical lemmas -------------------------------------------------

    InsertResult insert_manual_lemma(CanonicalLemma lemma, const InsertOptions& opt = {}) {
        lemma.id = 0;
        auto violations = validate_canonical(lemma, opt, [&](std::uint64_t id) { return canonical_.contains(id); });
        if (!violations.empty()) throw ValidationError(std::move(violations));
        InsertResult result;
        if (const auto dup = find_duplicate(lemma))
            result.warnings.push_back("DuplicateSpellingWarning: shares a compatible first spelling with " +
                                      LemmaRef::canonical(*dup).str());
        lemma.id = next_id_++;
        result.id = lemma.id;
        canonical_.emplace(lemma.id, std::move(lemma));
        refresh_count(std::string(kCanonicalLexicon));
        return result;
    }

    /// Builds a canonical lemma from an external one. Override keys are lemma
    /// column names, plus `all_senses_proper` ("true"/"false").
    CanonicalLemma build_adoption(const LemmaRef& source, const std::map<std::string, std::string>& overrides,
                                  bool strict = true) const {
        const ExternalLemma* ext = find_external(source);
        if (!ext) throw Error(ErrorCode::UnknownLemma, source.str());
        LemmaRow row = row_of(*ext);
        row[static_cast<std::size_t>(LemmaColumn::LocalId)].clear();
        InsertOptions opt{strict, false};
        std::vector<Violation> violations;
        for (const auto& [key, value] : overrides) {
            if (key == "all_senses_proper") {
                opt.all_senses_proper = value == "true" || value == "1";
                continue;
            }
            const auto it = std::find(kLemmaColumns.begin(), kLemmaColumns.end(), key);
            if (it == kLemmaColumns.end() || key == "local_id") {
                violations.push_back({key, "not an overridable field"});
                continue;
            }
            row[static_cast<std::size_t>(it - kLemmaColumns.begin())] = value;
        }
        CanonicalLemma lemma;
        try {
            lemma = canonical_from_row(row);
        } catch (const RowParseError& e) {
            for (const auto& i : e.issues()) violations.push_back({i.field, i.message});
        }
        if (!violations.empty()) throw ValidationError(std::move(violations));

        if (lemma.spellings.empty()) {
            const auto& head = category_of(lemma.pos) == PosCategory::Verb ? lemma.forms.pv : lemma.forms.singulars;
            lemma.spellings = head.words();
        }
        if (lemma.aspect == Aspect::NA) lemma.aspect = aspect_for_verb_pos(lemma.pos);
        lemma.id = 0;
        auto v = validate_canonical(lemma, opt, [&](std::uint64_t id) { return canonical_.contains(id); });
        if (!v.empty()) throw ValidationError(std::move(v));
        return lemma;
    }

    /// Stores a lemma built by build_adoption and returns its new id.
    std::uint64_t store_adopted(CanonicalLemma lemma) {
        lemma.id = next_id_++;
        const auto id = lemma.id;
        canonical_.emplace(id, std::move(lemma));
        refresh_count(std::string(kCanonicalLexicon));
        return id;
    }

    // -- lookup -----------------------------------------------------------

    const CanonicalLemma* find_canonical(std::uint64_t id) const {
        const auto it = canonical_.find(id);
        return it == canonical_.end() ? nullptr : &it->second;
    }

    const ExternalLemma* find_external(const LemmaRef& ref) const {
        const auto lex = external_.find(ref.lexicon);
        if (lex == external_.end()) return nullptr;
        const auto it = lex->second.find(ref.local_id);
        return it == lex->second.end() ? nullptr : &it->second;
    }

    bool contains(const LemmaRef& ref) const {
        if (ref.is_canonical()) {
            const auto id = ref.canonical_id();
            return id && canonical_.contains(*id);
        }
        return find_external(ref) != nullptr;
    }

    std::optional<LemmaForms> forms(const LemmaRef& ref) const {
        if (ref.is_canonical()) {
            const auto id = ref.canonical_id();
            if (const auto* l = id ? find_canonical(*id) : nullptr) return forms_of(*l);
            return std::nullopt;
        }
        if (const auto* l = find_external(ref)) return forms_of(*l);
        return std::nullopt;
    }

    std::optional<LemmaSummary> summary(const LemmaRef& ref) const {
        if (ref.is_canonical()) {
            const auto id = ref.canonical_id();
            if (const auto* l = id ? find_canonical(*id) : nullptr) return summarize(*l);
            return std::nullopt;
        }
        if (const auto* l = find_external(ref)) return summarize(*l);
        return std::nullopt;
    }

    bool has_lexicon(std::string_view id) const { return lexicons_.contains(std::string(id)); }

    const LexiconDescriptor& descriptor(std::string_view id) const {
        const auto it = lexicons_.find(std::string(id));
        if (it == lexicons_.end()) throw Error(ErrorCode::UnknownLexicon, std::string(id));
        return it->second;
    }

    std::vector<LexiconDescriptor> lexicons() const {
        std::vector<LexiconDescriptor> out;
        for (const auto& [_, d] : lexicons_) out.push_back(d);
        return out;
    }

    const std::map<std::uint64_t, CanonicalLemma>& canonical_lemmas() const { return canonical_; }

    /// Lemmas of one lexicon as mapping views, in (local_id) order.
    std::vector<LemmaForms> lexicon_forms(std::string_view lexicon_id) const {
        std::vector<LemmaForms> out;
        if (lexicon_id == kCanonicalLexicon) {
            for (const auto& [_, l] : canonical_) out.push_back(forms_of(l));
            return out;
        }
        if (!has_lexicon(lexicon_id)) throw Error(ErrorCode::UnknownLexicon, std::string(lexicon_id));
        const auto it = external_.find(std::string(lexicon_id));
        if (it != external_.end())
            for (const auto& [_, l] : it->second) out.push_back(forms_of(l));
        return out;
    }

    /// POS tag counts of one lexicon.
    std::map<PosTag, std::size_t> pos_counts(std::string_view lexicon_id) const {
        std::map<PosTag, std::size_t> out;
        if (lexicon_id == kCanonicalLexicon) {
            for (const auto& [_, l] : canonical_) ++out[l.pos];
            return out;
        }
        if (!has_lexicon(lexicon_id)) throw Error(ErrorCode::UnknownLexicon, std::string(lexicon_id));
        const auto it = external_.find(std::string(lexicon_id));
        if (it != external_.end())
            for (const auto& [_, l] : it->second) ++out[l.pos];
        return out;
    }

    // -- search -----------------------------------------------------------

    /// Lemmas any of whose spellings or forms is diacritic-compatible with
    /// the query, ordered by (lexicon_id, local_id). An empty query matches
    /// everything.
    Page<LemmaSummary> search(std::string_view query, const SearchFilters& filters, std::size_t page = 1,
                              std::size_t page_size = 50,
                              const std::function<bool(const LemmaRef&)>& is_mapped = {}) const {
        std::optional<AnalyzedWord> q;
        if (!trim(query).empty()) {
            if (codec::has_space(trim(query))) throw Error(ErrorCode::InvalidQuery, "query must be a single word");
            try {
                q = analyze(query);
            } catch (const Error& e) {
                throw Error(ErrorCode::InvalidQuery, e.what());
            }
        }
        if (page == 0) page = 1;
        if (page_size == 0) page_size = 50;

        Page<LemmaSummary> out;
        out.page = page;
        out.page_size = page_size;
        const std::size_t first = (page - 1) * page_size;
        auto consider = [&](const LemmaRef& ref, PosTag pos, const std::vector<AnalyzedWord>& spellings,
                            const FormSets& forms, auto&& make) {
            if (filters.pos && *filters.pos != pos) return;
            if (q && !matches(*q, spellings, forms)) return;
            if (filters.mapped && (!is_mapped || is_mapped(ref) != *filters.mapped)) return;
            if (out.total >= first && out.items.size() < page_size) out.items.push_back(make());
            ++out.total;
        };
        for (const auto& [lex_id, _] : lexicons_) {
            if (filters.lexicon && *filters.lexicon != lex_id) continue;
            if (lex_id == kCanonicalLexicon) {
                for (const auto& [_, l] : canonical_)
                    consider(l.ref(), l.pos, l.spellings, l.forms, [&] { return summarize(l); });
            } else if (const auto it = external_.find(lex_id); it != external_.end()) {
                for (const auto& [_, l] : it->second)
                    consider(l.ref(), l.pos, l.spellings, l.forms, [&] { return summarize(l); });
            }
        }
        return out;
    }

    // -- export -----------------------------------------------------------

    void export_tsv(std::string_view lexicon_id, std::ostream& out) const {
        std::vector<std::string> header(kLemmaColumns.begin(), kLemmaColumns.end());
        tsv::write_row(out, header);
        for_each_row(lexicon_id, [&](const LemmaRow& row) { tsv::write_row(out, lemma_row_cells(row)); });
    }

    void export_jsonl(std::string_view lexicon_id, std::ostream& out) const {
        for_each_row(lexicon_id, [&](const LemmaRow& row) { out << row_to_json(row).dump() << '\n'; });
    }

    template <typename F>
    void for_each_row(std::string_view lexicon_id, F&& f) const {
        if (lexicon_id == kCanonicalLexicon) {
            for (const auto& [_, l] : canonical_) f(row_of(l));
            return;
        }
        if (!has_lexicon(lexicon_id)) throw Error(ErrorCode::UnknownLexicon, std::string(lexicon_id));
        const auto it = external_.find(std::string(lexicon_id));
        if (it == external_.end()) return;
        for (const auto& [_, l] : it->second) f(row_of(l));
    }

    static std::vector<std::string> lemma_row_cells(const LemmaRow& row) { return {row.begin(), row.end()}; }

private:
    static bool any_compatible(const AnalyzedWord& q, const WordSet& s, const CompareOptions& opt) {
        for (const auto& w : s)
            if (diacritic_compatible(q, w, opt)) return true;
        return false;
    }

    bool matches(const AnalyzedWord& q, const std::vector<AnalyzedWord>& spellings, const FormSets& f) const {
        for (const auto& s : spellings)
            if (diacritic_compatible(q, s, compare_)) return true;
        for (const WordSet* set : {&f.singulars, &f.duals, &f.plurals, &f.pv, &f.iv, &f.cv})
            if (any_compatible(q, *set, compare_)) return true;
        return false;
    }

    static std::vector<std::string> raws(const std::vector<AnalyzedWord>& ws) {
        std::vector<std::string> out;
        for (const auto& w : ws) out.push_back(w.raw);
        return out;
    }

    static LemmaSummary summarize(const CanonicalLemma& l) { return {l.ref(), raws(l.spellings), l.pos, l.forms, l.roots}; }
    static LemmaSummary summarize(const ExternalLemma& l) { return {l.ref(), raws(l.spellings), l.pos, l.forms, l.roots}; }

    std::optional<std::uint64_t> find_duplicate(const CanonicalLemma& lemma) const {
        if (lemma.spellings.empty()) return std::nullopt;
        for (const auto& [id, existing] : canonical_) {
            if (existing.pos != lemma.pos || existing.spellings.empty()) continue;
            if (diacritic_compatible(existing.spellings.front(), lemma.spellings.front(), compare_)) return id;
        }
        return std::nullopt;
    }

    void refresh_count(const std::string& id) {
        auto& d = lexicons_.at(id);
        if (d.canonical) {
            d.lemma_count = canonical_.size();
        } else {
            const auto it = external_.find(id);
            d.lemma_count = it == external_.end() ? 0 : it->second.size();
        }
    }

    IngestReport ingest_canonical_rows(const std::vector<std::pair<std::size_t, LemmaRow>>& rows,
                                       const IngestOptions& opt) {
        if (!canonical_.empty() && !opt.replace)
            throw Error(ErrorCode::DuplicateLexiconId, std::string(kCanonicalLexicon) + " already holds lemmas");
        IngestReport report;
        std::vector<std::pair<std::size_t, CanonicalLemma>> parsed;
        std::set<std::uint64_t> ids;
        for (const auto& [line, row] : rows) {
            try {
                auto l = canonical_from_row(row);
                if (l.id != 0 && !ids.insert(l.id).second) {
                    report.rejected.push_back({line, "DuplicateLocalId", "id " + std::to_string(l.id) + " repeats"});
                    continue;
                }
                parsed.emplace_back(line, std::move(l));
            } catch (const RowParseError& e) {
                report.rejected.push_back({line, e.first().reason, e.what()});
            }
        }
        std::uint64_t next = ids.empty() ? 1 : *ids.rbegin() + 1;
        for (auto& [_, l] : parsed)
            if (l.id == 0) {
                l.id = next++;
                ids.insert(l.id);
            }
        // The curated canonical file is itself the assertion behind NOUN_PROP.
        const InsertOptions check{opt.strict.value_or(true), true};
        std::map<std::uint64_t, CanonicalLemma> fresh;
        std::vector<std::pair<std::size_t, CanonicalLemma>> valid;
        for (auto& [line, l] : parsed) {
            auto v = validate_canonical(l, check, [&](std::uint64_t id) { return ids.contains(id); });
            if (!v.empty()) {
                report.rejected.push_back({line, "ValidationFailure", ValidationError(v).what()});
                ids.erase(l.id);
                continue;
            }
            valid.emplace_back(line, std::move(l));
        }
        // Counterparts that pointed at rejected rows are now dangling.
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto it = valid.begin(); it != valid.end();) {
                if (it->second.msa_counterpart && !ids.contains(*it->second.msa_counterpart)) {
                    report.rejected.push_back({it->first, "ValidationFailure",
                                               "msa_counterpart: unknown lemma " +
                                                   std::to_string(*it->second.msa_counterpart)});
                    ids.erase(it->second.id);
                    it = valid.erase(it);
                    changed = true;
                } else {
                    ++it;
                }
            }
        }
        for (auto& [_, l] : valid) fresh.emplace(l.id, std::move(l));
        report.accepted = fresh.size();
        canonical_ = std::move(fresh);
        next_id_ = canonical_.empty() ? 1 : canonical_.rbegin()->first + 1;
        refresh_count(std::string(kCanonicalLexicon));
        return report;
    }

    IngestReport ingest_external_rows(LexiconDescriptor descriptor,
                                      const std::vector<std::pair<std::size_t, LemmaRow>>& rows,
                                      const IngestOptions& opt) {
        if (descriptor.id.empty() || descriptor.id.find(':') != std::string::npos ||
            codec::has_space(descriptor.id))
            throw Error(ErrorCode::UnknownLexicon, "invalid lexicon id '" + descriptor.id + "'");
        if (lexicons_.contains(descriptor.id) && !opt.replace)
            throw Error(ErrorCode::DuplicateLexiconId, descriptor.id);
        const bool strict = opt.strict.value_or(false);
        IngestReport report;
        std::map<std::string, ExternalLemma, LocalIdLess> fresh;
        for (const auto& [line, row] : rows) {
            try {
                auto l = external_from_row(row, descriptor.id);
                if (strict) {
                    std::vector<Violation> v;
                    for (const auto& s : l.spellings)
                        if (!is_fully_diacritized(s)) v.push_back({"spellings", "'" + s.raw + "' is not fully diacritized"});
                    if (!v.empty()) {
                        report.rejected.push_back({line, "ValidationFailure", ValidationError(v).what()});
                        continue;
                    }
                }
                if (fresh.contains(l.local_id)) {
                    report.rejected.push_back({line, "DuplicateLocalId", "local_id " + l.local_id + " repeats"});
                    continue;
                }
                auto key = l.local_id;
                fresh.emplace(std::move(key), std::move(l));
            } catch (const RowParseError& e) {
                report.rejected.push_back({line, e.first().reason, e.what()});
            }
        }
        report.accepted = fresh.size();
        descriptor.canonical = false;
        const auto id = descriptor.id;
        lexicons_[id] = std::move(descriptor);
        external_[id] = std::move(fresh);
        refresh_count(id);
        return report;
    }

    CompareOptions compare_;
    std::map<std::string, LexiconDescriptor, std::less<>> lexicons_;
    std::map<std::string, std::map<std::string, ExternalLemma, LocalIdLess>, std::less<>> external_;
    std::map<std::uint64_t, CanonicalLemma> canonical_;
    std::uint64_t next_id_ = 1;
};

}  // namespace lexlink
