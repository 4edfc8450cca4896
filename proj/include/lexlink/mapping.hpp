#pragma once

// Mapping correspondences <l1, l2, R, P> between lemmas: the verb and noun
// heuristics, blocked candidate generation, and the review workflow that
// turns AUTO candidates into CONFIRMED or REJECTED links.

#include "lexlink/error.hpp"
#include "lexlink/lemma.hpp"
#include "lexlink/lexicon_store.hpp"
#include "lexlink/relation.hpp"
#include "lexlink/tsv.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <charconv>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lexlink {

enum class Status : std::uint8_t { Auto, Confirmed, Rejected };
enum class Provenance : std::uint8_t { HeuristicH1, HeuristicH2, Adoption, Manual };

constexpr std::string_view to_string(Status s) {
    switch (s) {
    case Status::Auto: return "AUTO";
    case Status::Confirmed: return "CONFIRMED";
    case Status::Rejected: return "REJECTED";
    }
    return "";
}

constexpr std::string_view to_string(Provenance p) {
    switch (p) {
    case Provenance::HeuristicH1: return "HEURISTIC_H1";
    case Provenance::HeuristicH2: return "HEURISTIC_H2";
    case Provenance::Adoption: return "ADOPTION";
    case Provenance::Manual: return "MANUAL";
    }
    return "";
}

constexpr std::optional<Status> parse_status(std::string_view s) {
    for (auto v : {Status::Auto, Status::Confirmed, Status::Rejected})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

constexpr std::optional<Provenance> parse_provenance(std::string_view s) {
    for (auto v : {Provenance::HeuristicH1, Provenance::HeuristicH2, Provenance::Adoption, Provenance::Manual})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

struct Correspondence {
    std::uint64_t id = 0;
    LemmaRef l1;
    LemmaRef l2;
    Relation relation = Relation::R1;
    Status status = Status::Auto;
    Provenance provenance = Provenance::HeuristicH1;
    std::string reviewer;  // empty when unreviewed
    std::uint64_t timestamp = 0;  // logical clock of the owning store

    bool same_content(const Correspondence& o) const {
        return l1 == o.l1 && l2 == o.l2 && relation == o.relation && status == o.status &&
               provenance == o.provenance && reviewer == o.reviewer && timestamp == o.timestamp;
    }
    bool operator==(const Correspondence&) const = default;
};

// -- heuristics ------------------------------------------------------------

namespace detail {
/// Optional features: only checked when both sides have something.
inline bool compatible_if_both(const WordSet& a, const WordSet& b, const CompareOptions& opt) {
    return a.empty() || b.empty() || sets_compatible(a, b, opt);
}
}  // namespace detail

/// Verb heuristic: PV sets both present and compatible; roots, IV and CV
/// compatible wherever both sides provide them.
inline bool h1_verb_match(const LemmaForms& a, const LemmaForms& b, const CompareOptions& opt = {}) {
    if (!a.verbal() && !b.verbal()) throw Error(ErrorCode::NotAVerbPair, a.ref.str() + " / " + b.ref.str());
    if (a.forms.pv.empty() || b.forms.pv.empty()) return false;
    if (!sets_compatible(a.forms.pv, b.forms.pv, opt)) return false;
    return detail::compatible_if_both(a.roots, b.roots, opt) &&
           detail::compatible_if_both(a.forms.iv, b.forms.iv, opt) &&
           detail::compatible_if_both(a.forms.cv, b.forms.cv, opt);
}

/// Noun heuristic: singular sets both present and compatible; roots, duals
/// and plurals compatible wherever both sides provide them.
inline bool h2_noun_match(const LemmaForms& a, const LemmaForms& b, const CompareOptions& opt = {}) {
    if (!a.nominal() && !b.nominal()) throw Error(ErrorCode::NotANounPair, a.ref.str() + " / " + b.ref.str());
    if (a.forms.singulars.empty() || b.forms.singulars.empty()) return false;
    if (!sets_compatible(a.forms.singulars, b.forms.singulars, opt)) return false;
    return detail::compatible_if_both(a.roots, b.roots, opt) &&
           detail::compatible_if_both(a.forms.duals, b.forms.duals, opt) &&
           detail::compatible_if_both(a.forms.plurals, b.forms.plurals, opt);
}

/// Which heuristic, if any, links the pair. Only same-category pairs are
/// compared; h1 wins when both fire.
inline std::optional<Provenance> match_pair(const LemmaForms& a, const LemmaForms& b, const CompareOptions& opt = {}) {
    if (a.verbal() && b.verbal() && h1_verb_match(a, b, opt)) return Provenance::HeuristicH1;
    if (a.nominal() && b.nominal() && h2_noun_match(a, b, opt)) return Provenance::HeuristicH2;
    return std::nullopt;
}

// -- store -----------------------------------------------------------------

struct Decision {
    std::optional<Relation> relation;  // nullopt means reject

    static Decision confirm(Relation r) { return {r}; }
    static Decision reject() { return {std::nullopt}; }
};

struct AuditEntry {
    Correspondence before;
    Correspondence after;
};

struct ImportReport {
    std::size_t rows = 0;
    std::size_t changed = 0;
};

class ImportError : public Error {
public:
    explicit ImportError(std::vector<RowError> rows)
        : Error(ErrorCode::MalformedRow, describe(rows)), rows_(std::move(rows)) {}
    const std::vector<RowError>& rows() const { return rows_; }

private:
    static std::string describe(const std::vector<RowError>& rows) {
        return std::to_string(rows.size()) + " bad row(s), first at line " +
               (rows.empty() ? std::string("?") : std::to_string(rows.front().row) + ": " + rows.front().message);
    }
    std::vector<RowError> rows_;
};

inline constexpr std::array<std::string_view, 8> kMappingColumns = {
    "l1_ref", "l2_ref", "relation_code", "precision", "status", "provenance", "reviewer", "timestamp",
};

/// Correspondences with the at-most-one-active-link-per-pair invariant.
///
/// Ids are assigned densely from 1 in insertion order. Timestamps come from
/// a logical clock so that identical command sequences give identical
/// exports.
class MappingStore {
public:
    explicit MappingStore(PrecisionTable precision = {}) : precision_(precision) {}

    const PrecisionTable& precision_table() const { return precision_; }
    int precision(Relation r) const { return precision_(r); }
    int precision(const Correspondence& c) const { return precision_(c.relation); }

    const std::vector<Correspondence>& all() const { return items_; }
    const std::vector<AuditEntry>& audit() const { return audit_; }
    std::uint64_t clock() const { return clock_; }
    std::size_t size() const { return items_.size(); }

    const Correspondence* find(std::uint64_t id) const {
        if (id == 0 || id > items_.size()) return nullptr;
        return &items_[id - 1];
    }

    const Correspondence& get(std::uint64_t id) const {
        const auto* c = find(id);
        if (!c) throw Error(ErrorCode::UnknownCorrespondence, std::to_string(id));
        return *c;
    }

    /// Id of the non-REJECTED correspondence for the unordered pair.
    std::optional<std::uint64_t> active_for_pair(const LemmaRef& a, const LemmaRef& b) const {
        const auto it = by_pair_.find(pair_key(a, b));
        if (it == by_pair_.end()) return std::nullopt;
        for (auto id : it->second)
            if (items_[id - 1].status != Status::Rejected) return id;
        return std::nullopt;
    }

    /// True when the pair has any correspondence, rejected ones included.
    bool has_any(const LemmaRef& a, const LemmaRef& b) const { return by_pair_.contains(pair_key(a, b)); }

    std::vector<std::uint64_t> ids_for_pair(const LemmaRef& a, const LemmaRef& b) const {
        const auto it = by_pair_.find(pair_key(a, b));
        return it == by_pair_.end() ? std::vector<std::uint64_t>{} : it->second;
    }

    /// CONFIRMED correspondences touching a lemma.
    std::vector<std::uint64_t> confirmed_for(const LemmaRef& ref) const {
        std::vector<std::uint64_t> out;
        const auto it = by_lemma_.find(ref.str());
        if (it == by_lemma_.end()) return out;
        for (auto id : it->second)
            if (items_[id - 1].status == Status::Confirmed) out.push_back(id);
        return out;
    }

    bool is_mapped(const LemmaRef& ref) const { return !confirmed_for(ref).empty(); }

    /// Records an automatic candidate, rendered as R1 with status AUTO.
    std::uint64_t add_auto(const LemmaRef& l1, const LemmaRef& l2, Provenance provenance) {
        if (provenance == Provenance::Manual) throw Error(ErrorCode::ValidationFailure, "AUTO links need an automatic provenance");
        check_new_active(l1, l2);
        Correspondence c;
        c.l1 = l1;
        c.l2 = l2;
        c.relation = Relation::R1;
        c.status = Status::Auto;
        c.provenance = provenance;
        c.timestamp = ++clock_;
        return append(std::move(c));
    }

    /// Confirms or rejects a correspondence. Decided items need `force`;
    /// every change is kept in the audit trail.
    const Correspondence& review(std::uint64_t id, const Decision& decision, const std::string& reviewer,
                                 bool force = false) {
        if (id == 0 || id > items_.size()) throw Error(ErrorCode::UnknownCorrespondence, std::to_string(id));
        if (reviewer.empty()) throw Error(ErrorCode::ValidationFailure, "reviewer is required");
        Correspondence& c = items_[id - 1];
        if (c.status != Status::Auto && !force)
            throw Error(ErrorCode::AlreadyDecided, std::to_string(id) + " is " + std::string(to_string(c.status)));
        if (decision.relation && c.status == Status::Rejected) {
            if (const auto other = active_for_pair(c.l1, c.l2))
                throw Error(ErrorCode::DuplicatePair, "pair already linked by " + std::to_string(*other));
        }
        const Correspondence before = c;
        if (decision.relation) {
            c.relation = *decision.relation;
            c.status = Status::Confirmed;
        } else {
            c.status = Status::Rejected;
        }
        c.reviewer = reviewer;
        c.timestamp = ++clock_;
        audit_.push_back({before, c});
        return c;
    }

    /// Adds a CONFIRMED manual link. `lemma_exists`, when given, must accept
    /// both refs.
    const Correspondence& manual_map(const LemmaRef& l1, const LemmaRef& l2, Relation relation,
                                     const std::string& reviewer,
                                     const std::function<bool(const LemmaRef&)>& lemma_exists = {}) {
        if (reviewer.empty()) throw Error(ErrorCode::ValidationFailure, "reviewer is required");
        if (lemma_exists) {
            if (!lemma_exists(l1)) throw Error(ErrorCode::UnknownLemma, l1.str());
            if (!lemma_exists(l2)) throw Error(ErrorCode::UnknownLemma, l2.str());
        }
        check_new_active(l1, l2);
        Correspondence c;
        c.l1 = l1;
        c.l2 = l2;
        c.relation = relation;
        c.status = Status::Confirmed;
        c.provenance = Provenance::Manual;
        c.reviewer = reviewer;
        c.timestamp = ++clock_;
        return items_[append(std::move(c)) - 1];
    }

    /// Appends a fully specified correspondence (loading, fixtures). The id
    /// field is ignored and reassigned.
    std::uint64_t insert(Correspondence c) {
        if (auto problem = check_row(c)) throw Error(ErrorCode::ValidationFailure, *problem);
        if (c.status != Status::Rejected) check_new_active(c.l1, c.l2);
        clock_ = std::max(clock_, c.timestamp);
        return append(std::move(c));
    }

    /// Replays a persisted state: appends when `c.id` is the next id,
    /// otherwise overwrites the existing entry and records the change.
    void restore(Correspondence c) {
        clock_ = std::max(clock_, c.timestamp);
        if (c.id == items_.size() + 1) {
            append(std::move(c));
            return;
        }
        if (c.id == 0 || c.id > items_.size()) throw Error(ErrorCode::UnknownCorrespondence, std::to_string(c.id));
        Correspondence& slot = items_[c.id - 1];
        audit_.push_back({slot, c});
        slot = std::move(c);
    }

    /// Counts CONFIRMED correspondences per relation, optionally restricted to
    /// links between two lexicons (in either direction). Every relation is
    /// present in the result.
    std::map<Relation, std::size_t> relation_counts(
        const std::optional<std::pair<std::string, std::string>>& scope = std::nullopt) const {
        std::map<Relation, std::size_t> out;
        for (auto r : kAllRelations) out[r] = 0;
        for (const auto& c : items_) {
            if (c.status != Status::Confirmed) continue;
            if (scope && !((c.l1.lexicon == scope->first && c.l2.lexicon == scope->second) ||
                           (c.l1.lexicon == scope->second && c.l2.lexicon == scope->first)))
                continue;
            ++out[c.relation];
        }
        return out;
    }

    // -- TSV / JSON-lines ---------------------------------------------------

    std::vector<std::string> row_of(const Correspondence& c) const {
        return {c.l1.str(),
                c.l2.str(),
                std::string(code_of(c.relation)),
                std::to_string(precision(c)),
                std::string(to_string(c.status)),
                std::string(to_string(c.provenance)),
                c.reviewer,
                std::to_string(c.timestamp)};
    }

    nlohmann::ordered_json json_of(const Correspondence& c) const {
        nlohmann::ordered_json j;
        j["l1_ref"] = c.l1.str();
        j["l2_ref"] = c.l2.str();
        j["relation_code"] = code_of(c.relation);
        j["precision"] = precision(c);
        j["status"] = to_string(c.status);
        j["provenance"] = to_string(c.provenance);
        j["reviewer"] = c.reviewer;
        j["timestamp"] = c.timestamp;
        return j;
    }

    void export_tsv(std::ostream& out) const {
        tsv::write_row(out, {kMappingColumns.begin(), kMappingColumns.end()});
        for (const auto& c : items_) tsv::write_row(out, row_of(c));
    }

    void export_jsonl(std::ostream& out) const {
        for (const auto& c : items_) out << json_of(c).dump() << '\n';
    }

    /// Parses one mappings row (TSV cells in column order).
    Correspondence parse_row(const std::vector<std::string>& cells) const {
        if (cells.size() != kMappingColumns.size())
            throw Error(ErrorCode::MalformedRow, "expected 8 columns, got " + std::to_string(cells.size()));
        Correspondence c;
        const auto l1 = LemmaRef::parse(cells[0]);
        const auto l2 = LemmaRef::parse(cells[1]);
        if (!l1 || !l2) throw Error(ErrorCode::MalformedRow, "lemma refs must look like lexicon:local_id");
        c.l1 = *l1;
        c.l2 = *l2;
        c.relation = relation_or_throw(cells[2]);
        if (cells[3] != std::to_string(precision(c.relation)))
            throw Error(ErrorCode::MalformedRow, "precision " + cells[3] + " does not match " + cells[2]);
        const auto status = parse_status(cells[4]);
        const auto prov = parse_provenance(cells[5]);
        if (!status) throw Error(ErrorCode::MalformedRow, "unknown status '" + cells[4] + "'");
        if (!prov) throw Error(ErrorCode::MalformedRow, "unknown provenance '" + cells[5] + "'");
        c.status = *status;
        c.provenance = *prov;
        c.reviewer = cells[6];
        const auto& ts = cells[7];
        auto [p, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), c.timestamp);
        if (ec != std::errc{} || p != ts.data() + ts.size())
            throw Error(ErrorCode::MalformedRow, "timestamp '" + ts + "' is not an integer");
        if (auto problem = check_row(c)) throw Error(ErrorCode::MalformedRow, *problem);
        return c;
    }

    Correspondence parse_json(const nlohmann::json& j) const {
        std::vector<std::string> cells;
        for (auto name : kMappingColumns) {
            const auto it = j.find(std::string(name));
            if (it == j.end()) throw Error(ErrorCode::MalformedRow, "missing " + std::string(name));
            cells.push_back(it->is_string() ? it->get<std::string>() : it->dump());
        }
        return parse_row(cells);
    }

    /// Merges a mappings file into the store. Rows identical to a stored
    /// correspondence are no-ops; a row for a pair with an active link
    /// replaces it unless that link has a later timestamp; anything else is
    /// appended. All-or-nothing: a bad row leaves the store untouched.
    ImportReport import_tsv(std::istream& in) {
        auto lines = tsv::read_lines(in);
        if (!lines.empty() && !lines.front().cells.empty() && lines.front().cells.front() == kMappingColumns[0])
            lines.erase(lines.begin());
        std::vector<Correspondence> rows;
        std::vector<RowError> errors;
        for (const auto& line : lines) {
            try {
                rows.push_back(parse_row(line.cells));
            } catch (const Error& e) {
                errors.push_back({line.number, std::string(to_string(e.code())), e.what()});
            }
        }
        if (!errors.empty()) throw ImportError(std::move(errors));
        MappingStore next = *this;
        ImportReport report;
        report.rows = rows.size();
        for (auto& row : rows) report.changed += next.merge(std::move(row)) ? 1 : 0;
        *this = std::move(next);
        return report;
    }

    /// Problems with a correspondence's own fields, if any.
    static std::optional<std::string> check_row(const Correspondence& c) {
        if (c.l1 == c.l2) return "a lemma cannot be mapped to itself";
        if (c.status == Status::Auto && c.provenance == Provenance::Manual) return "AUTO links need an automatic provenance";
        if (c.status != Status::Auto && c.reviewer.empty()) return "decided links need a reviewer";
        return std::nullopt;
    }

private:
    static std::string pair_key(const LemmaRef& a, const LemmaRef& b) {
        auto x = a.str(), y = b.str();
        if (y < x) std::swap(x, y);
        return x + '\t' + y;
    }

    void check_new_active(const LemmaRef& l1, const LemmaRef& l2) const {
        if (l1 == l2) throw Error(ErrorCode::SelfMapping, l1.str());
        if (const auto id = active_for_pair(l1, l2))
            throw Error(ErrorCode::DuplicatePair, l1.str() + " / " + l2.str() + " already linked by " + std::to_string(*id));
    }

    std::uint64_t append(Correspondence c) {
        c.id = items_.size() + 1;
        by_pair_[pair_key(c.l1, c.l2)].push_back(c.id);
        by_lemma_[c.l1.str()].push_back(c.id);
        by_lemma_[c.l2.str()].push_back(c.id);
        items_.push_back(std::move(c));
        return items_.back().id;
    }

    bool merge(Correspondence row) {
        for (auto id : ids_for_pair(row.l1, row.l2))
            if (items_[id - 1].same_content(row)) return false;
        clock_ = std::max(clock_, row.timestamp);
        if (const auto active = active_for_pair(row.l1, row.l2)) {
            Correspondence& c = items_[*active - 1];
            // the active link is newer: an older rejection is history, an
            // older active state is stale
            if (c.timestamp > row.timestamp) {
                if (row.status != Status::Rejected) return false;
                append(std::move(row));
                return true;
            }
            const Correspondence before = c;
            const auto id = c.id;
            c = std::move(row);
            c.id = id;
            audit_.push_back({before, c});
            return true;
        }
        append(std::move(row));
        return true;
    }

    PrecisionTable precision_;
    std::vector<Correspondence> items_;
    std::unordered_map<std::string, std::vector<std::uint64_t>> by_pair_;
    std::unordered_map<std::string, std::vector<std::uint64_t>> by_lemma_;
    std::vector<AuditEntry> audit_;
    std::uint64_t clock_ = 0;
};

/// Keeps correspondences whose relation precision reaches `threshold`.
inline std::vector<Correspondence> filter_by_precision(std::span<const Correspondence> items, int threshold,
                                                       const PrecisionTable& table = {}) {
    std::vector<Correspondence> out;
    for (const auto& c : items)
        if (table(c.relation) >= threshold) out.push_back(c);
    return out;
}

// -- candidate generation ----------------------------------------------------

struct BatchStats {
    std::size_t pairs_compared = 0;
    std::size_t blocks = 0;
    double elapsed_ms = 0;
};

struct CandidateBatch {
    std::string source;
    std::string target;
    std::vector<Correspondence> candidates;  // status AUTO, ordered by (source, target) local id
    BatchStats stats;
};

/// Finds h1/h2 candidates between two lexicons without touching the store.
///
/// Blocking: target lemmas are indexed by the skeleton key of each PV form
/// (verbs) and each singular form (nouns). Both heuristics require a
/// compatible head-form pair, and compatible words share a key, so only
/// same-key pairs can match.
inline CandidateBatch find_candidates(const LexiconStore& store, const MappingStore& mappings,
                                      std::string_view source, std::string_view target) {
    if (!store.has_lexicon(source)) throw Error(ErrorCode::UnknownLexicon, std::string(source));
    if (!store.has_lexicon(target)) throw Error(ErrorCode::UnknownLexicon, std::string(target));
    if (source == target) throw Error(ErrorCode::UnknownLexicon, "source and target must differ");
    const auto started = std::chrono::steady_clock::now();
    const auto& opt = store.compare_options();

    CandidateBatch batch;
    batch.source = std::string(source);
    batch.target = std::string(target);
    const auto src = store.lexicon_forms(source);
    const auto tgt = store.lexicon_forms(target);

    using Index = std::unordered_map<std::string, std::vector<std::size_t>>;
    auto build = [&](const std::vector<LemmaForms>& lemmas, bool verbs) {
        Index idx;
        for (std::size_t i = 0; i < lemmas.size(); ++i) {
            const auto& l = lemmas[i];
            if (verbs ? !l.verbal() : !l.nominal()) continue;
            std::set<std::string> keys;
            for (const auto& w : verbs ? l.forms.pv : l.forms.singulars) keys.insert(skeleton_key(w, opt));
            for (const auto& k : keys) idx[k].push_back(i);
        }
        return idx;
    };
    const Index verb_index = build(tgt, true);
    const Index noun_index = build(tgt, false);

    std::set<std::string> verb_blocks, noun_blocks;
    for (std::size_t i = 0; i < src.size(); ++i) {
        const auto& s = src[i];
        std::set<std::size_t> hits;
        auto probe = [&](const WordSet& heads, const Index& idx, std::set<std::string>& blocks) {
            for (const auto& w : heads) {
                const auto key = skeleton_key(w, opt);
                const auto it = idx.find(key);
                if (it == idx.end()) continue;
                blocks.insert(key);
                hits.insert(it->second.begin(), it->second.end());
            }
        };
        if (s.verbal()) probe(s.forms.pv, verb_index, verb_blocks);
        if (s.nominal()) probe(s.forms.singulars, noun_index, noun_blocks);
        for (auto j : hits) {
            const auto& t = tgt[j];
            ++batch.stats.pairs_compared;
            if (mappings.has_any(s.ref, t.ref)) continue;
            if (const auto prov = match_pair(s, t, opt)) {
                Correspondence c;
                c.l1 = s.ref;
                c.l2 = t.ref;
                c.relation = Relation::R1;
                c.status = Status::Auto;
                c.provenance = *prov;
                batch.candidates.push_back(std::move(c));
            }
        }
    }
    batch.stats.blocks = verb_blocks.size() + noun_blocks.size();
    batch.stats.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return batch;
}

/// Runs find_candidates and records every candidate as an AUTO link.
inline CandidateBatch automap(const LexiconStore& store, MappingStore& mappings, std::string_view source,
                              std::string_view target) {
    auto batch = find_candidates(store, mappings, source, target);
    for (auto& c : batch.candidates) {
        c.id = mappings.add_auto(c.l1, c.l2, c.provenance);
        c.timestamp = mappings.get(c.id).timestamp;
    }
    return batch;
}

}  // namespace lexlink
