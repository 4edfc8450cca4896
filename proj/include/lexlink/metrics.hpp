#pragma once

#include "lexlink/error.hpp"
#include "lexlink/lexicon_store.hpp"
#include "lexlink/mapping.hpp"
#include "lexlink/pos.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace lexlink {

// -- inter-annotator agreement ----------------------------------------------

/// item id -> label. Items are lemma pairs, labels relation codes or REJECT.
using LabelSet = std::map<std::string, std::string>;

struct KappaResult {
    double kappa = 0;
    double observed = 0;  // p_o
    double expected = 0;  // p_e
    std::size_t items = 0;
    bool degenerate_marginals = false;  // p_e == 1
};

/// Unweighted Cohen's kappa over exact label matches.
///
/// Computed on integer counts: with n items, a agreements and
/// S = sum over labels of count_a * count_b,
///   kappa = (a*n - S) / (n*n - S).
inline KappaResult cohen_kappa(const LabelSet& a, const LabelSet& b) {
    if (a.empty() && b.empty()) throw Error(ErrorCode::EmptyItemSet, "no items labeled");
    if (a.size() != b.size()) throw Error(ErrorCode::ItemSetMismatch, "annotators labeled different item sets");
    std::map<std::string, std::int64_t> ca, cb;
    std::int64_t agree = 0;
    auto ib = b.begin();
    for (const auto& [item, label] : a) {
        if (ib->first != item) throw Error(ErrorCode::ItemSetMismatch, "item '" + item + "' is not labeled by both");
        if (label == ib->second) ++agree;
        ++ca[label];
        ++cb[ib->second];
        ++ib;
    }
    const auto n = static_cast<std::int64_t>(a.size());
    std::int64_t s = 0;
    for (const auto& [label, count] : ca)
        if (const auto it = cb.find(label); it != cb.end()) s += count * it->second;

    KappaResult r;
    r.items = a.size();
    r.observed = static_cast<double>(agree) / static_cast<double>(n);
    r.expected = static_cast<double>(s) / static_cast<double>(n * n);
    if (s == n * n) {
        r.degenerate_marginals = true;
        r.kappa = agree == n ? 1.0 : 0.0;
        return r;
    }
    r.kappa = static_cast<double>(agree * n - s) / static_cast<double>(n * n - s);
    return r;
}

struct PairKappa {
    std::string first;
    std::string second;
    KappaResult result;
};

/// Kappa for every unordered annotator pair, in name order.
inline std::vector<PairKappa> pairwise_iaa(const std::map<std::string, LabelSet>& annotators) {
    if (annotators.size() < 2) throw Error(ErrorCode::NotEnoughAnnotators, "need at least two annotators");
    std::vector<PairKappa> out;
    for (auto i = annotators.begin(); i != annotators.end(); ++i)
        for (auto j = std::next(i); j != annotators.end(); ++j)
            out.push_back({i->first, j->first, cohen_kappa(i->second, j->second)});
    return out;
}

inline std::string format_kappa(double k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", k);
    return buf;
}

/// Groups reviewed correspondences by reviewer. The item is the unordered
/// lemma pair; the label is the relation code, or REJECT. AUTO rows carry
/// no judgement and are skipped.
inline std::map<std::string, LabelSet> labels_by_reviewer(std::span<const Correspondence> items) {
    std::map<std::string, LabelSet> out;
    for (const auto& c : items) {
        if (c.status == Status::Auto || c.reviewer.empty()) continue;
        auto x = c.l1.str(), y = c.l2.str();
        if (y < x) std::swap(x, y);
        out[c.reviewer][x + " " + y] = c.status == Status::Rejected ? "REJECT" : std::string(code_of(c.relation));
    }
    return out;
}

/// Restricts every annotator to the items all of them labeled.
inline std::map<std::string, LabelSet> restrict_to_shared_items(const std::map<std::string, LabelSet>& annotators) {
    if (annotators.empty()) return {};
    std::set<std::string> shared;
    for (const auto& [item, _] : annotators.begin()->second) shared.insert(item);
    for (const auto& [_, labels] : annotators) {
        std::set<std::string> keep;
        for (const auto& item : shared)
            if (labels.contains(item)) keep.insert(item);
        shared = std::move(keep);
    }
    std::map<std::string, LabelSet> out;
    for (const auto& [who, labels] : annotators)
        for (const auto& item : shared) out[who][item] = labels.at(item);
    return out;
}

// -- coverage ---------------------------------------------------------------

struct PosCoverageRow {
    PosTag tag = PosTag::UNKNOWN;
    std::vector<std::size_t> counts;  // one per source column
};

struct PosCategoryBlock {
    PosCategory category = PosCategory::Nominal;
    std::vector<PosCoverageRow> rows;
    std::vector<std::size_t> total;
};

/// Lemma counts per POS tag and category, one column per source.
struct PosCoverageReport {
    std::vector<std::string> sources;
    std::vector<PosCategoryBlock> categories;  // Nominal, Verb, Functional, Unknown
    std::vector<std::size_t> grand_total;

    const PosCategoryBlock& block(PosCategory c) const {
        for (const auto& b : categories)
            if (b.category == c) return b;
        throw Error(ErrorCode::UnknownLexicon, "no such category");
    }
};

inline PosCoverageReport build_pos_coverage(std::vector<std::string> sources,
                                            const std::vector<std::map<PosTag, std::size_t>>& counts) {
    PosCoverageReport r;
    r.sources = std::move(sources);
    const std::size_t n = r.sources.size();
    r.grand_total.assign(n, 0);
    for (auto cat : {PosCategory::Nominal, PosCategory::Verb, PosCategory::Functional, PosCategory::Unknown}) {
        PosCategoryBlock block;
        block.category = cat;
        block.total.assign(n, 0);
        std::vector<PosTag> tags;
        for (auto t : all_pos_tags())
            if (category_of(t) == cat) tags.push_back(t);
        if (cat == PosCategory::Unknown) tags.push_back(PosTag::UNKNOWN);
        for (auto t : tags) {
            PosCoverageRow row{t, std::vector<std::size_t>(n, 0)};
            for (std::size_t s = 0; s < n && s < counts.size(); ++s)
                if (const auto it = counts[s].find(t); it != counts[s].end()) row.counts[s] = it->second;
            for (std::size_t s = 0; s < n; ++s) block.total[s] += row.counts[s];
            block.rows.push_back(std::move(row));
        }
        for (std::size_t s = 0; s < n; ++s) r.grand_total[s] += block.total[s];
        r.categories.push_back(std::move(block));
    }
    return r;
}

/// Per-POS coverage of the given lexicons, with the canonical lexicon as
/// the last column.
inline PosCoverageReport pos_coverage(const LexiconStore& store, const std::vector<std::string>& sources) {
    std::vector<std::string> names;
    std::vector<std::map<PosTag, std::size_t>> counts;
    for (const auto& s : sources) {
        if (!store.has_lexicon(s)) throw Error(ErrorCode::UnknownLexicon, s);
        if (s == kCanonicalLexicon) continue;
        names.push_back(s);
        counts.push_back(store.pos_counts(s));
    }
    names.emplace_back(kCanonicalLexicon);
    counts.push_back(store.pos_counts(kCanonicalLexicon));
    return build_pos_coverage(std::move(names), counts);
}

inline nlohmann::ordered_json to_json(const PosCoverageReport& r) {
    nlohmann::ordered_json j;
    j["sources"] = r.sources;
    j["categories"] = nlohmann::ordered_json::array();
    for (const auto& b : r.categories) {
        nlohmann::ordered_json jb;
        jb["category"] = to_string(b.category);
        jb["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : b.rows) jb["rows"].push_back({{"pos", to_string(row.tag)}, {"counts", row.counts}});
        jb["total"] = b.total;
        j["categories"].push_back(std::move(jb));
    }
    j["grand_total"] = r.grand_total;
    return j;
}

inline void write_tsv(const PosCoverageReport& r, std::ostream& out) {
    std::vector<std::string> header{"category", "pos"};
    header.insert(header.end(), r.sources.begin(), r.sources.end());
    tsv::write_row(out, header);
    auto counts = [](std::vector<std::string> row, const std::vector<std::size_t>& c) {
        for (auto v : c) row.push_back(std::to_string(v));
        return row;
    };
    for (const auto& b : r.categories) {
        for (const auto& row : b.rows)
            tsv::write_row(out, counts({std::string(to_string(b.category)), std::string(to_string(row.tag))}, row.counts));
        tsv::write_row(out, counts({std::string(to_string(b.category)), "Total"}, b.total));
    }
    tsv::write_row(out, counts({"ALL", "Total"}, r.grand_total));
}

struct LexiconCoverageRow {
    std::string lexicon;
    std::size_t lemmas = 0;
    std::size_t mapped = 0;  // lemmas with at least one CONFIRMED link
};

inline std::vector<LexiconCoverageRow> lexicon_coverage(const LexiconStore& store, const MappingStore& mappings) {
    std::vector<LexiconCoverageRow> out;
    for (const auto& d : store.lexicons()) {
        LexiconCoverageRow row{d.id, 0, 0};
        for (const auto& lf : store.lexicon_forms(d.id)) {
            ++row.lemmas;
            if (mappings.is_mapped(lf.ref)) ++row.mapped;
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace lexlink
