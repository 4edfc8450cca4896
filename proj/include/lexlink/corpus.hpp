#pragma once

#include "lexlink/error.hpp"
#include "lexlink/lexicon_store.hpp"
#include "lexlink/mapping.hpp"
#include "lexlink/tsv.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace lexlink {

struct CorpusToken {
    std::size_t sentence = 0;
    std::size_t token = 0;
    std::string surface;
    std::string lemma_lexicon;   // empty when the source gives a raw lemma string
    std::string lemma_local_id;  // local id, or the raw lemma string
    std::optional<std::uint64_t> resolved;

    bool has_ref() const { return !lemma_lexicon.empty(); }
    LemmaRef ref() const { return {lemma_lexicon, lemma_local_id}; }
    /// Identity of the source lemma, used for unique-lemma counts.
    std::string source_key() const { return has_ref() ? ref().str() : "raw:" + lemma_local_id; }
};

struct CorpusDescriptor {
    std::string id;
    std::string name;
    std::string variety;  // MSA, Classical, or a dialect name
    std::size_t token_count = 0;
    std::size_t unique_lemma_count = 0;
};

/// mapped/total with the display percentage rounded half up.
struct CoverageCount {
    std::size_t mapped = 0;
    std::size_t total = 0;

    bool empty() const { return total == 0; }
    double ratio() const { return total == 0 ? 0.0 : static_cast<double>(mapped) / static_cast<double>(total); }
    std::size_t percent() const { return total == 0 ? 0 : (200 * mapped + total) / (2 * total); }
};

struct AmbiguousToken {
    std::size_t sentence = 0;
    std::size_t token = 0;
    std::string source;
    std::vector<std::uint64_t> candidates;  // canonical ids, best first
};

struct LinkReport {
    CoverageCount tokens;
    CoverageCount lemmas;
    std::vector<AmbiguousToken> ambiguities;

    std::size_t tokens_resolved() const { return tokens.mapped; }
    std::size_t tokens_unresolved() const { return tokens.total - tokens.mapped; }
    std::size_t lemmas_resolved() const { return lemmas.mapped; }
    std::size_t lemmas_unresolved() const { return lemmas.total - lemmas.mapped; }
};

struct CorpusCoverage {
    std::string corpus_id;
    CoverageCount tokens;
    CoverageCount lemmas;
    bool empty_corpus = false;
};

inline const std::set<Relation>& core_whitelist() {
    static const std::set<Relation> w(kCoreRelations.begin(), kCoreRelations.end());
    return w;
}

inline constexpr std::array<std::string_view, 5> kCorpusColumns = {
    "sentence_idx", "token_idx", "surface", "lemma_lexicon", "lemma_local_id",
};

class CorpusStore {
public:
    struct Corpus {
        CorpusDescriptor descriptor;
        std::vector<CorpusToken> tokens;  // in (sentence, token) order
    };

    IngestReport ingest_corpus(CorpusDescriptor descriptor, std::istream& in) {
        return ingest_lines(std::move(descriptor), tsv::read_lines(in), false);
    }

    /// `keep_resolution` reads a sixth `qabas_id` column (persisted linked
    /// corpora); plain ingestion ignores extra columns.
    IngestReport ingest_lines(CorpusDescriptor descriptor, std::vector<tsv::Line> lines, bool keep_resolution) {
        if (descriptor.id.empty() || descriptor.id.find_first_of(" \t/") != std::string::npos)
            throw Error(ErrorCode::UnknownCorpus, "invalid corpus id '" + descriptor.id + "'");
        if (corpora_.contains(descriptor.id)) throw Error(ErrorCode::DuplicateCorpusId, descriptor.id);
        if (!lines.empty() && !lines.front().cells.empty() && lines.front().cells.front() == kCorpusColumns[0])
            lines.erase(lines.begin());

        IngestReport report;
        Corpus corpus;
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (const auto& line : lines) {
            const auto& c = line.cells;
            auto reject = [&](std::string reason, std::string msg) {
                report.rejected.push_back({line.number, std::move(reason), std::move(msg)});
            };
            if (c.size() < kCorpusColumns.size()) {
                reject("MalformedRow", "expected at least 5 columns, got " + std::to_string(c.size()));
                continue;
            }
            CorpusToken t;
            if (!parse_index(c[0], t.sentence) || !parse_index(c[1], t.token)) {
                reject("MalformedRow", "sentence_idx and token_idx must be non-negative integers");
                continue;
            }
            t.surface = std::string(trim(c[2]));
            t.lemma_lexicon = std::string(trim(c[3]));
            t.lemma_local_id = std::string(trim(c[4]));
            if (t.surface.empty()) {
                reject("MalformedRow", "surface form is empty");
                continue;
            }
            if (t.lemma_local_id.empty()) {
                reject("MalformedRow", "lemma reference is missing");
                continue;
            }
            if (keep_resolution && c.size() > 5 && !trim(c[5]).empty()) {
                std::size_t id = 0;
                if (!parse_index(c[5], id) || id == 0) {
                    reject("MalformedRow", "qabas_id must be a positive integer");
                    continue;
                }
                t.resolved = id;
            }
            if (!seen.emplace(t.sentence, t.token).second) {
                reject("DuplicateToken", "token " + std::to_string(t.sentence) + ":" + std::to_string(t.token) + " repeats");
                continue;
            }
            corpus.tokens.push_back(std::move(t));
        }
        std::stable_sort(corpus.tokens.begin(), corpus.tokens.end(), [](const CorpusToken& a, const CorpusToken& b) {
            return std::pair(a.sentence, a.token) < std::pair(b.sentence, b.token);
        });
        report.accepted = corpus.tokens.size();
        corpus.descriptor = std::move(descriptor);
        refresh(corpus);
        const auto id = corpus.descriptor.id;
        corpora_.emplace(id, std::move(corpus));
        return report;
    }

    /// Resolves each token's source lemma to a canonical lemma through
    /// CONFIRMED correspondences whose relation is whitelisted. When several
    /// canonical targets qualify, the highest-precision relation wins, then
    /// the lowest canonical id; the token is reported as ambiguous.
    LinkReport link_corpus(std::string_view corpus_id, const std::set<Relation>& whitelist, const LexiconStore& lexicons,
                           const MappingStore& mappings) {
        Corpus& corpus = edit(corpus_id);
        std::map<std::string, std::vector<std::uint64_t>> resolution;  // source key -> ranked targets
        for (const auto& t : corpus.tokens) {
            const auto key = t.source_key();
            if (resolution.contains(key)) continue;
            resolution[key] = t.has_ref() ? targets_for(t.ref(), whitelist, lexicons, mappings) : std::vector<std::uint64_t>{};
        }
        LinkReport report;
        std::set<std::string> lemmas, resolved_lemmas;
        for (auto& t : corpus.tokens) {
            const auto key = t.source_key();
            const auto& targets = resolution[key];
            lemmas.insert(key);
            t.resolved = targets.empty() ? std::nullopt : std::optional<std::uint64_t>(targets.front());
            if (t.resolved) {
                ++report.tokens.mapped;
                resolved_lemmas.insert(key);
            }
            if (targets.size() > 1) report.ambiguities.push_back({t.sentence, t.token, key, targets});
        }
        report.tokens.total = corpus.tokens.size();
        report.lemmas = {resolved_lemmas.size(), lemmas.size()};
        return report;
    }

    CorpusCoverage coverage_report(std::string_view corpus_id) const {
        const Corpus& corpus = get(corpus_id);
        CorpusCoverage out;
        out.corpus_id = corpus.descriptor.id;
        std::set<std::string> lemmas, resolved;
        for (const auto& t : corpus.tokens) {
            lemmas.insert(t.source_key());
            if (t.resolved) {
                ++out.tokens.mapped;
                resolved.insert(t.source_key());
            }
        }
        out.tokens.total = corpus.tokens.size();
        out.lemmas = {resolved.size(), lemmas.size()};
        out.empty_corpus = corpus.tokens.empty();
        return out;
    }

    /// Unresolved source lemmas by token frequency, most frequent first;
    /// the worklist for manual additions.
    std::vector<std::pair<std::string, std::size_t>> unresolved_lemmas(std::string_view corpus_id) const {
        std::map<std::string, std::size_t> freq;
        for (const auto& t : get(corpus_id).tokens)
            if (!t.resolved) ++freq[t.source_key()];
        std::vector<std::pair<std::string, std::size_t>> out(freq.begin(), freq.end());
        std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        return out;
    }

    /// Linked export: the ingest columns plus `qabas_id`.
    void export_tsv(std::string_view corpus_id, std::ostream& out) const {
        std::vector<std::string> header(kCorpusColumns.begin(), kCorpusColumns.end());
        header.emplace_back("qabas_id");
        tsv::write_row(out, header);
        for (const auto& t : get(corpus_id).tokens)
            tsv::write_row(out, {std::to_string(t.sentence), std::to_string(t.token), t.surface, t.lemma_lexicon,
                                 t.lemma_local_id, t.resolved ? std::to_string(*t.resolved) : ""});
    }

    void export_jsonl(std::string_view corpus_id, std::ostream& out) const {
        for (const auto& t : get(corpus_id).tokens) {
            nlohmann::ordered_json j;
            j["sentence_idx"] = t.sentence;
            j["token_idx"] = t.token;
            j["surface"] = t.surface;
            j["lemma_lexicon"] = t.lemma_lexicon;
            j["lemma_local_id"] = t.lemma_local_id;
            j["qabas_id"] = t.resolved ? nlohmann::ordered_json(*t.resolved) : nlohmann::ordered_json(nullptr);
            out << j.dump() << '\n';
        }
    }

    bool contains(std::string_view id) const { return corpora_.contains(std::string(id)); }

    const Corpus& get(std::string_view id) const {
        const auto it = corpora_.find(std::string(id));
        if (it == corpora_.end()) throw Error(ErrorCode::UnknownCorpus, std::string(id));
        return it->second;
    }

    std::vector<CorpusDescriptor> corpora() const {
        std::vector<CorpusDescriptor> out;
        for (const auto& [_, c] : corpora_) out.push_back(c.descriptor);
        return out;
    }

private:
    Corpus& edit(std::string_view id) {
        const auto it = corpora_.find(std::string(id));
        if (it == corpora_.end()) throw Error(ErrorCode::UnknownCorpus, std::string(id));
        return it->second;
    }

    static bool parse_index(std::string_view s, std::size_t& out) {
        s = trim(s);
        if (s.empty()) return false;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && p == s.data() + s.size();
    }

    static void refresh(Corpus& c) {
        std::set<std::string> lemmas;
        for (const auto& t : c.tokens) lemmas.insert(t.source_key());
        c.descriptor.token_count = c.tokens.size();
        c.descriptor.unique_lemma_count = lemmas.size();
    }

    static std::vector<std::uint64_t> targets_for(const LemmaRef& ref, const std::set<Relation>& whitelist,
                                                  const LexiconStore& lexicons, const MappingStore& mappings) {
        std::map<std::uint64_t, int> best;  // canonical id -> best precision
        for (auto id : mappings.confirmed_for(ref)) {
            const auto& c = mappings.get(id);
            if (!whitelist.contains(c.relation)) continue;
            const LemmaRef& other = c.l1 == ref ? c.l2 : c.l1;
            const auto cid = other.canonical_id();
            if (!cid || !lexicons.find_canonical(*cid)) continue;
            auto& p = best[*cid];
            p = std::max(p, mappings.precision(c));
        }
        std::vector<std::pair<int, std::uint64_t>> ranked;
        for (const auto& [cid, p] : best) ranked.emplace_back(p, cid);
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        std::vector<std::uint64_t> out;
        for (const auto& [_, cid] : ranked) out.push_back(cid);
        return out;
    }

    std::map<std::string, Corpus, std::less<>> corpora_;
};

}  // namespace lexlink
