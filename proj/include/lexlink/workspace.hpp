#pragma once

// The lexicographic data graph: canonical and external lexicons, the
// correspondences between them, and linked corpora, optionally persisted to
// a data directory.
//
// On-disk layout (all UTF-8):
//   LOCK                    held with flock() while a process owns the dir
//   settings.json           comparison and precision settings
//   lexicons.json           lexicon descriptors
//   lexicons/<id>.jsonl     one lemma per line; canonical inserts append
//   mappings.log.jsonl      append-only log of correspondence states; the
//                           last line per id wins, earlier ones are history
//   corpora.json            corpus descriptors
//   corpora/<id>.tsv        linked corpus export

#include "lexlink/corpus.hpp"
#include "lexlink/error.hpp"
#include "lexlink/lexicon_store.hpp"
#include "lexlink/mapping.hpp"

#include <nlohmann/json.hpp>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace lexlink {

struct WorkspaceSettings {
    CompareOptions compare;
    PrecisionTable precision;
};

namespace fsio {

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_atomic(const std::filesystem::path& p, const std::string& content) {
    const auto tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp);
        out << content;
        out.flush();
        if (!out) throw Error(ErrorCode::Io, "short write to " + tmp);
    }
    std::filesystem::rename(tmp, p);
}

/// Appends and fsyncs, so the data is on disk when this returns.
inline void append_durable(const std::filesystem::path& p, const std::string& content) {
    const int fd = ::open(p.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
    if (fd < 0) throw Error(ErrorCode::Io, "cannot open " + p.string());
    std::size_t done = 0;
    while (done < content.size()) {
        const auto n = ::write(fd, content.data() + done, content.size() - done);
        if (n <= 0) {
            ::close(fd);
            throw Error(ErrorCode::Io, "write failed on " + p.string());
        }
        done += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
}

inline std::vector<tsv::Line> jsonl_lemma_lines(const std::string& text) {
    std::vector<tsv::Line> out;
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        const auto row = row_from_json(nlohmann::json::parse(line));
        out.push_back({n, {row.begin(), row.end()}});
    }
    return out;
}

}  // namespace fsio

/// Exclusive ownership of a data directory.
class DataDir {
public:
    explicit DataDir(std::filesystem::path root) : root_(std::move(root)) {
        std::filesystem::create_directories(root_ / "lexicons");
        std::filesystem::create_directories(root_ / "corpora");
        fd_ = ::open((root_ / "LOCK").c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0) throw Error(ErrorCode::Io, "cannot open lock file in " + root_.string());
        if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd_);
            throw Error(ErrorCode::StoreLocked, root_.string() + " is in use by another process");
        }
    }
    ~DataDir() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    DataDir(const DataDir&) = delete;
    DataDir& operator=(const DataDir&) = delete;

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path lexicon_file(std::string_view id) const { return root_ / "lexicons" / (std::string(id) + ".jsonl"); }
    std::filesystem::path corpus_file(std::string_view id) const { return root_ / "corpora" / (std::string(id) + ".tsv"); }
    std::filesystem::path mappings_log() const { return root_ / "mappings.log.jsonl"; }

private:
    std::filesystem::path root_;
    int fd_ = -1;
};

class Workspace {
public:
    explicit Workspace(WorkspaceSettings settings = {})
        : settings_(settings), lexicons_(settings.compare), mappings_(settings.precision) {}

    /// Opens (creating if needed) and locks a data directory, loading its
    /// contents. Settings stored in the directory take precedence.
    static Workspace open(const std::filesystem::path& dir, std::optional<WorkspaceSettings> settings = std::nullopt) {
        auto data = std::make_unique<DataDir>(dir);
        const auto settings_path = dir / "settings.json";
        WorkspaceSettings s = settings.value_or(WorkspaceSettings{});
        if (std::filesystem::exists(settings_path)) {
            const auto j = nlohmann::json::parse(fsio::read_file(settings_path));
            s.compare.fold_hamza = j.value("fold_hamza", false);
            s.compare.shadda = j.value("shadda_strict", false) ? ShaddaPolicy::StrictWhenFullyDiacritized
                                                               : ShaddaPolicy::AbsentIsUnspecified;
            s.precision.x2_weight = j.value("x2_weight", 30);
        } else {
            nlohmann::ordered_json j;
            j["fold_hamza"] = s.compare.fold_hamza;
            j["shadda_strict"] = s.compare.shadda == ShaddaPolicy::StrictWhenFullyDiacritized;
            j["x2_weight"] = s.precision.x2_weight;
            fsio::write_atomic(settings_path, j.dump(2) + "\n");
        }
        Workspace ws(s);
        ws.load(*data);
        ws.data_ = std::move(data);
        return ws;
    }

    Workspace(Workspace&&) = default;
    Workspace& operator=(Workspace&&) = default;

    const WorkspaceSettings& settings() const { return settings_; }
    const LexiconStore& lexicons() const { return lexicons_; }
    const MappingStore& mappings() const { return mappings_; }
    const CorpusStore& corpora() const { return corpora_; }
    bool persistent() const { return data_ != nullptr; }

    // -- lexicons ---------------------------------------------------------

    IngestReport ingest_lexicon(LexiconDescriptor descriptor, std::istream& in, const IngestOptions& opt = {}) {
        const bool canonical = descriptor.canonical || descriptor.id == kCanonicalLexicon;
        if (canonical) descriptor.id = std::string(kCanonicalLexicon);
        auto report = lexicons_.ingest_lexicon(descriptor, in, opt);
        if (data_) {
            persist_descriptors();
            persist_lexicon(descriptor.id);
        }
        return report;
    }

    /// Creates a canonical lemma from an external one and records an AUTO
    /// link between the two.
    CanonicalLemma adopt_as_qabas(const LemmaRef& source, const std::map<std::string, std::string>& overrides = {},
                                  bool strict = true) {
        auto lemma = lexicons_.build_adoption(source, overrides, strict);
        const auto id = lexicons_.store_adopted(std::move(lemma));
        const auto before = mappings_.size();
        mappings_.add_auto(LemmaRef::canonical(id), source, Provenance::Adoption);
        if (data_) {
            append_canonical(id);
            persist_mappings_since(before);
        }
        return *lexicons_.find_canonical(id);
    }

    InsertResult insert_manual_lemma(CanonicalLemma lemma, const InsertOptions& opt = {}) {
        auto r = lexicons_.insert_manual_lemma(std::move(lemma), opt);
        if (data_) append_canonical(r.id);
        return r;
    }

    Page<LemmaSummary> search(std::string_view query, const SearchFilters& filters, std::size_t page = 1,
                              std::size_t page_size = 50) const {
        return lexicons_.search(query, filters, page, page_size,
                                [&](const LemmaRef& r) { return mappings_.is_mapped(r); });
    }

    // -- mappings ---------------------------------------------------------

    CandidateBatch automap(std::string_view source, std::string_view target) {
        const auto before = mappings_.size();
        auto batch = lexlink::automap(lexicons_, mappings_, source, target);
        if (data_) persist_mappings_since(before);
        return batch;
    }

    const Correspondence& review(std::uint64_t id, const Decision& d, const std::string& reviewer, bool force = false) {
        const auto& c = mappings_.review(id, d, reviewer, force);
        if (data_) persist_mapping(c);
        return c;
    }

    const Correspondence& manual_map(const LemmaRef& l1, const LemmaRef& l2, Relation relation, const std::string& reviewer) {
        const auto& c = mappings_.manual_map(l1, l2, relation, reviewer,
                                             [&](const LemmaRef& r) { return lexicons_.contains(r); });
        if (data_) persist_mapping(c);
        return c;
    }

    ImportReport review_import(std::istream& in) {
        const auto before = mappings_.all();
        auto report = mappings_.import_tsv(in);
        if (data_ && report.changed > 0) {
            std::string lines;
            for (const auto& c : mappings_.all())
                if (c.id > before.size() || !(before[c.id - 1] == c)) lines += log_line(c);
            fsio::append_durable(data_->mappings_log(), lines);
        }
        return report;
    }

    // -- corpora ----------------------------------------------------------

    IngestReport ingest_corpus(CorpusDescriptor descriptor, std::istream& in) {
        auto report = corpora_.ingest_corpus(std::move(descriptor), in);
        if (data_) persist_corpora();
        return report;
    }

    LinkReport link_corpus(std::string_view corpus_id, const std::set<Relation>& whitelist = core_whitelist()) {
        auto report = corpora_.link_corpus(corpus_id, whitelist, lexicons_, mappings_);
        if (data_) persist_corpus(corpus_id);
        return report;
    }

    /// Every lexicon, the mappings and every corpus as one text blob; equal
    /// snapshots mean equal observable state.
    std::string snapshot() const {
        std::ostringstream out;
        for (const auto& d : lexicons_.lexicons()) {
            out << "## lexicon " << d.id << ' ' << d.name << ' ' << d.category << '\n';
            lexicons_.export_tsv(d.id, out);
        }
        out << "## mappings\n";
        mappings_.export_tsv(out);
        for (const auto& d : corpora_.corpora()) {
            out << "## corpus " << d.id << '\n';
            corpora_.export_tsv(d.id, out);
        }
        return out.str();
    }

private:
    static std::string log_line(const Correspondence& c) {
        nlohmann::ordered_json j;
        j["id"] = c.id;
        j["l1_ref"] = c.l1.str();
        j["l2_ref"] = c.l2.str();
        j["relation_code"] = code_of(c.relation);
        j["status"] = to_string(c.status);
        j["provenance"] = to_string(c.provenance);
        j["reviewer"] = c.reviewer;
        j["timestamp"] = c.timestamp;
        return j.dump() + "\n";
    }

    static Correspondence from_log(const nlohmann::json& j) {
        Correspondence c;
        c.id = j.at("id").get<std::uint64_t>();
        const auto l1 = LemmaRef::parse(j.at("l1_ref").get<std::string>());
        const auto l2 = LemmaRef::parse(j.at("l2_ref").get<std::string>());
        const auto rel = parse_relation(j.at("relation_code").get<std::string>());
        const auto st = parse_status(j.at("status").get<std::string>());
        const auto pv = parse_provenance(j.at("provenance").get<std::string>());
        if (!l1 || !l2 || !rel || !st || !pv) throw Error(ErrorCode::Io, "corrupt mappings log line: " + j.dump());
        c.l1 = *l1;
        c.l2 = *l2;
        c.relation = *rel;
        c.status = *st;
        c.provenance = *pv;
        c.reviewer = j.at("reviewer").get<std::string>();
        c.timestamp = j.at("timestamp").get<std::uint64_t>();
        return c;
    }

    void persist_mapping(const Correspondence& c) { fsio::append_durable(data_->mappings_log(), log_line(c)); }

    void persist_mappings_since(std::size_t before) {
        std::string lines;
        for (std::size_t i = before; i < mappings_.size(); ++i) lines += log_line(mappings_.all()[i]);
        if (!lines.empty()) fsio::append_durable(data_->mappings_log(), lines);
    }

    void persist_descriptors() {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& d : lexicons_.lexicons())
            arr.push_back({{"id", d.id}, {"name", d.name}, {"category", d.category}, {"canonical", d.canonical}});
        fsio::write_atomic(data_->root() / "lexicons.json", arr.dump(2) + "\n");
    }

    void persist_lexicon(std::string_view id) {
        std::ostringstream out;
        lexicons_.export_jsonl(id, out);
        fsio::write_atomic(data_->lexicon_file(id), out.str());
    }

    void append_canonical(std::uint64_t id) {
        fsio::append_durable(data_->lexicon_file(kCanonicalLexicon),
                             row_to_json(row_of(*lexicons_.find_canonical(id))).dump() + "\n");
    }

    void persist_corpora() {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& d : corpora_.corpora()) {
            arr.push_back({{"id", d.id}, {"name", d.name}, {"variety", d.variety}});
            persist_corpus(d.id);
        }
        fsio::write_atomic(data_->root() / "corpora.json", arr.dump(2) + "\n");
    }

    void persist_corpus(std::string_view id) {
        std::ostringstream out;
        corpora_.export_tsv(id, out);
        fsio::write_atomic(data_->corpus_file(id), out.str());
    }

    void load(const DataDir& dir) {
        const auto lex_path = dir.root() / "lexicons.json";
        if (std::filesystem::exists(lex_path)) {
            for (const auto& d : nlohmann::json::parse(fsio::read_file(lex_path))) {
                LexiconDescriptor desc{d.at("id").get<std::string>(), d.value("name", ""), d.value("category", ""),
                                       d.value("canonical", false), 0};
                const auto file = dir.lexicon_file(desc.id);
                auto lines = std::filesystem::exists(file) ? fsio::jsonl_lemma_lines(fsio::read_file(file))
                                                           : std::vector<tsv::Line>{};
                const auto report = lexicons_.ingest_lines(desc, std::move(lines), IngestOptions{false, true});
                if (!report.rejected.empty())
                    throw Error(ErrorCode::Io, "corrupt lexicon file " + file.string() + ": " + report.rejected.front().message);
            }
        }
        if (std::filesystem::exists(dir.mappings_log())) {
            std::istringstream in(fsio::read_file(dir.mappings_log()));
            std::string line;
            std::size_t number = 0;
            while (std::getline(in, line)) {
                ++number;
                if (line.empty()) continue;
                try {
                    mappings_.restore(from_log(nlohmann::json::parse(line)));
                } catch (const nlohmann::json::exception& e) {
                    throw Error(ErrorCode::Io, "corrupt mappings log line " + std::to_string(number) + ": " + e.what());
                }
            }
        }
        const auto corpora_path = dir.root() / "corpora.json";
        if (std::filesystem::exists(corpora_path)) {
            for (const auto& d : nlohmann::json::parse(fsio::read_file(corpora_path))) {
                CorpusDescriptor desc{d.at("id").get<std::string>(), d.value("name", ""), d.value("variety", ""), 0, 0};
                std::ifstream in(dir.corpus_file(desc.id));
                auto report = corpora_.ingest_lines(desc, tsv::read_lines(in), true);
                if (!report.rejected.empty())
                    throw Error(ErrorCode::Io, "corrupt corpus file for " + desc.id + ": " + report.rejected.front().message);
            }
        }
    }

    WorkspaceSettings settings_;
    LexiconStore lexicons_;
    MappingStore mappings_;
    CorpusStore corpora_;
    std::unique_ptr<DataDir> data_;
};

}  // namespace lexlink
