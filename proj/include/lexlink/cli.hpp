#pragma once

// Command-line front end. run_cli is the whole program minus main(), so tests
// can drive it with in-memory streams.
//
// Exit codes: 0 ok, 1 usage error, 2 data error.

#include "lexlink/metrics.hpp"
#include "lexlink/service.hpp"
#include "lexlink/workspace.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace lexlink {

namespace cli {

inline constexpr int kUsage = 1;
inline constexpr int kData = 2;

struct Options {
    std::string data_dir;
    bool fold_hamza = false;
    int x2_weight = 30;

    // ingest
    std::string lexicon_file, corpus_file, id, name, category, variety;
    bool canonical = false, replace = false;
    std::optional<bool> strict;

    // automap
    std::string source, target, out;

    // review-import / link-corpus
    std::string import_file, corpus_id, relations;

    // stats / export
    std::string stats_kind, export_kind, format = "tsv", lexicon;
    std::vector<std::string> annotations;

    // serve
    std::string bind = "127.0.0.1:8080", token;
};

/// Writes to --out when given, else to the fallback stream.
template <typename F>
void emit(const std::string& path, std::ostream& fallback, F&& write) {
    if (path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
    write(f);
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
    return in;
}

inline void report_rows(const IngestReport& r, std::ostream& err) {
    for (const auto& e : r.rejected) err << "row " << e.row << ": " << e.reason << ": " << e.message << '\n';
}

inline std::set<Relation> parse_whitelist(const std::string& list) {
    if (list.empty()) return core_whitelist();
    std::set<Relation> out;
    for (const auto& code : api::split_list(list)) out.insert(relation_or_throw(code));
    return out;
}

/// One annotator per file: the file's correspondences, labeled as in
/// labels_by_reviewer. The annotator is named after the file stem.
inline std::map<std::string, LabelSet> read_annotations(const std::vector<std::string>& files) {
    std::map<std::string, LabelSet> out;
    for (const auto& path : files) {
        auto in = open_input(path);
        MappingStore parser;
        std::vector<Correspondence> rows;
        for (const auto& line : tsv::read_lines(in)) {
            if (!line.cells.empty() && line.cells[0] == kMappingColumns[0]) continue;
            try {
                auto c = parser.parse_row(line.cells);
                c.reviewer = "x";
                rows.push_back(std::move(c));
            } catch (const Error& e) {
                throw Error(e.code(), path + " row " + std::to_string(line.number) + ": " + e.what());
            }
        }
        const auto name = std::filesystem::path(path).stem().string();
        if (out.contains(name)) throw Error(ErrorCode::InvalidQuery, "two annotation files named " + name);
        const auto labels = labels_by_reviewer(rows);
        out[name] = labels.empty() ? LabelSet{} : labels.begin()->second;
    }
    return out;
}

inline int cmd_ingest(Workspace& ws, const Options& o, std::ostream& out, std::ostream& err) {
    if (o.lexicon_file.empty() == o.corpus_file.empty()) {
        err << "ingest: give exactly one of --lexicon or --corpus\n";
        return kUsage;
    }
    IngestReport report;
    if (!o.lexicon_file.empty()) {
        auto in = open_input(o.lexicon_file);
        LexiconDescriptor d;
        d.canonical = o.canonical;
        d.id = o.canonical ? std::string(kCanonicalLexicon)
                           : (o.id.empty() ? std::filesystem::path(o.lexicon_file).stem().string() : o.id);
        d.name = o.name.empty() ? d.id : o.name;
        d.category = o.category;
        report = ws.ingest_lexicon(d, in, IngestOptions{o.strict, o.replace});
        out << "lexicon=" << d.id << ' ';
    } else {
        auto in = open_input(o.corpus_file);
        CorpusDescriptor d;
        d.id = o.id.empty() ? std::filesystem::path(o.corpus_file).stem().string() : o.id;
        d.name = o.name.empty() ? d.id : o.name;
        d.variety = o.variety.empty() ? "MSA" : o.variety;
        report = ws.ingest_corpus(d, in);
        out << "corpus=" << d.id << ' ';
    }
    out << "accepted=" << report.accepted << " rejected=" << report.rejected.size() << '\n';
    report_rows(report, err);
    return report.rejected.empty() ? 0 : kData;
}

inline int cmd_automap(Workspace& ws, const Options& o, std::ostream& out) {
    const auto batch = ws.automap(o.source, o.target);
    if (!o.out.empty()) {
        emit(o.out, out, [&](std::ostream& f) {
            tsv::write_row(f, std::vector<std::string>(kMappingColumns.begin(), kMappingColumns.end()));
            for (const auto& c : batch.candidates) tsv::write_row(f, ws.mappings().row_of(ws.mappings().get(c.id)));
        });
    }
    out << "candidates=" << batch.candidates.size() << " pairs_compared=" << batch.stats.pairs_compared
        << " blocks=" << batch.stats.blocks << '\n';
    return 0;
}

inline int cmd_review_import(Workspace& ws, const Options& o, std::ostream& out, std::ostream& err) {
    auto in = open_input(o.import_file);
    try {
        const auto report = ws.review_import(in);
        out << "rows=" << report.rows << " changed=" << report.changed << '\n';
        return 0;
    } catch (const ImportError& e) {
        for (const auto& r : e.rows()) err << "row " << r.row << ": " << r.reason << ": " << r.message << '\n';
        out << "rows=0 changed=0\n";
        return kData;
    }
}

inline int cmd_link(Workspace& ws, const Options& o, std::ostream& out, std::ostream& err) {
    const auto report = ws.link_corpus(o.corpus_id, parse_whitelist(o.relations));
    for (const auto& a : report.ambiguities) {
        err << "ambiguous " << a.sentence << ':' << a.token << ' ' << a.source << " ->";
        for (auto id : a.candidates) err << ' ' << LemmaRef::canonical(id).str();
        err << '\n';
    }
    out << "tokens=" << report.tokens.total << " tokens_resolved=" << report.tokens_resolved()
        << " tokens_percent=" << report.tokens.percent() << " lemmas=" << report.lemmas.total
        << " lemmas_resolved=" << report.lemmas_resolved() << " lemmas_percent=" << report.lemmas.percent()
        << " ambiguous=" << report.ambiguities.size() << '\n';
    return 0;
}

inline int cmd_stats(Workspace& ws, const Options& o, std::ostream& out, std::ostream& err) {
    if (o.stats_kind == "relations") {
        const auto counts = ws.mappings().relation_counts();
        std::size_t total = 0;
        for (const auto& [_, n] : counts) total += n;
        emit(o.out, out, [&](std::ostream& f) {
            if (o.out.empty()) return;
            tsv::write_row(f, {"relation_code", "label", "precision", "count"});
            for (const auto& [rel, n] : counts)
                tsv::write_row(f, {std::string(code_of(rel)), std::string(label_of(rel)),
                                   std::to_string(ws.mappings().precision_table()(rel)), std::to_string(n)});
            tsv::write_row(f, {"Total", "", "", std::to_string(total)});
        });
        out << "total=" << total;
        for (const auto& [rel, n] : counts) out << ' ' << code_of(rel) << '=' << n;
        out << '\n';
        return 0;
    }
    if (o.stats_kind == "coverage") {
        std::vector<std::string> sources;
        for (const auto& d : ws.lexicons().lexicons())
            if (!d.canonical) sources.push_back(d.id);
        const auto report = pos_coverage(ws.lexicons(), sources);
        if (!o.out.empty()) emit(o.out, out, [&](std::ostream& f) { write_tsv(report, f); });
        for (std::size_t i = 0; i < report.sources.size(); ++i)
            out << (i ? " " : "") << report.sources[i] << '=' << report.grand_total[i];
        out << '\n';
        return 0;
    }
    if (o.stats_kind == "iaa") {
        auto labels = o.annotations.empty() ? labels_by_reviewer(ws.mappings().all()) : read_annotations(o.annotations);
        if (o.annotations.empty()) labels = restrict_to_shared_items(labels);
        const auto pairs = pairwise_iaa(labels);
        const auto items = labels.begin()->second.size();
        if (!o.out.empty()) {
            emit(o.out, out, [&](std::ostream& f) {
                tsv::write_row(f, {"a", "b", "items", "observed", "expected", "kappa"});
                for (const auto& p : pairs)
                    tsv::write_row(f, {p.first, p.second, std::to_string(p.result.items), std::to_string(p.result.observed),
                                       std::to_string(p.result.expected), format_kappa(p.result.kappa)});
            });
        }
        out << "items=" << items;
        for (const auto& p : pairs) {
            out << ' ' << p.first << '-' << p.second << '=' << format_kappa(p.result.kappa);
            if (p.result.degenerate_marginals) err << p.first << '-' << p.second << ": degenerate marginals\n";
        }
        out << '\n';
        return 0;
    }
    err << "stats: unknown report '" << o.stats_kind << "'\n";
    return kUsage;
}

inline int cmd_export(Workspace& ws, const Options& o, std::ostream& out, std::ostream& err) {
    const bool jsonl = o.format == "jsonl";
    if (o.export_kind == "lemmas") {
        const auto id = o.lexicon.empty() ? std::string(kCanonicalLexicon) : o.lexicon;
        if (!ws.lexicons().has_lexicon(id)) throw Error(ErrorCode::UnknownLexicon, id);
        emit(o.out, out, [&](std::ostream& f) {
            jsonl ? ws.lexicons().export_jsonl(id, f) : ws.lexicons().export_tsv(id, f);
        });
        if (!o.out.empty()) out << "lexicon=" << id << " lemmas=" << ws.lexicons().descriptor(id).lemma_count << '\n';
        return 0;
    }
    if (o.export_kind == "mappings") {
        emit(o.out, out, [&](std::ostream& f) { jsonl ? ws.mappings().export_jsonl(f) : ws.mappings().export_tsv(f); });
        if (!o.out.empty()) out << "mappings=" << ws.mappings().size() << '\n';
        return 0;
    }
    if (o.export_kind == "corpus") {
        if (o.corpus_id.empty()) {
            err << "export corpus: --corpus is required\n";
            return kUsage;
        }
        emit(o.out, out, [&](std::ostream& f) {
            jsonl ? ws.corpora().export_jsonl(o.corpus_id, f) : ws.corpora().export_tsv(o.corpus_id, f);
        });
        if (!o.out.empty()) out << "corpus=" << o.corpus_id << " tokens=" << ws.corpora().get(o.corpus_id).tokens.size() << '\n';
        return 0;
    }
    err << "export: unknown kind '" << o.export_kind << "'\n";
    return kUsage;
}

inline int cmd_serve(Workspace& ws, const Options& o, std::ostream& out) {
    const auto [host, port] = parse_bind(o.bind);
    Service service(ws, {o.token});
    httplib::Server server;
    service.mount(server);
    static httplib::Server* running = nullptr;
    running = &server;
    std::signal(SIGINT, [](int) { if (running) running->stop(); });
    std::signal(SIGTERM, [](int) { if (running) running->stop(); });
    if (!server.bind_to_port(host, port)) throw Error(ErrorCode::Io, "cannot bind " + o.bind);
    out << "listening=" << host << ':' << port << '\n' << std::flush;
    server.listen_after_bind();
    running = nullptr;
    return 0;
}

inline const char* env_or(const char* name, const char* fallback) {
    const char* v = std::getenv(name);
    return v && *v ? v : fallback;
}

}  // namespace cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    cli::Options o;
    o.data_dir = cli::env_or("LEXLINK_DATA", "lexlink-data");
    o.token = cli::env_or("LEXLINK_TOKEN", "");

    CLI::App app{"Link Arabic lexicons to a canonical lemma bank"};
    app.require_subcommand(1);
    app.add_option("--data", o.data_dir, "Data directory (env LEXLINK_DATA)");
    app.add_flag("--fold-hamza", o.fold_hamza, "Fold hamza carriers when comparing; applies to a new data directory");
    app.add_option("--x2-weight", o.x2_weight, "Precision weight of X2; applies to a new data directory")
        ->check(CLI::Range(0, 100));

    auto* ingest = app.add_subcommand("ingest", "Ingest a lexicon or corpus TSV");
    ingest->add_option("--lexicon", o.lexicon_file, "Lexicon TSV");
    ingest->add_option("--corpus", o.corpus_file, "Corpus TSV");
    ingest->add_flag("--canonical", o.canonical, "Ingest into the canonical lexicon");
    ingest->add_flag("--strict,!--no-strict", o.strict, "Require full diacritization");
    ingest->add_option("--id", o.id, "Lexicon or corpus id (default: file stem)");
    ingest->add_option("--name", o.name);
    ingest->add_option("--category", o.category);
    ingest->add_option("--variety", o.variety, "Corpus variety (MSA, Classical or a dialect)");
    ingest->add_flag("--replace", o.replace, "Replace an existing lexicon");

    auto* automap = app.add_subcommand("automap", "Generate AUTO correspondences between two lexicons");
    automap->add_option("--source", o.source)->required();
    automap->add_option("--target", o.target)->required();
    automap->add_option("--out", o.out, "Write the new candidates as TSV");

    auto* import = app.add_subcommand("review-import", "Merge a mappings TSV into the store");
    import->add_option("file", o.import_file)->required();

    auto* link = app.add_subcommand("link-corpus", "Resolve corpus lemmas to canonical lemmas");
    link->add_option("corpus", o.corpus_id)->required();
    link->add_option("--relations", o.relations, "Comma-separated relation whitelist (default R1..R6)");

    auto* stats = app.add_subcommand("stats", "Print a report");
    stats->add_option("kind", o.stats_kind)->required()->check(CLI::IsMember({"coverage", "relations", "iaa"}));
    stats->add_option("--out", o.out, "Write the full report as TSV");
    stats->add_option("--annotations", o.annotations, "One mappings TSV per annotator");

    auto* exp = app.add_subcommand("export", "Export lemmas, mappings or a corpus");
    exp->add_option("kind", o.export_kind)->required()->check(CLI::IsMember({"lemmas", "mappings", "corpus"}));
    exp->add_option("--format", o.format)->check(CLI::IsMember({"tsv", "jsonl"}));
    exp->add_option("--lexicon", o.lexicon, "Lexicon to export (default: canonical)");
    exp->add_option("--corpus", o.corpus_id);
    exp->add_option("--out", o.out);

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--bind", o.bind, "host:port");
    serve->add_option("--token", o.token, "Bearer token (env LEXLINK_TOKEN)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return cli::kUsage;
    }

    try {
        WorkspaceSettings settings;
        settings.compare.fold_hamza = o.fold_hamza;
        settings.precision.x2_weight = o.x2_weight;
        auto ws = Workspace::open(o.data_dir, settings);
        const auto* sub = app.get_subcommands().front();
        const auto name = sub->get_name();
        if (name == "ingest") return cli::cmd_ingest(ws, o, out, err);
        if (name == "automap") return cli::cmd_automap(ws, o, out);
        if (name == "review-import") return cli::cmd_review_import(ws, o, out, err);
        if (name == "link-corpus") return cli::cmd_link(ws, o, out, err);
        if (name == "stats") return cli::cmd_stats(ws, o, out, err);
        if (name == "export") return cli::cmd_export(ws, o, out, err);
        if (name == "serve") return cli::cmd_serve(ws, o, out);
        return cli::kUsage;
    } catch (const ValidationError& e) {
        for (const auto& v : e.violations()) err << v.field << ": " << v.message << '\n';
        return cli::kData;
    } catch (const RowParseError& e) {
        for (const auto& i : e.issues()) err << i.field << ": " << i.reason << ": " << i.message << '\n';
        return cli::kData;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return cli::kData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return cli::kData;
    }
}

}  // namespace lexlink
