#pragma once

// HTTP/JSON interface over a Workspace.
//
// Routing is transport independent (Service::handle) so it can be exercised
// without sockets; Service::mount wires it into an httplib server.

#include "lexlink/metrics.hpp"
#include "lexlink/workspace.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <charconv>
#include <map>
#include <mutex>
#include <regex>
#include <shared_mutex>
#include <string>

namespace lexlink {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

struct ApiRequest {
    std::string method;  // GET or POST
    std::string path;
    std::map<std::string, std::string> query;
    std::string authorization;  // raw Authorization header
    std::string body;
};

struct ApiResponse {
    int status = 200;
    Json body;
};

struct ServiceConfig {
    std::string token;  // empty disables auth
};

namespace api {

inline Json word_list(const WordSet& s) {
    Json out = Json::array();
    for (const auto& w : s) out.push_back(w.raw);
    return out;
}

inline Json summary_json(const LemmaSummary& s) {
    Json j;
    j["ref"] = s.ref.str();
    j["lexicon"] = s.ref.lexicon;
    j["local_id"] = s.ref.local_id;
    j["spellings"] = s.spellings;
    j["pos"] = s.pos == PosTag::UNKNOWN ? "" : std::string(to_string(s.pos));
    j["roots"] = word_list(s.roots);
    j["singulars"] = word_list(s.forms.singulars);
    j["duals"] = word_list(s.forms.duals);
    j["plurals"] = word_list(s.forms.plurals);
    j["pv"] = word_list(s.forms.pv);
    j["iv"] = word_list(s.forms.iv);
    j["cv"] = word_list(s.forms.cv);
    return j;
}

inline Json correspondence_json(const Correspondence& c, const PrecisionTable& precision) {
    Json j;
    j["id"] = c.id;
    j["l1_ref"] = c.l1.str();
    j["l2_ref"] = c.l2.str();
    j["relation_code"] = code_of(c.relation);
    j["precision"] = precision(c.relation);
    j["status"] = to_string(c.status);
    j["provenance"] = to_string(c.provenance);
    j["reviewer"] = c.reviewer;
    j["timestamp"] = c.timestamp;
    return j;
}

inline std::optional<std::size_t> parse_count(const std::string& s) {
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || v == 0) return std::nullopt;
    return v;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    for (auto& part : tsv::split(s, ','))
        if (!part.empty()) out.push_back(part);
    return out;
}

}  // namespace api

class Service {
public:
    Service(Workspace& workspace, ServiceConfig config = {}) : ws_(workspace), config_(std::move(config)) {}

    ApiResponse handle(const ApiRequest& req) {
        if (!config_.token.empty() && req.authorization != "Bearer " + config_.token)
            return error(401, "Unauthorized", "missing or invalid bearer token");
        try {
            return route(req);
        } catch (const ValidationError& e) {
            return violations(e.violations());
        } catch (const RowParseError& e) {
            std::vector<Violation> vs;
            for (const auto& i : e.issues()) vs.push_back({i.field, i.message});
            return violations(vs);
        } catch (const Error& e) {
            switch (e.code()) {
            case ErrorCode::UnknownCorrespondence:
            case ErrorCode::UnknownLemma:
            case ErrorCode::UnknownLexicon:
            case ErrorCode::UnknownCorpus: return error(404, e);
            case ErrorCode::AlreadyDecided:
            case ErrorCode::DuplicatePair: return error(409, e);
            case ErrorCode::Io:
            case ErrorCode::StoreLocked: return error(500, e);
            default: return error(400, e);
            }
        } catch (const nlohmann::json::exception& e) {
            return error(400, "MalformedJson", e.what());
        }
    }

    void mount(httplib::Server& server) {
        auto adapt = [this](const httplib::Request& r, httplib::Response& res) {
            ApiRequest req{r.method, r.path, {}, r.get_header_value("Authorization"), r.body};
            for (const auto& [k, v] : r.params) req.query[k] = v;
            const auto out = handle(req);
            res.status = out.status;
            res.set_content(out.body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace),
                            "application/json; charset=utf-8");
        };
        server.Get(R"(/api/.*)", adapt);
        server.Post(R"(/api/.*)", adapt);
    }

private:
    ApiResponse route(const ApiRequest& req) {
        static const std::regex decision_path(R"(^/api/mappings/(\d+)/decision$)");
        static const std::regex stats_path(R"(^/api/stats/(coverage|relations|iaa)$)");
        std::smatch m;
        if (req.method == "GET") {
            std::shared_lock lock(mutex_);
            if (req.path == "/api/lemmas") return get_lemmas(req);
            if (req.path == "/api/mappings") return get_mappings(req);
            if (std::regex_match(req.path, m, stats_path)) return get_stats(m[1].str(), req);
        } else if (req.method == "POST") {
            std::unique_lock lock(mutex_);
            if (req.path == "/api/lemmas") return post_lemma(req);
            if (std::regex_match(req.path, m, decision_path)) return post_decision(std::stoull(m[1].str()), req);
        }
        return error(404, "NotFound", req.method + " " + req.path);
    }

    static Json envelope() {
        Json j;
        j["schema_version"] = kSchemaVersion;
        return j;
    }

    static ApiResponse error(int status, const std::string& code, const std::string& message) {
        auto j = envelope();
        j["error"] = {{"code", code}, {"message", message}};
        return {status, std::move(j)};
    }

    static ApiResponse error(int status, const Error& e) {
        return error(status, std::string(to_string(e.code())), e.what());
    }

    static ApiResponse violations(const std::vector<Violation>& vs) {
        auto r = error(422, "ValidationFailure", "lemma payload is invalid");
        r.body["violations"] = Json::array();
        for (const auto& v : vs) r.body["violations"].push_back({{"field", v.field}, {"message", v.message}});
        return r;
    }

    static std::pair<std::size_t, std::size_t> paging(const ApiRequest& req) {
        std::size_t page = 1, size = 50;
        if (const auto it = req.query.find("page"); it != req.query.end()) {
            const auto v = api::parse_count(it->second);
            if (!v) throw Error(ErrorCode::InvalidQuery, "page must be a positive integer");
            page = *v;
        }
        if (const auto it = req.query.find("page_size"); it != req.query.end()) {
            const auto v = api::parse_count(it->second);
            if (!v || *v > 1000) throw Error(ErrorCode::InvalidQuery, "page_size must be in 1..1000");
            size = *v;
        }
        return {page, size};
    }

    ApiResponse get_lemmas(const ApiRequest& req) const {
        SearchFilters f;
        if (const auto it = req.query.find("pos"); it != req.query.end() && !it->second.empty()) {
            const auto p = parse_pos(it->second);
            if (!p) throw Error(ErrorCode::InvalidQuery, "unknown pos '" + it->second + "'");
            f.pos = *p;
        }
        if (const auto it = req.query.find("lexicon"); it != req.query.end() && !it->second.empty()) {
            if (!ws_.lexicons().has_lexicon(it->second)) throw Error(ErrorCode::InvalidQuery, "unknown lexicon '" + it->second + "'");
            f.lexicon = it->second;
        }
        if (const auto it = req.query.find("mapped"); it != req.query.end() && !it->second.empty()) {
            if (it->second != "true" && it->second != "false") throw Error(ErrorCode::InvalidQuery, "mapped must be true or false");
            f.mapped = it->second == "true";
        }
        const auto [page, size] = paging(req);
        const auto q = req.query.contains("q") ? req.query.at("q") : std::string();
        const auto result = ws_.search(q, f, page, size);
        auto j = envelope();
        j["total"] = result.total;
        j["page"] = result.page;
        j["page_size"] = result.page_size;
        j["items"] = Json::array();
        for (const auto& s : result.items) j["items"].push_back(api::summary_json(s));
        return {200, std::move(j)};
    }

    Json side(const LemmaRef& ref) const {
        if (const auto s = ws_.lexicons().summary(ref)) return api::summary_json(*s);
        Json j;
        j["ref"] = ref.str();
        j["lexicon"] = ref.lexicon;
        j["local_id"] = ref.local_id;
        j["missing"] = true;
        return j;
    }

    ApiResponse get_mappings(const ApiRequest& req) const {
        Status status = Status::Auto;
        if (const auto it = req.query.find("status"); it != req.query.end()) {
            auto upper = it->second;
            for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            const auto s = parse_status(upper);
            if (!s) throw Error(ErrorCode::InvalidQuery, "status must be auto, confirmed or rejected");
            status = *s;
        }
        const auto [page, size] = paging(req);
        const auto& precision = ws_.mappings().precision_table();
        std::size_t total = 0;
        Json items = Json::array();
        const std::size_t first = (page - 1) * size;
        for (const auto& c : ws_.mappings().all()) {
            if (c.status != status) continue;
            if (total >= first && total < first + size) {
                Json item;
                item["id"] = c.id;
                item["l1"] = side(c.l1);
                item["l2"] = side(c.l2);
                item["provenance"] = to_string(c.provenance);
                item["suggested_relation"] = code_of(c.relation);
                item["correspondence"] = api::correspondence_json(c, precision);
                items.push_back(std::move(item));
            }
            ++total;
        }
        auto j = envelope();
        j["total"] = total;
        j["page"] = page;
        j["page_size"] = size;
        j["items"] = std::move(items);
        return {200, std::move(j)};
    }

    ApiResponse post_decision(std::uint64_t id, const ApiRequest& req) {
        const auto body = Json::parse(req.body);
        if (!body.is_object()) throw Error(ErrorCode::InvalidQuery, "body must be a JSON object");
        if (!ws_.mappings().find(id)) throw Error(ErrorCode::UnknownCorrespondence, std::to_string(id));
        const auto reviewer = body.value("reviewer", std::string());
        if (reviewer.empty()) throw Error(ErrorCode::InvalidQuery, "reviewer is required");
        const bool reject = body.value("reject", false);
        const bool has_relation = body.contains("relation") && !body["relation"].is_null();
        if (reject == has_relation) throw Error(ErrorCode::InvalidQuery, "give exactly one of relation or reject");
        const auto decision = reject ? Decision::reject()
                                     : Decision::confirm(relation_or_throw(body["relation"].get<std::string>()));
        const auto& c = ws_.review(id, decision, reviewer, body.value("force", false));
        auto j = envelope();
        j["correspondence"] = api::correspondence_json(c, ws_.mappings().precision_table());
        return {200, std::move(j)};
    }

    ApiResponse post_lemma(const ApiRequest& req) {
        const auto body = Json::parse(req.body);
        if (!body.is_object()) throw RowParseError("MalformedRow", "lemma", "must be a JSON object");
        InsertOptions opt;
        opt.strict = body.value("strict", true);
        opt.all_senses_proper = body.value("all_senses_proper", false);
        auto lemma = canonical_from_row(row_from_json(nlohmann::json::parse(req.body)));
        const auto result = ws_.insert_manual_lemma(std::move(lemma), opt);
        auto j = envelope();
        j["id"] = result.id;
        j["ref"] = LemmaRef::canonical(result.id).str();
        j["warnings"] = result.warnings;
        return {201, std::move(j)};
    }

    ApiResponse get_stats(const std::string& kind, const ApiRequest& req) const {
        auto j = envelope();
        j["kind"] = kind;
        if (kind == "relations") {
            std::optional<std::pair<std::string, std::string>> scope;
            if (const auto it = req.query.find("scope"); it != req.query.end() && !it->second.empty()) {
                const auto parts = api::split_list(it->second);
                if (parts.size() != 2) throw Error(ErrorCode::InvalidQuery, "scope must be two lexicon ids");
                scope = std::pair{parts[0], parts[1]};
            }
            const auto counts = ws_.mappings().relation_counts(scope);
            const auto& precision = ws_.mappings().precision_table();
            std::size_t total = 0;
            j["relations"] = Json::array();
            for (const auto& [rel, n] : counts) {
                j["relations"].push_back(
                    {{"code", code_of(rel)}, {"label", label_of(rel)}, {"precision", precision(rel)}, {"count", n}});
                total += n;
            }
            j["total"] = total;
        } else if (kind == "coverage") {
            std::vector<std::string> sources;
            if (const auto it = req.query.find("sources"); it != req.query.end() && !it->second.empty()) {
                sources = api::split_list(it->second);
            } else {
                for (const auto& d : ws_.lexicons().lexicons())
                    if (!d.canonical) sources.push_back(d.id);
            }
            j["pos"] = to_json(pos_coverage(ws_.lexicons(), sources));
            j["lexicons"] = Json::array();
            for (const auto& row : lexicon_coverage(ws_.lexicons(), ws_.mappings()))
                j["lexicons"].push_back({{"lexicon", row.lexicon}, {"lemmas", row.lemmas}, {"mapped", row.mapped}});
            j["corpora"] = Json::array();
            for (const auto& d : ws_.corpora().corpora()) {
                const auto c = ws_.corpora().coverage_report(d.id);
                j["corpora"].push_back({{"corpus", d.id},
                                        {"variety", d.variety},
                                        {"tokens", c.tokens.total},
                                        {"tokens_mapped", c.tokens.mapped},
                                        {"tokens_percent", c.tokens.percent()},
                                        {"lemmas", c.lemmas.total},
                                        {"lemmas_mapped", c.lemmas.mapped},
                                        {"lemmas_percent", c.lemmas.percent()}});
            }
        } else {
            const auto labels = restrict_to_shared_items(labels_by_reviewer(ws_.mappings().all()));
            j["annotators"] = Json::array();
            for (const auto& [who, _] : labels) j["annotators"].push_back(who);
            j["items"] = labels.empty() ? 0 : labels.begin()->second.size();
            j["pairs"] = Json::array();
            if (labels.size() >= 2 && !labels.begin()->second.empty()) {
                for (const auto& p : pairwise_iaa(labels))
                    j["pairs"].push_back({{"a", p.first},
                                          {"b", p.second},
                                          {"kappa", p.result.kappa},
                                          {"kappa_display", format_kappa(p.result.kappa)},
                                          {"observed", p.result.observed},
                                          {"expected", p.result.expected},
                                          {"degenerate_marginals", p.result.degenerate_marginals}});
            }
        }
        return {200, std::move(j)};
    }

    Workspace& ws_;
    ServiceConfig config_;
    mutable std::shared_mutex mutex_;
};

/// Parses "host:port"; a bare port binds to 127.0.0.1.
inline std::pair<std::string, int> parse_bind(const std::string& bind) {
    const auto colon = bind.rfind(':');
    const std::string host = colon == std::string::npos ? "127.0.0.1" : bind.substr(0, colon);
    const std::string port = colon == std::string::npos ? bind : bind.substr(colon + 1);
    int p = 0;
    const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), p);
    if (ec != std::errc{} || ptr != port.data() + port.size() || p < 0 || p > 65535)
        throw Error(ErrorCode::InvalidQuery, "bad bind address '" + bind + "'");
    return {host.empty() ? "127.0.0.1" : host, p};
}

}  // namespace lexlink
