#include "bridger/service.hpp"

#include <charconv>
#include <chrono>
#include <fstream>

#include <httplib.h>

#include "bridger/metrics.hpp"
#include "bridger/serialize.hpp"

namespace bridger {

HttpStatus http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::parse_error: return {400, "parse_error"};
        case ErrorCode::invalid_argument: return {400, "invalid_argument"};
        case ErrorCode::unknown_author: return {404, "unknown_author"};
        case ErrorCode::unknown_author_on_paper: return {404, "unknown_author_on_paper"};
        case ErrorCode::unknown_paper: return {404, "unknown_paper"};
        case ErrorCode::unknown_candidate: return {404, "unknown_candidate"};
        case ErrorCode::unknown_session: return {404, "unknown_session"};
        case ErrorCode::empty_profile: return {422, "empty_profile"};
        case ErrorCode::missing_facet: return {422, "missing_facet"};
        case ErrorCode::empty_facet: return {422, "empty_facet"};
        case ErrorCode::no_embeddings: return {422, "no_embeddings"};
        case ErrorCode::zero_vector: return {422, "zero_vector"};
        case ErrorCode::dangling_reference: return {500, "dangling_reference"};
        case ErrorCode::dimension_mismatch: return {500, "dimension_mismatch"};
        case ErrorCode::version_mismatch: return {500, "version_mismatch"};
        case ErrorCode::invalid_record: return {500, "invalid_record"};
        case ErrorCode::storage_io: return {500, "storage_io"};
    }
    return {500, "internal"};
}

namespace {

ServiceResponse json_response(const Json& j, int status = 200) { return {status, dump(j)}; }

ServiceResponse error_response(int status, std::string_view code, const std::string& message) {
    return json_response(Json{{"error", {{"code", code}, {"message", message}}}}, status);
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto end = path.find('/', start);
        if (end == std::string::npos) end = path.size();
        if (end > start) parts.push_back(path.substr(start, end - start));
        start = end + 1;
    }
    return parts;
}

std::optional<std::string> param(const QueryParams& params, const std::string& name) {
    auto it = params.find(name);
    if (it == params.end()) return std::nullopt;
    return it->second;
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw Error(ErrorCode::invalid_argument,
                    std::string(what) + " must be a non-negative integer, got '" +
                        std::string(text) + "'");
    }
    return v;
}

template <typename T = std::uint64_t>
std::optional<T> number_param(const QueryParams& params, const std::string& name) {
    auto s = param(params, name);
    if (!s) return std::nullopt;
    auto v = parse_u64(*s, name);
    if (v > std::numeric_limits<T>::max()) {
        throw Error(ErrorCode::invalid_argument, name + " is out of range");
    }
    return static_cast<T>(v);
}

bool bool_param(const QueryParams& params, const std::string& name, bool fallback) {
    auto s = param(params, name);
    if (!s) return fallback;
    if (*s == "true" || *s == "1") return true;
    if (*s == "false" || *s == "0") return false;
    throw Error(ErrorCode::invalid_argument, name + " must be true or false");
}

std::uint64_t now_ms() {
    using namespace std::chrono;
    return static_cast<std::uint64_t>(
        duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count());
}

}  // namespace

AnonymizationKey load_or_create_key(const std::filesystem::path& path) {
    if (std::ifstream in(path); in) {
        std::string hex;
        in >> hex;
        return AnonymizationKey::from_hex(hex);
    }
    auto key = AnonymizationKey::random();
    std::ofstream out(path, std::ios::trunc);
    out << key.to_hex() << '\n';
    if (!out) throw Error(ErrorCode::storage_io, "cannot write key file " + path.string());
    return key;
}

struct Service::Server {
    httplib::Server http;
};

Service::Service(Engine engine, const std::filesystem::path& selections_path)
    : Service(std::move(engine), selections_path, [&] {
          if (selections_path.has_parent_path()) {
              std::filesystem::create_directories(selections_path.parent_path());
          }
          auto key_path = selections_path;
          key_path += ".key";
          return load_or_create_key(key_path);
      }()) {}

Service::Service(Engine engine, const std::filesystem::path& selections_path,
                 AnonymizationKey key)
    : engine_(std::move(engine)), log_(selections_path), key_(key) {}

Service::~Service() = default;

ServiceResponse Service::handle(const std::string& method, const std::string& path,
                                const QueryParams& params, const std::string& body) {
    try {
        return route(method, path, params, body);
    } catch (const Error& e) {
        auto s = http_status(e.code());
        return error_response(s.status, s.code, e.what());
    } catch (const Json::exception& e) {
        return error_response(400, "parse_error", e.what());
    } catch (const std::exception& e) {
        return error_response(500, "internal", e.what());
    }
}

ServiceResponse Service::route(const std::string& method, const std::string& path,
                               const QueryParams& params, const std::string& body) {
    const auto parts = split_path(path);
    const auto n = parts.size();
    auto is = [&](std::size_t i, std::string_view s) { return i < n && parts[i] == s; };
    const bool get = method == "GET";
    const bool post = method == "POST";
    const auto& corpus = engine_.corpus();

    if (n == 1 && is(0, "healthz") && get) return json_response(health_json(engine_));

    if (is(0, "authors") && n >= 2 && get) {
        const AuthorId author = parse_u64(parts[1], "author id");
        if (n == 2) return json_response(author_summary_json(engine_, author));
        if (!corpus.has_author(author)) {
            throw Error(ErrorCode::unknown_author, "unknown author " + std::to_string(author));
        }
        if (n == 3 && is(2, "personas")) {
            engine_.profiles().profile(author);
            ProfileStoreOptions options = engine_.profiles().options();
            if (auto m = param(params, "method")) {
                auto parsed = parse_persona_method(*m);
                if (!parsed) throw Error(ErrorCode::invalid_argument, "method must be paper or ego");
                options.persona_method = *parsed;
            }
            const auto personas = options == engine_.profiles().options()
                                      ? engine_.profiles().personas(author)
                                      : compute_personas(author, engine_.relevance(), options);
            return json_response(personas_json(engine_, author, personas));
        }
        if (n == 3 && is(2, "recommendations")) {
            const std::string condition = param(params, "condition").value_or("mixed");
            auto persona = number_param<std::uint32_t>(params, "persona");
            RecommendOptions options;
            options.seed = number_param(params, "seed").value_or(0);
            options.pool_size = number_param<std::size_t>(params, "pool_size").value_or(1000);
            const std::size_t k = number_param<std::size_t>(params, "k").value_or(0);
            auto result = recommend_by_tag(engine_, author, persona, condition, k, options);
            auto session = param(params, "session");
            if (!session) return json_response(candidates_json(result));
            std::map<AuthorId, std::string> tokens;
            for (const auto& c : result) {
                ShownCard shown{*session, author, persona, c.condition, c.author_id,
                                candidate_token(key_, *session, c.author_id), {}};
                tokens[c.author_id] = shown.token;
                auto prior = log_.find_shown(*session, shown.token);
                if (prior) {
                    shown.boxes = prior->boxes;
                    if (*prior == shown) continue;
                }
                log_.register_card(shown);
            }
            return json_response(candidates_json(result, &tokens));
        }
    }

    if (is(0, "cards") && n == 3 && get) {
        CardRequest req;
        req.user = parse_u64(parts[1], "user id");
        req.candidate = parse_u64(parts[2], "candidate id");
        req.persona = number_param<std::uint32_t>(params, "persona");
        if (auto s = param(params, "strategy")) {
            auto parsed = parse_term_strategy(*s);
            if (!parsed) throw Error(ErrorCode::invalid_argument, "unknown strategy '" + *s + "'");
            req.strategy = *parsed;
        }
        if (auto s = param(params, "paper_sort")) {
            auto parsed = parse_paper_sort(*s);
            if (!parsed) {
                throw Error(ErrorCode::invalid_argument, "paper_sort must be recency or similarity");
            }
            req.paper_sort = *parsed;
        }
        req.anonymize = bool_param(params, "anonymize", true);
        req.seed = number_param(params, "seed").value_or(0);
        req.session = param(params, "session").value_or("");
        std::optional<ShownCard> shown;
        if (!req.session.empty()) {
            shown = log_.find_shown(req.session, candidate_token(key_, req.session, req.candidate));
            if (shown) req.condition = shown->condition;
        }
        auto card = assemble_card(engine_, req, key_);
        if (!req.session.empty()) {
            ShownCard record = shown.value_or(ShownCard{req.session, req.user, req.persona,
                                                        "unlisted", req.candidate, card.token, {}});
            record.boxes = card.boxes();
            if (!shown || shown->boxes != record.boxes) log_.register_card(record);
        }
        return json_response(card_json(card));
    }

    if (is(0, "metrics") && get) {
        if (n == 2 && is(1, "report")) {
            auto session = param(params, "session");
            if (!session) throw Error(ErrorCode::invalid_argument, "session parameter required");
            if (!log_.has_session(*session)) {
                throw Error(ErrorCode::unknown_session, "unknown session '" + *session + "'");
            }
            std::vector<ShownPair> pairs;
            for (const auto& c : log_.shown(*session)) {
                if (c.condition != "unlisted") pairs.push_back({c.user, c.condition, c.candidate});
            }
            ReportOptions options;
            options.seed = number_param(params, "seed").value_or(0);
            options.resamples = number_param<std::size_t>(params, "resamples").value_or(1000);
            return json_response(Json(condition_report(corpus, pairs, options)));
        }
        if (n == 3) {
            const AuthorId user = parse_u64(parts[1], "user id");
            const AuthorId candidate = parse_u64(parts[2], "candidate id");
            return json_response(Json(distance_report(corpus, user, candidate)));
        }
    }

    if (is(0, "selections")) {
        if (n == 1 && post) {
            auto j = Json::parse(body);
            if (!j.contains("ts_ms")) j["ts_ms"] = now_ms();
            auto event = j.get<SelectionEvent>();
            log_.record(event);
            return json_response(Json{{"status", "recorded"}, {"event", event}}, 201);
        }
        if (n == 2 && get) {
            auto events = log_.export_session(parts[1]);
            auto summary = checked_ratio_summary(log_.shown(parts[1]), events);
            return json_response(
                Json{{"session", parts[1]}, {"events", events}, {"summary", summary}});
        }
    }

    if (!get && !post) return error_response(405, "method_not_allowed", method + " not supported");
    return error_response(404, "not_found", "no route for " + method + " " + path);
}

void Service::make_server() {
    if (server_) return;
    server_ = std::make_unique<Server>();
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
        QueryParams params(req.params.begin(), req.params.end());
        auto out = handle(req.method, req.path, params, req.body);
        res.status = out.status;
        res.set_content(out.body, "application/json");
    };
    server_->http.Get(".*", forward);
    server_->http.Post(".*", forward);
}

void Service::listen(const std::string& host, int port) {
    make_server();
    if (!server_->http.listen(host, port)) {
        throw Error(ErrorCode::storage_io, "cannot bind " + host + ":" + std::to_string(port));
    }
}

int Service::bind_any_port(const std::string& host) {
    make_server();
    int port = server_->http.bind_to_any_port(host);
    if (port < 0) throw Error(ErrorCode::storage_io, "cannot bind " + host);
    return port;
}

void Service::listen_after_bind() {
    make_server();
    server_->http.listen_after_bind();
}

void Service::stop() {
    if (server_) server_->http.stop();
}

}  // namespace bridger
