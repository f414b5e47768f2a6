#include "bridger/cards.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <tuple>

#include <sodium.h>

#include "bridger/serialize.hpp"

namespace bridger {

std::string_view to_string(CardSectionKind k) {
    switch (k) {
        case CardSectionKind::papers: return "papers";
        case CardSectionKind::topics: return "topics";
        case CardSectionKind::tasks: return "tasks";
        case CardSectionKind::methods: return "methods";
        case CardSectionKind::resources: return "resources";
    }
    return "unknown";
}

std::string_view item_kind(CardSectionKind k) {
    switch (k) {
        case CardSectionKind::papers: return "paper";
        case CardSectionKind::topics: return "topic";
        case CardSectionKind::tasks: return "task";
        case CardSectionKind::methods: return "method";
        case CardSectionKind::resources: return "resource";
    }
    return "unknown";
}

bool is_item_kind(std::string_view kind) {
    for (auto k : kCardSections) {
        if (item_kind(k) == kind) return true;
    }
    return false;
}

std::map<std::string, std::size_t> AuthorCard::boxes() const {
    std::map<std::string, std::size_t> out;
    for (const auto& s : sections) out[std::string(item_kind(s.kind))] = s.size();
    return out;
}

namespace {

void ensure_sodium() {
    static const int status = sodium_init();
    if (status < 0) throw Error(ErrorCode::storage_io, "libsodium failed to initialize");
}

Facet section_facet(CardSectionKind k) {
    switch (k) {
        case CardSectionKind::topics: return Facet::topic;
        case CardSectionKind::tasks: return Facet::task;
        case CardSectionKind::methods: return Facet::method;
        case CardSectionKind::resources: return Facet::resource;
        case CardSectionKind::papers: break;
    }
    throw Error(ErrorCode::invalid_argument, "papers section has no facet");
}

std::vector<ScoredTerm> section_terms(const Engine& engine, const CardRequest& request,
                                      Facet facet) {
    TermRankRequest rank;
    rank.strategy = request.strategy;
    rank.seed = request.seed;
    rank.user = request.user;
    rank.user_persona = request.persona;
    const bool needs_embedding = request.strategy == TermStrategy::textrank ||
                                 request.strategy == TermStrategy::similarity_to_user;
    if (needs_embedding && !is_embedded(facet)) rank.strategy = TermStrategy::tfidf;
    try {
        return rank_terms(engine, request.candidate, facet, rank);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::empty_facet) return {};
        if (e.code() != ErrorCode::missing_facet) throw;
    }
    // The user lacks the facet, or the candidate has no embedded terms of it.
    rank.strategy = TermStrategy::tfidf;
    try {
        return rank_terms(engine, request.candidate, facet, rank);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::empty_facet) return {};
        throw;
    }
}

}  // namespace

AnonymizationKey AnonymizationKey::random() {
    ensure_sodium();
    AnonymizationKey key;
    randombytes_buf(key.bytes.data(), key.bytes.size());
    return key;
}

AnonymizationKey AnonymizationKey::from_hex(std::string_view hex) {
    ensure_sodium();
    AnonymizationKey key;
    std::size_t len = 0;
    if (hex.size() != 2 * key.bytes.size() ||
        sodium_hex2bin(key.bytes.data(), key.bytes.size(), hex.data(), hex.size(), nullptr, &len,
                       nullptr) != 0 ||
        len != key.bytes.size()) {
        throw Error(ErrorCode::parse_error, "anonymization key must be 32 hex digits");
    }
    return key;
}

std::string AnonymizationKey::to_hex() const {
    std::string out(2 * bytes.size() + 1, '\0');
    sodium_bin2hex(out.data(), out.size(), bytes.data(), bytes.size());
    out.pop_back();
    return out;
}

std::string candidate_token(const AnonymizationKey& key, std::string_view session,
                            AuthorId candidate) {
    static_assert(crypto_shorthash_KEYBYTES == 16);
    ensure_sodium();
    std::string message(session);
    message.push_back('\0');
    for (int i = 0; i < 8; ++i) message.push_back(static_cast<char>((candidate >> (8 * i)) & 0xff));
    unsigned char hash[crypto_shorthash_BYTES];
    crypto_shorthash(hash, reinterpret_cast<const unsigned char*>(message.data()), message.size(),
                     key.bytes.data());
    std::string hex(2 * sizeof hash + 1, '\0');
    sodium_bin2hex(hex.data(), hex.size(), hash, sizeof hash);
    hex.pop_back();
    return "c" + hex;
}

std::string_view position_label(const PaperRecord& paper, AuthorId author) {
    const auto& a = paper.authors;
    auto it = std::find(a.begin(), a.end(), author);
    if (it == a.end()) {
        throw Error(ErrorCode::unknown_author_on_paper, "author " + std::to_string(author) +
                                                            " is not on paper " +
                                                            std::to_string(paper.paper_id));
    }
    if (a.size() == 1) return "sole";
    if (it == a.begin()) return "first";
    if (it + 1 == a.end()) return "last";
    return "middle";
}

AuthorCard assemble_card(const Engine& engine, const CardRequest& request,
                         const AnonymizationKey& key) {
    const auto& corpus = engine.corpus();
    if (!corpus.has_author(request.user)) {
        throw Error(ErrorCode::unknown_author, "unknown author " + std::to_string(request.user));
    }
    if (!engine.profiles().find(request.candidate)) {
        throw Error(ErrorCode::unknown_candidate,
                    "no profile for candidate " + std::to_string(request.candidate));
    }
    if (request.persona) engine.profiles().persona(request.user, *request.persona);

    AuthorCard card;
    card.candidate_id = request.candidate;
    card.token = candidate_token(key, request.session, request.candidate);
    card.anonymized = request.anonymize;
    card.condition = request.condition;
    card.strategy = request.strategy;
    card.paper_sort = request.paper_sort;
    if (!request.anonymize) {
        const auto& rec = corpus.author(request.candidate);
        card.name = rec.display_name;
        card.affiliation = rec.affiliation;
    }

    for (std::size_t i = 0; i < kCardSections.size(); ++i) {
        auto& section = card.sections[i];
        section.kind = kCardSections[i];
        if (section.kind == CardSectionKind::papers) {
            auto ranked = rank_papers(engine, request.candidate, request.user, request.persona,
                                      request.paper_sort);
            section.available = ranked.size();
            ranked.resize(std::min(ranked.size(), kCardMaxItems));
            for (const auto& r : ranked) {
                const auto& p = corpus.paper(r.paper_id);
                section.papers.push_back({p.paper_id, p.title, p.year,
                                          std::string(position_label(p, request.candidate))});
            }
            continue;
        }
        auto terms = section_terms(engine, request, section_facet(section.kind));
        section.available = terms.size();
        terms.resize(std::min(terms.size(), kCardMaxItems));
        for (const auto& t : terms) {
            section.terms.push_back({t.term_id, corpus.term(t.term_id).surface, t.score});
        }
    }
    return card;
}

SessionLog::SessionLog(std::filesystem::path events_path) : events_path_(std::move(events_path)) {
    auto replay = [](const std::filesystem::path& path, auto&& apply) {
        std::ifstream in(path);
        if (!in) return;
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) {
            ++n;
            if (line.empty()) continue;
            try {
                apply(Json::parse(line));
            } catch (const Json::exception& e) {
                throw Error(ErrorCode::parse_error,
                            path.filename().string() + ":" + std::to_string(n) + ": " + e.what());
            }
        }
    };
    replay(shown_path(), [&](const Json& j) { apply_shown(j.get<ShownCard>()); });
    replay(events_path_, [&](const Json& j) {
        auto e = j.get<SelectionEvent>();
        events_[e.session].push_back(std::move(e));
    });
    if (events_path_.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(events_path_.parent_path(), ec);
    }
    events_out_.open(events_path_, std::ios::app);
    shown_out_.open(shown_path(), std::ios::app);
    if (!events_out_ || !shown_out_) {
        throw Error(ErrorCode::storage_io, "cannot open session log " + events_path_.string());
    }
}

std::filesystem::path SessionLog::shown_path() const {
    auto p = events_path_;
    p += ".shown.jsonl";
    return p;
}

void SessionLog::append(std::ofstream& out, const std::filesystem::path& path,
                        const std::string& line) {
    out << line << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::storage_io, "failed appending to " + path.string());
}

void SessionLog::apply_shown(ShownCard card) {
    auto& slot = shown_[card.session][card.token];
    slot = std::move(card);
}

void SessionLog::register_card(const ShownCard& card) {
    if (card.session.empty()) throw Error(ErrorCode::invalid_argument, "empty session id");
    std::unique_lock lock(mutex_);
    append(shown_out_, shown_path(), dump(Json(card)));
    apply_shown(card);
}

bool SessionLog::has_session(const std::string& session) const {
    std::shared_lock lock(mutex_);
    return shown_.count(session) != 0;
}

std::vector<ShownCard> SessionLog::shown(const std::string& session) const {
    std::shared_lock lock(mutex_);
    std::vector<ShownCard> out;
    auto it = shown_.find(session);
    if (it == shown_.end()) return out;
    for (const auto& [token, card] : it->second) out.push_back(card);
    return out;
}

std::optional<ShownCard> SessionLog::find_shown(const std::string& session,
                                                const std::string& token) const {
    std::shared_lock lock(mutex_);
    auto it = shown_.find(session);
    if (it == shown_.end()) return std::nullopt;
    auto jt = it->second.find(token);
    if (jt == it->second.end()) return std::nullopt;
    return jt->second;
}

void SessionLog::record(const SelectionEvent& event) {
    if (!is_item_kind(event.kind)) {
        throw Error(ErrorCode::invalid_argument, "unknown item kind '" + event.kind + "'");
    }
    std::unique_lock lock(mutex_);
    auto it = shown_.find(event.session);
    if (it == shown_.end()) {
        throw Error(ErrorCode::unknown_session, "unknown session '" + event.session + "'");
    }
    if (!it->second.count(event.candidate_token)) {
        throw Error(ErrorCode::unknown_candidate,
                    "token '" + event.candidate_token + "' was not shown in this session");
    }
    append(events_out_, events_path_, dump(Json(event)));
    events_[event.session].push_back(event);
}

std::vector<SelectionEvent> SessionLog::export_session(const std::string& session) const {
    std::shared_lock lock(mutex_);
    if (!shown_.count(session)) {
        throw Error(ErrorCode::unknown_session, "unknown session '" + session + "'");
    }
    std::vector<SelectionEvent> out;
    if (auto it = events_.find(session); it != events_.end()) out = it->second;
    std::stable_sort(out.begin(), out.end(), [](const SelectionEvent& a, const SelectionEvent& b) {
        return a.ts_ms < b.ts_ms;
    });
    return out;
}

RatioSummary checked_ratio_summary(const std::vector<ShownCard>& shown,
                                   const std::vector<SelectionEvent>& events) {
    auto ordered = events;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const SelectionEvent& a, const SelectionEvent& b) {
                         return a.ts_ms < b.ts_ms;
                     });
    // (session, token, kind, item) -> final checked state
    std::map<std::tuple<std::string, std::string, std::string, std::uint64_t>, bool> state;
    for (const auto& e : ordered) state[{e.session, e.candidate_token, e.kind, e.item}] = e.checked;

    std::map<std::tuple<std::string, std::string, std::string>, std::size_t> checked_by_kind;
    for (const auto& [key, checked] : state) {
        if (!checked) continue;
        const auto& [session, token, kind, item] = key;
        ++checked_by_kind[{session, token, kind}];
    }

    RatioSummary out;
    // user -> condition -> ratios; (condition, kind) -> user -> ratios
    std::map<AuthorId, std::map<std::string, std::vector<double>>> by_user;
    std::map<std::pair<std::string, std::string>, std::map<AuthorId, std::vector<double>>> by_kind;
    std::map<AuthorId, std::vector<double>> all_by_user;
    for (const auto& card : shown) {
        CardRatio r{card.token, card.user, card.condition, 0, 0, 0.0};
        for (const auto& [kind, boxes] : card.boxes) {
            std::size_t checked = 0;
            if (auto it = checked_by_kind.find({card.session, card.token, kind});
                it != checked_by_kind.end()) {
                checked = std::min(it->second, boxes);
            }
            r.checked += checked;
            r.boxes += boxes;
            if (boxes) {
                by_kind[{card.condition, kind}][card.user].push_back(
                    static_cast<double>(checked) / static_cast<double>(boxes));
            }
        }
        if (r.boxes == 0) continue;
        r.ratio = static_cast<double>(r.checked) / static_cast<double>(r.boxes);
        by_user[card.user][card.condition].push_back(r.ratio);
        all_by_user[card.user].push_back(r.ratio);
        out.cards.push_back(std::move(r));
    }

    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    std::map<std::string, std::vector<double>> condition_user_means;
    for (const auto& [user, conditions] : by_user) {
        for (const auto& [condition, ratios] : conditions) {
            const double m = mean(ratios);
            out.per_user_condition[{user, condition}] = m;
            condition_user_means[condition].push_back(m);
        }
    }
    for (const auto& [condition, means] : condition_user_means) {
        out.per_condition[condition] = mean(means);
    }
    for (const auto& [key, users] : by_kind) {
        std::vector<double> means;
        for (const auto& [user, ratios] : users) means.push_back(mean(ratios));
        out.per_condition_kind[key] = mean(means);
    }
    std::vector<double> user_means;
    for (const auto& [user, ratios] : all_by_user) user_means.push_back(mean(ratios));
    out.overall = mean(user_means);
    return out;
}

}  // namespace bridger
