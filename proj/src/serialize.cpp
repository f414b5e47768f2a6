#include "bridger/serialize.hpp"

#include <algorithm>

namespace bridger {

namespace {

template <typename T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

}  // namespace

void to_json(Json& j, const Candidate& c) {
    j = Json{{"author_id", c.author_id},
             {"sim_score", c.sim_score},
             {"contrast_score", optional_json(c.contrast_score)},
             {"condition", c.condition}};
}

void to_json(Json& j, const DistanceReport& r) {
    j = Json{{"user", r.user},
             {"candidate", r.candidate},
             {"incoming_citation_jaccard", optional_json(r.incoming_citation_jaccard)},
             {"outgoing_citation_jaccard", optional_json(r.outgoing_citation_jaccard)},
             {"venue_jaccard", optional_json(r.venue_jaccard)},
             {"coauthor_hops", optional_json(r.coauthor_hops)}};
}

void to_json(Json& j, const MetricSummary& s) {
    j = Json{{"mean", optional_json(s.mean)},
             {"ci_low", optional_json(s.ci_low)},
             {"ci_high", optional_json(s.ci_high)},
             {"count", s.count},
             {"skipped", s.skipped}};
}

void to_json(Json& j, const ConditionReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json pooled = Json::object();
        Json per_user = Json::object();
        for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
            const std::string name(to_string(kAllMetrics[m]));
            pooled[name] = row.pooled[m];
            per_user[name] = row.per_user[m];
        }
        rows.push_back({{"condition", row.condition},
                        {"pairs", row.pairs},
                        {"users", row.users},
                        {"pooled", pooled},
                        {"per_user", per_user}});
    }
    j = Json{{"conditions", rows}, {"warnings", r.warnings}};
}

void to_json(Json& j, const SelectionEvent& e) {
    j = Json{{"session", e.session},       {"user", e.user}, {"candidate_token", e.candidate_token},
             {"kind", e.kind},             {"item", e.item}, {"checked", e.checked},
             {"ts_ms", e.ts_ms}};
}

void from_json(const Json& j, SelectionEvent& e) {
    j.at("session").get_to(e.session);
    j.at("user").get_to(e.user);
    j.at("candidate_token").get_to(e.candidate_token);
    j.at("kind").get_to(e.kind);
    j.at("item").get_to(e.item);
    j.at("checked").get_to(e.checked);
    j.at("ts_ms").get_to(e.ts_ms);
}

void to_json(Json& j, const ShownCard& c) {
    j = Json{{"session", c.session},   {"user", c.user},
             {"persona", optional_json(c.persona)},
             {"condition", c.condition}, {"candidate", c.candidate},
             {"token", c.token},       {"boxes", c.boxes}};
}

void from_json(const Json& j, ShownCard& c) {
    j.at("session").get_to(c.session);
    j.at("user").get_to(c.user);
    if (const auto& p = j.at("persona"); !p.is_null()) c.persona = p.get<std::uint32_t>();
    j.at("condition").get_to(c.condition);
    j.at("candidate").get_to(c.candidate);
    j.at("token").get_to(c.token);
    j.at("boxes").get_to(c.boxes);
}

void to_json(Json& j, const RatioSummary& s) {
    Json cards = Json::array();
    for (const auto& c : s.cards) {
        cards.push_back({{"token", c.token},
                         {"user", c.user},
                         {"condition", c.condition},
                         {"checked", c.checked},
                         {"boxes", c.boxes},
                         {"ratio", c.ratio}});
    }
    Json per_user = Json::array();
    for (const auto& [key, ratio] : s.per_user_condition) {
        per_user.push_back({{"user", key.first}, {"condition", key.second}, {"ratio", ratio}});
    }
    Json per_kind = Json::array();
    for (const auto& [key, ratio] : s.per_condition_kind) {
        per_kind.push_back({{"condition", key.first}, {"kind", key.second}, {"ratio", ratio}});
    }
    j = Json{{"overall", s.overall},
             {"per_condition", s.per_condition},
             {"per_user_condition", per_user},
             {"per_condition_kind", per_kind},
             {"cards", cards}};
}

void to_json(Json& j, const ShownPair& p) {
    j = Json{{"user", p.user}, {"condition", p.condition}, {"candidate", p.candidate}};
}

void from_json(const Json& j, ShownPair& p) {
    j.at("user").get_to(p.user);
    j.at("condition").get_to(p.condition);
    j.at("candidate").get_to(p.candidate);
}

Json candidates_json(const std::vector<Candidate>& candidates,
                     const std::map<AuthorId, std::string>* tokens) {
    Json out = Json::array();
    for (const auto& c : candidates) {
        Json j = c;
        if (tokens) {
            if (auto it = tokens->find(c.author_id); it != tokens->end()) j["token"] = it->second;
        }
        out.push_back(std::move(j));
    }
    return out;
}

Json card_json(const AuthorCard& card) {
    Json sections = Json::object();
    for (const auto& s : card.sections) {
        const std::string kind(item_kind(s.kind));
        Json pages = Json::array();
        for (std::size_t start = 0; start < s.size(); start += kCardPageSize) {
            Json page = Json::array();
            const auto end = std::min(s.size(), start + kCardPageSize);
            for (std::size_t i = start; i < end; ++i) {
                if (s.kind == CardSectionKind::papers) {
                    const auto& p = s.papers[i];
                    page.push_back({{"kind", kind},
                                    {"paper_id", p.paper_id},
                                    {"title", p.title},
                                    {"year", p.year},
                                    {"position", p.position}});
                } else {
                    const auto& t = s.terms[i];
                    page.push_back({{"kind", kind},
                                    {"term_id", t.term_id},
                                    {"surface", t.surface},
                                    {"score", t.score}});
                }
            }
            pages.push_back(std::move(page));
        }
        sections[std::string(to_string(s.kind))] =
            Json{{"available", s.available}, {"count", s.size()}, {"pages", pages}};
    }
    Json j{{"token", card.token},
           {"anonymized", card.anonymized},
           {"strategy", std::string(to_string(card.strategy))},
           {"paper_sort", std::string(to_string(card.paper_sort))},
           {"sections", sections}};
    if (!card.anonymized) {
        j["author_id"] = card.candidate_id;
        j["name"] = optional_json(card.name);
        j["affiliation"] = optional_json(card.affiliation);
    }
    return j;
}

Json author_summary_json(const Engine& engine, AuthorId author) {
    const auto& corpus = engine.corpus();
    const auto* rec = corpus.find_author(author);
    if (!rec) throw Error(ErrorCode::unknown_author, "unknown author " + std::to_string(author));
    Json counts = Json::object();
    for (Facet f : kAllFacets) {
        counts[std::string(to_string(f))] = facet_terms(corpus, rec->paper_ids, f).size();
    }
    const auto* profile = engine.profiles().find(author);
    Json j{{"author_id", author},
           {"name", rec->display_name},
           {"affiliation", optional_json(rec->affiliation)},
           {"paper_count", rec->paper_ids.size()},
           {"facet_term_counts", counts},
           {"active", profile != nullptr},
           {"persona_count", profile ? engine.profiles().personas(author).size() : 0}};
    return j;
}

Json personas_json(const Engine& engine, AuthorId author, const std::vector<Persona>& personas) {
    const auto& corpus = engine.corpus();
    const auto& relevance = engine.relevance();
    Json list = Json::array();
    for (const auto& p : personas) {
        std::vector<PaperId> papers = p.paper_ids;
        std::sort(papers.begin(), papers.end(), [&](PaperId a, PaperId b) {
            const double wa = relevance.paper_relevance(author, a);
            const double wb = relevance.paper_relevance(author, b);
            if (wa != wb) return wa > wb;
            return a < b;
        });
        papers.resize(std::min<std::size_t>(papers.size(), 5));
        Json top = Json::array();
        for (PaperId pid : papers) {
            const auto& rec = corpus.paper(pid);
            top.push_back({{"paper_id", pid},
                           {"title", rec.title},
                           {"year", rec.year},
                           {"relevance", relevance.paper_relevance(author, pid)}});
        }
        Json facets = Json::object();
        for (Facet f : kEmbeddedFacets) {
            facets[std::string(to_string(f))] = p.profile.facet(f) != nullptr;
        }
        list.push_back({{"ordinal", p.ordinal},
                        {"paper_count", p.paper_ids.size()},
                        {"best_importance", p.best_importance},
                        {"facets", facets},
                        {"top_papers", top}});
    }
    return Json{{"author_id", author}, {"personas", list}};
}

Json scored_terms_json(const Engine& engine, const std::vector<ScoredTerm>& terms) {
    Json out = Json::array();
    for (const auto& t : terms) {
        const auto& rec = engine.corpus().term(t.term_id);
        out.push_back({{"term_id", t.term_id},
                       {"surface", rec.surface},
                       {"facet", std::string(to_string(rec.facet))},
                       {"score", t.score},
                       {"strategy", std::string(to_string(t.strategy))}});
    }
    return out;
}

Json health_json(const Engine& engine) {
    return Json{{"status", "ok"},
                {"papers", engine.corpus().papers().size()},
                {"authors", engine.corpus().authors().size()}};
}

std::string dump(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

}  // namespace bridger
