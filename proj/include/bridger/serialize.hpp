#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bridger/cards.hpp"
#include "bridger/metrics.hpp"
#include "bridger/ranking.hpp"
#include "bridger/retrieval.hpp"

// JSON views of library results, shared by the CLI and the HTTP service so both emit the same
// bytes. Object keys are sorted.
namespace bridger {

using Json = nlohmann::json;

void to_json(Json& j, const Candidate& c);
void to_json(Json& j, const DistanceReport& r);
void to_json(Json& j, const MetricSummary& s);
void to_json(Json& j, const ConditionReport& r);
void to_json(Json& j, const SelectionEvent& e);
void from_json(const Json& j, SelectionEvent& e);
void to_json(Json& j, const ShownCard& c);
void from_json(const Json& j, ShownCard& c);
void to_json(Json& j, const RatioSummary& s);
void to_json(Json& j, const ShownPair& p);
void from_json(const Json& j, ShownPair& p);

// Candidates in ranked (or shuffled) order; `tokens` adds a per-session token to each.
Json candidates_json(const std::vector<Candidate>& candidates,
                     const std::map<AuthorId, std::string>* tokens = nullptr);

// Display form of a card: the condition tag is never included, identity only when the card is
// not anonymized. Sections are split into pages.
Json card_json(const AuthorCard& card);

Json author_summary_json(const Engine& engine, AuthorId author);

// Ordered personas, each with its five most relevant papers.
Json personas_json(const Engine& engine, AuthorId author, const std::vector<Persona>& personas);

Json scored_terms_json(const Engine& engine, const std::vector<ScoredTerm>& terms);

Json health_json(const Engine& engine);

std::string dump(const Json& j);

}  // namespace bridger
