#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "bridger/engine.hpp"
#include "bridger/vector_math.hpp"

namespace bridger {

enum class Condition { baseline_ss, similar_facet, contrast };

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

struct RetrievalQuery {
    AuthorId user_id = 0;
    std::optional<std::uint32_t> persona;  // user-side slice; candidates use whole profiles
    Condition condition = Condition::similar_facet;
    Facet sim_facet = Facet::task;
    Facet contrast_facet = Facet::method;
    std::size_t pool_size = 1000;  // first-stage K for contrasts
    std::size_t k = 4;
    unsigned min_hops = 2;

    void validate() const;
    // "ss", "sT", "sTdM", "sRdM", ...
    std::string tag() const;
};

// Parses "ss", "sT", "sTdM" style tags (T = task, M = method, R = resource).
std::optional<RetrievalQuery> parse_condition_tag(std::string_view tag);

struct Candidate {
    AuthorId author_id = 0;
    double sim_score = 0.0;
    std::optional<double> contrast_score;
    std::string condition;

    bool operator==(const Candidate&) const = default;
};

struct RetrievalDiagnostics {
    std::size_t considered = 0;
    std::size_t skipped_hops = 0;          // the user and authors closer than min_hops
    std::size_t skipped_missing_vector = 0;

    bool operator==(const RetrievalDiagnostics&) const = default;
};

// Breadth-first coauthor distance. `cap` bounds the search: pairs at least `cap` apart report
// kind == at_least with hops == cap.
struct HopDistance {
    enum class Kind { exact, at_least, unreachable };
    Kind kind = Kind::unreachable;
    unsigned hops = 0;

    bool reachable() const { return kind != Kind::unreachable; }
    bool operator==(const HopDistance&) const = default;
};

inline constexpr unsigned kDefaultHopCap = 6;

HopDistance coauthor_hops(const CorpusIndex& corpus, AuthorId from, AuthorId to,
                          std::optional<unsigned> cap = kDefaultHopCap);

// Authors strictly closer than `min_hops` to `user`, the user included.
std::unordered_set<AuthorId> authors_within(const CorpusIndex& corpus, AuthorId user,
                                            unsigned min_hops);

// Cosine over aggregate paper embeddings; descending score, ascending author id.
std::vector<Candidate> similar_authors_baseline(const Engine& engine, const RetrievalQuery& query,
                                                RetrievalDiagnostics* diagnostics = nullptr);

// Cosine over one facet vector only.
std::vector<Candidate> similar_authors_facet(const Engine& engine, const RetrievalQuery& query,
                                             RetrievalDiagnostics* diagnostics = nullptr);

// Top pool_size candidates by sim_facet cosine, re-ranked by ascending contrast_facet cosine
// (ties: higher sim_score, then lower author id).
std::vector<Candidate> contrast_authors(const Engine& engine, const RetrievalQuery& query,
                                        RetrievalDiagnostics* diagnostics = nullptr);

std::vector<Candidate> run_query(const Engine& engine, const RetrievalQuery& query,
                                 RetrievalDiagnostics* diagnostics = nullptr);

struct RecommendOptions {
    std::size_t k_total = 0;  // 0: 12 for whole-author scope, 4 for a persona
    std::size_t pool_size = 1000;
    unsigned min_hops = 2;
    Facet sim_facet = Facet::task;
    Facet contrast_facet = Facet::method;
    std::uint64_t seed = 0;
};

// Condition-mixed card list. Whole-author scope splits k_total over ss, sT and sTdM; persona
// scope over sT and sTdM. An author is attributed to the first condition (in that priority
// order) that ranks it; later conditions backfill from further down their rankings. The result
// is shuffled by `seed`.
std::vector<Candidate> recommend(const Engine& engine, AuthorId user,
                                 std::optional<std::uint32_t> persona,
                                 const RecommendOptions& options = {});

// Dispatches on a condition tag ("ss", "sT", "sTdM", ...) or "mixed". Single conditions return
// the top k in ranked order (k == 0 means 4); "mixed" delegates to recommend() with
// k_total = k and shuffles by the seed.
std::vector<Candidate> recommend_by_tag(const Engine& engine, AuthorId user,
                                        std::optional<std::uint32_t> persona,
                                        std::string_view condition, std::size_t k,
                                        const RecommendOptions& options = {});

}  // namespace bridger
