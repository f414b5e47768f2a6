#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bridger/engine.hpp"

namespace bridger {

enum class TermStrategy { textrank, tfidf, relevance, random, similarity_to_user };

std::string_view to_string(TermStrategy s);
std::optional<TermStrategy> parse_term_strategy(std::string_view s);

struct ScoredTerm {
    TermId term_id = 0;
    double score = 0.0;
    TermStrategy strategy = TermStrategy::tfidf;

    bool operator==(const ScoredTerm&) const = default;
};

// Distinct terms of `facet` over the given papers, ascending id.
std::vector<TermId> facet_terms(const CorpusIndex& corpus, std::span<const PaperId> papers,
                                Facet facet);

struct TextRankOptions {
    double damping = 0.85;
    double epsilon = 1e-8;
    std::size_t max_iterations = 100000;
    // Raw Euclidean distance as the edge weight, or 1 / (1 + distance) as a similarity kernel.
    bool similarity_kernel = false;
};

// Weighted PageRank over a dense row-major n x n weight matrix. Each node spreads its rank in
// proportion to its outgoing weights; a node with no outgoing weight spreads uniformly. Iterates
// from the uniform vector until the L1 change drops below epsilon.
std::vector<double> weighted_pagerank(std::span<const double> weights, std::size_t n,
                                      const TextRankOptions& options = {});

// Scores are sorted descending, ties by ascending term id. The textrank, tfidf and relevance
// rankers throw empty_facet when the author has no (embedded, for textrank) terms of the facet.

std::vector<ScoredTerm> rank_terms_textrank(const Engine& engine, AuthorId author, Facet facet,
                                            const TextRankOptions& options = {});

// tf = number of the author's papers containing the term, df = number of authors using it,
// score = tf * ln(N_authors / df).
std::vector<ScoredTerm> rank_terms_tfidf(const Engine& engine, AuthorId author, Facet facet);

// Sum of the author's paper relevance weights over papers containing the term.
std::vector<ScoredTerm> rank_terms_relevance(const Engine& engine, AuthorId author, Facet facet);

// Seeded permutation; the i-th term (0-based) scores (n - i) / n. Empty when there are no terms.
std::vector<ScoredTerm> rank_terms_random(const Engine& engine, AuthorId author, Facet facet,
                                          std::uint64_t seed);

// Max cosine between each candidate term and the user scope's terms of the same facet. Throws
// missing_facet when either side has no embedded terms of the facet.
std::vector<ScoredTerm> rank_terms_by_similarity(const Engine& engine, AuthorId candidate,
                                                 AuthorId user,
                                                 std::optional<std::uint32_t> user_persona,
                                                 Facet facet);

struct TermRankRequest {
    TermStrategy strategy = TermStrategy::tfidf;
    std::uint64_t seed = 0;
    AuthorId user = 0;  // for similarity_to_user
    std::optional<std::uint32_t> user_persona;
    TextRankOptions textrank;
};

std::vector<ScoredTerm> rank_terms(const Engine& engine, AuthorId author, Facet facet,
                                   const TermRankRequest& request);

enum class PaperSort { recency, similarity };

std::string_view to_string(PaperSort s);
std::optional<PaperSort> parse_paper_sort(std::string_view s);

struct RankedPaper {
    PaperId paper_id = 0;
    double score = 0.0;  // year for recency, max cosine for similarity

    bool operator==(const RankedPaper&) const = default;
};

// Recency: descending year, then descending importance, then ascending id.
// Similarity: descending max cosine against the user scope's paper embeddings, then ascending id;
// papers without an embedding go last.
std::vector<RankedPaper> rank_papers(const Engine& engine, AuthorId candidate, AuthorId user,
                                     std::optional<std::uint32_t> user_persona, PaperSort mode);

// Paper ids of the user's whole profile or of one persona.
const std::vector<PaperId>& scope_papers(const Engine& engine, AuthorId user,
                                         std::optional<std::uint32_t> persona);

}  // namespace bridger
