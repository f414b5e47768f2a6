#include "bridger/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "bridger/random.hpp"
#include "bridger/vector_math.hpp"

namespace bridger {

std::string_view to_string(TermStrategy s) {
    switch (s) {
        case TermStrategy::textrank: return "textrank";
        case TermStrategy::tfidf: return "tfidf";
        case TermStrategy::relevance: return "relevance";
        case TermStrategy::random: return "random";
        case TermStrategy::similarity_to_user: return "similarity";
    }
    return "unknown";
}

std::optional<TermStrategy> parse_term_strategy(std::string_view s) {
    if (s == "textrank") return TermStrategy::textrank;
    if (s == "tfidf") return TermStrategy::tfidf;
    if (s == "relevance") return TermStrategy::relevance;
    if (s == "random") return TermStrategy::random;
    if (s == "similarity") return TermStrategy::similarity_to_user;
    return std::nullopt;
}

std::string_view to_string(PaperSort s) {
    return s == PaperSort::recency ? "recency" : "similarity";
}

std::optional<PaperSort> parse_paper_sort(std::string_view s) {
    if (s == "recency") return PaperSort::recency;
    if (s == "similarity") return PaperSort::similarity;
    return std::nullopt;
}

namespace {

void sort_scored(std::vector<ScoredTerm>& terms) {
    std::sort(terms.begin(), terms.end(), [](const ScoredTerm& a, const ScoredTerm& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.term_id < b.term_id;
    });
}

const std::vector<PaperId>& author_papers(const Engine& engine, AuthorId author) {
    return engine.corpus().author(author).paper_ids;
}

std::vector<TermId> require_terms(const Engine& engine, AuthorId author, Facet facet) {
    auto terms = facet_terms(engine.corpus(), author_papers(engine, author), facet);
    if (terms.empty()) {
        throw Error(ErrorCode::empty_facet, "author " + std::to_string(author) + " has no " +
                                                std::string(to_string(facet)) + " terms");
    }
    return terms;
}

// Embedded, non-zero term vectors of `facet` in the given papers.
std::vector<std::pair<TermId, std::span<const float>>> embedded_terms(
    const CorpusIndex& corpus, std::span<const PaperId> papers, Facet facet) {
    std::vector<std::pair<TermId, std::span<const float>>> out;
    for (TermId t : facet_terms(corpus, papers, facet)) {
        auto emb = corpus.term_embedding(t);
        if (emb && norm(*emb) > 0.0) out.emplace_back(t, *emb);
    }
    return out;
}

}  // namespace

std::vector<TermId> facet_terms(const CorpusIndex& corpus, std::span<const PaperId> papers,
                                Facet facet) {
    std::set<TermId> out;
    for (PaperId pid : papers) {
        for (TermId t : corpus.paper(pid).term_ids) {
            if (corpus.term(t).facet == facet) out.insert(t);
        }
    }
    return {out.begin(), out.end()};
}

std::vector<double> weighted_pagerank(std::span<const double> weights, std::size_t n,
                                      const TextRankOptions& options) {
    if (n == 0) return {};
    std::vector<double> out_weight(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) out_weight[j] += weights[j * n + k];
    }
    std::vector<double> rank(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n);
    const double teleport = (1.0 - options.damping) / static_cast<double>(n);
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        double dangling = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (out_weight[j] <= 0.0) dangling += rank[j];
        }
        const double spread = options.damping * dangling / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (out_weight[j] > 0.0) s += rank[j] * weights[j * n + i] / out_weight[j];
            }
            next[i] = teleport + spread + options.damping * s;
        }
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - rank[i]);
        rank.swap(next);
        if (delta < options.epsilon) break;
    }
    return rank;
}

std::vector<ScoredTerm> rank_terms_textrank(const Engine& engine, AuthorId author, Facet facet,
                                            const TextRankOptions& options) {
    auto terms = embedded_terms(engine.corpus(), author_papers(engine, author), facet);
    if (terms.empty()) {
        throw Error(ErrorCode::empty_facet, "author " + std::to_string(author) +
                                                " has no embedded " +
                                                std::string(to_string(facet)) + " terms");
    }
    const std::size_t n = terms.size();
    std::vector<double> weights(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = euclidean_distance(terms[i].second, terms[j].second);
            const double w = options.similarity_kernel ? 1.0 / (1.0 + d) : d;
            weights[i * n + j] = weights[j * n + i] = w;
        }
    }
    auto rank = weighted_pagerank(weights, n, options);
    std::vector<ScoredTerm> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({terms[i].first, rank[i], TermStrategy::textrank});
    }
    sort_scored(out);
    return out;
}

std::vector<ScoredTerm> rank_terms_tfidf(const Engine& engine, AuthorId author, Facet facet) {
    const auto& corpus = engine.corpus();
    auto terms = require_terms(engine, author, facet);
    std::map<TermId, std::size_t> tf;
    for (PaperId pid : author_papers(engine, author)) {
        for (TermId t : corpus.paper(pid).term_ids) {
            if (corpus.term(t).facet == facet) ++tf[t];
        }
    }
    const auto n_authors = static_cast<double>(engine.author_count());
    std::vector<ScoredTerm> out;
    for (TermId t : terms) {
        const auto df = static_cast<double>(engine.author_frequency(t));
        out.push_back({t, static_cast<double>(tf[t]) * std::log(n_authors / df),
                       TermStrategy::tfidf});
    }
    sort_scored(out);
    return out;
}

std::vector<ScoredTerm> rank_terms_relevance(const Engine& engine, AuthorId author, Facet facet) {
    const auto& corpus = engine.corpus();
    require_terms(engine, author, facet);
    std::map<TermId, double> score;
    for (PaperId pid : author_papers(engine, author)) {
        const double w = engine.relevance().paper_relevance(author, pid);
        for (TermId t : corpus.paper(pid).term_ids) {
            if (corpus.term(t).facet == facet) score[t] += w;
        }
    }
    std::vector<ScoredTerm> out;
    for (const auto& [t, s] : score) out.push_back({t, s, TermStrategy::relevance});
    sort_scored(out);
    return out;
}

std::vector<ScoredTerm> rank_terms_random(const Engine& engine, AuthorId author, Facet facet,
                                          std::uint64_t seed) {
    auto terms = facet_terms(engine.corpus(), author_papers(engine, author), facet);
    seeded_shuffle(terms, seed);
    const auto n = static_cast<double>(terms.size());
    std::vector<ScoredTerm> out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        out.push_back({terms[i], (n - static_cast<double>(i)) / n, TermStrategy::random});
    }
    return out;
}

const std::vector<PaperId>& scope_papers(const Engine& engine, AuthorId user,
                                         std::optional<std::uint32_t> persona) {
    if (persona) return engine.profiles().persona(user, *persona).paper_ids;
    return engine.corpus().author(user).paper_ids;
}

std::vector<ScoredTerm> rank_terms_by_similarity(const Engine& engine, AuthorId candidate,
                                                 AuthorId user,
                                                 std::optional<std::uint32_t> user_persona,
                                                 Facet facet) {
    const auto& corpus = engine.corpus();
    auto mine = embedded_terms(corpus, scope_papers(engine, user, user_persona), facet);
    auto theirs = embedded_terms(corpus, author_papers(engine, candidate), facet);
    if (mine.empty() || theirs.empty()) {
        throw Error(ErrorCode::missing_facet,
                    "no embedded " + std::string(to_string(facet)) + " terms on " +
                        (mine.empty() ? "user " + std::to_string(user)
                                      : "candidate " + std::to_string(candidate)));
    }
    std::vector<ScoredTerm> out;
    for (const auto& [t, v] : theirs) {
        double best = -1.0;
        for (const auto& [u, w] : mine) best = std::max(best, cosine(v, w));
        out.push_back({t, best, TermStrategy::similarity_to_user});
    }
    sort_scored(out);
    return out;
}

std::vector<ScoredTerm> rank_terms(const Engine& engine, AuthorId author, Facet facet,
                                   const TermRankRequest& request) {
    switch (request.strategy) {
        case TermStrategy::textrank:
            return rank_terms_textrank(engine, author, facet, request.textrank);
        case TermStrategy::tfidf: return rank_terms_tfidf(engine, author, facet);
        case TermStrategy::relevance: return rank_terms_relevance(engine, author, facet);
        case TermStrategy::random: return rank_terms_random(engine, author, facet, request.seed);
        case TermStrategy::similarity_to_user:
            return rank_terms_by_similarity(engine, author, request.user, request.user_persona,
                                            facet);
    }
    return {};
}

std::vector<RankedPaper> rank_papers(const Engine& engine, AuthorId candidate, AuthorId user,
                                     std::optional<std::uint32_t> user_persona, PaperSort mode) {
    const auto& corpus = engine.corpus();
    const auto& papers = author_papers(engine, candidate);
    std::vector<RankedPaper> out;
    if (mode == PaperSort::recency) {
        for (PaperId pid : papers) {
            out.push_back({pid, static_cast<double>(corpus.paper(pid).year)});
        }
        std::sort(out.begin(), out.end(), [&](const RankedPaper& a, const RankedPaper& b) {
            if (a.score != b.score) return a.score > b.score;
            const double ia = corpus.paper(a.paper_id).importance;
            const double ib = corpus.paper(b.paper_id).importance;
            if (ia != ib) return ia > ib;
            return a.paper_id < b.paper_id;
        });
        return out;
    }

    std::vector<std::span<const float>> mine;
    for (PaperId pid : scope_papers(engine, user, user_persona)) {
        auto emb = corpus.paper_embedding(pid);
        if (emb && norm(*emb) > 0.0) mine.push_back(*emb);
    }
    for (PaperId pid : papers) {
        double best = -std::numeric_limits<double>::infinity();
        auto emb = corpus.paper_embedding(pid);
        if (emb && norm(*emb) > 0.0) {
            for (const auto& u : mine) best = std::max(best, cosine(*emb, u));
        }
        out.push_back({pid, best});
    }
    std::sort(out.begin(), out.end(), [](const RankedPaper& a, const RankedPaper& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.paper_id < b.paper_id;
    });
    return out;
}

}  // namespace bridger
