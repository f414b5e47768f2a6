#pragma once

// Fixture builders and reference implementations used by the unit and acceptance suites. The
// reference implementations deliberately avoid calling the library code they check.

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bridger/corpus.hpp"
#include "bridger/retrieval.hpp"

namespace bridger::testing {

struct RandomCorpusOptions {
    std::size_t authors = 60;
    std::size_t papers = 150;
    std::size_t max_byline = 4;
    std::uint32_t paper_dim = 6;
    std::uint32_t term_dim = 4;
    std::size_t tasks = 12;
    std::size_t methods = 12;
    std::size_t resources = 6;
    std::size_t topics = 5;
    std::size_t terms_per_paper = 5;
    // Embedding entries drawn from {0, 1, 2} instead of a Gaussian; produces many exact ties.
    bool quantized = false;
    double missing_paper_embedding = 0.0;
    double importance_ties = 0.0;  // share of papers with importance exactly 1
    std::uint64_t seed = 1;
};

CorpusIndex random_corpus(const RandomCorpusOptions& options);

// Brute-force retrieval over raw records. The user scope defaults to every paper of the user.
struct OracleResult {
    std::optional<ErrorCode> error;
    std::vector<Candidate> candidates;
};

OracleResult oracle_query(const CorpusIndex& corpus, AuthorId user, const std::string& tag,
                          std::size_t k, std::size_t pool_size, unsigned min_hops,
                          const std::optional<std::vector<PaperId>>& user_scope = std::nullopt);

// Relevance weight computed straight from the corpus records.
double oracle_relevance(const CorpusIndex& corpus, AuthorId author, PaperId paper);

// All-pairs shortest coauthor paths (Floyd-Warshall over bylines). Missing entries are unreachable.
class HopOracle {
public:
    explicit HopOracle(const CorpusIndex& corpus);
    std::optional<unsigned> distance(AuthorId a, AuthorId b) const;

private:
    std::map<AuthorId, std::size_t> slot_;
    std::vector<unsigned> dist_;
    std::size_t n_ = 0;
};

// Power iteration on the explicit Google matrix (dangling rows replaced by uniform rows).
std::vector<double> oracle_pagerank(const std::vector<double>& weights, std::size_t n,
                                    double damping);

// Ward agglomeration that recomputes every pairwise merge cost from cluster centroids at each
// step. Returns labels numbered by each cluster's lowest point index.
std::vector<std::size_t> oracle_ward(const std::vector<std::vector<double>>& points,
                                     double threshold);

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Hand-sized corpus: three authors in a chain (1-2 coauthor, 3 isolated), two facets each.
CorpusIndex tiny_corpus();

}  // namespace bridger::testing
