#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bridger/engine.hpp"
#include "bridger/retrieval.hpp"

namespace bridger {

enum class CitationDirection { incoming, outgoing };

// 1 - |a & b| / |a | b| over sorted, duplicate-free ranges; nullopt when both are empty.
std::optional<double> jaccard_distance(const std::vector<std::uint64_t>& a,
                                       const std::vector<std::uint64_t>& b);

// Sorted paper ids citing (incoming) or cited by (outgoing) any of the author's papers.
std::vector<PaperId> citation_set(const CorpusIndex& corpus, AuthorId author,
                                  CitationDirection direction);
// Sorted venue ids of the author's papers; papers without a venue are skipped.
std::vector<VenueId> venue_set(const CorpusIndex& corpus, AuthorId author);

std::optional<double> citation_jaccard(const CorpusIndex& corpus, AuthorId user,
                                       AuthorId candidate, CitationDirection direction);
std::optional<double> venue_jaccard(const CorpusIndex& corpus, AuthorId user, AuthorId candidate);

struct DistanceReport {
    AuthorId user = 0;
    AuthorId candidate = 0;
    std::optional<double> incoming_citation_jaccard;
    std::optional<double> outgoing_citation_jaccard;
    std::optional<double> venue_jaccard;
    std::optional<unsigned> coauthor_hops;  // uncapped; nullopt when unreachable

    bool operator==(const DistanceReport&) const = default;
};

DistanceReport distance_report(const CorpusIndex& corpus, AuthorId user, AuthorId candidate);

enum class Metric { incoming_citations, outgoing_citations, venues, coauthor_path };
inline constexpr std::array<Metric, 4> kAllMetrics = {
    Metric::incoming_citations, Metric::outgoing_citations, Metric::venues,
    Metric::coauthor_path};

std::string_view to_string(Metric m);
std::optional<double> metric_value(const DistanceReport& r, Metric m);

struct ShownPair {
    AuthorId user = 0;
    std::string condition;
    AuthorId candidate = 0;

    bool operator==(const ShownPair&) const = default;
};

struct MetricSummary {
    std::optional<double> mean;  // nullopt for an empty cell
    std::optional<double> ci_low;
    std::optional<double> ci_high;
    std::size_t count = 0;    // defined values used
    std::size_t skipped = 0;  // undefined Jaccard values or unreachable pairs

    bool operator==(const MetricSummary&) const = default;
};

struct ConditionRow {
    std::string condition;
    std::size_t pairs = 0;
    std::size_t users = 0;
    std::array<MetricSummary, 4> pooled;    // mean over all pairs
    std::array<MetricSummary, 4> per_user;  // mean of per-user means

    bool operator==(const ConditionRow&) const = default;
};

struct ReportOptions {
    std::size_t resamples = 1000;
    double confidence = 0.90;
    std::uint64_t seed = 0;
};

struct ConditionReport {
    std::vector<ConditionRow> rows;      // conditions in first-seen order
    std::vector<std::string> warnings;   // one per empty cell

    const ConditionRow* find(std::string_view condition) const;
    bool operator==(const ConditionReport&) const = default;
};

// Runs each condition tag for each user and flattens the top-k rankings into pairs. Users for
// whom a condition is undefined (missing facet, empty profile) are skipped and counted.
std::vector<ShownPair> collect_condition_pairs(const Engine& engine,
                                               const std::vector<AuthorId>& users,
                                               const std::vector<std::string>& conditions,
                                               std::size_t k, const RecommendOptions& options,
                                               std::size_t* skipped = nullptr);

// Percentile bootstrap of the mean. Returns {low, high}; both equal the value for n == 1.
std::pair<double, double> bootstrap_mean_ci(const std::vector<double>& values,
                                            const ReportOptions& options, std::uint64_t stream);

ConditionReport condition_report(const CorpusIndex& corpus, const std::vector<ShownPair>& pairs,
                                 const ReportOptions& options = {});

// Aligned text table: one row per condition, one column per metric (pooled mean with CI).
std::string format_report_table(const ConditionReport& report);

}  // namespace bridger
