#include "bridger/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <set>
#include <sstream>

#include "bridger/random.hpp"
#include "bridger/retrieval.hpp"

namespace bridger {

std::optional<double> jaccard_distance(const std::vector<std::uint64_t>& a,
                                       const std::vector<std::uint64_t>& b) {
    std::size_t common = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++common;
            ++i;
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - common;
    if (uni == 0) return std::nullopt;
    return 1.0 - static_cast<double>(common) / static_cast<double>(uni);
}

std::vector<PaperId> citation_set(const CorpusIndex& corpus, AuthorId author,
                                  CitationDirection direction) {
    std::set<PaperId> out;
    for (PaperId pid : corpus.author(author).paper_ids) {
        const auto& ids = direction == CitationDirection::incoming
                              ? corpus.incoming_citations(pid)
                              : corpus.paper(pid).citations;
        out.insert(ids.begin(), ids.end());
    }
    return {out.begin(), out.end()};
}

std::vector<VenueId> venue_set(const CorpusIndex& corpus, AuthorId author) {
    std::set<VenueId> out;
    for (PaperId pid : corpus.author(author).paper_ids) {
        if (auto v = corpus.paper(pid).venue_id) out.insert(*v);
    }
    return {out.begin(), out.end()};
}

std::optional<double> citation_jaccard(const CorpusIndex& corpus, AuthorId user,
                                       AuthorId candidate, CitationDirection direction) {
    return jaccard_distance(citation_set(corpus, user, direction),
                            citation_set(corpus, candidate, direction));
}

std::optional<double> venue_jaccard(const CorpusIndex& corpus, AuthorId user, AuthorId candidate) {
    return jaccard_distance(venue_set(corpus, user), venue_set(corpus, candidate));
}

DistanceReport distance_report(const CorpusIndex& corpus, AuthorId user, AuthorId candidate) {
    for (AuthorId a : {user, candidate}) {
        if (!corpus.has_author(a)) {
            throw Error(ErrorCode::unknown_author, "unknown author " + std::to_string(a));
        }
    }
    DistanceReport r;
    r.user = user;
    r.candidate = candidate;
    r.incoming_citation_jaccard =
        citation_jaccard(corpus, user, candidate, CitationDirection::incoming);
    r.outgoing_citation_jaccard =
        citation_jaccard(corpus, user, candidate, CitationDirection::outgoing);
    r.venue_jaccard = venue_jaccard(corpus, user, candidate);
    auto hops = coauthor_hops(corpus, user, candidate, std::nullopt);
    if (hops.reachable()) r.coauthor_hops = hops.hops;
    return r;
}

std::vector<ShownPair> collect_condition_pairs(const Engine& engine,
                                               const std::vector<AuthorId>& users,
                                               const std::vector<std::string>& conditions,
                                               std::size_t k, const RecommendOptions& options,
                                               std::size_t* skipped) {
    std::vector<ShownPair> out;
    std::size_t missed = 0;
    for (AuthorId user : users) {
        for (const auto& condition : conditions) {
            try {
                for (const auto& c : recommend_by_tag(engine, user, std::nullopt, condition, k,
                                                      options)) {
                    out.push_back({user, condition, c.author_id});
                }
            } catch (const Error& e) {
                if (e.code() != ErrorCode::missing_facet && e.code() != ErrorCode::empty_profile) {
                    throw;
                }
                ++missed;
            }
        }
    }
    if (skipped) *skipped = missed;
    return out;
}

std::string_view to_string(Metric m) {
    switch (m) {
        case Metric::incoming_citations: return "incoming_citation_jaccard";
        case Metric::outgoing_citations: return "outgoing_citation_jaccard";
        case Metric::venues: return "venue_jaccard";
        case Metric::coauthor_path: return "coauthor_path";
    }
    return "unknown";
}

std::optional<double> metric_value(const DistanceReport& r, Metric m) {
    switch (m) {
        case Metric::incoming_citations: return r.incoming_citation_jaccard;
        case Metric::outgoing_citations: return r.outgoing_citation_jaccard;
        case Metric::venues: return r.venue_jaccard;
        case Metric::coauthor_path:
            if (r.coauthor_hops) return static_cast<double>(*r.coauthor_hops);
            return std::nullopt;
    }
    return std::nullopt;
}

const ConditionRow* ConditionReport::find(std::string_view condition) const {
    for (const auto& row : rows) {
        if (row.condition == condition) return &row;
    }
    return nullptr;
}

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Linear interpolation between order statistics.
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

MetricSummary summarize(const std::vector<double>& values, std::size_t skipped,
                        const ReportOptions& options, std::uint64_t stream) {
    MetricSummary s;
    s.count = values.size();
    s.skipped = skipped;
    if (values.empty()) return s;
    s.mean = mean_of(values);
    auto [lo, hi] = bootstrap_mean_ci(values, options, stream);
    s.ci_low = lo;
    s.ci_high = hi;
    return s;
}

}  // namespace

std::pair<double, double> bootstrap_mean_ci(const std::vector<double>& values,
                                            const ReportOptions& options, std::uint64_t stream) {
    if (values.empty()) throw Error(ErrorCode::invalid_argument, "bootstrap of an empty sample");
    if (values.size() == 1 || options.resamples == 0) {
        const double m = mean_of(values);
        return {m, m};
    }
    std::mt19937_64 rng(options.seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
    std::vector<double> means(options.resamples);
    const auto n = values.size();
    for (auto& m : means) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += values[uniform_below(rng, n)];
        m = s / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    const double alpha = (1.0 - options.confidence) / 2.0;
    return {quantile_sorted(means, alpha), quantile_sorted(means, 1.0 - alpha)};
}

ConditionReport condition_report(const CorpusIndex& corpus, const std::vector<ShownPair>& pairs,
                                 const ReportOptions& options) {
    if (options.confidence <= 0.0 || options.confidence >= 1.0) {
        throw Error(ErrorCode::invalid_argument, "confidence must lie in (0, 1)");
    }
    std::vector<std::string> order;
    std::map<std::string, std::vector<DistanceReport>> by_condition;
    for (const auto& p : pairs) {
        auto [it, inserted] = by_condition.try_emplace(p.condition);
        if (inserted) order.push_back(p.condition);
        it->second.push_back(distance_report(corpus, p.user, p.candidate));
    }

    ConditionReport report;
    std::uint64_t stream = 0;
    for (const auto& condition : order) {
        const auto& reports = by_condition[condition];
        ConditionRow row;
        row.condition = condition;
        row.pairs = reports.size();
        std::set<AuthorId> users;
        for (const auto& r : reports) users.insert(r.user);
        row.users = users.size();

        for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
            const Metric metric = kAllMetrics[m];
            std::vector<double> pooled;
            std::size_t skipped = 0;
            std::map<AuthorId, std::vector<double>> per_user;
            for (const auto& r : reports) {
                auto v = metric_value(r, metric);
                if (!v) {
                    ++skipped;
                    continue;
                }
                pooled.push_back(*v);
                per_user[r.user].push_back(*v);
            }
            std::vector<double> user_means;
            for (const auto& [u, vals] : per_user) user_means.push_back(mean_of(vals));

            row.pooled[m] = summarize(pooled, skipped, options, stream++);
            row.per_user[m] =
                summarize(user_means, users.size() - user_means.size(), options, stream++);
            if (pooled.empty()) {
                report.warnings.push_back("no defined " + std::string(to_string(metric)) +
                                          " values for condition " + condition);
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string format_report_table(const ConditionReport& report) {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header{"condition", "pairs"};
    for (Metric m : kAllMetrics) header.emplace_back(to_string(m));
    cells.push_back(header);
    char buf[96];
    for (const auto& row : report.rows) {
        std::vector<std::string> line{row.condition, std::to_string(row.pairs)};
        for (const auto& s : row.pooled) {
            if (!s.mean) {
                line.emplace_back("n/a");
                continue;
            }
            std::snprintf(buf, sizeof buf, "%.3f [%.3f, %.3f]", *s.mean, *s.ci_low, *s.ci_high);
            std::string cell = buf;
            if (s.skipped) cell += " (" + std::to_string(s.skipped) + " skipped)";
            line.push_back(cell);
        }
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
    }
    std::ostringstream out;
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            out << line[i];
            if (i + 1 < line.size()) out << std::string(width[i] - line[i].size() + 2, ' ');
        }
        out << '\n';
    }
    for (const auto& w : report.warnings) out << "warning: " << w << '\n';
    return out.str();
}

}  // namespace bridger
