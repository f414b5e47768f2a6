#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

namespace bridger::testing {

namespace {

std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

double unit(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::vector<float> random_row(std::mt19937_64& rng, std::uint32_t dim, bool quantized) {
    std::vector<float> row(dim);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
        bool nonzero = false;
        for (auto& v : row) {
            v = quantized ? static_cast<float>(below(rng, 3)) : static_cast<float>(gauss(rng));
            nonzero = nonzero || v != 0.0f;
        }
        if (nonzero) return row;
    }
}

}  // namespace

CorpusIndex random_corpus(const RandomCorpusOptions& o) {
    std::mt19937_64 rng(o.seed);
    std::vector<AuthorRecord> authors;
    for (std::size_t a = 1; a <= o.authors; ++a) {
        authors.push_back({a, "Author " + std::to_string(a), std::nullopt, {}});
    }

    std::vector<FacetTerm> terms;
    EmbeddingTable term_emb(o.term_dim);
    TermId next_term = 1;
    auto add_terms = [&](Facet facet, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i, ++next_term) {
            FacetTerm t{next_term, facet,
                        std::string(to_string(facet)) + " term " + std::to_string(next_term),
                        std::nullopt};
            if (is_embedded(facet)) {
                t.embedding_id = next_term;
                term_emb.add(next_term, random_row(rng, o.term_dim, o.quantized));
            }
            terms.push_back(std::move(t));
        }
    };
    add_terms(Facet::task, o.tasks);
    add_terms(Facet::method, o.methods);
    add_terms(Facet::resource, o.resources);
    add_terms(Facet::topic, o.topics);

    std::vector<PaperRecord> papers;
    EmbeddingTable paper_emb(o.paper_dim);
    for (std::size_t i = 0; i < o.papers; ++i) {
        PaperRecord p;
        p.paper_id = 100 + i;
        p.title = "Paper " + std::to_string(p.paper_id);
        p.year = 2015 + static_cast<int>(below(rng, 7));
        p.importance = unit(rng) < o.importance_ties ? 1.0 : std::round(unit(rng) * 1000.0) / 10.0;
        if (below(rng, 6) != 0) p.venue_id = 1 + below(rng, 5);
        const std::size_t byline = 1 + below(rng, std::min(o.max_byline, o.authors));
        std::set<AuthorId> chosen;
        while (p.authors.size() < byline) {
            AuthorId a = 1 + below(rng, o.authors);
            if (chosen.insert(a).second) p.authors.push_back(a);
        }
        for (std::size_t t = 0; t < o.terms_per_paper; ++t) {
            p.term_ids.push_back(1 + below(rng, terms.size()));
        }
        if (i > 0) {
            const std::size_t cites = below(rng, 4);
            for (std::size_t c = 0; c < cites; ++c) p.citations.push_back(100 + below(rng, i));
        }
        if (unit(rng) >= o.missing_paper_embedding) {
            paper_emb.add(p.paper_id, random_row(rng, o.paper_dim, o.quantized));
        }
        papers.push_back(std::move(p));
    }
    return CorpusIndex::build(std::move(papers), std::move(authors), std::move(terms),
                              std::move(paper_emb), std::move(term_emb));
}

double oracle_relevance(const CorpusIndex& corpus, AuthorId author, PaperId paper) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& [id, p] : corpus.papers()) {
        lo = std::min(lo, p.importance);
        hi = std::max(hi, p.importance);
    }
    const auto& p = corpus.paper(paper);
    const double importance = hi > lo ? 0.5 + 0.5 * (p.importance - lo) / (hi - lo) : 1.0;
    const auto& byline = p.authors;
    const bool edge = byline.front() == author || byline.back() == author;
    return (edge ? 1.0 : 0.75) * importance;
}

namespace {

class OracleProfiles {
public:
    explicit OracleProfiles(const CorpusIndex& corpus) : corpus_(corpus) {
        lo_ = std::numeric_limits<double>::infinity();
        hi_ = -lo_;
        for (const auto& [id, p] : corpus.papers()) {
            lo_ = std::min(lo_, p.importance);
            hi_ = std::max(hi_, p.importance);
        }
    }

    double weight(AuthorId author, PaperId paper) const {
        const auto& p = corpus_.paper(paper);
        const double importance =
            hi_ > lo_ ? 0.5 + 0.5 * (p.importance - lo_) / (hi_ - lo_) : 1.0;
        const bool edge = p.authors.front() == author || p.authors.back() == author;
        return (edge ? 1.0 : 0.75) * importance;
    }

    // nullopt: no term of the facet with an embedding in scope.
    std::optional<std::vector<double>> facet_vector(AuthorId author,
                                                    const std::vector<PaperId>& scope,
                                                    Facet facet) const {
        std::vector<double> sum;
        double mass = 0.0;
        for (PaperId pid : scope) {
            const double w = weight(author, pid);
            for (TermId t : corpus_.paper(pid).term_ids) {
                const auto& term = corpus_.term(t);
                if (term.facet != facet || !term.embedding_id) continue;
                auto row = corpus_.term_embeddings().row(*term.embedding_id);
                if (sum.empty()) sum.assign(row.size(), 0.0);
                for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += w * static_cast<double>(row[k]);
                mass += w;
            }
        }
        if (sum.empty()) return std::nullopt;
        for (auto& v : sum) v /= mass;
        return sum;
    }

    std::optional<std::vector<double>> paper_vector(AuthorId author,
                                                    const std::vector<PaperId>& scope) const {
        std::vector<double> sum;
        double mass = 0.0;
        for (PaperId pid : scope) {
            if (!corpus_.paper_embeddings().contains(pid)) continue;
            const double w = weight(author, pid);
            auto row = corpus_.paper_embeddings().row(pid);
            if (sum.empty()) sum.assign(row.size(), 0.0);
            for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += w * static_cast<double>(row[k]);
            mass += w;
        }
        if (sum.empty()) return std::nullopt;
        for (auto& v : sum) v /= mass;
        return sum;
    }

private:
    const CorpusIndex& corpus_;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

double raw_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double oracle_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    const double c = raw_dot(a, b) / (std::sqrt(raw_dot(a, a)) * std::sqrt(raw_dot(b, b)));
    return std::clamp(c, -1.0, 1.0);
}

std::optional<Facet> letter_facet(char c) {
    if (c == 'T') return Facet::task;
    if (c == 'M') return Facet::method;
    if (c == 'R') return Facet::resource;
    return std::nullopt;
}

// Authors within `min_hops - 1` coauthor steps, from bylines directly.
std::set<AuthorId> near_authors(const CorpusIndex& corpus, AuthorId user, unsigned min_hops) {
    std::map<AuthorId, std::set<AuthorId>> adj;
    for (const auto& [pid, p] : corpus.papers()) {
        for (AuthorId a : p.authors) {
            for (AuthorId b : p.authors) {
                if (a != b) adj[a].insert(b);
            }
        }
    }
    std::map<AuthorId, unsigned> dist{{user, 0}};
    std::deque<AuthorId> queue{user};
    while (!queue.empty()) {
        AuthorId a = queue.front();
        queue.pop_front();
        for (AuthorId b : adj[a]) {
            if (dist.count(b)) continue;
            dist[b] = dist[a] + 1;
            queue.push_back(b);
        }
    }
    std::set<AuthorId> out;
    for (const auto& [a, d] : dist) {
        if (d < min_hops) out.insert(a);
    }
    return out;
}

}  // namespace

OracleResult oracle_query(const CorpusIndex& corpus, AuthorId user, const std::string& tag,
                          std::size_t k, std::size_t pool_size, unsigned min_hops,
                          const std::optional<std::vector<PaperId>>& user_scope) {
    OracleResult result;
    if (!corpus.has_author(user)) {
        result.error = ErrorCode::unknown_author;
        return result;
    }
    const auto scope = user_scope.value_or(corpus.author(user).paper_ids);
    if (scope.empty()) {
        result.error = ErrorCode::empty_profile;
        return result;
    }
    OracleProfiles profiles(corpus);
    const bool baseline = tag == "ss";
    const auto sim_facet = baseline ? std::nullopt : letter_facet(tag[1]);
    const auto contrast_facet =
        tag.size() == 4 ? letter_facet(tag[3]) : std::optional<Facet>{};

    std::vector<double> user_sim;
    std::vector<double> user_contrast;
    if (baseline) {
        auto v = profiles.paper_vector(user, scope);
        if (!v) {
            result.error = ErrorCode::empty_profile;
            return result;
        }
        user_sim = *v;
    } else {
        auto v = profiles.facet_vector(user, scope, *sim_facet);
        if (!v) {
            result.error = ErrorCode::missing_facet;
            return result;
        }
        user_sim = *v;
        if (contrast_facet) {
            auto c = profiles.facet_vector(user, scope, *contrast_facet);
            if (!c) {
                result.error = ErrorCode::missing_facet;
                return result;
            }
            user_contrast = *c;
        }
    }

    const auto excluded = near_authors(corpus, user, min_hops);
    std::vector<Candidate> pool;
    std::map<AuthorId, std::vector<double>> contrast_vectors;
    for (const auto& [id, author] : corpus.authors()) {
        if (author.paper_ids.empty() || excluded.count(id)) continue;
        auto v = baseline ? profiles.paper_vector(id, author.paper_ids)
                          : profiles.facet_vector(id, author.paper_ids, *sim_facet);
        if (!v || raw_dot(*v, *v) == 0.0) continue;
        if (contrast_facet) {
            auto c = profiles.facet_vector(id, author.paper_ids, *contrast_facet);
            if (!c || raw_dot(*c, *c) == 0.0) continue;
            contrast_vectors[id] = *c;
        }
        pool.push_back({id, oracle_cosine(user_sim, *v), std::nullopt, tag});
    }
    std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
        return a.sim_score > b.sim_score;
    });

    if (contrast_facet) {
        if (pool.size() > pool_size) pool.resize(pool_size);
        for (auto& c : pool) c.contrast_score = oracle_cosine(user_contrast, contrast_vectors[c.author_id]);
        std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
            if (*a.contrast_score != *b.contrast_score) return *a.contrast_score < *b.contrast_score;
            return a.sim_score > b.sim_score;
        });
    }
    if (pool.size() > k) pool.resize(k);
    result.candidates = std::move(pool);
    return result;
}

HopOracle::HopOracle(const CorpusIndex& corpus) {
    for (const auto& [id, a] : corpus.authors()) slot_.emplace(id, n_++);
    const unsigned inf = std::numeric_limits<unsigned>::max() / 2;
    dist_.assign(n_ * n_, inf);
    for (std::size_t i = 0; i < n_; ++i) dist_[i * n_ + i] = 0;
    for (const auto& [pid, p] : corpus.papers()) {
        for (AuthorId a : p.authors) {
            for (AuthorId b : p.authors) {
                if (a != b) dist_[slot_[a] * n_ + slot_[b]] = 1;
            }
        }
    }
    for (std::size_t m = 0; m < n_; ++m) {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                const unsigned via = dist_[i * n_ + m] + dist_[m * n_ + j];
                if (via < dist_[i * n_ + j]) dist_[i * n_ + j] = via;
            }
        }
    }
}

std::optional<unsigned> HopOracle::distance(AuthorId a, AuthorId b) const {
    auto ia = slot_.find(a);
    auto ib = slot_.find(b);
    if (ia == slot_.end() || ib == slot_.end()) return std::nullopt;
    const unsigned d = dist_[ia->second * n_ + ib->second];
    if (d >= std::numeric_limits<unsigned>::max() / 2) return std::nullopt;
    return d;
}

std::vector<double> oracle_pagerank(const std::vector<double>& weights, std::size_t n,
                                    double damping) {
    std::vector<double> google(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += weights[i * n + j];
        for (std::size_t j = 0; j < n; ++j) {
            const double p = row > 0.0 ? weights[i * n + j] / row : 1.0 / static_cast<double>(n);
            google[i * n + j] = damping * p + (1.0 - damping) / static_cast<double>(n);
        }
    }
    std::vector<double> r(n, 1.0 / static_cast<double>(n));
    for (int iter = 0; iter < 100000; ++iter) {
        std::vector<double> next(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) next[j] += r[i] * google[i * n + j];
        }
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - r[i]);
        r = std::move(next);
        if (delta < 1e-15) break;
    }
    return r;
}

std::vector<std::size_t> oracle_ward(const std::vector<std::vector<double>>& points,
                                     double threshold) {
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < points.size(); ++i) clusters.push_back({i});
    auto centroid = [&](const std::vector<std::size_t>& c) {
        std::vector<double> out(points.front().size(), 0.0);
        for (auto i : c) {
            for (std::size_t k = 0; k < out.size(); ++k) out[k] += points[i][k];
        }
        for (auto& v : out) v /= static_cast<double>(c.size());
        return out;
    };
    while (clusters.size() > 1) {
        // Clusters stay ordered by lowest member, so (a, b) index order is the tie-break order.
        double best = std::numeric_limits<double>::infinity();
        std::size_t ba = 0, bb = 0;
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            const auto ca = centroid(clusters[a]);
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const auto cb = centroid(clusters[b]);
                double d2 = 0.0;
                for (std::size_t k = 0; k < ca.size(); ++k) d2 += (ca[k] - cb[k]) * (ca[k] - cb[k]);
                const double na = static_cast<double>(clusters[a].size());
                const double nb = static_cast<double>(clusters[b].size());
                const double cost = std::sqrt(2.0 * na * nb / (na + nb) * d2);
                if (cost < best) {
                    best = cost;
                    ba = a;
                    bb = b;
                }
            }
        }
        if (best > threshold) break;
        clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
        std::sort(clusters[ba].begin(), clusters[ba].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
    }
    std::vector<std::size_t> labels(points.size());
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (auto i : clusters[c]) labels[i] = c;
    }
    return labels;
}

TempDir::TempDir() {
    std::random_device rd;
    const auto base = std::filesystem::temp_directory_path();
    for (;;) {
        path_ = base / ("bridger-test-" + std::to_string(rd()) + std::to_string(rd()));
        if (std::filesystem::create_directory(path_)) break;
    }
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

CorpusIndex tiny_corpus() {
    std::vector<AuthorRecord> authors{
        {1, "Ada Quillfeather", std::string("Zebulon Institute"), {}},
        {2, "Bram Okonkwo", std::nullopt, {}},
        {3, "Cyd Varga", std::string("Lakeside Lab"), {}},
        {4, "Dee Marlowe", std::nullopt, {}},
        {5, "Eli Inactive", std::nullopt, {}},
    };
    std::vector<FacetTerm> terms{
        {10, Facet::task, "graph learning", 10},
        {11, Facet::task, "link prediction", 11},
        {12, Facet::task, "node ranking", 12},
        {20, Facet::method, "random walk", 20},
        {21, Facet::method, "transformer", 21},
        {30, Facet::resource, "cora", 30},
        {40, Facet::topic, "networks", std::nullopt},
    };
    EmbeddingTable term_emb(2);
    term_emb.add(10, std::vector<float>{1.0f, 0.0f});
    term_emb.add(11, std::vector<float>{0.0f, 1.0f});
    term_emb.add(12, std::vector<float>{1.0f, 1.0f});
    term_emb.add(20, std::vector<float>{1.0f, 1.0f});
    term_emb.add(21, std::vector<float>{-1.0f, 1.0f});
    term_emb.add(30, std::vector<float>{1.0f, 0.0f});

    std::vector<PaperRecord> papers;
    auto paper = [&](PaperId id, int year, double importance, std::vector<AuthorId> by,
                     std::vector<TermId> t, std::optional<VenueId> venue,
                     std::vector<PaperId> cites) {
        PaperRecord p;
        p.paper_id = id;
        p.title = "Paper " + std::to_string(id);
        p.year = year;
        p.importance = importance;
        p.authors = std::move(by);
        p.term_ids = std::move(t);
        p.venue_id = venue;
        p.citations = std::move(cites);
        papers.push_back(std::move(p));
    };
    // Term 10 is listed twice on paper 1 and must still count once.
    paper(1, 2018, 10.0, {1, 2}, {10, 20, 40, 10}, 5, {});
    paper(2, 2019, 0.0, {1}, {10, 11, 21}, 6, {1});
    paper(3, 2020, 5.0, {3, 1, 4}, {11, 20, 30}, 5, {1, 2});
    paper(4, 2017, 5.0, {4}, {12, 40, 20}, std::nullopt, {3});

    EmbeddingTable paper_emb(2);
    paper_emb.add(1, std::vector<float>{1.0f, 0.0f});
    paper_emb.add(2, std::vector<float>{0.0f, 1.0f});
    paper_emb.add(3, std::vector<float>{1.0f, 1.0f});
    paper_emb.add(4, std::vector<float>{0.5f, 0.5f});
    return CorpusIndex::build(std::move(papers), std::move(authors), std::move(terms),
                              std::move(paper_emb), std::move(term_emb));
}

}  // namespace bridger::testing
