#include "bridger/retrieval.hpp"

#include <algorithm>
#include <unordered_map>

#include "bridger/random.hpp"

namespace bridger {

namespace {

char facet_letter(Facet f) {
    switch (f) {
        case Facet::task: return 'T';
        case Facet::method: return 'M';
        case Facet::resource: return 'R';
        case Facet::topic: return 'P';
    }
    return '?';
}

std::optional<Facet> facet_from_letter(char c) {
    switch (c) {
        case 'T': return Facet::task;
        case 'M': return Facet::method;
        case 'R': return Facet::resource;
        default: return std::nullopt;
    }
}

const AuthorProfile& user_profile(const Engine& engine, const RetrievalQuery& query) {
    if (!engine.corpus().has_author(query.user_id)) {
        throw Error(ErrorCode::unknown_author, "unknown author " + std::to_string(query.user_id));
    }
    if (query.persona) return engine.profiles().persona(query.user_id, *query.persona).profile;
    return engine.profiles().profile(query.user_id);
}

const std::vector<double>& user_facet(const AuthorProfile& profile, Facet facet, AuthorId user) {
    const auto* v = profile.facet(facet);
    if (!v) {
        throw Error(ErrorCode::missing_facet, "author " + std::to_string(user) + " has no " +
                                                  std::string(to_string(facet)) + " terms");
    }
    return v->values;
}

bool by_score_then_id(const Candidate& a, const Candidate& b) {
    if (a.sim_score != b.sim_score) return a.sim_score > b.sim_score;
    return a.author_id < b.author_id;
}

// Keeps the best `k` by (descending score, ascending id), fully sorted.
void truncate_sorted(std::vector<Candidate>& c, std::size_t k) {
    if (k < c.size()) {
        std::partial_sort(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(k), c.end(),
                          by_score_then_id);
        c.resize(k);
    } else {
        std::sort(c.begin(), c.end(), by_score_then_id);
    }
}

// Scores every eligible candidate with `vector_of` against `user_vec`. Candidates whose vector is
// absent or zero are skipped.
template <typename VectorOf>
std::vector<Candidate> score_pool(const Engine& engine, const RetrievalQuery& query,
                                  const std::vector<double>& user_vec, VectorOf&& vector_of,
                                  RetrievalDiagnostics& diag) {
    const auto excluded = authors_within(engine.corpus(), query.user_id, query.min_hops);
    std::vector<Candidate> out;
    const auto tag = query.tag();
    for (const auto& [author, profile] : engine.profiles().profiles()) {
        ++diag.considered;
        if (excluded.count(author)) {
            ++diag.skipped_hops;
            continue;
        }
        const std::vector<double>* v = vector_of(profile);
        if (!v || v->size() != user_vec.size() || norm(std::span<const double>(*v)) == 0.0) {
            ++diag.skipped_missing_vector;
            continue;
        }
        out.push_back(Candidate{author, cosine(user_vec, *v), std::nullopt, tag});
    }
    return out;
}

}  // namespace

void RetrievalQuery::validate() const {
    if (k == 0) throw Error(ErrorCode::invalid_argument, "k must be positive");
    if (condition != Condition::baseline_ss && !is_embedded(sim_facet)) {
        throw Error(ErrorCode::invalid_argument, "similarity facet must carry embeddings");
    }
    if (condition == Condition::contrast) {
        if (!is_embedded(contrast_facet)) {
            throw Error(ErrorCode::invalid_argument, "contrast facet must carry embeddings");
        }
        if (pool_size < k) throw Error(ErrorCode::invalid_argument, "pool size K must be >= k");
        if (sim_facet == contrast_facet) {
            throw Error(ErrorCode::invalid_argument, "contrast facet must differ from sim facet");
        }
    }
}

std::string RetrievalQuery::tag() const {
    switch (condition) {
        case Condition::baseline_ss: return "ss";
        case Condition::similar_facet: return std::string("s") + facet_letter(sim_facet);
        case Condition::contrast:
            return std::string("s") + facet_letter(sim_facet) + "d" + facet_letter(contrast_facet);
    }
    return "?";
}

std::optional<RetrievalQuery> parse_condition_tag(std::string_view tag) {
    RetrievalQuery q;
    if (tag == "ss") {
        q.condition = Condition::baseline_ss;
        return q;
    }
    if (tag.size() == 2 && tag[0] == 's') {
        auto f = facet_from_letter(tag[1]);
        if (!f) return std::nullopt;
        q.condition = Condition::similar_facet;
        q.sim_facet = *f;
        return q;
    }
    if (tag.size() == 4 && tag[0] == 's' && tag[2] == 'd') {
        auto s = facet_from_letter(tag[1]);
        auto c = facet_from_letter(tag[3]);
        if (!s || !c || *s == *c) return std::nullopt;
        q.condition = Condition::contrast;
        q.sim_facet = *s;
        q.contrast_facet = *c;
        return q;
    }
    return std::nullopt;
}

HopDistance coauthor_hops(const CorpusIndex& corpus, AuthorId from, AuthorId to,
                          std::optional<unsigned> cap) {
    if (!corpus.has_author(from) || !corpus.has_author(to)) return {};
    if (from == to) return {HopDistance::Kind::exact, 0};
    std::unordered_set<AuthorId> visited{from};
    std::vector<AuthorId> frontier{from};
    unsigned depth = 0;
    while (!frontier.empty()) {
        if (cap && depth >= *cap) return {HopDistance::Kind::at_least, *cap};
        std::vector<AuthorId> next;
        for (AuthorId a : frontier) {
            for (AuthorId b : corpus.coauthors(a)) {
                if (!visited.insert(b).second) continue;
                if (b == to) return {HopDistance::Kind::exact, depth + 1};
                next.push_back(b);
            }
        }
        frontier = std::move(next);
        ++depth;
    }
    return {};
}

std::unordered_set<AuthorId> authors_within(const CorpusIndex& corpus, AuthorId user,
                                            unsigned min_hops) {
    std::unordered_set<AuthorId> out;
    if (min_hops == 0) return out;
    out.insert(user);
    std::vector<AuthorId> frontier{user};
    for (unsigned depth = 1; depth < min_hops && !frontier.empty(); ++depth) {
        std::vector<AuthorId> next;
        for (AuthorId a : frontier) {
            for (AuthorId b : corpus.coauthors(a)) {
                if (out.insert(b).second) next.push_back(b);
            }
        }
        frontier = std::move(next);
    }
    return out;
}

std::vector<Candidate> similar_authors_baseline(const Engine& engine, const RetrievalQuery& query,
                                                RetrievalDiagnostics* diagnostics) {
    query.validate();
    RetrievalDiagnostics diag;
    const auto& user = user_profile(engine, query);
    if (!user.paper_vector) {
        throw Error(ErrorCode::empty_profile,
                    "author " + std::to_string(query.user_id) + " has no paper embedding");
    }
    auto out = score_pool(engine, query, user.paper_vector->values,
                          [](const AuthorProfile& p) -> const std::vector<double>* {
                              return p.paper_vector ? &p.paper_vector->values : nullptr;
                          },
                          diag);
    truncate_sorted(out, query.k);
    if (diagnostics) *diagnostics = diag;
    return out;
}

std::vector<Candidate> similar_authors_facet(const Engine& engine, const RetrievalQuery& query,
                                             RetrievalDiagnostics* diagnostics) {
    query.validate();
    RetrievalDiagnostics diag;
    const auto& user = user_profile(engine, query);
    const auto& user_vec = user_facet(user, query.sim_facet, query.user_id);
    auto out = score_pool(engine, query, user_vec,
                          [&](const AuthorProfile& p) -> const std::vector<double>* {
                              const auto* v = p.facet(query.sim_facet);
                              return v ? &v->values : nullptr;
                          },
                          diag);
    truncate_sorted(out, query.k);
    if (diagnostics) *diagnostics = diag;
    return out;
}

std::vector<Candidate> contrast_authors(const Engine& engine, const RetrievalQuery& query,
                                        RetrievalDiagnostics* diagnostics) {
    query.validate();
    RetrievalDiagnostics diag;
    const auto& user = user_profile(engine, query);
    const auto& user_sim = user_facet(user, query.sim_facet, query.user_id);
    const auto& user_contrast = user_facet(user, query.contrast_facet, query.user_id);

    // Stage 1: candidates need both facet vectors to be rankable at all.
    auto pool = score_pool(engine, query, user_sim,
                           [&](const AuthorProfile& p) -> const std::vector<double>* {
                               const auto* c = p.facet(query.contrast_facet);
                               if (!c || norm(std::span<const double>(c->values)) == 0.0) {
                                   return nullptr;
                               }
                               const auto* v = p.facet(query.sim_facet);
                               return v ? &v->values : nullptr;
                           },
                           diag);
    truncate_sorted(pool, query.pool_size);

    // Stage 2: most distant along the contrast facet first.
    for (auto& c : pool) {
        const auto& v = engine.profiles().profile(c.author_id).facet(query.contrast_facet)->values;
        c.contrast_score = cosine(user_contrast, v);
    }
    auto by_contrast = [](const Candidate& a, const Candidate& b) {
        if (*a.contrast_score != *b.contrast_score) return *a.contrast_score < *b.contrast_score;
        if (a.sim_score != b.sim_score) return a.sim_score > b.sim_score;
        return a.author_id < b.author_id;
    };
    if (query.k < pool.size()) {
        std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(query.k),
                          pool.end(), by_contrast);
        pool.resize(query.k);
    } else {
        std::sort(pool.begin(), pool.end(), by_contrast);
    }
    if (diagnostics) *diagnostics = diag;
    return pool;
}

std::vector<Candidate> run_query(const Engine& engine, const RetrievalQuery& query,
                                 RetrievalDiagnostics* diagnostics) {
    switch (query.condition) {
        case Condition::baseline_ss: return similar_authors_baseline(engine, query, diagnostics);
        case Condition::similar_facet: return similar_authors_facet(engine, query, diagnostics);
        case Condition::contrast: return contrast_authors(engine, query, diagnostics);
    }
    return {};
}

std::vector<Candidate> recommend(const Engine& engine, AuthorId user,
                                 std::optional<std::uint32_t> persona,
                                 const RecommendOptions& options) {
    std::vector<RetrievalQuery> conditions;
    RetrievalQuery base;
    base.user_id = user;
    base.persona = persona;
    base.sim_facet = options.sim_facet;
    base.contrast_facet = options.contrast_facet;
    base.min_hops = options.min_hops;
    base.pool_size = options.pool_size;
    base.k = kUnlimited;
    if (!persona) {
        auto ss = base;
        ss.condition = Condition::baseline_ss;
        conditions.push_back(ss);
    }
    auto similar = base;
    similar.condition = Condition::similar_facet;
    conditions.push_back(similar);
    auto contrast = base;
    contrast.condition = Condition::contrast;
    conditions.push_back(contrast);

    const std::size_t total = options.k_total ? options.k_total : (persona ? 4 : 12);
    std::unordered_set<AuthorId> taken;
    std::vector<Candidate> cards;
    for (std::size_t c = 0; c < conditions.size(); ++c) {
        auto quota = total / conditions.size() + (c < total % conditions.size() ? 1 : 0);
        auto q = conditions[c];
        // Contrast rankings are only defined over the first-stage pool, so the pool cannot be
        // unlimited; every other ranking is taken in full for backfill.
        if (q.condition == Condition::contrast) q.k = q.pool_size;
        auto ranking = run_query(engine, q);
        for (const auto& cand : ranking) {
            if (quota == 0) break;
            if (!taken.insert(cand.author_id).second) continue;
            cards.push_back(cand);
            --quota;
        }
    }
    seeded_shuffle(cards, options.seed);
    return cards;
}

std::vector<Candidate> recommend_by_tag(const Engine& engine, AuthorId user,
                                        std::optional<std::uint32_t> persona,
                                        std::string_view condition, std::size_t k,
                                        const RecommendOptions& options) {
    if (condition == "mixed") {
        auto opts = options;
        opts.k_total = k;
        return recommend(engine, user, persona, opts);
    }
    auto query = parse_condition_tag(condition);
    if (!query) {
        throw Error(ErrorCode::invalid_argument,
                    "unknown condition '" + std::string(condition) + "'");
    }
    query->user_id = user;
    query->persona = persona;
    query->k = k ? k : 4;
    query->pool_size = options.pool_size;
    query->min_hops = options.min_hops;
    return run_query(engine, *query);
}

}  // namespace bridger
