#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "bridger/ranking.hpp"
#include "support.hpp"

using namespace bridger;

namespace {

std::vector<TermId> ids(const std::vector<ScoredTerm>& terms) {
    std::vector<TermId> out;
    for (const auto& t : terms) out.push_back(t.term_id);
    return out;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("tfidf counts each term once per paper") {
    Engine e(testing::tiny_corpus());
    auto task = rank_terms_tfidf(e, 1, Facet::task);
    REQUIRE(task.size() == 2);
    CHECK(task[0].term_id == 10);
    CHECK(task[0].score == doctest::Approx(2.0 * std::log(2.0)));
    CHECK(task[1].term_id == 11);
    CHECK(task[1].score == doctest::Approx(2.0 * std::log(4.0 / 3.0)));

    auto method = rank_terms_tfidf(e, 1, Facet::method);
    CHECK(ids(method) == std::vector<TermId>{21, 20});
    CHECK(method[0].score == doctest::Approx(std::log(4.0)));
    CHECK(method[1].score == 0.0);

    auto topic = rank_terms_tfidf(e, 1, Facet::topic);
    REQUIRE(topic.size() == 1);
    CHECK(topic[0].score == doctest::Approx(std::log(4.0 / 3.0)));
    CHECK(code_of([&] { rank_terms_tfidf(e, 2, Facet::resource); }) == ErrorCode::empty_facet);
}

TEST_CASE("relevance ranking sums paper weights") {
    Engine e(testing::tiny_corpus());
    auto task = rank_terms_relevance(e, 1, Facet::task);
    CHECK(ids(task) == std::vector<TermId>{10, 11});
    CHECK(task[0].score == doctest::Approx(1.5));
    CHECK(task[1].score == doctest::Approx(1.0625));
    auto method = rank_terms_relevance(e, 1, Facet::method);
    CHECK(ids(method) == std::vector<TermId>{20, 21});
    CHECK(method[0].score == doctest::Approx(1.5625));
    CHECK(code_of([&] { rank_terms_relevance(e, 2, Facet::resource); }) == ErrorCode::empty_facet);
}

TEST_CASE("textrank on a symmetric pair") {
    Engine e(testing::tiny_corpus());
    auto t = rank_terms_textrank(e, 1, Facet::task);
    REQUIRE(t.size() == 2);
    CHECK(t[0].score == doctest::Approx(0.5));
    CHECK(t[1].score == doctest::Approx(0.5));
    CHECK(ids(t) == std::vector<TermId>{10, 11});
    CHECK(code_of([&] { rank_terms_textrank(e, 1, Facet::topic); }) == ErrorCode::empty_facet);
}

TEST_CASE("weighted pagerank matches the Google-matrix oracle") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 20;
        std::vector<double> w(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (rng() % 5 == 0) continue;  // some missing edges, some dangling nodes
                w[i * n + j] = w[j * n + i] = u(rng);
            }
        }
        const auto got = weighted_pagerank(w, n);
        const auto want = testing::oracle_pagerank(w, n, 0.85);
        CHECK(std::abs(std::accumulate(got.begin(), got.end(), 0.0) - 1.0) <= 1e-9);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-6);
    }
    CHECK(weighted_pagerank({}, 0).empty());
}

TEST_CASE("textrank scores sum to one on random authors") {
    const auto c = testing::random_corpus({.authors = 20, .papers = 80, .seed = 4});
    Engine e(c);
    for (AuthorId a : c.active_authors()) {
        for (Facet f : kEmbeddedFacets) {
            for (bool kernel : {false, true}) {
                TextRankOptions o;
                o.similarity_kernel = kernel;
                std::vector<ScoredTerm> t;
                try {
                    t = rank_terms_textrank(e, a, f, o);
                } catch (const Error& err) {
                    CHECK(err.code() == ErrorCode::empty_facet);
                    continue;
                }
                double s = 0.0;
                for (const auto& x : t) s += x.score;
                CHECK(std::abs(s - 1.0) <= 1e-9);
            }
        }
    }
}

TEST_CASE("random ranking is seed-deterministic") {
    const auto c = testing::random_corpus({.authors = 10, .papers = 60, .seed = 6});
    Engine e(c);
    const AuthorId a = c.active_authors().front();
    auto one = rank_terms_random(e, a, Facet::task, 5);
    CHECK(one == rank_terms_random(e, a, Facet::task, 5));
    const auto n = static_cast<double>(one.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].score == (n - static_cast<double>(i)) / n);
    }
    auto sorted = ids(one);
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == facet_terms(c, c.author(a).paper_ids, Facet::task));
    bool differs = false;
    for (std::uint64_t s = 6; s < 20 && !differs; ++s) {
        differs = ids(rank_terms_random(e, a, Facet::task, s)) != ids(one);
    }
    CHECK(differs);
    Engine tiny(testing::tiny_corpus());
    CHECK(rank_terms_random(tiny, 2, Facet::resource, 1).empty());
}

TEST_CASE("similarity to the user") {
    Engine e(testing::tiny_corpus());
    auto s = rank_terms_by_similarity(e, 4, 2, std::nullopt, Facet::task);
    CHECK(ids(s) == std::vector<TermId>{12, 11});
    CHECK(s[0].score == doctest::Approx(std::sqrt(0.5)));
    CHECK(s[1].score == doctest::Approx(0.0));
    CHECK(code_of([&] { rank_terms_by_similarity(e, 3, 2, std::nullopt, Facet::resource); }) ==
          ErrorCode::missing_facet);
    CHECK(code_of([&] { rank_terms_by_similarity(e, 2, 3, std::nullopt, Facet::resource); }) ==
          ErrorCode::missing_facet);
}

TEST_CASE("rank_terms dispatch") {
    Engine e(testing::tiny_corpus());
    TermRankRequest r;
    r.strategy = TermStrategy::relevance;
    CHECK(rank_terms(e, 1, Facet::task, r) == rank_terms_relevance(e, 1, Facet::task));
    r.strategy = TermStrategy::similarity_to_user;
    r.user = 2;
    CHECK(rank_terms(e, 4, Facet::task, r) ==
          rank_terms_by_similarity(e, 4, 2, std::nullopt, Facet::task));
    for (auto s : {TermStrategy::textrank, TermStrategy::tfidf, TermStrategy::relevance,
                   TermStrategy::random, TermStrategy::similarity_to_user}) {
        CHECK(parse_term_strategy(to_string(s)) == s);
    }
    CHECK_FALSE(parse_term_strategy("bm25"));
}

TEST_CASE("paper ordering") {
    Engine e(testing::tiny_corpus());
    auto recent = rank_papers(e, 1, 2, std::nullopt, PaperSort::recency);
    REQUIRE(recent.size() == 3);
    CHECK(recent[0].paper_id == 3);
    CHECK(recent[1].paper_id == 2);
    CHECK(recent[2].paper_id == 1);
    CHECK(recent[0].score == 2020.0);

    // User 2's only paper embeds at (1, 0).
    auto similar = rank_papers(e, 1, 2, std::nullopt, PaperSort::similarity);
    CHECK(similar[0].paper_id == 1);
    CHECK(similar[0].score == doctest::Approx(1.0));
    CHECK(similar[1].paper_id == 3);
    CHECK(similar[2].paper_id == 2);
    CHECK(similar[2].score == doctest::Approx(0.0));

    const auto c = testing::random_corpus(
        {.authors = 15, .papers = 90, .missing_paper_embedding = 0.2, .seed = 3});
    Engine r(c);
    for (AuthorId a : c.active_authors()) {
        auto p = rank_papers(r, a, 1, std::nullopt, PaperSort::recency);
        for (std::size_t i = 1; i < p.size(); ++i) {
            const auto& x = c.paper(p[i - 1].paper_id);
            const auto& y = c.paper(p[i].paper_id);
            CHECK((x.year > y.year ||
                   (x.year == y.year && (x.importance > y.importance ||
                                         (x.importance == y.importance && x.paper_id < y.paper_id)))));
        }
        auto s = rank_papers(r, a, 1, std::nullopt, PaperSort::similarity);
        CHECK(s.size() == c.author(a).paper_ids.size());
        for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i - 1].score >= s[i].score);
    }
}
