#include <doctest.h>

#include <set>

#include "bridger/retrieval.hpp"
#include "support.hpp"

using namespace bridger;

namespace {

std::optional<ErrorCode> run(const Engine& e, const RetrievalQuery& q, std::vector<Candidate>& out) {
    try {
        out = run_query(e, q);
    } catch (const Error& err) {
        return err.code();
    }
    return std::nullopt;
}

RetrievalQuery query(AuthorId user, std::string_view tag, std::size_t k, std::size_t pool) {
    auto q = *parse_condition_tag(tag);
    q.user_id = user;
    q.k = k;
    q.pool_size = pool;
    return q;
}

}  // namespace

TEST_CASE("condition tags") {
    CHECK(parse_condition_tag("ss")->condition == Condition::baseline_ss);
    auto st = parse_condition_tag("sT");
    CHECK(st->condition == Condition::similar_facet);
    CHECK(st->sim_facet == Facet::task);
    auto c = parse_condition_tag("sRdM");
    CHECK(c->condition == Condition::contrast);
    CHECK(c->sim_facet == Facet::resource);
    CHECK(c->contrast_facet == Facet::method);
    CHECK(c->tag() == "sRdM");
    CHECK_FALSE(parse_condition_tag("sTdT"));
    CHECK_FALSE(parse_condition_tag("sP"));
    CHECK_FALSE(parse_condition_tag("mixed"));
    CHECK_FALSE(parse_condition_tag(""));
}

TEST_CASE("query validation") {
    Engine e(testing::tiny_corpus());
    auto q = query(1, "sTdM", 5, 3);
    std::vector<Candidate> out;
    CHECK(run(e, q, out) == ErrorCode::invalid_argument);
    q = query(1, "sT", 0, 10);
    CHECK(run(e, q, out) == ErrorCode::invalid_argument);
    CHECK(run(e, query(99, "sT", 4, 10), out) == ErrorCode::unknown_author);
    CHECK(run(e, query(5, "sT", 4, 10), out) == ErrorCode::empty_profile);
    CHECK(run(e, query(2, "sRdM", 4, 10), out) == ErrorCode::missing_facet);
}

TEST_CASE("hop filter on the tiny corpus") {
    Engine e(testing::tiny_corpus());
    std::vector<Candidate> out;
    // Author 2's only coauthor is 1; 3 and 4 are two hops away.
    REQUIRE_FALSE(run(e, query(2, "sT", 10, 10), out));
    std::set<AuthorId> ids;
    for (const auto& c : out) ids.insert(c.author_id);
    CHECK(ids == std::set<AuthorId>{3, 4});
    // Author 1 is adjacent to everyone.
    REQUIRE_FALSE(run(e, query(1, "ss", 10, 10), out));
    CHECK(out.empty());
    auto open = query(1, "ss", 10, 10);
    open.min_hops = 0;
    REQUIRE_FALSE(run(e, open, out));
    CHECK(out.size() == 4);
    CHECK(out[0].author_id == 1);
    CHECK(out[0].sim_score == doctest::Approx(1.0));
}

TEST_CASE("coauthor hops") {
    const auto c = testing::tiny_corpus();
    CHECK(coauthor_hops(c, 2, 2) == HopDistance{HopDistance::Kind::exact, 0});
    CHECK(coauthor_hops(c, 2, 1) == HopDistance{HopDistance::Kind::exact, 1});
    CHECK(coauthor_hops(c, 2, 4) == HopDistance{HopDistance::Kind::exact, 2});
    CHECK(coauthor_hops(c, 2, 4, 1) == HopDistance{HopDistance::Kind::at_least, 1});
    CHECK_FALSE(coauthor_hops(c, 2, 5).reachable());
    CHECK_FALSE(coauthor_hops(c, 2, 99).reachable());
    CHECK(authors_within(c, 2, 2) == std::unordered_set<AuthorId>{1, 2});
    CHECK(authors_within(c, 2, 0).empty());
    CHECK(authors_within(c, 2, 3) == std::unordered_set<AuthorId>{1, 2, 3, 4});
}

TEST_CASE("retrieval matches the brute-force oracle") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto c = testing::random_corpus({.authors = 40, .papers = 70, .quantized = seed % 2 == 0,
                                               .missing_paper_embedding = 0.1, .seed = seed});
        Engine e(c);
        for (AuthorId u = 1; u <= 40; u += 3) {
            for (std::string tag : {"ss", "sT", "sM", "sTdM", "sMdR"}) {
                for (std::size_t pool : {4, 12, 1000}) {
                    CAPTURE(seed);
                    CAPTURE(u);
                    CAPTURE(tag);
                    CAPTURE(pool);
                    std::vector<Candidate> got;
                    auto err = run(e, query(u, tag, 4, pool), got);
                    auto want = testing::oracle_query(c, u, tag, 4, pool, 2);
                    CHECK(err == want.error);
                    if (!err) CHECK(got == want.candidates);
                }
            }
        }
    }
}

TEST_CASE("contrast output lies in the pool and degenerates to a method sort") {
    const auto c = testing::random_corpus({.authors = 60, .papers = 140, .seed = 21});
    Engine e(c);
    std::size_t checked = 0;
    for (AuthorId u = 1; u <= 60; ++u) {
        std::vector<Candidate> pool;
        if (run(e, query(u, "sT", 15, 15), pool)) continue;
        std::vector<Candidate> contrast;
        if (run(e, query(u, "sTdM", 5, 15), contrast)) continue;
        ++checked;
        std::set<AuthorId> pool_ids;
        for (const auto& p : pool) pool_ids.insert(p.author_id);
        for (const auto& x : contrast) CHECK(pool_ids.count(x.author_id));

        std::vector<Candidate> all;
        REQUIRE_FALSE(run(e, query(u, "sTdM", 1000, 1000), all));
        for (std::size_t i = 1; i < all.size(); ++i) {
            CHECK(*all[i - 1].contrast_score <= *all[i].contrast_score);
        }
    }
    CHECK(checked > 10);
}

TEST_CASE("persona scope uses the persona slice") {
    const auto c = testing::random_corpus({.authors = 30, .papers = 120, .paper_dim = 3, .seed = 8});
    Engine e(c, ProfileStoreOptions{PersonaMethod::paper, 1.5});
    std::size_t tested = 0;
    for (AuthorId u : c.active_authors()) {
        for (const auto& p : e.profiles().personas(u)) {
            auto q = query(u, "sTdM", 3, 10);
            q.persona = p.ordinal;
            std::vector<Candidate> got;
            auto err = run(e, q, got);
            auto want = testing::oracle_query(c, u, "sTdM", 3, 10, 2, p.paper_ids);
            CHECK(err == want.error);
            if (!err) CHECK(got == want.candidates);
            ++tested;
        }
    }
    CHECK(tested > 30);
}

TEST_CASE("diagnostics count skips") {
    Engine e(testing::tiny_corpus());
    RetrievalDiagnostics d;
    similar_authors_facet(e, query(2, "sT", 4, 10), &d);
    CHECK(d.considered == 4);
    CHECK(d.skipped_hops == 2);
    CHECK(d.skipped_missing_vector == 0);
}

TEST_CASE("mixed recommendations") {
    const auto c = testing::random_corpus({.authors = 80, .papers = 200, .seed = 12});
    Engine e(c);
    std::size_t whole = 0;
    for (AuthorId u = 1; u <= 80; ++u) {
        RecommendOptions o;
        o.pool_size = 40;
        std::vector<Candidate> cards;
        try {
            cards = recommend(e, u, std::nullopt, o);
        } catch (const Error&) {
            continue;
        }
        ++whole;
        CHECK(cards.size() == 12);
        std::set<AuthorId> ids;
        std::map<std::string, int> per;
        for (const auto& x : cards) {
            ids.insert(x.author_id);
            ++per[x.condition];
            CHECK(x.author_id != u);
        }
        CHECK(ids.size() == cards.size());
        CHECK(per["ss"] == 4);
        CHECK(per["sT"] == 4);
        CHECK(per["sTdM"] == 4);
        // Shuffling is seed-deterministic and only permutes.
        CHECK(recommend(e, u, std::nullopt, o) == cards);
        o.seed = 99;
        auto other = recommend(e, u, std::nullopt, o);
        std::set<AuthorId> other_ids;
        for (const auto& x : other) other_ids.insert(x.author_id);
        CHECK(other_ids == ids);

        for (const auto& p : e.profiles().personas(u)) {
            RecommendOptions po;
            po.pool_size = 40;
            auto four = recommend(e, u, p.ordinal, po);
            std::map<std::string, int> pc;
            for (const auto& x : four) ++pc[x.condition];
            CHECK(four.size() == 4);
            CHECK(pc["sT"] == 2);
            CHECK(pc["sTdM"] == 2);
        }
    }
    CHECK(whole > 40);
}

TEST_CASE("recommend by tag") {
    const auto c = testing::random_corpus({.authors = 50, .papers = 150, .seed = 13});
    Engine e(c);
    for (AuthorId u = 1; u <= 50; ++u) {
        try {
            auto st = recommend_by_tag(e, u, std::nullopt, "sT", 0);
            CHECK(st.size() <= 4);
            CHECK(st == run_query(e, query(u, "sT", 4, 1000)));
            auto mixed = recommend_by_tag(e, u, std::nullopt, "mixed", 6);
            CHECK(mixed.size() <= 6);
        } catch (const Error& err) {
            CHECK((err.code() == ErrorCode::missing_facet || err.code() == ErrorCode::empty_profile));
        }
    }
    CHECK_THROWS_AS(recommend_by_tag(e, 1, std::nullopt, "nope", 4), Error);
}
