#include <doctest.h>

#include <fstream>
#include <sstream>

#include "bridger/engine.hpp"
#include "bridger/ingest.hpp"
#include "bridger/retrieval.hpp"
#include "support.hpp"

using namespace bridger;
using testing::TempDir;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::invalid_argument;
}

RawCorpus small_raw() {
    RawCorpus raw;
    std::istringstream papers(
        R"({"paper_id":1,"title":"Hidden Markov model (HMM) tagging","year":2016,"venue_id":3,"importance":4,"authors":[1,2],"citations":[1,2],"terms":[10,11]})"
        "\n"
        R"({"paper_id":2,"title":"Plain HMM","year":2018,"venue_id":null,"importance":2,"authors":[2],"citations":[99],"terms":[11,12]})"
        "\n\n"
        R"({"paper_id":3,"title":"Old work","year":2001,"importance":9,"authors":[1],"citations":[],"terms":[10]})"
        "\n");
    std::istringstream authors(
        R"({"author_id":1,"name":"Ann","affiliation":"Lab"})"
        "\n"
        R"({"author_id":2,"name":"Bob","affiliation":null})"
        "\n");
    std::istringstream terms(
        R"({"term_id":10,"facet":"task","surface":"POS Tagging","embedding_id":1})"
        "\n"
        R"({"term_id":11,"facet":"method","surface":"HMM","embedding_id":2})"
        "\n"
        R"({"term_id":12,"facet":"method","surface":"hmm ","embedding_id":2})"
        "\n");
    raw.papers = read_papers_jsonl(papers, "papers.jsonl");
    raw.authors = read_authors_jsonl(authors, "authors.jsonl");
    raw.terms = read_terms_jsonl(terms, "terms.jsonl");
    raw.paper_embeddings = EmbeddingTable(2);
    raw.paper_embeddings.add(1, std::vector<float>{1, 0});
    raw.paper_embeddings.add(2, std::vector<float>{0, 1});
    raw.paper_embeddings.add(3, std::vector<float>{1, 1});
    raw.term_embeddings = EmbeddingTable(2);
    raw.term_embeddings.add(1, std::vector<float>{1, 0});
    raw.term_embeddings.add(2, std::vector<float>{0, 1});
    return raw;
}

}  // namespace

TEST_CASE("embedding table validation") {
    EmbeddingTable t(3);
    t.add(5, std::vector<float>{1, 2, 3});
    CHECK(t.contains(5));
    CHECK(t.row(5)[2] == 3.0f);
    CHECK(code_of([&] { t.add(6, std::vector<float>{1, 2}); }) == ErrorCode::dimension_mismatch);
    CHECK(code_of([&] { t.add(5, std::vector<float>{1, 2, 3}); }) == ErrorCode::invalid_record);
    CHECK(code_of([&] { t.add(7, std::vector<float>{1, NAN, 3}); }) == ErrorCode::invalid_record);
    CHECK_FALSE(t.unit_norm());
}

TEST_CASE("embedding binary round trip and rejection") {
    EmbeddingTable t(2);
    t.add(9, std::vector<float>{0.25f, -1.5f});
    t.add(3, std::vector<float>{1e-7f, 7.0f});
    std::stringstream buf;
    write_embeddings(buf, t);
    const auto bytes = buf.str();
    CHECK(bytes.substr(0, 4) == "BEMB");
    std::istringstream in(bytes);
    const auto back = read_embeddings(in, "t.emb");
    CHECK(back == t);
    CHECK(back.ids() == std::vector<EmbeddingId>{9, 3});

    std::istringstream bad_magic("XEMB" + bytes.substr(4));
    CHECK(code_of([&] { read_embeddings(bad_magic, "t.emb"); }) == ErrorCode::version_mismatch);
    auto wrong_version = bytes;
    wrong_version[4] = 2;
    std::istringstream v2(wrong_version);
    CHECK(code_of([&] { read_embeddings(v2, "t.emb"); }) == ErrorCode::version_mismatch);
    std::istringstream truncated(bytes.substr(0, bytes.size() - 2));
    CHECK(code_of([&] { read_embeddings(truncated, "t.emb"); }) == ErrorCode::parse_error);
}

TEST_CASE("jsonl parse errors name the line") {
    std::istringstream in("{\"author_id\":1,\"name\":\"A\"}\n{broken\n");
    try {
        read_authors_jsonl(in, "authors.jsonl");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::parse_error);
        CHECK(std::string(e.what()).find("authors.jsonl:2") != std::string::npos);
    }
    std::istringstream facet("{\"term_id\":1,\"facet\":\"dataset\",\"surface\":\"x\"}\n");
    CHECK(code_of([&] { read_terms_jsonl(facet, "terms.jsonl"); }) == ErrorCode::parse_error);
    std::istringstream missing("{\"paper_id\":1}\n");
    CHECK(code_of([&] { read_papers_jsonl(missing, "papers.jsonl"); }) == ErrorCode::parse_error);
}

TEST_CASE("corpus build rejects broken references") {
    auto base = [] {
        PaperRecord p;
        p.paper_id = 1;
        p.authors = {1};
        p.year = 2018;
        return p;
    };
    std::vector<AuthorRecord> authors{{1, "A", std::nullopt, {}}};
    auto build = [&](PaperRecord p, std::vector<FacetTerm> terms = {}) {
        EmbeddingTable te(2);
        te.add(1, std::vector<float>{1, 0});
        CorpusIndex::build({std::move(p)}, authors, std::move(terms), EmbeddingTable(2), te);
    };
    auto p = base();
    p.authors = {1, 9};
    CHECK(code_of([&] { build(p); }) == ErrorCode::dangling_reference);
    p = base();
    p.term_ids = {4};
    CHECK(code_of([&] { build(p); }) == ErrorCode::dangling_reference);
    p = base();
    p.authors = {};
    CHECK(code_of([&] { build(p); }) == ErrorCode::invalid_record);
    p = base();
    p.authors = {1, 1};
    CHECK(code_of([&] { build(p); }) == ErrorCode::invalid_record);
    p = base();
    p.citations = {1};
    CHECK(code_of([&] { build(p); }) == ErrorCode::invalid_record);
    CHECK(code_of([&] { build(base(), {{1, Facet::task, "x", std::nullopt}}); }) ==
          ErrorCode::invalid_record);
    CHECK(code_of([&] { build(base(), {{1, Facet::task, "x", 42}}); }) ==
          ErrorCode::dangling_reference);
    CHECK(code_of([&] { build(base(), {{1, Facet::task, "", 1}}); }) == ErrorCode::invalid_record);
}

TEST_CASE("derived structures of the tiny corpus") {
    const auto c = testing::tiny_corpus();
    CHECK(c.author(1).paper_ids == std::vector<PaperId>{1, 2, 3});
    CHECK(c.author(5).paper_ids.empty());
    CHECK(c.active_authors() == std::vector<AuthorId>{1, 2, 3, 4});
    CHECK(c.coauthors(1) == std::vector<AuthorId>{2, 3, 4});
    CHECK(c.coauthors(2) == std::vector<AuthorId>{1});
    CHECK(c.incoming_citations(1) == std::vector<PaperId>{2, 3});
    CHECK(c.incoming_citations(4).empty());
    CHECK(c.paper(1).term_ids == std::vector<TermId>{10, 20, 40});
    CHECK(c.author_position(1, 3) == AuthorPosition::middle);
    CHECK(c.author_position(4, 3) == AuthorPosition::first_or_last);
    CHECK(c.citation_edge_count() == 4);
    CHECK(code_of([&] { c.author_position(2, 2); }) == ErrorCode::unknown_author_on_paper);
    CHECK(code_of([&] { c.paper(77); }) == ErrorCode::unknown_paper);
    CHECK(code_of([&] { c.author(77); }) == ErrorCode::unknown_author);
}

TEST_CASE("ingest filters, cleans and expands") {
    IngestConfig cfg;
    ValidationReport rep;
    const auto c = ingest_records(small_raw(), cfg, &rep);
    CHECK(rep.papers_read == 3);
    CHECK(rep.papers_out_of_window == 1);
    CHECK(rep.self_citations_dropped == 1);
    CHECK(rep.terms_read == 3);
    CHECK(rep.terms_merged == 1);  // "hmm " folds into "HMM"
    CHECK(c.papers().size() == 2);
    CHECK_FALSE(c.find_paper(3));
    CHECK(c.paper(1).citations == std::vector<PaperId>{2});
    // Outgoing citations to papers outside the corpus survive.
    CHECK(c.paper(2).citations == std::vector<PaperId>{99});
    CHECK_FALSE(c.paper(2).venue_id.has_value());

    // Paper 1 defines HMM, so its method term becomes a minted expanded term; paper 2 keeps the
    // raw surface.
    CHECK(rep.terms_expanded == 1);
    CHECK(rep.terms_minted == 1);
    TermId expanded = 0;
    for (TermId t : c.paper(1).term_ids) {
        if (c.term(t).facet == Facet::method) expanded = t;
    }
    CHECK(c.term(expanded).surface == "hidden markov model");
    CHECK(c.term(expanded).embedding_id == std::optional<EmbeddingId>(2));
    CHECK(c.paper(2).term_ids == std::vector<TermId>{11});
    CHECK(c.term(11).surface == "hmm");
    CHECK(c.term(10).surface == "pos tagging");
}

TEST_CASE("ingest importance direction and window") {
    IngestConfig cfg;
    cfg.importance_direction = ImportanceDirection::smaller_better;
    const auto c = ingest_records(small_raw(), cfg);
    CHECK(c.paper(1).importance == -4.0);
    CHECK(c.paper(2).importance == -2.0);

    IngestConfig wide;
    wide.year_min = 2000;
    CHECK(ingest_records(small_raw(), wide).papers().size() == 3);

    IngestConfig bad;
    bad.year_min = 2020;
    bad.year_max = 2010;
    CHECK(code_of([&] { ingest_records(small_raw(), bad); }) == ErrorCode::invalid_argument);

    IngestConfig dims;
    dims.paper_dimension = 3;
    CHECK(code_of([&] { ingest_records(small_raw(), dims); }) == ErrorCode::dimension_mismatch);

    auto raw = small_raw();
    raw.paper_embeddings.add(55, std::vector<float>{1, 1});
    CHECK(code_of([&] { ingest_records(raw, IngestConfig{}); }) == ErrorCode::dangling_reference);
}

TEST_CASE("parse importance direction") {
    CHECK(parse_importance_direction("larger_better") == ImportanceDirection::larger_better);
    CHECK(parse_importance_direction("smaller") == ImportanceDirection::smaller_better);
    CHECK_FALSE(parse_importance_direction("bigger").has_value());
}

TEST_CASE("corpus files round trip") {
    TempDir dir;
    const auto c = testing::random_corpus({.authors = 20, .papers = 40, .seed = 3});
    write_corpus_jsonl(c, dir.path());
    auto cfg = IngestConfig::for_directory(dir.path());
    cfg.year_min = 1900;
    cfg.year_max = 2100;
    CHECK(load_corpus(cfg) == c);
    cfg.papers_path = dir / "missing.jsonl";
    CHECK(code_of([&] { load_corpus(cfg); }) == ErrorCode::storage_io);
}

TEST_CASE("snapshot round trip preserves everything") {
    const auto c = testing::random_corpus({.authors = 30, .papers = 80, .seed = 11});
    for (auto method : {PersonaMethod::paper, PersonaMethod::ego}) {
        Engine engine(c, ProfileStoreOptions{method, 2.5});
        std::stringstream buf;
        write_snapshot(engine, buf);
        auto back = read_snapshot(buf);
        CHECK(back.corpus() == engine.corpus());
        CHECK(back.profiles() == engine.profiles());
        CHECK(back.author_count() == engine.author_count());
        for (AuthorId u : {1, 5, 9}) {
            RecommendOptions o;
            o.pool_size = 10;
            try {
                CHECK(recommend(back, u, std::nullopt, o) == recommend(engine, u, std::nullopt, o));
            } catch (const Error&) {
            }
        }
    }
}

TEST_CASE("snapshot rejects foreign or damaged files") {
    Engine engine(testing::tiny_corpus());
    std::stringstream buf;
    write_snapshot(engine, buf);
    const auto bytes = buf.str();
    std::istringstream magic("XSNP" + bytes.substr(4));
    CHECK(code_of([&] { read_snapshot(magic); }) == ErrorCode::version_mismatch);
    auto v = bytes;
    v[4] = 9;
    std::istringstream version(v);
    CHECK(code_of([&] { read_snapshot(version); }) == ErrorCode::version_mismatch);
    std::istringstream cut(bytes.substr(0, bytes.size() / 2));
    CHECK(code_of([&] { read_snapshot(cut); }) == ErrorCode::parse_error);
    CHECK(code_of([&] { read_snapshot(std::filesystem::path("/nonexistent/x.bsnap")); }) ==
          ErrorCode::storage_io);
}
