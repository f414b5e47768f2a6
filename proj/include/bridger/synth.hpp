#pragma once

#include <cstdint>
#include <filesystem>

#include "bridger/ingest.hpp"

namespace bridger {

// Planted-community corpus generator. Communities own disjoint venue pools and method
// vocabularies with separated embedding centroids; research themes (task vocabularies) are
// shared across communities. Citations and coauthorships mostly stay inside a community.
struct SynthOptions {
    std::size_t authors = 100;
    std::size_t communities = 2;
    std::size_t papers = 0;  // 0: five per author
    std::uint64_t seed = 7;
    std::uint32_t paper_dimension = 64;
    std::uint32_t term_dimension = 32;
    std::size_t themes = 6;
    std::size_t task_terms_per_theme = 5;
    std::size_t methods_per_community = 8;
    std::size_t resources_per_community = 4;
    std::size_t venues_per_community = 4;
    std::size_t citations_per_paper = 6;
    // Probability that a citation or coauthor slot crosses communities.
    double cross_citation_prob = 0.05;
    double cross_coauthor_prob = 0.03;
    // 1.0: every community uses the shared theme task terms; lower values give each community
    // private task terms shifted away from the shared centroid.
    double task_overlap = 1.0;
    // Scales the distance between community method centroids.
    double method_separation = 1.0;
    double two_interest_fraction = 0.3;
    // Share of method mentions written as an abbreviation defined in the title.
    double abbreviation_fraction = 0.3;
    int year_min = 2015;
    int year_max = 2021;

    void validate() const;
};

struct SynthCorpus {
    RawCorpus raw;
    std::size_t citation_edges = 0;
    std::vector<std::size_t> author_community;  // indexed by author id - 1
};

SynthCorpus generate_synthetic(const SynthOptions& options);

// papers.jsonl, authors.jsonl, terms.jsonl, papers.emb and terms.emb under `dir`.
void write_synthetic(const SynthCorpus& corpus, const std::filesystem::path& dir);

}  // namespace bridger
