#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bridger/corpus.hpp"

namespace bridger {

enum class ImportanceDirection { larger_better, smaller_better };

std::optional<ImportanceDirection> parse_importance_direction(std::string_view s);

struct IngestConfig {
    int year_min = 2015;
    int year_max = 2021;
    ImportanceDirection importance_direction = ImportanceDirection::larger_better;
    std::filesystem::path papers_path;
    std::filesystem::path authors_path;
    std::filesystem::path terms_path;
    std::filesystem::path paper_embeddings_path;
    std::filesystem::path term_embeddings_path;
    std::filesystem::path snapshot_out;
    // When set, the corresponding embedding file must have exactly this dimension.
    std::optional<std::uint32_t> paper_dimension;
    std::optional<std::uint32_t> term_dimension;

    // papers.jsonl, authors.jsonl, terms.jsonl, papers.emb, terms.emb under `dir`.
    static IngestConfig for_directory(const std::filesystem::path& dir);

    void validate() const;
};

// Source records exactly as parsed: raw surfaces, raw importance, every year.
struct RawCorpus {
    std::vector<PaperRecord> papers;
    std::vector<AuthorRecord> authors;
    std::vector<FacetTerm> terms;
    EmbeddingTable paper_embeddings;
    EmbeddingTable term_embeddings;
};

struct ValidationReport {
    std::size_t papers_read = 0;
    std::size_t papers_out_of_window = 0;
    std::size_t self_citations_dropped = 0;
    std::size_t terms_read = 0;
    std::size_t terms_merged = 0;       // raw terms folded into an existing (facet, surface)
    std::size_t terms_expanded = 0;     // term occurrences rewritten by abbreviation expansion
    std::size_t terms_minted = 0;       // new term ids created by expansion
    std::vector<std::string> abbreviation_collisions;

    std::string to_json() const;
};

// JSONL readers. `source` names the stream in parse errors ("papers.jsonl:17: ...").
std::vector<PaperRecord> read_papers_jsonl(std::istream& in, const std::string& source);
std::vector<AuthorRecord> read_authors_jsonl(std::istream& in, const std::string& source);
std::vector<FacetTerm> read_terms_jsonl(std::istream& in, const std::string& source);

// Canonical writers: sorted keys, records in ascending id order, one object per line.
void write_papers_jsonl(std::ostream& out, const std::vector<PaperRecord>& papers);
void write_authors_jsonl(std::ostream& out, const std::vector<AuthorRecord>& authors);
void write_terms_jsonl(std::ostream& out, const std::vector<FacetTerm>& terms);
void write_corpus_jsonl(const CorpusIndex& index, const std::filesystem::path& dir);

// Binary .emb tables: "BEMB", u16 version 1, u32 dimension, u64 count, then `count` records of
// (u64 id, dimension little-endian float32).
EmbeddingTable read_embeddings(std::istream& in, const std::string& source);
EmbeddingTable read_embeddings(const std::filesystem::path& path);
void write_embeddings(std::ostream& out, const EmbeddingTable& table);
void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table);

RawCorpus read_raw_corpus(const IngestConfig& config);
void write_raw_corpus(const RawCorpus& raw, const std::filesystem::path& dir);

// Year filter, importance direction, self-citation cleanup, abbreviation expansion and term
// deduplication, then full validation.
CorpusIndex ingest_records(RawCorpus raw, const IngestConfig& config,
                           ValidationReport* report = nullptr);

CorpusIndex load_corpus(const IngestConfig& config, ValidationReport* report = nullptr);

}  // namespace bridger
