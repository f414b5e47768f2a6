#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bridger/types.hpp"

namespace bridger {

// Dense float matrix addressed by sparse embedding ids. Rows keep insertion order so that
// serialization is deterministic.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::uint32_t dimension);

    // Throws dimension_mismatch on a wrong row length, invalid_record on non-finite values or a
    // duplicate id.
    void add(EmbeddingId id, std::span<const float> values);

    std::uint32_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    bool contains(EmbeddingId id) const { return rows_.count(id) != 0; }

    std::optional<std::span<const float>> find(EmbeddingId id) const;
    std::span<const float> row(EmbeddingId id) const;
    std::span<const float> row_at(std::size_t index) const;

    const std::vector<EmbeddingId>& ids() const noexcept { return ids_; }
    std::span<const float> data() const noexcept { return data_; }

    // True when every row has Euclidean norm within `tolerance` of 1.
    bool unit_norm(double tolerance = 1e-4) const;

    // Bytewise comparison of the stored floats.
    bool operator==(const EmbeddingTable& other) const;

private:
    std::uint32_t dimension_ = 0;
    std::vector<EmbeddingId> ids_;
    std::vector<float> data_;
    std::unordered_map<EmbeddingId, std::size_t> rows_;
};

struct PaperRecord {
    PaperId paper_id = 0;
    std::string title;
    std::string abstract_text;
    int year = 0;
    std::optional<VenueId> venue_id;
    // Direction-corrected: larger is always more important.
    double importance = 0.0;
    std::vector<AuthorId> authors;    // byline order
    std::vector<PaperId> citations;   // sorted, unique, never contains paper_id
    std::vector<TermId> term_ids;     // sorted, unique

    bool operator==(const PaperRecord&) const = default;
};

struct FacetTerm {
    TermId term_id = 0;
    Facet facet = Facet::task;
    std::string surface;
    std::optional<EmbeddingId> embedding_id;

    bool operator==(const FacetTerm&) const = default;
};

struct AuthorRecord {
    AuthorId author_id = 0;
    std::string display_name;
    std::optional<std::string> affiliation;
    std::vector<PaperId> paper_ids;  // sorted; derived from paper bylines

    bool operator==(const AuthorRecord&) const = default;
};

enum class AuthorPosition : std::uint8_t { first_or_last, middle };

AuthorPosition resolve_author_position(const PaperRecord& paper, AuthorId author);

// Immutable, validated corpus. Paper embeddings are keyed by paper id; term embeddings by the
// term's embedding_id.
class CorpusIndex {
public:
    CorpusIndex() = default;

    // Validates every referential invariant and derives the incoming-citation and coauthor
    // structures. `authors` may carry empty paper_ids; they are recomputed from bylines.
    static CorpusIndex build(std::vector<PaperRecord> papers, std::vector<AuthorRecord> authors,
                             std::vector<FacetTerm> terms, EmbeddingTable paper_embeddings,
                             EmbeddingTable term_embeddings);

    const std::map<PaperId, PaperRecord>& papers() const noexcept { return papers_; }
    const std::map<AuthorId, AuthorRecord>& authors() const noexcept { return authors_; }
    const std::map<TermId, FacetTerm>& terms() const noexcept { return terms_; }

    const PaperRecord& paper(PaperId id) const;
    const AuthorRecord& author(AuthorId id) const;
    const FacetTerm& term(TermId id) const;
    const PaperRecord* find_paper(PaperId id) const;
    const AuthorRecord* find_author(AuthorId id) const;
    bool has_author(AuthorId id) const { return authors_.count(id) != 0; }

    AuthorPosition author_position(AuthorId author, PaperId paper) const;

    // Citing papers of `id` (sorted); empty for papers nobody cites.
    const std::vector<PaperId>& incoming_citations(PaperId id) const;
    const std::unordered_map<PaperId, std::vector<PaperId>>& incoming_citations() const noexcept {
        return incoming_;
    }
    // Sorted neighbor list in the coauthorship graph.
    const std::vector<AuthorId>& coauthors(AuthorId id) const;

    std::optional<std::span<const float>> paper_embedding(PaperId id) const;
    std::optional<std::span<const float>> term_embedding(TermId id) const;
    const EmbeddingTable& paper_embeddings() const noexcept { return paper_embeddings_; }
    const EmbeddingTable& term_embeddings() const noexcept { return term_embeddings_; }

    // Authors with at least one indexed paper, ascending id.
    std::vector<AuthorId> active_authors() const;

    std::size_t citation_edge_count() const;

    bool operator==(const CorpusIndex& other) const;

private:
    std::map<PaperId, PaperRecord> papers_;
    std::map<AuthorId, AuthorRecord> authors_;
    std::map<TermId, FacetTerm> terms_;
    EmbeddingTable paper_embeddings_;
    EmbeddingTable term_embeddings_;
    std::unordered_map<PaperId, std::vector<PaperId>> incoming_;
    std::unordered_map<AuthorId, std::vector<AuthorId>> coauthors_;
};

}  // namespace bridger
