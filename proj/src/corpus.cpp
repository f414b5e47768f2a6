#include "bridger/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

namespace bridger {

EmbeddingTable::EmbeddingTable(std::uint32_t dimension) : dimension_(dimension) {
    if (dimension == 0) {
        throw Error(ErrorCode::dimension_mismatch, "embedding dimension must be positive");
    }
}

void EmbeddingTable::add(EmbeddingId id, std::span<const float> values) {
    if (values.size() != dimension_) {
        throw Error(ErrorCode::dimension_mismatch,
                    "embedding " + std::to_string(id) + " has " + std::to_string(values.size()) +
                        " entries, expected " + std::to_string(dimension_));
    }
    for (float v : values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::invalid_record,
                        "embedding " + std::to_string(id) + " contains a non-finite value");
        }
    }
    if (!rows_.emplace(id, ids_.size()).second) {
        throw Error(ErrorCode::invalid_record, "duplicate embedding id " + std::to_string(id));
    }
    ids_.push_back(id);
    data_.insert(data_.end(), values.begin(), values.end());
}

std::optional<std::span<const float>> EmbeddingTable::find(EmbeddingId id) const {
    auto it = rows_.find(id);
    if (it == rows_.end()) return std::nullopt;
    return row_at(it->second);
}

std::span<const float> EmbeddingTable::row(EmbeddingId id) const {
    auto found = find(id);
    if (!found) {
        throw Error(ErrorCode::dangling_reference, "no embedding with id " + std::to_string(id));
    }
    return *found;
}

std::span<const float> EmbeddingTable::row_at(std::size_t index) const {
    return std::span<const float>(data_).subspan(index * dimension_, dimension_);
}

bool EmbeddingTable::unit_norm(double tolerance) const {
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        double sq = 0.0;
        for (float v : row_at(i)) sq += static_cast<double>(v) * v;
        if (std::abs(std::sqrt(sq) - 1.0) > tolerance) return false;
    }
    return true;
}

bool EmbeddingTable::operator==(const EmbeddingTable& other) const {
    return dimension_ == other.dimension_ && ids_ == other.ids_ &&
           data_.size() == other.data_.size() &&
           (data_.empty() ||
            std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0);
}

AuthorPosition resolve_author_position(const PaperRecord& paper, AuthorId author) {
    auto it = std::find(paper.authors.begin(), paper.authors.end(), author);
    if (it == paper.authors.end()) {
        throw Error(ErrorCode::unknown_author_on_paper,
                    "author " + std::to_string(author) + " is not on paper " +
                        std::to_string(paper.paper_id));
    }
    auto index = static_cast<std::size_t>(it - paper.authors.begin());
    return (index == 0 || index + 1 == paper.authors.size()) ? AuthorPosition::first_or_last
                                                             : AuthorPosition::middle;
}

namespace {

[[noreturn]] void dangling(const std::string& what) {
    throw Error(ErrorCode::dangling_reference, what);
}

const std::vector<std::uint64_t>& empty_ids() {
    static const std::vector<std::uint64_t> empty;
    return empty;
}

}  // namespace

CorpusIndex CorpusIndex::build(std::vector<PaperRecord> papers, std::vector<AuthorRecord> authors,
                               std::vector<FacetTerm> terms, EmbeddingTable paper_embeddings,
                               EmbeddingTable term_embeddings) {
    CorpusIndex index;

    for (auto& term : terms) {
        if (term.surface.empty()) {
            throw Error(ErrorCode::invalid_record,
                        "term " + std::to_string(term.term_id) + " has an empty surface");
        }
        if (is_embedded(term.facet)) {
            if (!term.embedding_id) {
                throw Error(ErrorCode::invalid_record,
                            "term " + std::to_string(term.term_id) + " (" +
                                std::string(to_string(term.facet)) + ") lacks an embedding_id");
            }
        }
        if (term.embedding_id && !term_embeddings.contains(*term.embedding_id)) {
            dangling("term " + std::to_string(term.term_id) + " references missing embedding " +
                     std::to_string(*term.embedding_id));
        }
        auto id = term.term_id;
        if (!index.terms_.emplace(id, std::move(term)).second) {
            throw Error(ErrorCode::invalid_record, "duplicate term id " + std::to_string(id));
        }
    }

    for (auto& author : authors) {
        author.paper_ids.clear();
        auto id = author.author_id;
        if (!index.authors_.emplace(id, std::move(author)).second) {
            throw Error(ErrorCode::invalid_record, "duplicate author id " + std::to_string(id));
        }
    }

    for (auto& paper : papers) {
        const auto pid = paper.paper_id;
        if (paper.authors.empty()) {
            throw Error(ErrorCode::invalid_record,
                        "paper " + std::to_string(pid) + " has no authors");
        }
        std::set<AuthorId> seen;
        for (AuthorId a : paper.authors) {
            if (!seen.insert(a).second) {
                throw Error(ErrorCode::invalid_record, "paper " + std::to_string(pid) +
                                                           " lists author " + std::to_string(a) +
                                                           " twice");
            }
            if (!index.authors_.count(a)) {
                dangling("paper " + std::to_string(pid) + " references missing author " +
                         std::to_string(a));
            }
        }
        std::sort(paper.citations.begin(), paper.citations.end());
        paper.citations.erase(std::unique(paper.citations.begin(), paper.citations.end()),
                              paper.citations.end());
        if (std::binary_search(paper.citations.begin(), paper.citations.end(), pid)) {
            throw Error(ErrorCode::invalid_record,
                        "paper " + std::to_string(pid) + " cites itself");
        }
        std::sort(paper.term_ids.begin(), paper.term_ids.end());
        paper.term_ids.erase(std::unique(paper.term_ids.begin(), paper.term_ids.end()),
                             paper.term_ids.end());
        for (TermId t : paper.term_ids) {
            if (!index.terms_.count(t)) {
                dangling("paper " + std::to_string(pid) + " references missing term " +
                         std::to_string(t));
            }
        }
        if (!index.papers_.emplace(pid, std::move(paper)).second) {
            throw Error(ErrorCode::invalid_record, "duplicate paper id " + std::to_string(pid));
        }
    }

    for (EmbeddingId id : paper_embeddings.ids()) {
        if (!index.papers_.count(id)) {
            dangling("paper embedding " + std::to_string(id) + " has no paper record");
        }
    }
    index.paper_embeddings_ = std::move(paper_embeddings);
    index.term_embeddings_ = std::move(term_embeddings);

    std::map<AuthorId, std::set<AuthorId>> adjacency;
    for (const auto& [pid, paper] : index.papers_) {
        for (PaperId cited : paper.citations) index.incoming_[cited].push_back(pid);
        for (AuthorId a : paper.authors) {
            index.authors_.at(a).paper_ids.push_back(pid);
            for (AuthorId b : paper.authors) {
                if (a != b) adjacency[a].insert(b);
            }
        }
    }
    // Papers are visited in ascending id order, so incoming lists and author paper lists are
    // already sorted.
    for (auto& [a, neighbors] : adjacency) {
        index.coauthors_.emplace(a, std::vector<AuthorId>(neighbors.begin(), neighbors.end()));
    }
    return index;
}

const PaperRecord& CorpusIndex::paper(PaperId id) const {
    auto it = papers_.find(id);
    if (it == papers_.end()) {
        throw Error(ErrorCode::unknown_paper, "unknown paper " + std::to_string(id));
    }
    return it->second;
}

const AuthorRecord& CorpusIndex::author(AuthorId id) const {
    auto it = authors_.find(id);
    if (it == authors_.end()) {
        throw Error(ErrorCode::unknown_author, "unknown author " + std::to_string(id));
    }
    return it->second;
}

const FacetTerm& CorpusIndex::term(TermId id) const {
    auto it = terms_.find(id);
    if (it == terms_.end()) {
        throw Error(ErrorCode::dangling_reference, "unknown term " + std::to_string(id));
    }
    return it->second;
}

const PaperRecord* CorpusIndex::find_paper(PaperId id) const {
    auto it = papers_.find(id);
    return it == papers_.end() ? nullptr : &it->second;
}

const AuthorRecord* CorpusIndex::find_author(AuthorId id) const {
    auto it = authors_.find(id);
    return it == authors_.end() ? nullptr : &it->second;
}

AuthorPosition CorpusIndex::author_position(AuthorId author, PaperId paper_id) const {
    return resolve_author_position(paper(paper_id), author);
}

const std::vector<PaperId>& CorpusIndex::incoming_citations(PaperId id) const {
    auto it = incoming_.find(id);
    return it == incoming_.end() ? empty_ids() : it->second;
}

const std::vector<AuthorId>& CorpusIndex::coauthors(AuthorId id) const {
    auto it = coauthors_.find(id);
    return it == coauthors_.end() ? empty_ids() : it->second;
}

std::optional<std::span<const float>> CorpusIndex::paper_embedding(PaperId id) const {
    return paper_embeddings_.find(id);
}

std::optional<std::span<const float>> CorpusIndex::term_embedding(TermId id) const {
    const auto& t = term(id);
    if (!t.embedding_id) return std::nullopt;
    return term_embeddings_.find(*t.embedding_id);
}

std::vector<AuthorId> CorpusIndex::active_authors() const {
    std::vector<AuthorId> out;
    for (const auto& [id, author] : authors_) {
        if (!author.paper_ids.empty()) out.push_back(id);
    }
    return out;
}

std::size_t CorpusIndex::citation_edge_count() const {
    std::size_t n = 0;
    for (const auto& [id, paper] : papers_) n += paper.citations.size();
    return n;
}

bool CorpusIndex::operator==(const CorpusIndex& other) const {
    return papers_ == other.papers_ && authors_ == other.authors_ && terms_ == other.terms_ &&
           paper_embeddings_ == other.paper_embeddings_ &&
           term_embeddings_ == other.term_embeddings_ && incoming_ == other.incoming_ &&
           coauthors_ == other.coauthors_;
}

}  // namespace bridger
