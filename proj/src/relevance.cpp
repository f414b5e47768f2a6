#include "bridger/relevance.hpp"

#include <algorithm>

namespace bridger {

std::unordered_map<PaperId, double> normalize_importance(const CorpusIndex& index) {
    std::unordered_map<PaperId, double> out;
    if (index.papers().empty()) return out;
    double lo = index.papers().begin()->second.importance;
    double hi = lo;
    for (const auto& [id, paper] : index.papers()) {
        lo = std::min(lo, paper.importance);
        hi = std::max(hi, paper.importance);
    }
    const double span = hi - lo;
    for (const auto& [id, paper] : index.papers()) {
        out[id] = span > 0.0 ? 0.5 + 0.5 * (paper.importance - lo) / span : 1.0;
    }
    return out;
}

RelevanceModel::RelevanceModel(const CorpusIndex& index, PositionFactors factors)
    : index_(&index), factors_(factors), normalized_(normalize_importance(index)) {}

double RelevanceModel::normalized_importance(PaperId paper) const {
    auto it = normalized_.find(paper);
    if (it == normalized_.end()) {
        throw Error(ErrorCode::unknown_paper, "unknown paper " + std::to_string(paper));
    }
    return it->second;
}

double RelevanceModel::paper_relevance(AuthorId author, PaperId paper) const {
    const auto position = resolve_author_position(index_->paper(paper), author);
    return factors_(position) * normalized_importance(paper);
}

double paper_relevance(AuthorId author, PaperId paper, const CorpusIndex& index) {
    return RelevanceModel(index).paper_relevance(author, paper);
}

}  // namespace bridger
