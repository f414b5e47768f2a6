#pragma once

#include <unordered_map>

#include "bridger/corpus.hpp"

namespace bridger {

// Byline-position multipliers. The defaults follow computer-science authorship norms; other
// fields may weight middle positions differently.
struct PositionFactors {
    double first_or_last = 1.0;
    double middle = 0.75;

    double operator()(AuthorPosition p) const {
        return p == AuthorPosition::first_or_last ? first_or_last : middle;
    }
};

// Min-max scaling of importance over every indexed paper onto [0.5, 1.0]. When all papers share
// one importance value every paper maps to 1.0.
std::unordered_map<PaperId, double> normalize_importance(const CorpusIndex& index);

// Caches the normalized importance map; paper weights are position factor x normalized
// importance.
class RelevanceModel {
public:
    explicit RelevanceModel(const CorpusIndex& index, PositionFactors factors = {});

    double normalized_importance(PaperId paper) const;

    // Throws unknown_author_on_paper when the author is not on the byline.
    double paper_relevance(AuthorId author, PaperId paper) const;

    const CorpusIndex& index() const noexcept { return *index_; }
    const PositionFactors& factors() const noexcept { return factors_; }

private:
    const CorpusIndex* index_;
    PositionFactors factors_;
    std::unordered_map<PaperId, double> normalized_;
};

double paper_relevance(AuthorId author, PaperId paper, const CorpusIndex& index);

}  // namespace bridger
