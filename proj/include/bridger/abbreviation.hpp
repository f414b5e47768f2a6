#pragma once

// Abbreviation definition detection (Schwartz & Hearst style) and term-surface expansion.
//
// A definition is a long form followed by a parenthesized short form, e.g.
// "hidden Markov model (HMM)". The short form is matched right to left against the candidate
// long form; the shortest long form that covers every short-form character in order, with the
// first character at a word start, wins.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bridger/types.hpp"

namespace bridger {

struct AbbreviationPair {
    std::string short_form;
    std::string long_form;
    PaperId source_paper_id = 0;

    bool operator==(const AbbreviationPair&) const = default;
};

// Returns every valid definition in `text`, in order of appearance.
std::vector<AbbreviationPair> find_abbreviation_pairs(std::string_view text,
                                                      PaperId source_paper_id = 0);

// Short form candidacy: 2 to 10 characters, at most two words, at least one letter, first
// character alphanumeric.
bool is_short_form_candidate(std::string_view candidate);

// Right-to-left character match. Returns an empty string when no long form fits.
std::string best_long_form(std::string_view short_form, std::string_view long_form_candidate);

// Per-paper map from short form to long form. The first definition of a short form wins; later
// conflicting definitions are recorded as collisions.
class AbbreviationMap {
public:
    // Returns false when the pair was rejected (collision or a long form that would make
    // expansion non-idempotent).
    bool add(const AbbreviationPair& pair);

    const std::map<std::string, std::string>& pairs() const noexcept { return pairs_; }
    const std::vector<AbbreviationPair>& collisions() const noexcept { return collisions_; }
    bool empty() const noexcept { return pairs_.empty(); }

    static AbbreviationMap from_text(std::string_view text, PaperId source_paper_id = 0);

private:
    std::map<std::string, std::string> pairs_;
    std::vector<AbbreviationPair> collisions_;
};

// Lowercases ASCII letters, collapses whitespace runs to one space and trims.
std::string normalize_surface(std::string_view surface);

// Replaces whole-token, case-sensitive occurrences of each short form with its long form, then
// normalizes.
std::string expand_term_surface(std::string_view surface, const AbbreviationMap& abbreviations);

}  // namespace bridger
