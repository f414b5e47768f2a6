#include "bridger/abbreviation.hpp"

#include <algorithm>
#include <cctype>

namespace bridger {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::size_t word_count(std::string_view s) {
    std::size_t n = 0;
    bool in_word = false;
    for (char c : s) {
        if (is_space(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++n;
        }
    }
    return n;
}

// Index of the ')' closing the '(' at `open`, honoring nesting.
std::size_t matching_close(std::string_view text, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < text.size(); ++i) {
        if (text[i] == '(') {
            ++depth;
        } else if (text[i] == ')') {
            if (--depth == 0) return i;
        }
    }
    return std::string_view::npos;
}

// Start of the clause that ends at `end`: just after the last ". ", ", " or "; ".
std::size_t clause_start(std::string_view text, std::size_t end) {
    std::size_t start = 0;
    auto head = text.substr(0, end);
    for (std::string_view sep : {". ", ", ", "; "}) {
        auto at = head.rfind(sep);
        if (at != std::string_view::npos) start = std::max(start, at + sep.size());
    }
    return start;
}

bool acceptable_pair(std::string_view short_form, std::string_view long_form) {
    if (long_form.empty() || long_form.size() < short_form.size()) return false;
    std::string with_space(short_form);
    with_space += ' ';
    if (long_form.find(with_space) != std::string_view::npos) return false;
    if (long_form.size() >= short_form.size() &&
        long_form.substr(long_form.size() - short_form.size()) == short_form) {
        return false;
    }
    const auto sf_chars = static_cast<std::size_t>(
        std::count_if(short_form.begin(), short_form.end(), is_alnum));
    const auto lf_words = word_count(long_form);
    return sf_chars <= 10 && lf_words <= std::min(sf_chars + 5, 2 * sf_chars);
}

}  // namespace

bool is_short_form_candidate(std::string_view candidate) {
    if (candidate.size() < 2 || candidate.size() > 10) return false;
    if (word_count(candidate) > 2) return false;
    if (!is_alnum(candidate.front())) return false;
    return std::any_of(candidate.begin(), candidate.end(), is_alpha);
}

std::string best_long_form(std::string_view short_form, std::string_view long_form) {
    auto l = static_cast<long>(long_form.size()) - 1;
    for (auto s = static_cast<long>(short_form.size()) - 1; s >= 0; --s) {
        const char c = lower(short_form[static_cast<std::size_t>(s)]);
        if (!is_alnum(c)) continue;
        // The first short-form character must also start a word of the long form.
        while ((l >= 0 && lower(long_form[static_cast<std::size_t>(l)]) != c) ||
               (s == 0 && l > 0 && is_alnum(long_form[static_cast<std::size_t>(l - 1)]))) {
            --l;
        }
        if (l < 0) return {};
        --l;
    }
    std::size_t start = 0;
    if (l >= 0) {
        auto space = long_form.rfind(' ', static_cast<std::size_t>(l));
        start = space == std::string_view::npos ? 0 : space + 1;
    }
    return std::string(trim(long_form.substr(start)));
}

std::vector<AbbreviationPair> find_abbreviation_pairs(std::string_view text,
                                                      PaperId source_paper_id) {
    std::vector<AbbreviationPair> out;
    auto marker = text.find(" (");
    while (marker != std::string_view::npos) {
        const auto open = marker + 1;
        const auto close = matching_close(text, open);
        if (close == std::string_view::npos) break;

        auto short_form = text.substr(open + 1, close - open - 1);
        for (std::string_view sep : {", ", "; "}) {
            auto at = short_form.find(sep);
            if (at != std::string_view::npos) short_form = short_form.substr(0, at);
        }
        short_form = trim(short_form);
        auto long_candidate = trim(text.substr(clause_start(text, marker),
                                               marker - clause_start(text, marker)));

        if (is_short_form_candidate(short_form) && short_form.size() <= long_candidate.size()) {
            auto long_form = best_long_form(short_form, long_candidate);
            if (acceptable_pair(short_form, long_form)) {
                out.push_back({std::string(short_form), std::move(long_form), source_paper_id});
            }
        }
        marker = text.find(" (", close);
    }
    return out;
}

bool AbbreviationMap::add(const AbbreviationPair& pair) {
    // An all-lowercase short form would match its own lowercased source token on a second
    // expansion pass.
    if (std::none_of(pair.short_form.begin(), pair.short_form.end(), is_upper)) return false;
    auto [it, inserted] = pairs_.emplace(pair.short_form, pair.long_form);
    if (!inserted && it->second != pair.long_form) {
        collisions_.push_back(pair);
        return false;
    }
    return true;
}

AbbreviationMap AbbreviationMap::from_text(std::string_view text, PaperId source_paper_id) {
    AbbreviationMap map;
    for (const auto& pair : find_abbreviation_pairs(text, source_paper_id)) map.add(pair);
    return map;
}

std::string normalize_surface(std::string_view surface) {
    std::string out;
    out.reserve(surface.size());
    bool pending_space = false;
    for (char c : surface) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += lower(c);
    }
    return out;
}

std::string expand_term_surface(std::string_view surface, const AbbreviationMap& abbreviations) {
    if (abbreviations.empty()) return normalize_surface(surface);
    std::string out;
    std::size_t i = 0;
    while (i < surface.size()) {
        if (i == 0 || !is_alnum(surface[i - 1])) {
            const std::pair<const std::string, std::string>* best = nullptr;
            for (const auto& entry : abbreviations.pairs()) {
                const auto& sf = entry.first;
                const auto end = i + sf.size();
                if (surface.compare(i, sf.size(), sf) != 0) continue;
                if (end < surface.size() && is_alnum(surface[end])) continue;
                if (!best || sf.size() > best->first.size()) best = &entry;
            }
            if (best) {
                out += best->second;
                i += best->first.size();
                continue;
            }
        }
        out += surface[i++];
    }
    return normalize_surface(out);
}

}  // namespace bridger
