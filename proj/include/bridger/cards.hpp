#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "bridger/engine.hpp"
#include "bridger/ranking.hpp"

namespace bridger {

inline constexpr std::size_t kCardPageSize = 5;
inline constexpr std::size_t kCardMaxItems = 10;

enum class CardSectionKind { papers, topics, tasks, methods, resources };
inline constexpr std::array<CardSectionKind, 5> kCardSections = {
    CardSectionKind::papers, CardSectionKind::topics, CardSectionKind::tasks,
    CardSectionKind::methods, CardSectionKind::resources};

std::string_view to_string(CardSectionKind k);
// Item kind used for checkboxes: "paper", "topic", "task", "method", "resource".
std::string_view item_kind(CardSectionKind k);
bool is_item_kind(std::string_view kind);

struct PaperItem {
    PaperId paper_id = 0;
    std::string title;
    int year = 0;
    std::string position;  // first, last, middle or sole

    bool operator==(const PaperItem&) const = default;
};

struct TermItem {
    TermId term_id = 0;
    std::string surface;
    double score = 0.0;

    bool operator==(const TermItem&) const = default;
};

struct CardSection {
    CardSectionKind kind = CardSectionKind::papers;
    std::vector<PaperItem> papers;  // papers section only
    std::vector<TermItem> terms;    // term sections only
    std::size_t available = 0;      // items before truncation

    std::size_t size() const { return kind == CardSectionKind::papers ? papers.size() : terms.size(); }
    std::size_t page_count() const { return (size() + kCardPageSize - 1) / kCardPageSize; }

    bool operator==(const CardSection&) const = default;
};

struct AuthorCard {
    AuthorId candidate_id = 0;
    std::string token;
    bool anonymized = true;
    std::optional<std::string> name;         // only when not anonymized
    std::optional<std::string> affiliation;  // only when not anonymized
    std::string condition;                   // server-side only, never displayed
    TermStrategy strategy = TermStrategy::tfidf;
    PaperSort paper_sort = PaperSort::similarity;
    std::array<CardSection, 5> sections;

    const CardSection& section(CardSectionKind k) const {
        return sections[static_cast<std::size_t>(k)];
    }
    // Number of checkboxes per item kind.
    std::map<std::string, std::size_t> boxes() const;

    bool operator==(const AuthorCard&) const = default;
};

// 128-bit key for the keyed hash behind anonymization tokens.
struct AnonymizationKey {
    std::array<std::uint8_t, 16> bytes{};

    static AnonymizationKey random();
    static AnonymizationKey from_hex(std::string_view hex);
    std::string to_hex() const;
    bool operator==(const AnonymizationKey&) const = default;
};

// Opaque per-session token for a candidate: stable within a session, unlinkable across
// sessions without the key.
std::string candidate_token(const AnonymizationKey& key, std::string_view session,
                            AuthorId candidate);

std::string_view position_label(const PaperRecord& paper, AuthorId author);

struct CardRequest {
    AuthorId user = 0;
    std::optional<std::uint32_t> persona;
    AuthorId candidate = 0;
    TermStrategy strategy = TermStrategy::tfidf;
    PaperSort paper_sort = PaperSort::similarity;
    bool anonymize = true;
    std::string session;
    std::string condition;
    std::uint64_t seed = 0;  // random strategy
};

// Topics carry no embeddings, so textrank and similarity fall back to tfidf there. A similarity
// request on a facet the user lacks also falls back to tfidf.
AuthorCard assemble_card(const Engine& engine, const CardRequest& request,
                         const AnonymizationKey& key);

struct SelectionEvent {
    std::string session;
    AuthorId user = 0;
    std::string candidate_token;
    std::string kind;
    std::uint64_t item = 0;
    bool checked = false;
    std::uint64_t ts_ms = 0;

    bool operator==(const SelectionEvent&) const = default;
};

// A card placed in front of a user during a session.
struct ShownCard {
    std::string session;
    AuthorId user = 0;
    std::optional<std::uint32_t> persona;
    std::string condition;
    AuthorId candidate = 0;
    std::string token;
    std::map<std::string, std::size_t> boxes;  // by item kind; empty until the card is assembled

    bool operator==(const ShownCard&) const = default;
};

// Append-only, file-backed session log: shown cards in one JSONL file, selection events in
// another. Both are replayed on open. Writers are serialized; readers share a lock.
class SessionLog {
public:
    // `events_path` holds selection events; shown cards go to events_path + ".shown.jsonl".
    explicit SessionLog(std::filesystem::path events_path);

    // Later registrations of the same (session, token) replace earlier ones.
    void register_card(const ShownCard& card);
    bool has_session(const std::string& session) const;
    std::vector<ShownCard> shown(const std::string& session) const;
    std::optional<ShownCard> find_shown(const std::string& session, const std::string& token) const;

    // Throws unknown_session, unknown_candidate (token not shown in the session),
    // invalid_argument (bad kind) or storage_io.
    void record(const SelectionEvent& event);
    // Events of the session ordered by timestamp, ties in append order.
    std::vector<SelectionEvent> export_session(const std::string& session) const;

    const std::filesystem::path& events_path() const noexcept { return events_path_; }
    std::filesystem::path shown_path() const;

private:
    void append(std::ofstream& out, const std::filesystem::path& path, const std::string& line);
    void apply_shown(ShownCard card);

    std::filesystem::path events_path_;
    mutable std::shared_mutex mutex_;
    std::ofstream events_out_;
    std::ofstream shown_out_;
    std::map<std::string, std::map<std::string, ShownCard>> shown_;  // session -> token -> card
    std::map<std::string, std::vector<SelectionEvent>> events_;
};

struct CardRatio {
    std::string token;
    AuthorId user = 0;
    std::string condition;
    std::size_t checked = 0;
    std::size_t boxes = 0;
    double ratio = 0.0;

    bool operator==(const CardRatio&) const = default;
};

struct RatioSummary {
    std::vector<CardRatio> cards;  // cards with at least one box, registry order
    std::map<std::pair<AuthorId, std::string>, double> per_user_condition;
    std::map<std::string, double> per_condition;  // mean of per-user means
    std::map<std::pair<std::string, std::string>, double> per_condition_kind;
    double overall = 0.0;  // mean over users of their mean card ratio

    bool operator==(const RatioSummary&) const = default;
};

// Checked share of boxes: per card, then averaged per user and condition, then across users.
// Item state is last-write-wins in timestamp order.
RatioSummary checked_ratio_summary(const std::vector<ShownCard>& shown,
                                   const std::vector<SelectionEvent>& events);

}  // namespace bridger
