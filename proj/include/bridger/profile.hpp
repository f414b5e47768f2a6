#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "bridger/corpus.hpp"
#include "bridger/relevance.hpp"

namespace bridger {

// A relevance-weighted mean together with the weight mass behind it.
struct WeightedVector {
    std::vector<double> values;
    double weight = 0.0;

    bool operator==(const WeightedVector&) const = default;
};

// Faceted aggregate of a whole author (persona == nullopt) or of one persona.
struct AuthorProfile {
    AuthorId author_id = 0;
    std::optional<std::uint32_t> persona;
    std::array<std::optional<WeightedVector>, 3> facets;  // task, method, resource
    std::optional<WeightedVector> paper_vector;
    std::vector<PaperId> paper_ids;
    double total_weight = 0.0;

    const WeightedVector* facet(Facet f) const {
        if (!is_embedded(f)) return nullptr;
        const auto& slot = facets[facet_index(f)];
        return slot ? &*slot : nullptr;
    }

    bool operator==(const AuthorProfile&) const = default;
};

// Weighted mean of the facet's term embeddings over every (paper, term) occurrence in scope.
// A term used in two papers counts twice. nullopt when no occurrence carries an embedding.
std::optional<WeightedVector> facet_embedding(std::span<const PaperId> paper_ids, Facet facet,
                                              AuthorId author, const RelevanceModel& relevance);

// Weighted mean of paper embeddings. Throws empty_profile when no in-scope paper has one.
WeightedVector aggregate_paper_embedding(std::span<const PaperId> paper_ids, AuthorId author,
                                         const RelevanceModel& relevance);

AuthorProfile build_profile(AuthorId author, std::vector<PaperId> paper_ids,
                            const RelevanceModel& relevance,
                            std::optional<std::uint32_t> persona = std::nullopt);

struct Persona {
    AuthorId author_id = 0;
    std::uint32_t ordinal = 0;
    std::vector<PaperId> paper_ids;
    AuthorProfile profile;
    double best_importance = 0.0;

    bool operator==(const Persona&) const = default;
};

enum class PersonaMethod { paper, ego };

std::string_view to_string(PersonaMethod m);
std::optional<PersonaMethod> parse_persona_method(std::string_view s);

inline constexpr double kDefaultWardThreshold = 85.0;

// Ward clustering of the author's paper embeddings. Papers without an embedding join the largest
// cluster. Throws no_embeddings when none of the author's papers has one.
std::vector<Persona> cluster_personas_papers(AuthorId author, const RelevanceModel& relevance,
                                             double distance_threshold = kDefaultWardThreshold);

// Connected components of the author's ego-net (coauthors and the edges among them, ego
// removed). Each paper goes to the component holding most of its coauthors; ties go to the lower
// ordinal and papers without coauthors go to the largest persona.
std::vector<Persona> cluster_personas_ego(AuthorId author, const RelevanceModel& relevance);

// Descending best_importance, then larger paper count, then smaller ordinal.
std::vector<Persona> order_personas(std::vector<Persona> personas);

inline std::span<const Persona> top_two(const std::vector<Persona>& ordered) {
    return std::span<const Persona>(ordered).first(std::min<std::size_t>(2, ordered.size()));
}

struct ProfileStoreOptions {
    PersonaMethod persona_method = PersonaMethod::paper;
    double ward_threshold = kDefaultWardThreshold;

    bool operator==(const ProfileStoreOptions&) const = default;
};

// Ordered personas of one author under `options`. Paper clustering falls back to a single
// persona when none of the author's papers has an embedding.
std::vector<Persona> compute_personas(AuthorId author, const RelevanceModel& relevance,
                                      const ProfileStoreOptions& options);

// Build-once, read-many store of whole-author profiles and ordered personas for every author
// with at least one indexed paper.
class ProfileStore {
public:
    ProfileStore() = default;

    static ProfileStore build(const RelevanceModel& relevance, ProfileStoreOptions options = {});

    // Reassembles a store from serialized parts.
    static ProfileStore from_parts(ProfileStoreOptions options,
                                   std::map<AuthorId, AuthorProfile> profiles,
                                   std::map<AuthorId, std::vector<Persona>> personas);

    const ProfileStoreOptions& options() const noexcept { return options_; }
    const std::map<AuthorId, AuthorProfile>& profiles() const noexcept { return profiles_; }
    const std::map<AuthorId, std::vector<Persona>>& all_personas() const noexcept {
        return personas_;
    }

    const AuthorProfile* find(AuthorId author) const;
    // Throws empty_profile for authors without indexed papers.
    const AuthorProfile& profile(AuthorId author) const;
    // Ordered personas; empty for authors without indexed papers.
    const std::vector<Persona>& personas(AuthorId author) const;
    // Lookup by persona ordinal. Throws invalid_argument when absent.
    const Persona& persona(AuthorId author, std::uint32_t ordinal) const;

    bool operator==(const ProfileStore&) const = default;

private:
    ProfileStoreOptions options_;
    std::map<AuthorId, AuthorProfile> profiles_;
    std::map<AuthorId, std::vector<Persona>> personas_;
};

}  // namespace bridger
