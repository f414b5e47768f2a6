#include "bridger/profile.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "bridger/ward.hpp"

namespace bridger {

std::string_view to_string(PersonaMethod m) {
    return m == PersonaMethod::paper ? "paper" : "ego";
}

std::optional<PersonaMethod> parse_persona_method(std::string_view s) {
    if (s == "paper") return PersonaMethod::paper;
    if (s == "ego") return PersonaMethod::ego;
    return std::nullopt;
}

std::optional<WeightedVector> facet_embedding(std::span<const PaperId> paper_ids, Facet facet,
                                              AuthorId author, const RelevanceModel& relevance) {
    const auto& index = relevance.index();
    if (!is_embedded(facet)) return std::nullopt;
    std::vector<double> sum;
    double mass = 0.0;
    for (PaperId pid : paper_ids) {
        const auto& paper = index.paper(pid);
        const double w = relevance.paper_relevance(author, pid);
        for (TermId tid : paper.term_ids) {
            const auto& term = index.term(tid);
            if (term.facet != facet) continue;
            auto emb = index.term_embedding(tid);
            if (!emb) continue;
            if (sum.empty()) sum.assign(emb->size(), 0.0);
            for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += w * static_cast<double>((*emb)[k]);
            mass += w;
        }
    }
    if (sum.empty()) return std::nullopt;
    for (auto& v : sum) v /= mass;
    return WeightedVector{std::move(sum), mass};
}

WeightedVector aggregate_paper_embedding(std::span<const PaperId> paper_ids, AuthorId author,
                                         const RelevanceModel& relevance) {
    const auto& index = relevance.index();
    std::vector<double> sum;
    double mass = 0.0;
    for (PaperId pid : paper_ids) {
        const double w = relevance.paper_relevance(author, pid);
        auto emb = index.paper_embedding(pid);
        if (!emb) continue;
        if (sum.empty()) sum.assign(emb->size(), 0.0);
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += w * static_cast<double>((*emb)[k]);
        mass += w;
    }
    if (sum.empty()) {
        throw Error(ErrorCode::empty_profile, "author " + std::to_string(author) +
                                                  " has no embedded papers in scope");
    }
    for (auto& v : sum) v /= mass;
    return WeightedVector{std::move(sum), mass};
}

AuthorProfile build_profile(AuthorId author, std::vector<PaperId> paper_ids,
                            const RelevanceModel& relevance, std::optional<std::uint32_t> persona) {
    AuthorProfile profile;
    profile.author_id = author;
    profile.persona = persona;
    std::sort(paper_ids.begin(), paper_ids.end());
    for (Facet f : kEmbeddedFacets) {
        profile.facets[facet_index(f)] = facet_embedding(paper_ids, f, author, relevance);
    }
    for (PaperId pid : paper_ids) profile.total_weight += relevance.paper_relevance(author, pid);
    if (std::any_of(paper_ids.begin(), paper_ids.end(),
                    [&](PaperId p) { return relevance.index().paper_embedding(p).has_value(); })) {
        profile.paper_vector = aggregate_paper_embedding(paper_ids, author, relevance);
    }
    profile.paper_ids = std::move(paper_ids);
    return profile;
}

namespace {

Persona make_persona(AuthorId author, std::uint32_t ordinal, std::vector<PaperId> papers,
                     const RelevanceModel& relevance) {
    std::sort(papers.begin(), papers.end());
    Persona p;
    p.author_id = author;
    p.ordinal = ordinal;
    p.best_importance = relevance.index().paper(papers.front()).importance;
    for (PaperId pid : papers) {
        p.best_importance = std::max(p.best_importance, relevance.index().paper(pid).importance);
    }
    p.profile = build_profile(author, papers, relevance, ordinal);
    p.paper_ids = std::move(papers);
    return p;
}

// Index of the group with the most papers; ties go to the lower index.
std::size_t largest_group(const std::vector<std::vector<PaperId>>& groups) {
    std::size_t best = 0;
    for (std::size_t g = 1; g < groups.size(); ++g) {
        if (groups[g].size() > groups[best].size()) best = g;
    }
    return best;
}

std::vector<Persona> personas_from_groups(AuthorId author,
                                          std::vector<std::vector<PaperId>> groups,
                                          const RelevanceModel& relevance) {
    std::vector<Persona> out;
    std::uint32_t ordinal = 0;
    for (auto& g : groups) {
        if (g.empty()) continue;
        out.push_back(make_persona(author, ordinal++, std::move(g), relevance));
    }
    return out;
}

}  // namespace

std::vector<Persona> cluster_personas_papers(AuthorId author, const RelevanceModel& relevance,
                                             double distance_threshold) {
    const auto& index = relevance.index();
    const auto& papers = index.author(author).paper_ids;

    std::vector<PaperId> embedded;
    std::vector<PaperId> bare;
    std::vector<std::vector<double>> points;
    for (PaperId pid : papers) {
        auto emb = index.paper_embedding(pid);
        if (!emb) {
            bare.push_back(pid);
            continue;
        }
        embedded.push_back(pid);
        points.emplace_back(emb->begin(), emb->end());
    }
    if (embedded.empty()) {
        throw Error(ErrorCode::no_embeddings,
                    "author " + std::to_string(author) + " has no embedded papers");
    }

    const auto labels = ward_cluster_labels(points, distance_threshold);
    const auto clusters = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::vector<PaperId>> groups(clusters);
    for (std::size_t i = 0; i < embedded.size(); ++i) groups[labels[i]].push_back(embedded[i]);
    auto& sink = groups[largest_group(groups)];
    sink.insert(sink.end(), bare.begin(), bare.end());
    return personas_from_groups(author, std::move(groups), relevance);
}

std::vector<Persona> cluster_personas_ego(AuthorId author, const RelevanceModel& relevance) {
    const auto& index = relevance.index();
    const auto& papers = index.author(author).paper_ids;
    const auto& coauthors = index.coauthors(author);
    if (coauthors.empty()) {
        return personas_from_groups(author, {papers}, relevance);
    }

    // Components of the ego-net, numbered by their smallest member id.
    std::unordered_map<AuthorId, std::size_t> component;
    std::size_t components = 0;
    for (AuthorId seed : coauthors) {
        if (component.count(seed)) continue;
        std::deque<AuthorId> queue{seed};
        component[seed] = components;
        while (!queue.empty()) {
            AuthorId a = queue.front();
            queue.pop_front();
            for (AuthorId b : index.coauthors(a)) {
                if (b == author || component.count(b)) continue;
                if (!std::binary_search(coauthors.begin(), coauthors.end(), b)) continue;
                component[b] = components;
                queue.push_back(b);
            }
        }
        ++components;
    }

    std::vector<std::vector<PaperId>> groups(components);
    std::vector<PaperId> solo;
    for (PaperId pid : papers) {
        std::vector<std::size_t> votes(components, 0);
        bool any = false;
        for (AuthorId a : index.paper(pid).authors) {
            if (a == author) continue;
            ++votes[component.at(a)];
            any = true;
        }
        if (!any) {
            solo.push_back(pid);
            continue;
        }
        auto winner = static_cast<std::size_t>(
            std::max_element(votes.begin(), votes.end()) - votes.begin());
        groups[winner].push_back(pid);
    }
    auto& sink = groups[largest_group(groups)];
    sink.insert(sink.end(), solo.begin(), solo.end());
    return personas_from_groups(author, std::move(groups), relevance);
}

std::vector<Persona> order_personas(std::vector<Persona> personas) {
    std::sort(personas.begin(), personas.end(), [](const Persona& a, const Persona& b) {
        if (a.best_importance != b.best_importance) return a.best_importance > b.best_importance;
        if (a.paper_ids.size() != b.paper_ids.size()) {
            return a.paper_ids.size() > b.paper_ids.size();
        }
        return a.ordinal < b.ordinal;
    });
    return personas;
}

ProfileStore ProfileStore::build(const RelevanceModel& relevance, ProfileStoreOptions options) {
    ProfileStore store;
    store.options_ = options;
    const auto& index = relevance.index();
    for (AuthorId author : index.active_authors()) {
        const auto& papers = index.author(author).paper_ids;
        store.profiles_.emplace(author, build_profile(author, papers, relevance));
        store.personas_.emplace(author, compute_personas(author, relevance, options));
    }
    return store;
}

std::vector<Persona> compute_personas(AuthorId author, const RelevanceModel& relevance,
                                      const ProfileStoreOptions& options) {
    std::vector<Persona> personas;
    if (options.persona_method == PersonaMethod::ego) {
        personas = cluster_personas_ego(author, relevance);
    } else {
        try {
            personas = cluster_personas_papers(author, relevance, options.ward_threshold);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::no_embeddings) throw;
            personas = personas_from_groups(author, {relevance.index().author(author).paper_ids},
                                            relevance);
        }
    }
    return order_personas(std::move(personas));
}

ProfileStore ProfileStore::from_parts(ProfileStoreOptions options,
                                      std::map<AuthorId, AuthorProfile> profiles,
                                      std::map<AuthorId, std::vector<Persona>> personas) {
    ProfileStore store;
    store.options_ = options;
    store.profiles_ = std::move(profiles);
    store.personas_ = std::move(personas);
    return store;
}

const AuthorProfile* ProfileStore::find(AuthorId author) const {
    auto it = profiles_.find(author);
    return it == profiles_.end() ? nullptr : &it->second;
}

const AuthorProfile& ProfileStore::profile(AuthorId author) const {
    const auto* p = find(author);
    if (!p) {
        throw Error(ErrorCode::empty_profile,
                    "author " + std::to_string(author) + " has no indexed papers");
    }
    return *p;
}

const std::vector<Persona>& ProfileStore::personas(AuthorId author) const {
    static const std::vector<Persona> none;
    auto it = personas_.find(author);
    return it == personas_.end() ? none : it->second;
}

const Persona& ProfileStore::persona(AuthorId author, std::uint32_t ordinal) const {
    for (const auto& p : personas(author)) {
        if (p.ordinal == ordinal) return p;
    }
    throw Error(ErrorCode::invalid_argument, "author " + std::to_string(author) +
                                                 " has no persona " + std::to_string(ordinal));
}

}  // namespace bridger
