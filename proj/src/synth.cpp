#include "bridger/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "bridger/random.hpp"

namespace bridger {

void SynthOptions::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::invalid_argument, msg); };
    if (communities == 0) fail("communities must be positive");
    if (authors < 2 * communities) fail("need at least two authors per community");
    if (themes == 0 || task_terms_per_theme == 0) fail("themes need task terms");
    if (methods_per_community < 2 || resources_per_community == 0 || venues_per_community == 0) {
        fail("each community needs methods, resources and venues");
    }
    if (paper_dimension == 0 || term_dimension == 0) fail("dimensions must be positive");
    if (year_min > year_max) fail("year_min exceeds year_max");
    for (double p : {cross_citation_prob, cross_coauthor_prob, task_overlap, two_interest_fraction,
                     abbreviation_fraction}) {
        if (!(p >= 0.0 && p <= 1.0)) fail("probabilities must lie in [0, 1]");
    }
    if (!(method_separation >= 0.0)) fail("method_separation must be non-negative");
}

namespace {

class Generator {
public:
    explicit Generator(const SynthOptions& o) : o_(o), rng_(o.seed) {}

    SynthCorpus run();

private:
    struct Method {
        TermId long_term = 0;
        TermId short_term = 0;
        std::string long_form;
        std::string short_form;
    };
    struct Author {
        std::size_t community = 0;
        std::vector<std::size_t> themes;
        std::vector<std::size_t> methods;  // indices into the community's methods
    };

    double unit() { return uniform_unit(rng_); }
    bool chance(double p) { return unit() < p; }
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(uniform_below(rng_, n)); }
    double gaussian() {
        // Box-Muller; portable where std::normal_distribution is not.
        const double u1 = 1.0 - unit();
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    std::vector<double> direction(std::uint32_t dim, double length) {
        std::vector<double> v(dim);
        double n = 0.0;
        for (auto& x : v) {
            x = gaussian();
            n += x * x;
        }
        n = std::sqrt(n);
        for (auto& x : v) x *= length / n;
        return v;
    }
    std::vector<double> jitter(const std::vector<double>& center, double length) {
        auto v = center;
        const double sigma = length / std::sqrt(static_cast<double>(center.size()));
        for (auto& x : v) x += sigma * gaussian();
        return v;
    }
    std::string word();
    std::string unique_phrase(std::size_t words);
    TermId add_term(Facet facet, std::string surface, const std::vector<double>* embedding,
                    std::optional<EmbeddingId> shared = std::nullopt);
    void add_embedding(EmbeddingTable& table, std::uint64_t id, const std::vector<double>& v);

    const SynthOptions& o_;
    std::mt19937_64 rng_;
    std::set<std::string> used_;
    std::set<std::string> used_initials_;
    SynthCorpus out_;
};

std::string Generator::word() {
    static constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p",
                                              "r", "s", "t", "v", "z", "br", "st", "tr", "pl"};
    static constexpr const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "eo"};
    std::string w;
    const std::size_t syllables = 2 + pick(2);
    for (std::size_t i = 0; i < syllables; ++i) {
        w += kOnsets[pick(std::size(kOnsets))];
        w += kVowels[pick(std::size(kVowels))];
    }
    if (chance(0.5)) w += "n";
    return w;
}

std::string Generator::unique_phrase(std::size_t words) {
    for (;;) {
        std::string s;
        for (std::size_t i = 0; i < words; ++i) s += (i ? " " : "") + word();
        if (used_.insert(s).second) return s;
    }
}

void Generator::add_embedding(EmbeddingTable& table, std::uint64_t id,
                              const std::vector<double>& v) {
    std::vector<float> f(v.begin(), v.end());
    table.add(id, f);
}

TermId Generator::add_term(Facet facet, std::string surface, const std::vector<double>* embedding,
                           std::optional<EmbeddingId> shared) {
    const TermId id = out_.raw.terms.size() + 1;
    std::optional<EmbeddingId> emb = shared;
    if (!emb && embedding) {
        add_embedding(out_.raw.term_embeddings, id, *embedding);
        emb = id;
    }
    out_.raw.terms.push_back(FacetTerm{id, facet, std::move(surface), emb});
    return id;
}

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

SynthCorpus Generator::run() {
    const std::size_t C = o_.communities;
    const std::size_t T = o_.themes;
    const std::size_t A = o_.authors;
    const std::size_t N = o_.papers ? o_.papers : 5 * A;
    out_.raw.paper_embeddings = EmbeddingTable(o_.paper_dimension);
    out_.raw.term_embeddings = EmbeddingTable(o_.term_dimension);

    // Term space: shared theme centroids for tasks, community centroids for methods/resources.
    std::vector<std::vector<double>> theme_task(T), community_method(C), community_resource(C);
    for (auto& v : theme_task) v = direction(o_.term_dimension, 10.0);
    for (auto& v : community_method) v = direction(o_.term_dimension, 10.0 * o_.method_separation);
    for (auto& v : community_resource) v = direction(o_.term_dimension, 10.0);

    std::vector<std::vector<TermId>> shared_tasks(T);
    std::vector<std::vector<std::vector<TermId>>> private_tasks(C, std::vector<std::vector<TermId>>(T));
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < o_.task_terms_per_theme; ++i) {
            auto e = jitter(theme_task[t], 3.0);
            shared_tasks[t].push_back(add_term(Facet::task, unique_phrase(2), &e));
        }
    }
    if (o_.task_overlap < 1.0) {
        for (std::size_t c = 0; c < C; ++c) {
            auto shift = direction(o_.term_dimension, 8.0);
            for (std::size_t t = 0; t < T; ++t) {
                for (std::size_t i = 0; i < 2; ++i) {
                    auto center = theme_task[t];
                    for (std::size_t d = 0; d < center.size(); ++d) center[d] += shift[d];
                    auto e = jitter(center, 3.0);
                    private_tasks[c][t].push_back(add_term(Facet::task, unique_phrase(2), &e));
                }
            }
        }
    }
    std::vector<std::vector<Method>> methods(C);
    std::vector<std::vector<TermId>> resources(C);
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t m = 0; m < o_.methods_per_community; ++m) {
            Method method;
            std::string initials;
            do {
                method.long_form = unique_phrase(3);
                initials.clear();
                std::size_t pos = 0;
                while (pos < method.long_form.size()) {
                    initials += static_cast<char>(
                        std::toupper(static_cast<unsigned char>(method.long_form[pos])));
                    pos = method.long_form.find(' ', pos);
                    if (pos == std::string::npos) break;
                    ++pos;
                }
            } while (!used_initials_.insert(initials).second);
            method.short_form = initials;
            auto e = jitter(community_method[c], 4.0);
            method.long_term = add_term(Facet::method, method.long_form, &e);
            const auto shared = out_.raw.terms.back().embedding_id;
            method.short_term = add_term(Facet::method, method.short_form, nullptr, shared);
            methods[c].push_back(std::move(method));
        }
        for (std::size_t r = 0; r < o_.resources_per_community; ++r) {
            auto e = jitter(community_resource[c], 4.0);
            resources[c].push_back(add_term(Facet::resource, unique_phrase(1) + " corpus", &e));
        }
    }
    std::vector<std::vector<TermId>> topics(T);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < 2; ++i) {
            topics[t].push_back(add_term(Facet::topic, unique_phrase(1), nullptr));
        }
    }

    // Paper space: community and theme centroids; Ward-separable at the default threshold.
    std::vector<std::vector<double>> community_center(C), theme_center(T);
    for (auto& v : community_center) v = direction(o_.paper_dimension, 45.0);
    for (auto& v : theme_center) v = direction(o_.paper_dimension, 80.0);

    std::vector<Author> authors(A);
    std::vector<std::vector<std::vector<AuthorId>>> by_theme(C, std::vector<std::vector<AuthorId>>(T));
    std::vector<std::vector<AuthorId>> by_community(C);
    std::vector<std::string> lab_names(C * T);
    for (auto& name : lab_names) name = capitalize(word()) + " Institute";
    for (std::size_t a = 0; a < A; ++a) {
        auto& author = authors[a];
        author.community = a % C;
        author.themes.push_back(pick(T));
        if (T > 1 && chance(o_.two_interest_fraction)) {
            std::size_t second;
            do second = pick(T);
            while (second == author.themes[0]);
            author.themes.push_back(second);
        }
        std::vector<std::size_t> all(o_.methods_per_community);
        for (std::size_t m = 0; m < all.size(); ++m) all[m] = m;
        seeded_shuffle(all, rng_());
        all.resize(std::min<std::size_t>(3, all.size()));
        author.methods = all;
        const AuthorId id = a + 1;
        for (auto t : author.themes) by_theme[author.community][t].push_back(id);
        by_community[author.community].push_back(id);

        AuthorRecord rec;
        rec.author_id = id;
        rec.display_name = capitalize(word()) + " " + capitalize(word());
        if (!chance(0.1)) rec.affiliation = lab_names[author.community * T + author.themes[0]];
        out_.raw.authors.push_back(std::move(rec));
        out_.author_community.push_back(author.community);
    }

    std::vector<std::size_t> paper_community(N), paper_theme(N);
    for (std::size_t i = 0; i < N; ++i) {
        const AuthorId first = i < A ? i + 1 : pick(A) + 1;
        const auto& fa = authors[first - 1];
        const std::size_t c = fa.community;
        const std::size_t theme = fa.themes[pick(fa.themes.size())];
        paper_community[i] = c;
        paper_theme[i] = theme;

        PaperRecord p;
        p.paper_id = i + 1;
        p.year = o_.year_min + static_cast<int>(pick(static_cast<std::size_t>(o_.year_max - o_.year_min + 1)));
        p.authors.push_back(first);
        const std::size_t extra = chance(0.15) ? 0 : 1 + pick(3);
        for (std::size_t k = 0, tries = 0; k < extra && tries < 50; ++tries) {
            AuthorId co;
            if (chance(o_.cross_coauthor_prob) && C > 1) {
                std::size_t other = (c + 1 + pick(C - 1)) % C;
                const auto& pool = by_theme[other][theme].empty() ? by_community[other]
                                                                  : by_theme[other][theme];
                co = pool[pick(pool.size())];
            } else if (chance(0.15) || by_theme[c][theme].size() < 2) {
                co = by_community[c][pick(by_community[c].size())];
            } else {
                co = by_theme[c][theme][pick(by_theme[c][theme].size())];
            }
            if (std::find(p.authors.begin(), p.authors.end(), co) != p.authors.end()) continue;
            p.authors.push_back(co);
            ++k;
        }
        if (!chance(0.05)) {
            const std::size_t v = chance(0.6) ? theme % o_.venues_per_community
                                              : pick(o_.venues_per_community);
            p.venue_id = 100 + c * o_.venues_per_community + v;
        }

        // Terms: two tasks, two methods, one resource, one topic.
        std::set<TermId> terms;
        const auto& task_pool = (o_.task_overlap < 1.0 && !chance(o_.task_overlap))
                                    ? private_tasks[c][theme]
                                    : shared_tasks[theme];
        TermId main_task = task_pool[pick(task_pool.size())];
        terms.insert(main_task);
        terms.insert(task_pool[pick(task_pool.size())]);
        const auto& method = methods[c][fa.methods[pick(fa.methods.size())]];
        const bool abbreviate = chance(o_.abbreviation_fraction);
        terms.insert(abbreviate ? method.short_term : method.long_term);
        terms.insert(methods[c][pick(methods[c].size())].long_term);
        const TermId resource = resources[c][pick(resources[c].size())];
        terms.insert(resource);
        terms.insert(topics[theme][pick(topics[theme].size())]);
        p.term_ids.assign(terms.begin(), terms.end());

        const std::string task = out_.raw.terms[main_task - 1].surface;
        const std::string data = out_.raw.terms[resource - 1].surface;
        if (abbreviate) {
            p.title = capitalize(task) + " with " + method.long_form + " (" + method.short_form + ")";
            p.abstract_text = "We apply " + method.short_form + " to " + task + " on the " + data + ".";
        } else {
            p.title = capitalize(task) + " using " + method.long_form;
            p.abstract_text = "We study " + task + " on the " + data + ".";
        }

        auto embedding = community_center[c];
        for (std::size_t d = 0; d < embedding.size(); ++d) embedding[d] += theme_center[theme][d];
        add_embedding(out_.raw.paper_embeddings, p.paper_id, jitter(embedding, 8.0));
        out_.raw.papers.push_back(std::move(p));
    }

    // Citations, then importance from the planted in-degree.
    std::vector<std::vector<PaperId>> same_theme(C * T), same_community(C);
    for (std::size_t i = 0; i < N; ++i) {
        same_theme[paper_community[i] * T + paper_theme[i]].push_back(i + 1);
        same_community[paper_community[i]].push_back(i + 1);
    }
    std::vector<std::size_t> in_degree(N, 0);
    for (std::size_t i = 0; i < N; ++i) {
        auto& p = out_.raw.papers[i];
        const std::size_t c = paper_community[i];
        std::set<PaperId> cited;
        const std::size_t want = std::min<std::size_t>(o_.citations_per_paper, N - 1);
        for (std::size_t tries = 0; cited.size() < want && tries < 20 * want; ++tries) {
            PaperId q;
            if (C > 1 && chance(o_.cross_citation_prob)) {
                q = pick(N) + 1;
            } else if (chance(0.7)) {
                const auto& pool = same_theme[c * T + paper_theme[i]];
                q = pool[pick(pool.size())];
            } else {
                q = same_community[c][pick(same_community[c].size())];
            }
            if (q != p.paper_id) cited.insert(q);
        }
        p.citations.assign(cited.begin(), cited.end());
        out_.citation_edges += cited.size();
        for (PaperId q : cited) ++in_degree[q - 1];
    }
    for (std::size_t i = 0; i < N; ++i) {
        out_.raw.papers[i].importance = static_cast<double>(in_degree[i]) + 0.5 * unit();
    }
    return std::move(out_);
}

}  // namespace

SynthCorpus generate_synthetic(const SynthOptions& options) {
    options.validate();
    return Generator(options).run();
}

void write_synthetic(const SynthCorpus& corpus, const std::filesystem::path& dir) {
    write_raw_corpus(corpus.raw, dir);
}

}  // namespace bridger
