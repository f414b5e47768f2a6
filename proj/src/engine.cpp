#include "bridger/engine.hpp"

#include <cstring>
#include <fstream>
#include <unordered_set>

#include "binary_io.hpp"

namespace bridger {

Engine::Engine(CorpusIndex corpus, ProfileStoreOptions options)
    : corpus_(std::make_unique<CorpusIndex>(std::move(corpus))),
      relevance_(*corpus_),
      store_(ProfileStore::build(relevance_, options)) {
    count_author_frequencies();
}

Engine::Engine(CorpusIndex corpus, ProfileStore store)
    : corpus_(std::make_unique<CorpusIndex>(std::move(corpus))),
      relevance_(*corpus_),
      store_(std::move(store)) {
    count_author_frequencies();
}

void Engine::count_author_frequencies() {
    author_frequency_.clear();
    author_count_ = 0;
    std::unordered_set<TermId> seen;
    for (const auto& [id, author] : corpus_->authors()) {
        if (author.paper_ids.empty()) continue;
        ++author_count_;
        seen.clear();
        for (PaperId pid : author.paper_ids) {
            for (TermId t : corpus_->paper(pid).term_ids) {
                if (seen.insert(t).second) ++author_frequency_[t];
            }
        }
    }
}

std::size_t Engine::author_frequency(TermId term) const {
    auto it = author_frequency_.find(term);
    return it == author_frequency_.end() ? 0 : it->second;
}

namespace {

constexpr char kMagic[4] = {'B', 'S', 'N', 'P'};
constexpr char kTrailer[4] = {'B', 'E', 'N', 'D'};

using detail::BinaryReader;
using detail::BinaryWriter;

void put_ids(BinaryWriter& w, const std::vector<std::uint64_t>& ids) {
    w.put_u64(ids.size());
    for (auto id : ids) w.put_u64(id);
}

std::vector<std::uint64_t> get_ids(BinaryReader& r) {
    auto n = r.get_u64();
    std::vector<std::uint64_t> ids;
    ids.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 20)));
    for (std::uint64_t i = 0; i < n; ++i) ids.push_back(r.get_u64());
    return ids;
}

void put_table(BinaryWriter& w, const EmbeddingTable& t) {
    w.put_u32(t.dimension());
    w.put_u64(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        w.put_u64(t.ids()[i]);
        for (float v : t.row_at(i)) w.put_f32(v);
    }
}

EmbeddingTable get_table(BinaryReader& r) {
    auto dim = r.get_u32();
    auto n = r.get_u64();
    if (dim == 0) {
        if (n != 0) r.fail("rows in a zero-dimension table");
        return EmbeddingTable{};
    }
    EmbeddingTable t(dim);
    std::vector<float> row(dim);
    for (std::uint64_t i = 0; i < n; ++i) {
        auto id = r.get_u64();
        for (auto& v : row) v = r.get_f32();
        t.add(id, row);
    }
    return t;
}

void put_weighted(BinaryWriter& w, const std::optional<WeightedVector>& v) {
    w.put_bool(v.has_value());
    if (!v) return;
    w.put_u64(v->values.size());
    for (double x : v->values) w.put_f64(x);
    w.put_f64(v->weight);
}

std::optional<WeightedVector> get_weighted(BinaryReader& r) {
    if (!r.get_bool()) return std::nullopt;
    WeightedVector v;
    auto n = r.get_u64();
    v.values.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 16)));
    for (std::uint64_t i = 0; i < n; ++i) v.values.push_back(r.get_f64());
    v.weight = r.get_f64();
    return v;
}

void put_profile(BinaryWriter& w, const AuthorProfile& p) {
    w.put_u64(p.author_id);
    w.put_bool(p.persona.has_value());
    w.put_u32(p.persona.value_or(0));
    for (const auto& f : p.facets) put_weighted(w, f);
    put_weighted(w, p.paper_vector);
    put_ids(w, p.paper_ids);
    w.put_f64(p.total_weight);
}

AuthorProfile get_profile(BinaryReader& r) {
    AuthorProfile p;
    p.author_id = r.get_u64();
    bool has_persona = r.get_bool();
    auto ordinal = r.get_u32();
    if (has_persona) p.persona = ordinal;
    for (auto& f : p.facets) f = get_weighted(r);
    p.paper_vector = get_weighted(r);
    p.paper_ids = get_ids(r);
    p.total_weight = r.get_f64();
    return p;
}

}  // namespace

void write_snapshot(const Engine& engine, std::ostream& out) {
    BinaryWriter w(out);
    const auto& corpus = engine.corpus();
    const auto& store = engine.profiles();
    w.put_bytes(kMagic, 4);
    w.put_u16(kSnapshotVersion);
    w.put_u8(static_cast<std::uint8_t>(store.options().persona_method));
    w.put_f64(store.options().ward_threshold);

    w.put_u64(corpus.papers().size());
    for (const auto& [id, p] : corpus.papers()) {
        w.put_u64(p.paper_id);
        w.put_string(p.title);
        w.put_string(p.abstract_text);
        w.put_i32(p.year);
        w.put_bool(p.venue_id.has_value());
        w.put_u64(p.venue_id.value_or(0));
        w.put_f64(p.importance);
        put_ids(w, p.authors);
        put_ids(w, p.citations);
        put_ids(w, p.term_ids);
    }
    w.put_u64(corpus.authors().size());
    for (const auto& [id, a] : corpus.authors()) {
        w.put_u64(a.author_id);
        w.put_string(a.display_name);
        w.put_bool(a.affiliation.has_value());
        w.put_string(a.affiliation.value_or(""));
    }
    w.put_u64(corpus.terms().size());
    for (const auto& [id, t] : corpus.terms()) {
        w.put_u64(t.term_id);
        w.put_u8(static_cast<std::uint8_t>(t.facet));
        w.put_string(t.surface);
        w.put_bool(t.embedding_id.has_value());
        w.put_u64(t.embedding_id.value_or(0));
    }
    put_table(w, corpus.paper_embeddings());
    put_table(w, corpus.term_embeddings());

    w.put_u64(store.profiles().size());
    for (const auto& [id, p] : store.profiles()) put_profile(w, p);
    w.put_u64(store.all_personas().size());
    for (const auto& [id, personas] : store.all_personas()) {
        w.put_u64(id);
        w.put_u64(personas.size());
        for (const auto& p : personas) {
            w.put_u32(p.ordinal);
            w.put_f64(p.best_importance);
            put_profile(w, p.profile);
        }
    }
    w.put_bytes(kTrailer, 4);
}

void write_snapshot(const Engine& engine, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::storage_io, "cannot write " + path.string());
    write_snapshot(engine, out);
    out.flush();
    if (!out) throw Error(ErrorCode::storage_io, "failed writing " + path.string());
}

Engine read_snapshot(std::istream& in, const std::string& source) {
    BinaryReader r(in, source);
    char magic[4];
    try {
        r.read(magic, 4);
    } catch (const Error&) {
        throw Error(ErrorCode::version_mismatch, source + ": missing snapshot header");
    }
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw Error(ErrorCode::version_mismatch, source + ": not a snapshot (bad magic)");
    }
    auto version = r.get_u16();
    if (version != kSnapshotVersion) {
        throw Error(ErrorCode::version_mismatch,
                    source + ": unsupported snapshot version " + std::to_string(version));
    }
    ProfileStoreOptions options;
    auto method = r.get_u8();
    if (method > 1) r.fail("unknown persona method");
    options.persona_method = static_cast<PersonaMethod>(method);
    options.ward_threshold = r.get_f64();

    std::vector<PaperRecord> papers(r.get_u64());
    for (auto& p : papers) {
        p.paper_id = r.get_u64();
        p.title = r.get_string();
        p.abstract_text = r.get_string();
        p.year = r.get_i32();
        bool has_venue = r.get_bool();
        auto venue = r.get_u64();
        if (has_venue) p.venue_id = venue;
        p.importance = r.get_f64();
        p.authors = get_ids(r);
        p.citations = get_ids(r);
        p.term_ids = get_ids(r);
    }
    std::vector<AuthorRecord> authors(r.get_u64());
    for (auto& a : authors) {
        a.author_id = r.get_u64();
        a.display_name = r.get_string();
        bool has_affiliation = r.get_bool();
        auto affiliation = r.get_string();
        if (has_affiliation) a.affiliation = std::move(affiliation);
    }
    std::vector<FacetTerm> terms(r.get_u64());
    for (auto& t : terms) {
        t.term_id = r.get_u64();
        auto facet = r.get_u8();
        if (facet > 3) r.fail("unknown facet code");
        t.facet = static_cast<Facet>(facet);
        t.surface = r.get_string();
        bool has_embedding = r.get_bool();
        auto embedding = r.get_u64();
        if (has_embedding) t.embedding_id = embedding;
    }
    auto paper_table = get_table(r);
    auto term_table = get_table(r);

    std::map<AuthorId, AuthorProfile> profiles;
    auto profile_count = r.get_u64();
    for (std::uint64_t i = 0; i < profile_count; ++i) {
        auto p = get_profile(r);
        auto id = p.author_id;
        profiles.emplace(id, std::move(p));
    }
    std::map<AuthorId, std::vector<Persona>> personas;
    auto persona_authors = r.get_u64();
    for (std::uint64_t i = 0; i < persona_authors; ++i) {
        auto author = r.get_u64();
        auto count = r.get_u64();
        auto& list = personas[author];
        for (std::uint64_t k = 0; k < count; ++k) {
            Persona p;
            p.author_id = author;
            p.ordinal = r.get_u32();
            p.best_importance = r.get_f64();
            p.profile = get_profile(r);
            p.paper_ids = p.profile.paper_ids;
            list.push_back(std::move(p));
        }
    }
    char trailer[4];
    r.read(trailer, 4);
    if (std::memcmp(trailer, kTrailer, 4) != 0) r.fail("corrupt snapshot trailer");

    auto corpus = CorpusIndex::build(std::move(papers), std::move(authors), std::move(terms),
                                     std::move(paper_table), std::move(term_table));
    return Engine(std::move(corpus),
                  ProfileStore::from_parts(options, std::move(profiles), std::move(personas)));
}

Engine read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::storage_io, "cannot open " + path.string());
    return read_snapshot(in, path.filename().string());
}

}  // namespace bridger
