#include "bridger/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <cstring>

#include <json.hpp>

#include "binary_io.hpp"
#include "bridger/abbreviation.hpp"

namespace bridger {

using nlohmann::json;

namespace {

constexpr char kEmbeddingMagic[4] = {'B', 'E', 'M', 'B'};
constexpr std::uint16_t kEmbeddingVersion = 1;

template <typename Fn>
void for_each_jsonl_line(std::istream& in, const std::string& source, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            fn(json::parse(line));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::parse_error,
                        source + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(e.code(), source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::storage_io, "cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::storage_io, "cannot write " + path.string());
    return out;
}

json paper_to_json(const PaperRecord& p) {
    json j = {{"paper_id", p.paper_id},
              {"title", p.title},
              {"year", p.year},
              {"venue_id", p.venue_id ? json(*p.venue_id) : json(nullptr)},
              {"importance", p.importance},
              {"authors", p.authors},
              {"citations", p.citations},
              {"terms", p.term_ids}};
    if (!p.abstract_text.empty()) j["abstract"] = p.abstract_text;
    return j;
}

}  // namespace

std::optional<ImportanceDirection> parse_importance_direction(std::string_view s) {
    if (s == "larger_better" || s == "larger") return ImportanceDirection::larger_better;
    if (s == "smaller_better" || s == "smaller") return ImportanceDirection::smaller_better;
    return std::nullopt;
}

IngestConfig IngestConfig::for_directory(const std::filesystem::path& dir) {
    IngestConfig cfg;
    cfg.papers_path = dir / "papers.jsonl";
    cfg.authors_path = dir / "authors.jsonl";
    cfg.terms_path = dir / "terms.jsonl";
    cfg.paper_embeddings_path = dir / "papers.emb";
    cfg.term_embeddings_path = dir / "terms.emb";
    return cfg;
}

void IngestConfig::validate() const {
    if (year_min > year_max) {
        throw Error(ErrorCode::invalid_argument,
                    "year_min " + std::to_string(year_min) + " exceeds year_max " +
                        std::to_string(year_max));
    }
}

std::string ValidationReport::to_json() const {
    json j = {{"papers_read", papers_read},
              {"papers_out_of_window", papers_out_of_window},
              {"self_citations_dropped", self_citations_dropped},
              {"terms_read", terms_read},
              {"terms_merged", terms_merged},
              {"terms_expanded", terms_expanded},
              {"terms_minted", terms_minted},
              {"abbreviation_collisions", abbreviation_collisions}};
    return j.dump(2);
}

std::vector<PaperRecord> read_papers_jsonl(std::istream& in, const std::string& source) {
    std::vector<PaperRecord> papers;
    for_each_jsonl_line(in, source, [&](const json& j) {
        PaperRecord p;
        p.paper_id = j.at("paper_id").get<PaperId>();
        p.title = j.at("title").get<std::string>();
        p.abstract_text = optional_field<std::string>(j, "abstract").value_or("");
        p.year = j.at("year").get<int>();
        p.venue_id = optional_field<VenueId>(j, "venue_id");
        p.importance = j.at("importance").get<double>();
        p.authors = j.at("authors").get<std::vector<AuthorId>>();
        p.citations = j.at("citations").get<std::vector<PaperId>>();
        p.term_ids = j.at("terms").get<std::vector<TermId>>();
        papers.push_back(std::move(p));
    });
    return papers;
}

std::vector<AuthorRecord> read_authors_jsonl(std::istream& in, const std::string& source) {
    std::vector<AuthorRecord> authors;
    for_each_jsonl_line(in, source, [&](const json& j) {
        AuthorRecord a;
        a.author_id = j.at("author_id").get<AuthorId>();
        a.display_name = j.at("name").get<std::string>();
        a.affiliation = optional_field<std::string>(j, "affiliation");
        authors.push_back(std::move(a));
    });
    return authors;
}

std::vector<FacetTerm> read_terms_jsonl(std::istream& in, const std::string& source) {
    std::vector<FacetTerm> terms;
    for_each_jsonl_line(in, source, [&](const json& j) {
        FacetTerm t;
        t.term_id = j.at("term_id").get<TermId>();
        auto facet_name = j.at("facet").get<std::string>();
        auto facet = parse_facet(facet_name);
        if (!facet) throw Error(ErrorCode::parse_error, "unknown facet \"" + facet_name + "\"");
        t.facet = *facet;
        t.surface = j.at("surface").get<std::string>();
        t.embedding_id = optional_field<EmbeddingId>(j, "embedding_id");
        terms.push_back(std::move(t));
    });
    return terms;
}

void write_papers_jsonl(std::ostream& out, const std::vector<PaperRecord>& papers) {
    std::vector<const PaperRecord*> sorted;
    for (const auto& p : papers) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(),
              [](auto* a, auto* b) { return a->paper_id < b->paper_id; });
    for (const auto* p : sorted) out << paper_to_json(*p).dump() << '\n';
}

void write_authors_jsonl(std::ostream& out, const std::vector<AuthorRecord>& authors) {
    std::vector<const AuthorRecord*> sorted;
    for (const auto& a : authors) sorted.push_back(&a);
    std::sort(sorted.begin(), sorted.end(),
              [](auto* a, auto* b) { return a->author_id < b->author_id; });
    for (const auto* a : sorted) {
        json j = {{"author_id", a->author_id},
                  {"name", a->display_name},
                  {"affiliation", a->affiliation ? json(*a->affiliation) : json(nullptr)}};
        out << j.dump() << '\n';
    }
}

void write_terms_jsonl(std::ostream& out, const std::vector<FacetTerm>& terms) {
    std::vector<const FacetTerm*> sorted;
    for (const auto& t : terms) sorted.push_back(&t);
    std::sort(sorted.begin(), sorted.end(),
              [](auto* a, auto* b) { return a->term_id < b->term_id; });
    for (const auto* t : sorted) {
        json j = {{"term_id", t->term_id},
                  {"facet", std::string(to_string(t->facet))},
                  {"surface", t->surface},
                  {"embedding_id", t->embedding_id ? json(*t->embedding_id) : json(nullptr)}};
        out << j.dump() << '\n';
    }
}

void write_corpus_jsonl(const CorpusIndex& index, const std::filesystem::path& dir) {
    std::vector<PaperRecord> papers;
    for (const auto& [id, p] : index.papers()) papers.push_back(p);
    std::vector<AuthorRecord> authors;
    for (const auto& [id, a] : index.authors()) authors.push_back(a);
    std::vector<FacetTerm> terms;
    for (const auto& [id, t] : index.terms()) terms.push_back(t);
    std::filesystem::create_directories(dir);
    auto p = open_output(dir / "papers.jsonl");
    write_papers_jsonl(p, papers);
    auto a = open_output(dir / "authors.jsonl");
    write_authors_jsonl(a, authors);
    auto t = open_output(dir / "terms.jsonl");
    write_terms_jsonl(t, terms);
    write_embeddings(dir / "papers.emb", index.paper_embeddings());
    write_embeddings(dir / "terms.emb", index.term_embeddings());
}

EmbeddingTable read_embeddings(std::istream& in, const std::string& source) {
    detail::BinaryReader reader(in, source);
    char magic[4];
    reader.read(magic, 4);
    if (std::memcmp(magic, kEmbeddingMagic, 4) != 0) {
        throw Error(ErrorCode::version_mismatch, source + ": bad embedding magic");
    }
    auto version = reader.get_u16();
    if (version != kEmbeddingVersion) {
        throw Error(ErrorCode::version_mismatch,
                    source + ": unsupported embedding version " + std::to_string(version));
    }
    auto dimension = reader.get_u32();
    if (dimension == 0) throw Error(ErrorCode::dimension_mismatch, source + ": zero dimension");
    auto count = reader.get_u64();
    EmbeddingTable table(dimension);
    std::vector<float> row(dimension);
    for (std::uint64_t r = 0; r < count; ++r) {
        auto id = reader.get_u64();
        for (auto& v : row) v = reader.get_f32();
        table.add(id, row);
    }
    if (!reader.at_end()) {
        reader.fail("trailing bytes after " + std::to_string(count) + " declared records");
    }
    return table;
}

EmbeddingTable read_embeddings(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_embeddings(in, path.filename().string());
}

void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
    detail::BinaryWriter writer(out);
    writer.put_bytes(kEmbeddingMagic, 4);
    writer.put_u16(kEmbeddingVersion);
    writer.put_u32(table.dimension());
    writer.put_u64(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        writer.put_u64(table.ids()[i]);
        for (float v : table.row_at(i)) writer.put_f32(v);
    }
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table) {
    auto out = open_output(path);
    write_embeddings(out, table);
    if (!out) throw Error(ErrorCode::storage_io, "failed writing " + path.string());
}

RawCorpus read_raw_corpus(const IngestConfig& config) {
    config.validate();
    RawCorpus raw;
    {
        auto in = open_input(config.papers_path);
        raw.papers = read_papers_jsonl(in, config.papers_path.filename().string());
    }
    {
        auto in = open_input(config.authors_path);
        raw.authors = read_authors_jsonl(in, config.authors_path.filename().string());
    }
    {
        auto in = open_input(config.terms_path);
        raw.terms = read_terms_jsonl(in, config.terms_path.filename().string());
    }
    raw.paper_embeddings = read_embeddings(config.paper_embeddings_path);
    raw.term_embeddings = read_embeddings(config.term_embeddings_path);
    return raw;
}

void write_raw_corpus(const RawCorpus& raw, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto p = open_output(dir / "papers.jsonl");
    write_papers_jsonl(p, raw.papers);
    auto a = open_output(dir / "authors.jsonl");
    write_authors_jsonl(a, raw.authors);
    auto t = open_output(dir / "terms.jsonl");
    write_terms_jsonl(t, raw.terms);
    write_embeddings(dir / "papers.emb", raw.paper_embeddings);
    write_embeddings(dir / "terms.emb", raw.term_embeddings);
}

CorpusIndex ingest_records(RawCorpus raw, const IngestConfig& config, ValidationReport* report) {
    config.validate();
    ValidationReport local;
    ValidationReport& rep = report ? *report : local;
    rep = ValidationReport{};
    rep.papers_read = raw.papers.size();
    rep.terms_read = raw.terms.size();

    auto check_dimension = [](const EmbeddingTable& table, std::optional<std::uint32_t> expected,
                              const char* what) {
        if (expected && !table.empty() && table.dimension() != *expected) {
            throw Error(ErrorCode::dimension_mismatch,
                        std::string(what) + " embeddings have dimension " +
                            std::to_string(table.dimension()) + ", expected " +
                            std::to_string(*expected));
        }
    };
    check_dimension(raw.paper_embeddings, config.paper_dimension, "paper");
    check_dimension(raw.term_embeddings, config.term_dimension, "term");

    // Terms: (facet, normalized surface) identifies a term corpus-wide; the smallest raw id
    // represents each identity.
    std::map<TermId, const FacetTerm*> raw_terms;
    for (const auto& t : raw.terms) {
        if (!raw_terms.emplace(t.term_id, &t).second) {
            throw Error(ErrorCode::invalid_record, "duplicate term id " + std::to_string(t.term_id));
        }
    }
    std::map<std::pair<Facet, std::string>, TermId> identity;
    std::map<TermId, FacetTerm> canonical;
    TermId next_id = raw_terms.empty() ? 0 : raw_terms.rbegin()->first + 1;
    for (const auto& [id, t] : raw_terms) {
        auto surface = normalize_surface(t->surface);
        auto [it, inserted] = identity.emplace(std::make_pair(t->facet, surface), id);
        if (!inserted) {
            ++rep.terms_merged;
            continue;
        }
        canonical[id] = FacetTerm{id, t->facet, surface, t->embedding_id};
    }

    std::vector<PaperRecord> papers;
    std::set<PaperId> all_paper_ids;
    for (auto& p : raw.papers) all_paper_ids.insert(p.paper_id);
    std::sort(raw.papers.begin(), raw.papers.end(),
              [](const auto& a, const auto& b) { return a.paper_id < b.paper_id; });
    for (auto& p : raw.papers) {
        if (p.year < config.year_min || p.year > config.year_max) {
            ++rep.papers_out_of_window;
            continue;
        }
        if (config.importance_direction == ImportanceDirection::smaller_better) {
            p.importance = -p.importance;
        }
        auto self = std::remove(p.citations.begin(), p.citations.end(), p.paper_id);
        if (self != p.citations.end()) {
            ++rep.self_citations_dropped;
            p.citations.erase(self, p.citations.end());
        }

        AbbreviationMap abbreviations = AbbreviationMap::from_text(p.title, p.paper_id);
        for (const auto& pair : find_abbreviation_pairs(p.abstract_text, p.paper_id)) {
            abbreviations.add(pair);
        }
        for (const auto& c : abbreviations.collisions()) {
            rep.abbreviation_collisions.push_back("paper " + std::to_string(p.paper_id) + ": " +
                                                  c.short_form + " -> " + c.long_form +
                                                  " ignored (first definition kept)");
        }

        std::vector<TermId> resolved;
        for (TermId raw_id : p.term_ids) {
            auto found = raw_terms.find(raw_id);
            if (found == raw_terms.end()) {
                throw Error(ErrorCode::dangling_reference,
                            "paper " + std::to_string(p.paper_id) + " references missing term " +
                                std::to_string(raw_id));
            }
            const FacetTerm& t = *found->second;
            auto plain = normalize_surface(t.surface);
            auto expanded = expand_term_surface(t.surface, abbreviations);
            if (expanded == plain) {
                resolved.push_back(identity.at({t.facet, plain}));
                continue;
            }
            ++rep.terms_expanded;
            auto [it, inserted] = identity.emplace(std::make_pair(t.facet, expanded), next_id);
            if (inserted) {
                canonical[next_id] = FacetTerm{next_id, t.facet, expanded, t.embedding_id};
                ++rep.terms_minted;
                ++next_id;
            }
            resolved.push_back(it->second);
        }
        p.term_ids = std::move(resolved);
        papers.push_back(std::move(p));
    }

    std::set<PaperId> kept;
    for (const auto& p : papers) kept.insert(p.paper_id);
    EmbeddingTable paper_embeddings =
        raw.paper_embeddings.dimension() ? EmbeddingTable(raw.paper_embeddings.dimension())
                                         : EmbeddingTable{};
    for (std::size_t i = 0; i < raw.paper_embeddings.size(); ++i) {
        auto id = raw.paper_embeddings.ids()[i];
        if (!all_paper_ids.count(id)) {
            throw Error(ErrorCode::dangling_reference,
                        "paper embedding " + std::to_string(id) + " has no paper record");
        }
        if (kept.count(id)) paper_embeddings.add(id, raw.paper_embeddings.row_at(i));
    }

    std::vector<FacetTerm> terms;
    terms.reserve(canonical.size());
    for (auto& [id, t] : canonical) terms.push_back(std::move(t));

    return CorpusIndex::build(std::move(papers), std::move(raw.authors), std::move(terms),
                              std::move(paper_embeddings), std::move(raw.term_embeddings));
}

CorpusIndex load_corpus(const IngestConfig& config, ValidationReport* report) {
    return ingest_records(read_raw_corpus(config), config, report);
}

}  // namespace bridger
