// Command-line entry points. Every subcommand is a thin shell over library calls and prints
// JSON unless --format table is given. Exit status: 0 success, 1 usage error, 2 data error.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bridger/ingest.hpp"
#include "bridger/metrics.hpp"
#include "bridger/random.hpp"
#include "bridger/serialize.hpp"
#include "bridger/service.hpp"
#include "bridger/synth.hpp"

namespace {

using namespace bridger;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename T, typename Parse>
T parse_or_usage(const std::string& flag, const std::string& value, Parse parse) {
    auto v = parse(value);
    if (!v) throw UsageError(flag + ": invalid value '" + value + "'");
    return *v;
}

void print(const Json& j) { std::cout << dump(j) << '\n'; }

std::optional<std::uint32_t> optional_persona(int persona) {
    if (persona < 0) return std::nullopt;
    return static_cast<std::uint32_t>(persona);
}

std::string terms_table(const Engine& engine, const std::vector<ScoredTerm>& terms) {
    std::ostringstream out;
    out << std::left << std::setw(6) << "rank" << std::setw(10) << "term_id" << std::setw(14)
        << "score" << "surface\n";
    for (std::size_t i = 0; i < terms.size(); ++i) {
        std::ostringstream score;
        score << std::fixed << std::setprecision(6) << terms[i].score;
        out << std::left << std::setw(6) << i + 1 << std::setw(10) << terms[i].term_id
            << std::setw(14) << score.str() << engine.corpus().term(terms[i].term_id).surface
            << '\n';
    }
    return out.str();
}

std::string distances_table(const std::vector<DistanceReport>& reports) {
    std::ostringstream out;
    auto cell = [](std::optional<double> v) {
        if (!v) return std::string("n/a");
        std::ostringstream s;
        s << std::fixed << std::setprecision(3) << *v;
        return s.str();
    };
    out << std::left << std::setw(10) << "candidate" << std::setw(10) << "incoming"
        << std::setw(10) << "outgoing" << std::setw(10) << "venue" << "hops\n";
    for (const auto& r : reports) {
        out << std::left << std::setw(10) << r.candidate << std::setw(10)
            << cell(r.incoming_citation_jaccard) << std::setw(10)
            << cell(r.outgoing_citation_jaccard) << std::setw(10) << cell(r.venue_jaccard)
            << (r.coauthor_hops ? std::to_string(*r.coauthor_hops) : "unreachable") << '\n';
    }
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Faceted author representations and contrast-based author recommendation"};
    app.require_subcommand(1);
    std::string format = "json";
    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}));
    };

    // synth
    SynthOptions synth;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a planted-community corpus");
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--authors", synth.authors, "Number of authors")->capture_default_str();
    synth_cmd->add_option("--communities", synth.communities, "Number of communities")
        ->capture_default_str();
    synth_cmd->add_option("--papers", synth.papers, "Number of papers (0: five per author)")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    synth_cmd->add_option("--paper-dim", synth.paper_dimension, "Paper embedding dimension")
        ->capture_default_str();
    synth_cmd->add_option("--term-dim", synth.term_dimension, "Term embedding dimension")
        ->capture_default_str();
    synth_cmd->add_option("--themes", synth.themes, "Shared research themes")->capture_default_str();
    synth_cmd->add_option("--cross-citation", synth.cross_citation_prob,
                          "Probability a citation crosses communities")
        ->capture_default_str();
    synth_cmd->add_option("--cross-coauthor", synth.cross_coauthor_prob,
                          "Probability a coauthor comes from another community")
        ->capture_default_str();
    synth_cmd->add_option("--task-overlap", synth.task_overlap,
                          "Share of task mentions drawn from shared theme vocabularies")
        ->capture_default_str();
    synth_cmd->add_option("--method-separation", synth.method_separation,
                          "Scale of the distance between community method centroids")
        ->capture_default_str();

    // ingest
    std::string input_dir, snapshot_out, importance = "larger", personas_method = "paper";
    IngestConfig ingest;
    double ward_threshold = kDefaultWardThreshold;
    std::uint32_t paper_dim = 0, term_dim = 0;
    auto* ingest_cmd = app.add_subcommand("ingest", "Validate corpus files and write a snapshot");
    ingest_cmd->add_option("--input", input_dir,
                           "Directory with papers.jsonl, authors.jsonl, terms.jsonl, papers.emb, "
                           "terms.emb");
    ingest_cmd->add_option("--papers", ingest.papers_path, "papers.jsonl path");
    ingest_cmd->add_option("--authors", ingest.authors_path, "authors.jsonl path");
    ingest_cmd->add_option("--terms", ingest.terms_path, "terms.jsonl path");
    ingest_cmd->add_option("--paper-embeddings", ingest.paper_embeddings_path, "papers.emb path");
    ingest_cmd->add_option("--term-embeddings", ingest.term_embeddings_path, "terms.emb path");
    ingest_cmd->add_option("--out", snapshot_out, "Snapshot output path")->required();
    ingest_cmd->add_option("--year-min", ingest.year_min, "First year kept")->capture_default_str();
    ingest_cmd->add_option("--year-max", ingest.year_max, "Last year kept")->capture_default_str();
    ingest_cmd->add_option("--importance", importance, "Direction of the raw importance field")
        ->check(CLI::IsMember({"larger", "smaller", "larger_better", "smaller_better"}))
        ->capture_default_str();
    ingest_cmd->add_option("--personas", personas_method, "Persona clustering method")
        ->check(CLI::IsMember({"paper", "ego"}))
        ->capture_default_str();
    ingest_cmd->add_option("--ward-threshold", ward_threshold, "Ward merge distance threshold")
        ->capture_default_str();
    ingest_cmd->add_option("--paper-dim", paper_dim, "Required paper embedding dimension");
    ingest_cmd->add_option("--term-dim", term_dim, "Required term embedding dimension");

    // Shared query flags.
    std::string snapshot;
    AuthorId author = 0;
    int persona = -1;
    std::uint64_t seed = 0;
    std::size_t k = 0, pool_size = 1000;
    auto add_snapshot = [&](CLI::App* cmd) {
        cmd->add_option("--snapshot", snapshot, "Snapshot path")->required()->envname(
            "BRIDGER_SNAPSHOT");
    };

    auto* personas_cmd = app.add_subcommand("personas", "List an author's ordered personas");
    add_snapshot(personas_cmd);
    std::string persona_listing_method;
    personas_cmd->add_option("--author", author, "Author id")->required();
    personas_cmd->add_option("--method", persona_listing_method, "paper or ego (default: snapshot's)")
        ->check(CLI::IsMember({"paper", "ego"}));

    std::string condition = "mixed", pairs_out;
    auto* recommend_cmd = app.add_subcommand("recommend", "Recommend authors for a user");
    add_snapshot(recommend_cmd);
    recommend_cmd->add_option("--author", author, "User author id")->required();
    recommend_cmd->add_option("--condition", condition, "ss, sT, sTdM (or other tags), or mixed")
        ->capture_default_str();
    recommend_cmd->add_option("--persona", persona, "Persona ordinal of the user");
    recommend_cmd->add_option("--k", k, "Result count (0: condition default)");
    recommend_cmd->add_option("--pool-size", pool_size, "First-stage pool size K for contrasts")
        ->capture_default_str();
    recommend_cmd->add_option("--seed", seed, "Shuffle seed for mixed lists");
    recommend_cmd->add_option("--pairs-out", pairs_out,
                              "Append (user, condition, candidate) pairs to this JSON file");

    std::string facet_name = "task", strategy_name = "tfidf";
    AuthorId user_for_similarity = 0;
    bool similarity_kernel = false;
    std::size_t limit = 0;
    auto* rank_cmd = app.add_subcommand("rank-terms", "Rank an author's terms of one facet");
    add_snapshot(rank_cmd);
    rank_cmd->add_option("--author", author, "Author id")->required();
    rank_cmd->add_option("--facet", facet_name, "task, method, resource or topic")
        ->capture_default_str();
    rank_cmd->add_option("--strategy", strategy_name,
                         "textrank, tfidf, relevance, random or similarity")
        ->capture_default_str();
    rank_cmd->add_option("--user", user_for_similarity, "User for the similarity strategy");
    rank_cmd->add_option("--persona", persona, "User persona for the similarity strategy");
    rank_cmd->add_option("--seed", seed, "Seed for the random strategy");
    rank_cmd->add_flag("--similarity-kernel", similarity_kernel,
                       "TextRank edges weighted 1/(1+distance) instead of distance");
    rank_cmd->add_option("--limit", limit, "Show at most this many terms (0: all)");
    add_format(rank_cmd);

    std::vector<AuthorId> candidates;
    auto* metrics_cmd = app.add_subcommand("metrics", "Distance metrics between a user and candidates");
    add_snapshot(metrics_cmd);
    metrics_cmd->add_option("--user", author, "User author id")->required();
    metrics_cmd->add_option("--candidates", candidates, "Candidate author ids")
        ->required()
        ->delimiter(',');
    add_format(metrics_cmd);

    std::string pairs_file, session, selections_path = "selections.jsonl";
    std::size_t sample_users = 0, resamples = 1000;
    auto* report_cmd = app.add_subcommand("report", "Per-condition distance report");
    add_snapshot(report_cmd);
    auto* pairs_opt = report_cmd->add_option("--pairs", pairs_file,
                                             "JSON array of {user, condition, candidate}");
    auto* sample_opt = report_cmd->add_option(
        "--sample-users", sample_users, "Recommend ss/sT/sTdM for this many sampled users");
    auto* session_opt = report_cmd->add_option("--session", session, "Session id in the log");
    report_cmd->add_option("--selections", selections_path, "Session log path")
        ->capture_default_str();
    report_cmd->add_option("--k", k, "Candidates per condition when sampling (default 4)");
    report_cmd->add_option("--pool-size", pool_size, "First-stage pool size K when sampling")
        ->capture_default_str();
    report_cmd->add_option("--seed", seed, "Seed for user sampling and the bootstrap");
    report_cmd->add_option("--resamples", resamples, "Bootstrap resamples")->capture_default_str();
    pairs_opt->excludes(sample_opt)->excludes(session_opt);
    sample_opt->excludes(session_opt);
    add_format(report_cmd);

    std::string host = "0.0.0.0";
    int port = 8080;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
    add_snapshot(serve_cmd);
    serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();
    serve_cmd->add_option("--port", port, "Bind port")->capture_default_str();
    serve_cmd->add_option("--selections", selections_path, "Session log path")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*synth_cmd) {
            auto corpus = generate_synthetic(synth);
            write_synthetic(corpus, synth_out);
            print(Json{{"out", synth_out},
                       {"papers", corpus.raw.papers.size()},
                       {"authors", corpus.raw.authors.size()},
                       {"terms", corpus.raw.terms.size()},
                       {"citation_edges", corpus.citation_edges}});
        } else if (*ingest_cmd) {
            if (!input_dir.empty()) {
                auto dirs = IngestConfig::for_directory(input_dir);
                if (ingest.papers_path.empty()) ingest.papers_path = dirs.papers_path;
                if (ingest.authors_path.empty()) ingest.authors_path = dirs.authors_path;
                if (ingest.terms_path.empty()) ingest.terms_path = dirs.terms_path;
                if (ingest.paper_embeddings_path.empty()) {
                    ingest.paper_embeddings_path = dirs.paper_embeddings_path;
                }
                if (ingest.term_embeddings_path.empty()) {
                    ingest.term_embeddings_path = dirs.term_embeddings_path;
                }
            }
            ingest.importance_direction = parse_or_usage<ImportanceDirection>(
                "--importance", importance, parse_importance_direction);
            if (paper_dim) ingest.paper_dimension = paper_dim;
            if (term_dim) ingest.term_dimension = term_dim;
            ingest.snapshot_out = snapshot_out;
            ProfileStoreOptions options;
            options.persona_method =
                parse_or_usage<PersonaMethod>("--personas", personas_method, parse_persona_method);
            options.ward_threshold = ward_threshold;
            ValidationReport report;
            Engine engine(load_corpus(ingest, &report), options);
            write_snapshot(engine, ingest.snapshot_out);
            std::cout << report.to_json() << '\n';
        } else if (*personas_cmd) {
            auto engine = read_snapshot(std::filesystem::path(snapshot));
            engine.profiles().profile(author);
            auto options = engine.profiles().options();
            if (!persona_listing_method.empty()) {
                options.persona_method = *parse_persona_method(persona_listing_method);
            }
            const auto personas = options == engine.profiles().options()
                                      ? engine.profiles().personas(author)
                                      : compute_personas(author, engine.relevance(), options);
            print(personas_json(engine, author, personas));
        } else if (*recommend_cmd) {
            auto engine = read_snapshot(std::filesystem::path(snapshot));
            RecommendOptions options;
            options.seed = seed;
            options.pool_size = pool_size;
            auto result =
                recommend_by_tag(engine, author, optional_persona(persona), condition, k, options);
            if (!pairs_out.empty()) {
                Json pairs = Json::array();
                if (std::ifstream in(pairs_out); in) pairs = Json::parse(in);
                for (const auto& c : result) {
                    pairs.push_back(ShownPair{author, c.condition, c.author_id});
                }
                std::ofstream out(pairs_out, std::ios::trunc);
                out << dump(pairs) << '\n';
                if (!out) throw Error(ErrorCode::storage_io, "cannot write " + pairs_out);
            }
            print(candidates_json(result));
        } else if (*rank_cmd) {
            auto engine = read_snapshot(std::filesystem::path(snapshot));
            TermRankRequest request;
            request.strategy =
                parse_or_usage<TermStrategy>("--strategy", strategy_name, parse_term_strategy);
            request.seed = seed;
            request.user = user_for_similarity;
            request.user_persona = optional_persona(persona);
            request.textrank.similarity_kernel = similarity_kernel;
            const Facet facet = parse_or_usage<Facet>("--facet", facet_name, parse_facet);
            if (!engine.corpus().has_author(author)) {
                throw Error(ErrorCode::unknown_author, "unknown author " + std::to_string(author));
            }
            if (request.strategy == TermStrategy::similarity_to_user &&
                !engine.corpus().has_author(request.user)) {
                throw UsageError("--user: the similarity strategy needs a known user");
            }
            auto terms = rank_terms(engine, author, facet, request);
            if (limit && terms.size() > limit) terms.resize(limit);
            if (format == "table") {
                std::cout << terms_table(engine, terms);
            } else {
                print(scored_terms_json(engine, terms));
            }
        } else if (*metrics_cmd) {
            auto engine = read_snapshot(std::filesystem::path(snapshot));
            std::vector<DistanceReport> reports;
            for (AuthorId c : candidates) {
                reports.push_back(distance_report(engine.corpus(), author, c));
            }
            if (format == "table") {
                std::cout << distances_table(reports);
            } else {
                print(Json(reports));
            }
        } else if (*report_cmd) {
            auto engine = read_snapshot(std::filesystem::path(snapshot));
            std::vector<ShownPair> pairs;
            std::size_t skipped = 0;
            if (!pairs_file.empty()) {
                std::ifstream in(pairs_file);
                if (!in) throw Error(ErrorCode::storage_io, "cannot open " + pairs_file);
                pairs = Json::parse(in).get<std::vector<ShownPair>>();
            } else if (!session.empty()) {
                SessionLog log(selections_path);
                if (!log.has_session(session)) {
                    throw Error(ErrorCode::unknown_session, "unknown session '" + session + "'");
                }
                for (const auto& c : log.shown(session)) {
                    if (c.condition != "unlisted") pairs.push_back({c.user, c.condition, c.candidate});
                }
            } else if (sample_users) {
                auto users = engine.corpus().active_authors();
                seeded_shuffle(users, seed);
                users.resize(std::min(users.size(), sample_users));
                std::sort(users.begin(), users.end());
                RecommendOptions options;
                options.pool_size = pool_size;
                pairs = collect_condition_pairs(engine, users, {"ss", "sT", "sTdM"}, k ? k : 4,
                                                options, &skipped);
            } else {
                throw UsageError("report: one of --pairs, --session or --sample-users is required");
            }
            ReportOptions options;
            options.seed = seed;
            options.resamples = resamples;
            auto report = condition_report(engine.corpus(), pairs, options);
            if (format == "table") {
                std::cout << format_report_table(report);
                if (skipped) std::cout << "skipped queries: " << skipped << '\n';
            } else {
                Json j = report;
                j["skipped_queries"] = skipped;
                print(j);
            }
        } else if (*serve_cmd) {
            if (const char* env = std::getenv("BRIDGER_SNAPSHOT"); env && *env) snapshot = env;
            Service service(read_snapshot(std::filesystem::path(snapshot)), selections_path);
            std::cerr << "listening on " << host << ":" << port << '\n';
            service.listen(host, port);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << to_string(e.code()) << ": " << e.what() << '\n';
        return e.code() == ErrorCode::invalid_argument ? 1 : 2;
    } catch (const Json::exception& e) {
        std::cerr << "parse_error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
