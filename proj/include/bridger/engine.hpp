#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <unordered_map>

#include "bridger/corpus.hpp"
#include "bridger/profile.hpp"
#include "bridger/relevance.hpp"

namespace bridger {

// Owns the immutable corpus together with the structures derived from it: cached relevance
// weights and the profile store. Read-only after construction.
class Engine {
public:
    explicit Engine(CorpusIndex corpus, ProfileStoreOptions options = {});
    Engine(CorpusIndex corpus, ProfileStore store);

    Engine(Engine&&) noexcept = default;
    Engine& operator=(Engine&&) noexcept = default;

    const CorpusIndex& corpus() const noexcept { return *corpus_; }
    const RelevanceModel& relevance() const noexcept { return relevance_; }
    const ProfileStore& profiles() const noexcept { return store_; }

    // Number of active authors with at least one paper containing `term`.
    std::size_t author_frequency(TermId term) const;
    // Active authors (at least one indexed paper).
    std::size_t author_count() const noexcept { return author_count_; }

private:
    void count_author_frequencies();

    std::unique_ptr<CorpusIndex> corpus_;
    RelevanceModel relevance_;
    ProfileStore store_;
    std::unordered_map<TermId, std::size_t> author_frequency_;
    std::size_t author_count_ = 0;
};

// Snapshot (.bsnap) layout, all integers little-endian:
//   "BSNP", u16 version
//   options   u8 persona method, f64 ward threshold
//   papers    u64 n; per paper: u64 id, str title, str abstract, i32 year, u8 has_venue,
//             u64 venue, f64 importance, ids authors, ids citations, ids terms
//   authors   u64 n; per author: u64 id, str name, u8 has_affiliation, str affiliation
//   terms     u64 n; per term: u64 id, u8 facet, str surface, u8 has_embedding, u64 embedding
//   tables    paper then term embeddings: u32 dimension, u64 n, n x (u64 id, dimension x f32)
//   profiles  u64 n; profile records
//   personas  u64 n; per author: u64 id, u64 count, count x (u32 ordinal, f64 best_importance,
//             profile record)
//   "BEND"
// where str = u64 length + bytes, ids = u64 count + count x u64, and a profile record is
// u64 author, u8 has_persona, u32 persona, 3 x optional weighted vector (task, method,
// resource), optional weighted vector (papers), ids papers, f64 total weight. A weighted vector
// is u64 length, length x f64, f64 weight; optionals carry a leading u8 presence flag.
inline constexpr std::uint16_t kSnapshotVersion = 1;

void write_snapshot(const Engine& engine, std::ostream& out);
void write_snapshot(const Engine& engine, const std::filesystem::path& path);
// Throws version_mismatch on a foreign magic or unsupported version.
Engine read_snapshot(std::istream& in, const std::string& source = "snapshot");
Engine read_snapshot(const std::filesystem::path& path);

}  // namespace bridger
