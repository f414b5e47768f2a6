#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bridger {

using PaperId = std::uint64_t;
using AuthorId = std::uint64_t;
using TermId = std::uint64_t;
using VenueId = std::uint64_t;
using EmbeddingId = std::uint64_t;

enum class Facet : std::uint8_t { task = 0, method = 1, resource = 2, topic = 3 };

inline constexpr std::array<Facet, 4> kAllFacets = {Facet::task, Facet::method, Facet::resource,
                                                    Facet::topic};
// Facets that carry term embeddings and therefore an aggregate vector.
inline constexpr std::array<Facet, 3> kEmbeddedFacets = {Facet::task, Facet::method,
                                                         Facet::resource};

constexpr bool is_embedded(Facet f) { return f != Facet::topic; }
constexpr std::size_t facet_index(Facet f) { return static_cast<std::size_t>(f); }

std::string_view to_string(Facet f);
std::optional<Facet> parse_facet(std::string_view s);

enum class ErrorCode {
    parse_error,
    dangling_reference,
    dimension_mismatch,
    version_mismatch,
    invalid_record,
    unknown_author,
    unknown_author_on_paper,
    unknown_paper,
    empty_profile,
    missing_facet,
    empty_facet,
    no_embeddings,
    zero_vector,
    unknown_candidate,
    unknown_session,
    storage_io,
    invalid_argument,
};

std::string_view to_string(ErrorCode code);

// Single exception type for every domain failure; the code drives HTTP and exit-status mapping.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace bridger
