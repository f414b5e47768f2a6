#include "bridger/types.hpp"

namespace bridger {

std::string_view to_string(Facet f) {
    switch (f) {
        case Facet::task: return "task";
        case Facet::method: return "method";
        case Facet::resource: return "resource";
        case Facet::topic: return "topic";
    }
    return "unknown";
}

std::optional<Facet> parse_facet(std::string_view s) {
    if (s == "task") return Facet::task;
    if (s == "method") return Facet::method;
    if (s == "resource") return Facet::resource;
    if (s == "topic") return Facet::topic;
    return std::nullopt;
}

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::parse_error: return "parse_error";
        case ErrorCode::dangling_reference: return "dangling_reference";
        case ErrorCode::dimension_mismatch: return "dimension_mismatch";
        case ErrorCode::version_mismatch: return "version_mismatch";
        case ErrorCode::invalid_record: return "invalid_record";
        case ErrorCode::unknown_author: return "unknown_author";
        case ErrorCode::unknown_author_on_paper: return "unknown_author_on_paper";
        case ErrorCode::unknown_paper: return "unknown_paper";
        case ErrorCode::empty_profile: return "empty_profile";
        case ErrorCode::missing_facet: return "missing_facet";
        case ErrorCode::empty_facet: return "empty_facet";
        case ErrorCode::no_embeddings: return "no_embeddings";
        case ErrorCode::zero_vector: return "zero_vector";
        case ErrorCode::unknown_candidate: return "unknown_candidate";
        case ErrorCode::unknown_session: return "unknown_session";
        case ErrorCode::storage_io: return "storage_io";
        case ErrorCode::invalid_argument: return "invalid_argument";
    }
    return "unknown";
}

}  // namespace bridger
