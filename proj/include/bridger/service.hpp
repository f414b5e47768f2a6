#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "bridger/cards.hpp"
#include "bridger/engine.hpp"

namespace bridger {

struct HttpStatus {
    int status = 500;
    std::string_view code;
};

// Status and machine-readable code for a domain error.
HttpStatus http_status(ErrorCode code);

struct ServiceResponse {
    int status = 200;
    std::string body;  // JSON
};

using QueryParams = std::multimap<std::string, std::string>;

// Transport-independent request handling: `handle` implements every endpoint, and `listen`
// binds it to an HTTP server. The engine is read-only; only the session log mutates.
class Service {
public:
    // The anonymization key lives next to the selections log (selections path + ".key") and is
    // created on first start.
    Service(Engine engine, const std::filesystem::path& selections_path);
    Service(Engine engine, const std::filesystem::path& selections_path, AnonymizationKey key);
    ~Service();

    ServiceResponse handle(const std::string& method, const std::string& path,
                           const QueryParams& params, const std::string& body = {});

    // Blocks until stop(). Throws storage_io when the address cannot be bound.
    void listen(const std::string& host, int port);
    // Binds to an ephemeral port and returns it; serve with listen_after_bind().
    int bind_any_port(const std::string& host);
    void listen_after_bind();
    void stop();

    const Engine& engine() const noexcept { return engine_; }
    SessionLog& sessions() noexcept { return log_; }
    const AnonymizationKey& key() const noexcept { return key_; }

private:
    ServiceResponse route(const std::string& method, const std::string& path,
                          const QueryParams& params, const std::string& body);
    void make_server();

    Engine engine_;
    SessionLog log_;
    AnonymizationKey key_;
    struct Server;
    std::unique_ptr<Server> server_;
};

AnonymizationKey load_or_create_key(const std::filesystem::path& path);

}  // namespace bridger
