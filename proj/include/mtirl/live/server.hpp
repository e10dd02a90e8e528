#pragma once

#include "mtirl/live/session.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>

namespace mtirl::live {

struct ServerOptions {
    std::string host = "127.0.0.1";
    unsigned short port = 8080;  // 0 picks a free port
    std::filesystem::path state_dir = "sessions";
    int threads = 2;
};

/// HTTP endpoints and the trainer WebSocket on one port.
///
///   POST /sessions               create (body: session options, may be empty)
///   GET  /sessions               list summaries
///   GET  /sessions/{id}          summary with per-trainer trust
///   POST /sessions/{id}/start    lobby|paused -> running
///   POST /sessions/{id}/pause    running -> paused, state written to state_dir/{id}
///   POST /sessions/{id}/resume   paused -> running
///   GET  /ws                     WebSocket upgrade for trainers
class Server {
public:
    explicit Server(ServerOptions options);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts the I/O threads. Returns the bound port.
    unsigned short start();
    /// Pauses running sessions, waits for their agent loops and stops I/O.
    void stop();

    SessionRegistry& registry();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Runs until SIGINT or SIGTERM. Returns a process exit code.
int run_server(const ServerOptions& options, std::ostream& out, std::ostream& err);

}  // namespace mtirl::live
