#pragma once

#include <memory>
#include <string>

#include "aclab/config.hpp"
#include "aclab/model.hpp"
#include "aclab/remote.hpp"

namespace aclab {

struct ServiceConfig {
    std::string bind_address = "127.0.0.1";
    int port = 8080;                 // 0 picks a free port
    std::string policy_file;         // required when decider == "dsl"
    std::string decider = "oracle";  // oracle | dsl | remote
    int num_users = 30;              // server-held world size
    std::string log_path;            // decision audit log, empty = no file
    RemoteDeciderConfig remote;

    // Reads the documented service.* / remote.* keys.
    static ServiceConfig from_config(const Config& config);
    void check() const; // throws std::invalid_argument on bad values
};

// HTTP policy decision point.
//   POST /v1/decide     decision for a request, inline state optional
//   POST /v1/events     apply an allowed request to the server-held world
//   GET  /v1/resources/{id}   snapshot of a server-held resource
//   GET  /healthz
// Inline-state decides are stateless; the server-held world changes only
// through /v1/events and only when the oracle allows the request.
class PdpService {
  public:
    explicit PdpService(ServiceConfig config);
    ~PdpService();

    PdpService(const PdpService&) = delete;
    PdpService& operator=(const PdpService&) = delete;

    // Binds, then serves on a background thread. Throws
    // std::runtime_error when the policy file fails to load or the bind
    // fails.
    void start();
    void stop();
    bool running() const;
    int port() const; // actual bound port

    // Immutable view of the current server-held world.
    std::shared_ptr<const WorldState> current_state() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace aclab
