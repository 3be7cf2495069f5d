#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "aclab/decision.hpp"
#include "aclab/eval.hpp"
#include "aclab/model.hpp"

namespace aclab {

struct RemoteDeciderConfig {
    std::string endpoint;      // http://host:port/path
    std::string model;
    std::string prompt_template = "default";
    int timeout_ms = 5000;
    int max_in_flight = 4;
    bool shadow_mode = false;

    void check() const; // throws std::invalid_argument on bad bounds
};

struct RemoteCounters {
    std::atomic<std::uint64_t> calls{0};
    std::atomic<std::uint64_t> failures{0};          // failed-closed responses
    std::atomic<std::uint64_t> shadow_disagreements{0};
    std::atomic<std::uint64_t> shadow_checks{0};
};

// Client for a chat-completions style endpoint. The prompt is the fixed
// instruction plus canonical_input; the reply must be a JSON object with
// exactly the keys decision and explanation, decision in {allow, deny}.
// Anything else (timeout, HTTP error, parse failure, stray keys, bad
// verdict) yields Deny with error_flag and the explanation
// "remote decider unavailable — failing closed". shadow_mode also runs
// the oracle and counts disagreements; it never changes the response.
class RemoteDecider : public Decider {
  public:
    // transport is injectable for tests: takes the request body, returns
    // the raw HTTP response body, or throws on transport failure.
    using Transport = std::function<std::string(const std::string& body)>;

    explicit RemoteDecider(RemoteDeciderConfig config);
    RemoteDecider(RemoteDeciderConfig config, Transport transport);

    std::string name() const override { return "remote"; }
    Decision decide(const StateSnapshot& snap, const AccessRequest& request) const override;

    const RemoteCounters& counters() const { return counters_; }

    // Builds the request body sent to the endpoint.
    std::string build_request_body(const StateSnapshot& snap,
                                   const AccessRequest& request) const;
    // Extracts a Decision from a raw response body. Throws
    // std::runtime_error on any deviation from the strict reply schema.
    Decision parse_reply(const std::string& body) const;

  private:
    RemoteDeciderConfig config_;
    Transport transport_;
    mutable RemoteCounters counters_;
    struct Gate;
    std::shared_ptr<Gate> gate_;
};

} // namespace aclab
