#include <condition_variable>
#include <mutex>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

#include "aclab/dataset.hpp"
#include "aclab/oracle.hpp"
#include "aclab/remote.hpp"

namespace aclab {

namespace {

using ordered_json = nlohmann::ordered_json;

// Splits http://host:port/path into client base and request path.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    std::size_t scheme = endpoint.find("://");
    if (scheme == std::string::npos) {
        throw std::invalid_argument("remote decider: endpoint must start with http://");
    }
    std::size_t path = endpoint.find('/', scheme + 3);
    if (path == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path), endpoint.substr(path)};
}

RemoteDecider::Transport make_http_transport(const RemoteDeciderConfig& config) {
    auto [base, path] = split_endpoint(config.endpoint);
    int timeout_ms = config.timeout_ms;
    return [base, path, timeout_ms](const std::string& body) {
        httplib::Client client(base);
        client.set_connection_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        client.set_write_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        auto result = client.Post(path, body, "application/json");
        if (!result) throw std::runtime_error("remote decider: transport failure");
        if (result->status != 200) {
            throw std::runtime_error("remote decider: HTTP status " +
                                     std::to_string(result->status));
        }
        return result->body;
    };
}

Decision failed_closed() {
    Decision decision;
    decision.verdict = Verdict::Deny;
    decision.policy = PolicyId::NoPolicy;
    decision.policy_label = "remote";
    decision.explanation = "remote decider unavailable — failing closed";
    decision.error_flag = true;
    return decision;
}

Decision parse_strict_payload(const ordered_json& payload) {
    if (!payload.is_object() || payload.size() != 2 || !payload.contains("decision") ||
        !payload.contains("explanation")) {
        throw std::runtime_error("remote decider: reply must have exactly decision and "
                                 "explanation");
    }
    if (!payload["decision"].is_string() || !payload["explanation"].is_string()) {
        throw std::runtime_error("remote decider: reply fields must be strings");
    }
    std::string verdict = payload["decision"].get<std::string>();
    if (verdict != "allow" && verdict != "deny") {
        throw std::runtime_error("remote decider: verdict outside {allow, deny}: " + verdict);
    }
    Decision decision;
    decision.verdict = verdict == "allow" ? Verdict::Allow : Verdict::Deny;
    decision.policy = PolicyId::NoPolicy;
    decision.policy_label = "remote";
    decision.explanation = payload["explanation"].get<std::string>();
    return decision;
}

} // namespace

void RemoteDeciderConfig::check() const {
    if (endpoint.empty()) throw std::invalid_argument("remote decider: endpoint is empty");
    if (timeout_ms <= 0) throw std::invalid_argument("remote decider: timeout must be > 0");
    if (max_in_flight < 1) {
        throw std::invalid_argument("remote decider: in-flight bound must be >= 1");
    }
}

struct RemoteDecider::Gate {
    explicit Gate(int slots) : available(slots) {}
    std::mutex mu;
    std::condition_variable cv;
    int available;

    void acquire() {
        std::unique_lock<std::mutex> lock(mu);
        cv.wait(lock, [this] { return available > 0; });
        --available;
    }
    void release() {
        {
            std::lock_guard<std::mutex> lock(mu);
            ++available;
        }
        cv.notify_one();
    }
};

RemoteDecider::RemoteDecider(RemoteDeciderConfig config)
    : RemoteDecider(std::move(config), Transport{}) {}

RemoteDecider::RemoteDecider(RemoteDeciderConfig config, Transport transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
    config_.check();
    if (!transport_) transport_ = make_http_transport(config_);
    gate_ = std::make_shared<Gate>(config_.max_in_flight);
}

std::string RemoteDecider::build_request_body(const StateSnapshot& snap,
                                              const AccessRequest& request) const {
    ordered_json body;
    body["model"] = config_.model;
    body["temperature"] = 0;
    ordered_json messages = ordered_json::array();
    messages.push_back({{"role", "system"}, {"content", decider_instruction()}});
    messages.push_back({{"role", "user"}, {"content", canonical_input(request, snap)}});
    body["messages"] = messages;
    return body.dump();
}

Decision RemoteDecider::parse_reply(const std::string& body) const {
    ordered_json parsed = ordered_json::parse(body, nullptr, false);
    if (parsed.is_discarded()) throw std::runtime_error("remote decider: reply is not JSON");
    if (parsed.is_object() && parsed.contains("choices")) {
        // Chat-completions envelope: the payload is the first choice's
        // message content.
        const auto& choices = parsed["choices"];
        if (!choices.is_array() || choices.empty() || !choices[0].contains("message") ||
            !choices[0]["message"].contains("content") ||
            !choices[0]["message"]["content"].is_string()) {
            throw std::runtime_error("remote decider: malformed chat-completions envelope");
        }
        std::string content = choices[0]["message"]["content"].get<std::string>();
        ordered_json payload = ordered_json::parse(content, nullptr, false);
        if (payload.is_discarded()) {
            throw std::runtime_error("remote decider: choice content is not JSON");
        }
        return parse_strict_payload(payload);
    }
    return parse_strict_payload(parsed);
}

Decision RemoteDecider::decide(const StateSnapshot& snap, const AccessRequest& request) const {
    counters_.calls.fetch_add(1, std::memory_order_relaxed);
    gate_->acquire();
    Decision decision;
    try {
        std::string reply = transport_(build_request_body(snap, request));
        decision = parse_reply(reply);
    } catch (const std::exception&) {
        counters_.failures.fetch_add(1, std::memory_order_relaxed);
        decision = failed_closed();
    }
    gate_->release();

    if (config_.shadow_mode) {
        Decision reference = aclab::decide(snap, request);
        counters_.shadow_checks.fetch_add(1, std::memory_order_relaxed);
        if (reference.verdict != decision.verdict) {
            counters_.shadow_disagreements.fetch_add(1, std::memory_order_relaxed);
        }
    }
    return decision;
}

} // namespace aclab
