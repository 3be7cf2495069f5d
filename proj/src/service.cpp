#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "aclab/dataset.hpp"
#include "aclab/dsl/compile.hpp"
#include "aclab/errors.hpp"
#include "aclab/eval.hpp"
#include "aclab/oracle.hpp"
#include "aclab/service.hpp"

namespace aclab {

namespace {

using ordered_json = nlohmann::ordered_json;

struct HttpError : std::runtime_error {
    HttpError(int status, std::string field, const std::string& message)
        : std::runtime_error(message), status(status), field(std::move(field)) {}
    int status;
    std::string field;
};

void reply_error(httplib::Response& res, int status, const std::string& message,
                 const std::string& field = "") {
    ordered_json body;
    body["error"] = message;
    if (!field.empty()) body["field"] = field;
    res.status = status;
    res.set_content(body.dump() + "\n", "application/json");
}

ordered_json decision_to_json(const Decision& decision, const std::string& decider,
                              double latency_ms) {
    ordered_json body;
    body["decision"] = to_string(decision.verdict);
    body["policy_id"] = decision.policy_label;
    body["explanation"] = decision.explanation;
    body["satisfied"] = decision.satisfied;
    body["violated"] = decision.violated;
    body["decider"] = decider;
    body["latency_ms"] = latency_ms;
    return body;
}

void check_keys(const ordered_json& obj, const std::string& where,
                const std::vector<std::string>& required,
                const std::vector<std::string>& optional) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const std::string& key : required) known = known || key == item.key();
        for (const std::string& key : optional) known = known || key == item.key();
        if (!known) {
            throw HttpError(400, where + "." + item.key(),
                            "unknown field " + where + "." + item.key());
        }
    }
    for (const std::string& key : required) {
        if (!obj.contains(key)) {
            throw HttpError(400, where + "." + key, "missing field " + where + "." + key);
        }
    }
}

AccessRequest parse_request_object(const ordered_json& obj) {
    if (!obj.is_object()) throw HttpError(400, "request", "request must be an object");
    check_keys(obj, "request", {"user_id", "action", "resource_id", "timestamp"}, {});
    for (const char* key : {"user_id", "action", "resource_id", "timestamp"}) {
        if (!obj.at(key).is_string()) {
            throw HttpError(400, std::string("request.") + key,
                            std::string("request.") + key + " must be a string");
        }
    }
    AccessRequest request;
    request.user = obj.at("user_id").get<std::string>();
    request.resource = obj.at("resource_id").get<std::string>();
    request.timestamp = obj.at("timestamp").get<std::string>();
    std::string action = obj.at("action").get<std::string>();
    std::optional<ActionKind> kind = action_from_string(action);
    if (!kind) throw HttpError(400, "request.action", "unknown action '" + action + "'");
    request.action = *kind;
    if (request.user.empty()) {
        throw HttpError(400, "request.user_id", "request.user_id must be non-empty");
    }
    if (request.resource.empty()) {
        throw HttpError(400, "request.resource_id", "request.resource_id must be non-empty");
    }
    return request;
}

ordered_json parse_body(const std::string& body) {
    ordered_json parsed = ordered_json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw HttpError(400, "", "body must be a JSON object");
    }
    return parsed;
}

} // namespace

ServiceConfig ServiceConfig::from_config(const Config& config) {
    ServiceConfig service;
    service.bind_address = config.get_or("service.bind_address", service.bind_address);
    service.port = config.get_int("service.port", service.port);
    service.policy_file = config.get_or("service.policy_file", service.policy_file);
    service.decider = config.get_or("service.decider", service.decider);
    service.num_users = config.get_int("service.num_users", service.num_users);
    service.log_path = config.get_or("service.log_path", service.log_path);
    service.remote.endpoint = config.get_or("remote.endpoint", service.remote.endpoint);
    service.remote.model = config.get_or("remote.model", service.remote.model);
    service.remote.prompt_template =
        config.get_or("remote.prompt_template", service.remote.prompt_template);
    service.remote.timeout_ms = config.get_int("remote.timeout_ms", service.remote.timeout_ms);
    service.remote.max_in_flight =
        config.get_int("remote.max_in_flight", service.remote.max_in_flight);
    service.remote.shadow_mode =
        config.get_bool("remote.shadow_mode", service.remote.shadow_mode);
    return service;
}

void ServiceConfig::check() const {
    if (port < 0 || port > 65535) throw std::invalid_argument("service: port out of range");
    if (decider != "oracle" && decider != "dsl" && decider != "remote") {
        throw std::invalid_argument("service: decider must be oracle, dsl, or remote");
    }
    if (decider == "dsl" && policy_file.empty()) {
        throw std::invalid_argument("service: dsl decider needs service.policy_file");
    }
    if (num_users < 1) throw std::invalid_argument("service: num_users must be >= 1");
    if (decider == "remote") remote.check();
}

struct PdpService::Impl {
    explicit Impl(ServiceConfig cfg) : config(std::move(cfg)) {}

    ServiceConfig config;
    httplib::Server server;
    std::thread thread;
    std::atomic<bool> running{false};
    int bound_port = 0;

    std::unique_ptr<Decider> decider;

    mutable std::mutex state_mu; // serialized writer; readers copy the pointer
    std::shared_ptr<const WorldState> world;

    std::mutex log_mu;
    std::ofstream log;
    std::atomic<std::uint64_t> seq{0};

    std::shared_ptr<const WorldState> snapshot_world() const {
        std::lock_guard<std::mutex> lock(state_mu);
        return world;
    }

    void audit(const std::string& route, const AccessRequest& request,
               const Decision& decision, const std::string& decided_by,
               double latency_ms) {
        if (!log.is_open()) return;
        ordered_json line;
        line["route"] = route;
        line["request_id"] = request.request_id;
        line["user_id"] = request.user;
        line["action"] = to_string(request.action);
        line["resource_id"] = request.resource;
        line["timestamp"] = request.timestamp;
        line["decision"] = to_string(decision.verdict);
        line["policy_id"] = decision.policy_label;
        line["decider"] = decided_by;
        line["latency_ms"] = latency_ms;
        std::lock_guard<std::mutex> lock(log_mu);
        log << line.dump() << "\n";
        log.flush();
    }

    StateSnapshot snapshot_for(const std::shared_ptr<const WorldState>& state,
                               const AccessRequest& request) const {
        if (!state->has_user(request.user)) {
            throw HttpError(404, "request.user_id", "unknown user " + request.user);
        }
        if (request.action == ActionKind::UploadHomework) {
            if (state->has_resource(request.resource)) {
                throw HttpError(400, "request.resource_id",
                                "resource " + request.resource + " already exists");
            }
            return upload_snapshot(request.resource, request.user);
        }
        if (!state->has_resource(request.resource)) {
            throw HttpError(404, "request.resource_id",
                            "unknown resource " + request.resource);
        }
        return snapshot(*state, request.resource, request.user);
    }

    void handle_decide(const httplib::Request& req, httplib::Response& res) {
        ordered_json body = parse_body(req.body);
        check_keys(body, "body", {"request"}, {"state"});
        AccessRequest request = parse_request_object(body.at("request"));
        request.request_id = "http" + std::to_string(++seq);

        StateSnapshot snap;
        if (body.contains("state")) {
            try {
                snap = state_from_json_text(body.at("state").dump());
            } catch (const std::exception& error) {
                throw HttpError(400, "state", error.what());
            }
        } else {
            snap = snapshot_for(snapshot_world(), request);
        }

        auto start = std::chrono::steady_clock::now();
        Decision decision = decider->decide(snap, request);
        auto stop = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(stop - start).count();

        audit("/v1/decide", request, decision, decider->name(), ms);
        res.status = 200;
        res.set_content(decision_to_json(decision, decider->name(), ms).dump() + "\n",
                        "application/json");
    }

    void handle_event(const httplib::Request& req, httplib::Response& res) {
        ordered_json body = parse_body(req.body);
        check_keys(body, "body", {"request"}, {});
        AccessRequest request = parse_request_object(body.at("request"));
        request.request_id = "http" + std::to_string(++seq);

        // Serialized writer: decide against the current world and apply
        // atomically under the same lock.
        std::lock_guard<std::mutex> lock(state_mu);
        auto start = std::chrono::steady_clock::now();
        Decision decision;
        try {
            decision = decide(*world, request);
        } catch (const NotFoundError& error) {
            throw HttpError(404, "request", error.what());
        } catch (const std::invalid_argument& error) {
            throw HttpError(400, "request", error.what());
        }
        if (decision.verdict == Verdict::Allow) {
            auto [next, effect] = apply_effect(*world, request);
            (void)effect;
            world = std::make_shared<const WorldState>(std::move(next));
        }
        auto stop = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(stop - start).count();

        // Events are always oracle-guarded, whatever decider /v1/decide uses.
        audit("/v1/events", request, decision, "oracle", ms);
        res.status = decision.verdict == Verdict::Allow ? 200 : 403;
        res.set_content(decision_to_json(decision, "oracle", ms).dump() + "\n",
                        "application/json");
    }

    void handle_resource(const httplib::Request& req, httplib::Response& res) {
        std::string id = req.matches[1];
        auto state = snapshot_world();
        if (!state->has_resource(id)) {
            throw HttpError(404, "id", "unknown resource " + id);
        }
        StateSnapshot snap = snapshot(*state, id, "");
        res.status = 200;
        res.set_content(state_to_json_text(snap) + "\n", "application/json");
    }

    void route(void (Impl::*handler)(const httplib::Request&, httplib::Response&),
               const httplib::Request& req, httplib::Response& res) {
        try {
            (this->*handler)(req, res);
        } catch (const HttpError& error) {
            reply_error(res, error.status, error.what(), error.field);
        } catch (const std::exception& error) {
            reply_error(res, 500, error.what());
        }
    }
};

PdpService::PdpService(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
    impl_->config.check();
}

PdpService::~PdpService() {
    if (impl_ && impl_->running.load()) stop();
}

void PdpService::start() {
    Impl& impl = *impl_;
    if (impl.running.load()) throw std::runtime_error("service: already running");

    switch (impl.config.decider == "dsl" ? 1 : impl.config.decider == "remote" ? 2 : 0) {
        case 0:
            impl.decider = make_oracle_decider();
            break;
        case 1: {
            dsl::CompiledPolicySet compiled;
            try {
                compiled = dsl::compile_file(impl.config.policy_file);
            } catch (const std::exception& error) {
                throw std::runtime_error(std::string("service: policy file: ") + error.what());
            }
            impl.decider = make_dsl_decider(std::move(compiled));
            break;
        }
        case 2:
            impl.decider = std::make_unique<RemoteDecider>(impl.config.remote);
            break;
    }

    impl.world = std::make_shared<const WorldState>(new_world(impl.config.num_users, 0));

    if (!impl.config.log_path.empty()) {
        impl.log.open(impl.config.log_path, std::ios::app);
        if (!impl.log) {
            throw std::runtime_error("service: cannot open log " + impl.config.log_path);
        }
    }

    httplib::Server& server = impl.server;
    // Long-lived keep-alive sessions: the default per-connection request cap
    // (5) makes well-behaved clients race the server's close on reuse.
    server.set_keep_alive_max_count(100000);
    Impl* self = impl_.get();
    server.Post("/v1/decide", [self](const httplib::Request& req, httplib::Response& res) {
        self->route(&Impl::handle_decide, req, res);
    });
    server.Post("/v1/events", [self](const httplib::Request& req, httplib::Response& res) {
        self->route(&Impl::handle_event, req, res);
    });
    server.Get(R"(/v1/resources/([^/]+))",
               [self](const httplib::Request& req, httplib::Response& res) {
                   self->route(&Impl::handle_resource, req, res);
               });
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        res.status = 200;
        res.set_content("ok", "text/plain");
    });

    if (impl.config.port == 0) {
        impl.bound_port = server.bind_to_any_port(impl.config.bind_address);
        if (impl.bound_port < 0) {
            throw std::runtime_error("service: cannot bind " + impl.config.bind_address);
        }
    } else {
        if (!server.bind_to_port(impl.config.bind_address, impl.config.port)) {
            throw std::runtime_error("service: cannot bind " + impl.config.bind_address + ":" +
                                     std::to_string(impl.config.port));
        }
        impl.bound_port = impl.config.port;
    }

    impl.thread = std::thread([self] { self->server.listen_after_bind(); });
    for (int i = 0; i < 2000 && !server.is_running(); ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    if (!server.is_running()) {
        server.stop();
        if (impl.thread.joinable()) impl.thread.join();
        throw std::runtime_error("service: failed to start listener");
    }
    impl.running.store(true);
}

void PdpService::stop() {
    Impl& impl = *impl_;
    impl.server.stop();
    if (impl.thread.joinable()) impl.thread.join();
    impl.running.store(false);
}

bool PdpService::running() const { return impl_->running.load(); }

int PdpService::port() const { return impl_->bound_port; }

std::shared_ptr<const WorldState> PdpService::current_state() const {
    return impl_->snapshot_world();
}

} // namespace aclab
