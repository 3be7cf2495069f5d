#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include <CLI11.hpp>

#include "aclab/baselines.hpp"
#include "aclab/dataset.hpp"
#include "aclab/dsl/compile.hpp"
#include "aclab/dsl/parser.hpp"
#include "aclab/dsl/printer.hpp"
#include "aclab/dsl/validate.hpp"
#include "aclab/eval.hpp"
#include "aclab/generator.hpp"
#include "aclab/remote.hpp"
#include "aclab/service.hpp"

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path);
}

aclab::ReportFormat format_for(const std::string& out_path, const std::string& explicit_fmt) {
    if (!explicit_fmt.empty()) return aclab::report_format_from_string(explicit_fmt);
    if (out_path.size() >= 5 && out_path.substr(out_path.size() - 5) == ".json") {
        return aclab::ReportFormat::Json;
    }
    if (out_path.size() >= 4 && out_path.substr(out_path.size() - 4) == ".csv") {
        return aclab::ReportFormat::Csv;
    }
    return aclab::ReportFormat::Text;
}

struct EvalOptions {
    std::string dataset;
    std::string fit_dataset;
    std::string deciders = "oracle,rbac,abac,dac";
    std::string policy = "policies/classroom.acpol";
    std::string abac_policy = "policies/abac_baseline.acpol";
    std::string out;
    std::string format;
    std::string remote_endpoint;
    std::string remote_model = "pdp-remote";
    int remote_timeout_ms = 5000;
    int remote_max_in_flight = 4;
    bool remote_shadow = false;
};

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : csv) {
        if (c == ',') {
            if (!current.empty()) parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) parts.push_back(current);
    return parts;
}

int run_eval(const EvalOptions& options) {
    std::vector<aclab::DatasetRecord> records = aclab::read_dataset(options.dataset);
    std::vector<aclab::DatasetRecord> fit_records =
        options.fit_dataset.empty() ? records : aclab::read_dataset(options.fit_dataset);

    std::vector<std::unique_ptr<aclab::Decider>> deciders;
    for (const std::string& name : split_csv(options.deciders)) {
        if (name == "oracle") {
            deciders.push_back(aclab::make_oracle_decider());
        } else if (name == "dsl") {
            deciders.push_back(aclab::make_dsl_decider(aclab::dsl::compile_file(options.policy)));
        } else if (name == "rbac") {
            deciders.push_back(aclab::make_rbac_decider(aclab::rbac_fit_majority(fit_records)));
        } else if (name == "abac") {
            aclab::AbacRuleSet rules = aclab::abac_load(options.abac_policy);
            aclab::abac_fit_constants(rules, fit_records);
            deciders.push_back(aclab::make_abac_decider(std::move(rules)));
        } else if (name == "dac") {
            deciders.push_back(aclab::make_dac_decider(aclab::DacAcl{}));
        } else if (name == "always_deny") {
            deciders.push_back(aclab::make_always_deny_decider());
        } else if (name == "remote") {
            aclab::RemoteDeciderConfig remote;
            remote.endpoint = options.remote_endpoint;
            remote.model = options.remote_model;
            remote.timeout_ms = options.remote_timeout_ms;
            remote.max_in_flight = options.remote_max_in_flight;
            remote.shadow_mode = options.remote_shadow;
            deciders.push_back(std::make_unique<aclab::RemoteDecider>(remote));
        } else {
            throw std::invalid_argument("unknown decider: " + name);
        }
    }
    if (deciders.empty()) throw std::invalid_argument("no deciders selected");

    std::vector<aclab::MetricsReport> reports;
    reports.reserve(deciders.size());
    for (const auto& decider : deciders) {
        reports.push_back(aclab::evaluate(*decider, records));
    }

    std::string rendered =
        aclab::render_report(reports, format_for(options.out, options.format));
    if (options.out.empty()) {
        std::cout << rendered;
    } else {
        write_text_file(options.out, rendered);
        std::cout << "wrote report to " << options.out << "\n";
    }
    return 0;
}

int run_serve(aclab::ServiceConfig config) {
    aclab::PdpService service(std::move(config));
    service.start();
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::cout << "listening on " << service.port() << std::endl;
    while (!g_stop.load() && service.running()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    service.stop();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"aclab: workflow-aware access control laboratory"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "Generate a labeled dataset");
    aclab::GeneratorConfig gen_config;
    std::string gen_out = "dataset.jsonl";
    bool gen_stats = false;
    generate->add_option("--seed", gen_config.seed, "RNG seed");
    generate->add_option("--records", gen_config.num_records, "number of records");
    generate->add_option("--users", gen_config.num_users, "number of users");
    generate->add_option("--max-reviews", gen_config.max_reviews_per_homework,
                         "review quota the builders aim for");
    generate->add_option("--invalid-rate", gen_config.invalid_request_rate,
                         "adversarial share per non-upload action");
    generate->add_option("--min-share", gen_config.per_action_min_share,
                         "minimum per-action share of records");
    generate->add_option("--execute-prob", gen_config.execute_probability,
                         "probability an allowed request is applied");
    generate->add_option("--out", gen_out, "output JSONL path");
    generate->add_flag("--stats", gen_stats, "print dataset stats afterwards");

    // split
    auto* split_cmd = app.add_subcommand("split", "Stratified train/val/test split");
    std::string split_in;
    std::string split_dir = ".";
    double train_frac = 0.8, val_frac = 0.1, test_frac = 0.1;
    std::uint64_t split_seed = 1;
    split_cmd->add_option("--in", split_in, "input JSONL")->required();
    split_cmd->add_option("--out-dir", split_dir, "output directory");
    split_cmd->add_option("--train", train_frac, "train fraction");
    split_cmd->add_option("--val", val_frac, "val fraction");
    split_cmd->add_option("--test", test_frac, "test fraction");
    split_cmd->add_option("--seed", split_seed, "shuffle seed");

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Dataset summary");
    std::string stats_in;
    std::string stats_out;
    stats_cmd->add_option("--in", stats_in, "input JSONL")->required();
    stats_cmd->add_option("--out", stats_out, "write to file instead of stdout");

    // export-training
    auto* export_cmd = app.add_subcommand("export-training", "Instruction-tuning JSONL");
    std::string export_in, export_out;
    export_cmd->add_option("--in", export_in, "input JSONL")->required();
    export_cmd->add_option("--out", export_out, "output JSONL")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Score deciders against a dataset");
    EvalOptions eval_options;
    eval_cmd->add_option("--dataset", eval_options.dataset, "labeled JSONL")->required();
    eval_cmd->add_option("--fit-dataset", eval_options.fit_dataset,
                         "fit baselines here instead of --dataset");
    eval_cmd->add_option("--deciders", eval_options.deciders,
                         "comma list: oracle,dsl,rbac,abac,dac,always_deny,remote");
    eval_cmd->add_option("--policy", eval_options.policy, "policy file for the dsl decider");
    eval_cmd->add_option("--abac-policy", eval_options.abac_policy,
                         "scalar policy file for the abac baseline");
    eval_cmd->add_option("--out", eval_options.out, "report path (.txt/.json/.csv)");
    eval_cmd->add_option("--format", eval_options.format, "text|json|csv override");
    eval_cmd->add_option("--remote-endpoint", eval_options.remote_endpoint,
                         "remote decider URL");
    eval_cmd->add_option("--remote-model", eval_options.remote_model, "remote model name");
    eval_cmd->add_option("--remote-timeout-ms", eval_options.remote_timeout_ms,
                         "remote timeout");
    eval_cmd->add_option("--remote-max-in-flight", eval_options.remote_max_in_flight,
                         "remote in-flight bound");
    eval_cmd->add_flag("--remote-shadow", eval_options.remote_shadow,
                       "compare remote answers against the oracle");

    // policy check
    auto* policy_cmd = app.add_subcommand("policy", "Policy file tools");
    policy_cmd->require_subcommand(1);
    auto* check_cmd = policy_cmd->add_subcommand("check", "Parse and validate a policy file");
    std::string check_file;
    std::string check_dialect = "full";
    bool check_print = false;
    check_cmd->add_option("file", check_file, "policy file")->required();
    check_cmd->add_option("--dialect", check_dialect, "full|abac-scalar");
    check_cmd->add_flag("--print", check_print, "pretty-print the parsed document");

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP decision service");
    std::string serve_config_path;
    aclab::ServiceConfig serve_defaults;
    std::string serve_bind, serve_decider, serve_policy, serve_log;
    int serve_port = -1, serve_users = -1;
    serve_cmd->add_option("--config", serve_config_path, "key=value config file");
    serve_cmd->add_option("--bind", serve_bind, "bind address");
    serve_cmd->add_option("--port", serve_port, "port, 0 picks a free one");
    serve_cmd->add_option("--decider", serve_decider, "oracle|dsl|remote");
    serve_cmd->add_option("--policy", serve_policy, "policy file for the dsl decider");
    serve_cmd->add_option("--users", serve_users, "server-held world size");
    serve_cmd->add_option("--log", serve_log, "decision audit log path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::RequiredError&) {
        std::cerr << app.help() << std::endl;
        return 2;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*generate) {
            aclab::GeneratorResult result = aclab::generate(gen_config);
            aclab::write_dataset(gen_out, result.records);
            std::cout << "wrote " << result.records.size() << " records to " << gen_out << "\n";
            if (gen_stats) {
                std::cout << aclab::render_stats(aclab::dataset_stats(result.records));
            }
            return 0;
        }
        if (*split_cmd) {
            std::vector<aclab::DatasetRecord> records = aclab::read_dataset(split_in);
            aclab::SplitResult parts =
                aclab::split(records, train_frac, val_frac, test_frac, split_seed);
            std::filesystem::create_directories(split_dir);
            auto path_of = [&](const char* name) {
                return (std::filesystem::path(split_dir) / name).string();
            };
            aclab::write_dataset(path_of("train.jsonl"), parts.train);
            aclab::write_dataset(path_of("val.jsonl"), parts.val);
            aclab::write_dataset(path_of("test.jsonl"), parts.test);
            std::cout << "split " << records.size() << " records into " << parts.train.size()
                      << "/" << parts.val.size() << "/" << parts.test.size() << " under "
                      << split_dir << "\n";
            return 0;
        }
        if (*stats_cmd) {
            std::vector<aclab::DatasetRecord> records = aclab::read_dataset(stats_in);
            std::string rendered = aclab::render_stats(aclab::dataset_stats(records));
            if (stats_out.empty()) {
                std::cout << rendered;
            } else {
                write_text_file(stats_out, rendered);
            }
            return 0;
        }
        if (*export_cmd) {
            std::vector<aclab::DatasetRecord> records = aclab::read_dataset(export_in);
            aclab::export_training(export_out, records);
            std::cout << "wrote " << records.size() << " training lines to " << export_out
                      << "\n";
            return 0;
        }
        if (*eval_cmd) return run_eval(eval_options);
        if (*check_cmd) {
            aclab::dsl::Dialect dialect;
            if (check_dialect == "full") {
                dialect = aclab::dsl::Dialect::Full;
            } else if (check_dialect == "abac-scalar") {
                dialect = aclab::dsl::Dialect::AbacScalar;
            } else {
                throw std::invalid_argument("unknown dialect: " + check_dialect);
            }
            std::ifstream in(check_file);
            if (!in) throw std::runtime_error("cannot open " + check_file);
            std::string source((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
            aclab::dsl::PolicyDoc doc;
            try {
                doc = aclab::dsl::parse_text(source);
            } catch (const aclab::dsl::ParseError& error) {
                std::cerr << check_file << ":" << error.line << ":" << error.column
                          << ": error: " << error.what() << "\n";
                return 1;
            }
            aclab::dsl::ValidationResult result = aclab::dsl::validate(doc, dialect);
            if (!result.ok()) {
                for (const auto& error : result.errors) {
                    std::cerr << check_file << ":" << error.line << ":" << error.column
                              << ": error: " << error.message << "\n";
                }
                return 1;
            }
            std::size_t conditions = 0;
            for (const auto& def : doc.policies) conditions += def.requirements.size();
            std::cout << check_file << ": ok (" << doc.policies.size() << " policies, "
                      << conditions << " conditions)\n";
            if (check_print) std::cout << aclab::dsl::pretty_print(doc);
            return 0;
        }
        if (*serve_cmd) {
            aclab::Config file_config;
            if (!serve_config_path.empty()) file_config = aclab::Config::load(serve_config_path);
            file_config.apply_env();
            aclab::ServiceConfig config = aclab::ServiceConfig::from_config(file_config);
            if (!serve_bind.empty()) config.bind_address = serve_bind;
            if (serve_port >= 0) config.port = serve_port;
            if (!serve_decider.empty()) config.decider = serve_decider;
            if (!serve_policy.empty()) config.policy_file = serve_policy;
            if (serve_users >= 0) config.num_users = serve_users;
            if (!serve_log.empty()) config.log_path = serve_log;
            return run_serve(std::move(config));
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << std::endl;
        return 1;
    }
    return 0;
}
