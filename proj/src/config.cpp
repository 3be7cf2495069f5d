#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "aclab/config.hpp"

namespace aclab {

namespace {

std::string trim(const std::string& text) {
    std::size_t begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    std::size_t end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

std::string env_name_for(const std::string& key) {
    std::string name = "ACLAB_";
    for (char c : key) {
        if (c == '.') {
            name += '_';
        } else {
            name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
    }
    return name;
}

// The documented configuration surface; apply_env also honours any key
// already present in the file.
constexpr const char* kKnownKeys[] = {
    "service.bind_address", "service.port",         "service.policy_file",
    "service.decider",      "service.num_users",    "service.log_path",
    "remote.endpoint",      "remote.model",         "remote.prompt_template",
    "remote.timeout_ms",    "remote.max_in_flight", "remote.shadow_mode",
};

} // namespace

Config Config::parse(const std::string& text) {
    Config config;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key=value");
        }
        std::string key = trim(trimmed.substr(0, eq));
        std::string value = trim(trimmed.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": empty key");
        }
        config.entries_[key] = value;
    }
    return config;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

void Config::apply_env() {
    auto apply = [this](const std::string& key) {
        const char* value = std::getenv(env_name_for(key).c_str());
        if (value != nullptr) entries_[key] = value;
    };
    for (const char* key : kKnownKeys) apply(key);
    // File keys outside the documented list get the same treatment.
    std::vector<std::string> file_keys;
    for (const auto& [key, value] : entries_) {
        (void)value;
        file_keys.push_back(key);
    }
    for (const std::string& key : file_keys) apply(key);
}

std::optional<std::string> Config::get(const std::string& key) const {
    auto hit = entries_.find(key);
    if (hit == entries_.end()) return std::nullopt;
    return hit->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
    auto hit = entries_.find(key);
    return hit == entries_.end() ? fallback : hit->second;
}

int Config::get_int(const std::string& key, int fallback) const {
    auto hit = entries_.find(key);
    if (hit == entries_.end()) return fallback;
    std::size_t consumed = 0;
    int value = 0;
    try {
        value = std::stoi(hit->second, &consumed);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key " + key + ": not an integer: " + hit->second);
    }
    if (consumed != hit->second.size()) {
        throw std::invalid_argument("config key " + key + ": not an integer: " + hit->second);
    }
    return value;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto hit = entries_.find(key);
    if (hit == entries_.end()) return fallback;
    const std::string& raw = hit->second;
    if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
    if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
    throw std::invalid_argument("config key " + key + ": not a boolean: " + raw);
}

void Config::set(const std::string& key, const std::string& value) {
    entries_[key] = value;
}

} // namespace aclab
