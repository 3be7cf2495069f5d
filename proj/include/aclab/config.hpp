#pragma once

#include <map>
#include <optional>
#include <string>

namespace aclab {

// Plain-text key=value configuration. '#' starts a comment, blank lines
// are ignored, keys are dotted (e.g. service.bind_address). Environment
// variables override file values: key a.b_c maps to ACLAB_A_B_C.
class Config {
  public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    // Applies ACLAB_* environment overrides for the documented keys.
    void apply_env();

    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    void set(const std::string& key, const std::string& value);

    const std::map<std::string, std::string>& entries() const { return entries_; }

  private:
    std::map<std::string, std::string> entries_;
};

} // namespace aclab
