#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fnls::cli {

using json = nlohmann::json;

/// Schema violation; the message starts with the JSON path of the offending value.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::invalid_argument(path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

enum class Kind { fbm, convolve, solve, skeleton, ldp, holder, support, oracle_suite };

std::string to_string(Kind kind);
Kind parse_kind(const std::string& name);

/// A validated run description. `params` holds every parameter of the
/// experiment with defaults filled in, so it is also what the manifest echoes.
struct RunConfig {
  Kind kind = Kind::fbm;
  std::uint64_t seed = 0;
  json params = json::object();
};

/// Parses and validates a JSON document for the given experiment. Unknown
/// keys and out-of-domain values raise ConfigError; malformed JSON raises
/// ConfigError with path "/".
RunConfig parse_config(const std::string& text, Kind kind);
RunConfig parse_config(const json& doc, Kind kind);
inline RunConfig parse_config(const char* text, Kind kind) { return parse_config(std::string(text), kind); }

/// The resolved config as written to config.json in the output directory.
json resolved(const RunConfig& cfg);

}  // namespace fnls::cli
