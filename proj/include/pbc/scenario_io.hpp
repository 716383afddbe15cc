#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbc/scenarios.hpp"

namespace pbc {

// Scalars broadcast; lists must have n entries.
Vector parse_vector(const Json& j, int n, const std::string& key);
// Scalar -> s*I, n entries -> diagonal, n*n entries -> row-major, nested rows -> full.
Matrix parse_matrix(const Json& j, int n, const std::string& key);

// Built-in name (or alias) first, then a JSON file path. Unknown -> ConfigError.
Json resolve_config(const std::string& name_or_path, std::string* name = nullptr);
bool is_known_scenario(const std::string& name_or_path);

// "a.b.c=value"; value parsed as JSON when possible, else kept as a string.
void apply_override(Json& config, const std::string& assignment);
void set_config_value(Json& config, const std::string& dotted_key, const Json& value);
void validate_config(const Json& config);

Scenario build_scenario(const std::string& name, const Json& config, std::uint64_t seed = 1);
Scenario load_scenario(const std::string& name_or_path, const std::vector<std::string>& overrides = {},
                       std::uint64_t seed = 1);

}  // namespace pbc
