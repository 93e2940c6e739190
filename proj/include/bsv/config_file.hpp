#pragma once

#include <map>
#include <string>
#include <vector>

namespace bsv {

/// One parsed scalar value. Numbers are kept as double; integers fit exactly.
struct ConfigValue {
    enum class Kind { number, string, boolean };
    Kind kind = Kind::number;
    double num = 0.0;
    std::string str;
    bool flag = false;
};

using ConfigTable = std::map<std::string, ConfigValue>;

/// Parsed TOML-style document: top-level keys, [table] sections and
/// [[array-of-table]] sections. Only the subset needed for scenario files is
/// supported: comments, quoted strings, booleans and plain numbers.
struct ConfigDoc {
    ConfigTable root;
    std::map<std::string, ConfigTable> tables;
    std::map<std::string, std::vector<ConfigTable>> arrays;

    bool has_table(const std::string& name) const { return tables.count(name) > 0; }
};

ConfigDoc parse_config_text(const std::string& text);
ConfigDoc parse_config_file(const std::string& path);

/// Canonical single-line-per-key rendering of a document, used for the
/// reproducible config snapshot and its hash.
std::string canonical_config_text(const ConfigDoc& doc);

} // namespace bsv
