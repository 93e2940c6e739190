#include "bsv/config_file.hpp"

#include "bsv/errors.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bsv {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

ConfigValue parse_value(const std::string& raw, const std::string& where) {
    ConfigValue v;
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
        v.kind = ConfigValue::Kind::string;
        v.str = raw.substr(1, raw.size() - 2);
        return v;
    }
    if (raw == "true" || raw == "false") {
        v.kind = ConfigValue::Kind::boolean;
        v.flag = (raw == "true");
        return v;
    }
    try {
        size_t used = 0;
        v.num = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
    } catch (const std::exception&) {
        throw ConfigError(where + ": cannot parse value '" + raw + "'");
    }
    v.kind = ConfigValue::Kind::number;
    return v;
}

std::string render_value(const ConfigValue& v) {
    switch (v.kind) {
        case ConfigValue::Kind::string: return "\"" + v.str + "\"";
        case ConfigValue::Kind::boolean: return v.flag ? "true" : "false";
        case ConfigValue::Kind::number: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v.num);
            return buf;
        }
    }
    return {};
}

} // namespace

ConfigDoc parse_config_text(const std::string& text) {
    ConfigDoc doc;
    ConfigTable* current = &doc.root;
    std::string section = "(top level)";
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            bool is_array = line.size() > 1 && line[1] == '[';
            std::string close = is_array ? "]]" : "]";
            size_t end = line.find(close);
            if (end == std::string::npos || trim(line.substr(end + close.size())) != "")
                throw ConfigError(where + ": malformed section header '" + line + "'");
            std::string name = trim(line.substr(is_array ? 2 : 1, end - (is_array ? 2 : 1)));
            if (name.empty()) throw ConfigError(where + ": empty section name");
            if (is_array) {
                doc.arrays[name].emplace_back();
                current = &doc.arrays[name].back();
                section = name + "[" + std::to_string(doc.arrays[name].size() - 1) + "]";
            } else {
                if (doc.tables.count(name))
                    throw ConfigError(where + ": duplicate section [" + name + "]");
                current = &doc.tables[name];
                section = name;
            }
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string raw = trim(line.substr(eq + 1));
        if (key.empty() || raw.empty())
            throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        if (current->count(key))
            throw ConfigError(where + ": duplicate key '" + section + "." + key + "'");
        (*current)[key] = parse_value(raw, where + " (" + section + "." + key + ")");
    }
    return doc;
}

ConfigDoc parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

std::string canonical_config_text(const ConfigDoc& doc) {
    std::ostringstream out;
    for (const auto& [k, v] : doc.root) out << k << " = " << render_value(v) << "\n";
    for (const auto& [name, tab] : doc.tables) {
        out << "[" << name << "]\n";
        for (const auto& [k, v] : tab) out << k << " = " << render_value(v) << "\n";
    }
    for (const auto& [name, vec] : doc.arrays) {
        for (const auto& tab : vec) {
            out << "[[" << name << "]]\n";
            for (const auto& [k, v] : tab) out << k << " = " << render_value(v) << "\n";
        }
    }
    return out.str();
}

} // namespace bsv
