#include "zsm/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "zsm/util.hpp"

namespace zsm::report {

using nlohmann::json;

Format parse_format(const std::string& name) {
    if (name == "table") return Format::Table;
    if (name == "json") return Format::Json;
    if (name == "csv") return Format::Csv;
    throw std::invalid_argument("unknown format: " + name + " (expected table, json, or csv)");
}

const char* format_name(Format f) {
    switch (f) {
        case Format::Table: return "table";
        case Format::Json: return "json";
        case Format::Csv: return "csv";
    }
    return "table";
}

std::string to_json_text(const json& payload) {
    return payload.dump(2) + "\n";
}

namespace {

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "";
    return v.dump();
}

bool all_scalars(const json& arr) {
    for (const auto& v : arr)
        if (v.is_object() || v.is_array()) return false;
    return true;
}

void flatten(const json& v, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it) {
            std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
            flatten(it.value(), key, out);
        }
    } else if (v.is_array()) {
        if (all_scalars(v)) {
            std::string joined;
            for (size_t i = 0; i < v.size(); ++i) {
                if (i) joined += ';';
                joined += scalar_text(v[i]);
            }
            out.emplace_back(prefix, joined);
        } else {
            for (size_t i = 0; i < v.size(); ++i)
                flatten(v[i], prefix + "." + std::to_string(i), out);
        }
    } else {
        out.emplace_back(prefix, scalar_text(v));
    }
}

}  // namespace

std::string csv_escape(const std::string& field) {
    bool needs_quote = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quote) return field;
    std::string quoted = "\"";
    for (char ch : field) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

std::string to_csv_text(const json& payload) {
    std::vector<std::pair<std::string, std::string>> cells;
    flatten(payload, "", cells);
    std::string header, row;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) {
            header += ',';
            row += ',';
        }
        header += csv_escape(cells[i].first);
        row += csv_escape(cells[i].second);
    }
    return header + "\n" + row + "\n";
}

std::string Cache::resolve_dir() {
    if (const char* dir = std::getenv("ZSM_CACHE_DIR"); dir && *dir) return dir;
    if (const char* home = std::getenv("HOME"); home && *home)
        return std::string(home) + "/.cache/zsm";
    return ".zsm-cache";
}

namespace {

std::string entry_path(const std::string& dir, const std::string& key) {
    char name[32];
    std::snprintf(name, sizeof name, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(key)));
    return dir + "/" + name + ".json";
}

}  // namespace

std::optional<CacheEntry> Cache::lookup(const std::string& key) const {
    if (!enabled_) return std::nullopt;
    try {
        std::ifstream in(entry_path(dir_, key));
        if (!in) return std::nullopt;
        json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
        if (j.is_discarded() || !j.is_object()) return std::nullopt;
        if (!j.contains("key") || j["key"] != key) return std::nullopt;
        if (!j.contains("exit") || !j.contains("payload")) return std::nullopt;
        CacheEntry entry;
        entry.exit_code = j["exit"].get<int>();
        entry.payload = j["payload"].get<std::string>();
        return entry;
    } catch (...) {
        return std::nullopt;
    }
}

void Cache::store(const std::string& key, int exit_code, const std::string& payload) const {
    if (!enabled_) return;
    try {
        std::filesystem::create_directories(dir_);
        json j{{"exit", exit_code},
               {"key", key},
               {"payload", payload},
               {"timestamp", static_cast<int64_t>(std::time(nullptr))}};
        std::string path = entry_path(dir_, key);
        std::string tmp = path + ".tmp";
        {
            std::ofstream out(tmp, std::ios::trunc);
            if (!out) return;
            out << j.dump();
        }
        std::rename(tmp.c_str(), path.c_str());
    } catch (...) {
        // Best effort only.
    }
}

}  // namespace zsm::report
