// Report rendering (json / csv) and the on-disk result cache keyed by
// content-hashed invocation signatures.
#pragma once

#include <optional>
#include <string>

#include <json.hpp>

namespace zsm::report {

// Stamped into every cache key so algorithm changes invalidate old entries.
inline constexpr const char* kVersion = "1.0.0";

enum class Format { Table, Json, Csv };

Format parse_format(const std::string& name);  // "table" | "json" | "csv"
const char* format_name(Format f);

// dump(2) with a trailing newline; object keys serialize alphabetically,
// which is what makes byte-identity across runs meaningful.
std::string to_json_text(const nlohmann::json& payload);

// Header line plus one row.  Nested objects flatten to dotted keys, arrays
// of scalars join with ';', arrays of objects flatten through their index.
std::string to_csv_text(const nlohmann::json& payload);

std::string csv_escape(const std::string& field);

struct CacheEntry {
    int exit_code = 0;
    std::string payload;
};

// One file per key under the cache directory, named by the FNV-1a hash of
// the full key; the key itself is stored inside and re-checked on lookup,
// so hash collisions degrade to misses.  Store failures are swallowed —
// the cache is an accelerator, never a correctness dependency.
class Cache {
public:
    Cache(std::string dir, bool enabled) : dir_(std::move(dir)), enabled_(enabled) {}

    // $ZSM_CACHE_DIR when set, else ~/.cache/zsm.
    static std::string resolve_dir();

    bool enabled() const { return enabled_; }
    std::optional<CacheEntry> lookup(const std::string& key) const;
    void store(const std::string& key, int exit_code, const std::string& payload) const;

private:
    std::string dir_;
    bool enabled_;
};

}  // namespace zsm::report
