#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace zsm {

// FNV-1a, 64-bit.  Used for cache file names and Cayley-table fingerprints;
// stability across runs matters, cryptographic strength does not.
inline uint64_t fnv1a64(const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ull;
    for (size_t k = 0; k < len; ++k) {
        h ^= p[k];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

}  // namespace zsm
