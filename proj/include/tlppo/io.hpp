#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace tlppo {

inline constexpr std::string_view kToolVersion = "tlppo 0.1.0";

/// 64-bit FNV-1a, incremental.
class Fnv1a {
public:
    void update(const void* data, std::size_t size);
    void update(std::string_view s) { update(s.data(), s.size()); }
    template <class T>
    void update_value(const T& v) {
        update(&v, sizeof(T));
    }
    std::uint64_t digest() const { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ull;
};

std::string hex64(std::uint64_t v);

/// `# key: value` lines that prefix every CSV/PGM the tools write.
void write_metadata(std::ostream& os, std::string_view config_hash, std::uint64_t master_seed);

}  // namespace tlppo
