#include "tlppo/io.hpp"

#include <cstdio>
#include <ostream>

namespace tlppo {

void Fnv1a::update(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        state_ ^= bytes[i];
        state_ *= 0x00000100000001b3ull;
    }
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_metadata(std::ostream& os, std::string_view config_hash, std::uint64_t master_seed) {
    os << "# tool: " << kToolVersion << '\n';
    os << "# config_hash: " << config_hash << '\n';
    os << "# master_seed: " << master_seed << '\n';
}

}  // namespace tlppo
