#include "sncf/core/hash.hpp"

#include <array>
#include <fstream>

#include "sncf/core/error.hpp"

namespace sncf {

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t basis) noexcept {
    std::uint64_t h = basis;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        const auto got = static_cast<std::size_t>(in.gcount());
        h = fnv1a64({reinterpret_cast<const unsigned char*>(buf.data()), got}, h);
    }
    return to_hex(h);
}

std::string to_hex(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

}  // namespace sncf
