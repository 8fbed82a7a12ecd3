#include "sncf/core/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <string>

#include "sncf/core/error.hpp"

namespace sncf {

std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SNCF_THREADS"); env != nullptr && *env != '\0') {
        std::size_t value = 0;
        const char* end = env + std::strlen(env);
        const auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec != std::errc{} || ptr != end || value == 0) {
            throw ConfigError(std::string("SNCF_THREADS must be a positive integer, got '") + env + "'");
        }
        return value;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace sncf
