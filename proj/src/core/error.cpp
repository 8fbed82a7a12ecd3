#include "sncf/core/error.hpp"

namespace sncf {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Config: return "config";
        case ErrorKind::Load: return "load";
        case ErrorKind::Numerical: return "numerical";
    }
    return "unknown";
}

}  // namespace sncf
