#include <atomic>
#include <cstdlib>

#include "sncf/core/error.hpp"
#include "sncf/simd/kernels.hpp"

namespace sncf::simd {

namespace {

bool cpu_supports(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(SNCF_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::Neon:
#if defined(SNCF_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable* table_for(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return &scalar_table;
        case Isa::Avx2:
#if defined(SNCF_HAVE_AVX2)
            return &avx2_table;
#else
            return nullptr;
#endif
        case Isa::Neon:
#if defined(SNCF_HAVE_NEON)
            return &neon_table;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

const KernelTable* initial_table() {
    if (const char* env = std::getenv("SNCF_ISA"); env != nullptr && *env != '\0') {
        return &kernels_for(isa_from_string(env));
    }
    return table_for(best_available_isa());
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{initial_table()};
    return slot;
}

}  // namespace

bool isa_available(Isa isa) noexcept { return table_for(isa) != nullptr && cpu_supports(isa); }

Isa best_available_isa() noexcept {
    if (isa_available(Isa::Avx2)) return Isa::Avx2;
    if (isa_available(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

const KernelTable& kernels() { return *active_slot().load(std::memory_order_acquire); }

const KernelTable& kernels_for(Isa isa) {
    if (!isa_available(isa)) {
        throw ConfigError(std::string("ISA '") + to_string(isa) + "' is not available on this build or CPU");
    }
    return *table_for(isa);
}

Isa active_isa() noexcept { return active_slot().load(std::memory_order_acquire)->isa; }

void set_active_isa(Isa isa) { active_slot().store(&kernels_for(isa), std::memory_order_release); }

const char* to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

Isa isa_from_string(const std::string& text) {
    if (text == "scalar") return Isa::Scalar;
    if (text == "avx2") return Isa::Avx2;
    if (text == "neon") return Isa::Neon;
    throw ConfigError("unknown ISA '" + text + "' (expected scalar, avx2 or neon)");
}

}  // namespace sncf::simd
