#pragma once

#include <string>

#include "sncf/simd/kernel_table.hpp"

namespace sncf::simd {

/// The table used by the library. Defaults to the best ISA the CPU supports;
/// SNCF_ISA=scalar|avx2|neon in the environment overrides the default.
const KernelTable& kernels();

/// Table for a specific ISA. Throws ConfigError if not compiled in or not supported.
const KernelTable& kernels_for(Isa isa);

bool isa_available(Isa isa) noexcept;
Isa best_available_isa() noexcept;
Isa active_isa() noexcept;
void set_active_isa(Isa isa);

const char* to_string(Isa isa) noexcept;
Isa isa_from_string(const std::string& text);

/// Pins the active ISA for the lifetime of the object.
class ScopedIsa {
public:
    explicit ScopedIsa(Isa isa) : previous_(active_isa()) { set_active_isa(isa); }
    ~ScopedIsa() { set_active_isa(previous_); }
    ScopedIsa(const ScopedIsa&) = delete;
    ScopedIsa& operator=(const ScopedIsa&) = delete;

private:
    Isa previous_;
};

}  // namespace sncf::simd
