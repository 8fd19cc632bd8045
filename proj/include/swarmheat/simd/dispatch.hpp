#pragma once

#include <string_view>

namespace swarmheat::simd {

enum class SimdLevel { scalar, avx2 };

/// Best level supported by both this build and the running CPU.
SimdLevel detected_level();

/// Level used by the dispatched kernels. Starts at SWARM_SIMD (scalar|avx2|auto)
/// when set, otherwise at detected_level().
SimdLevel active_level();

/// Throws std::invalid_argument if the level is not available.
void set_active_level(SimdLevel level);

bool level_available(SimdLevel level);

std::string_view to_string(SimdLevel level);

/// Accepts "scalar", "avx2" and "auto" (= detected_level()).
SimdLevel parse_level(std::string_view text);

/// Like parse_level(), but "auto" keeps the current active_level() so that
/// SWARM_SIMD still applies.
SimdLevel resolve_level(std::string_view text);

}  // namespace swarmheat::simd
