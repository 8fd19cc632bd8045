#include "swarmheat/simd/dispatch.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "swarmheat/simd/kernels.hpp"

namespace swarmheat::simd {

namespace {

bool cpu_has_avx2() {
#if SWARMHEAT_WITH_AVX2 && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

SimdLevel initial_level() {
    if (const char* env = std::getenv("SWARM_SIMD"); env && *env) {
        const SimdLevel lvl = parse_level(env);
        if (level_available(lvl)) return lvl;
    }
    return detected_level();
}

std::atomic<SimdLevel>& active_slot() {
    static std::atomic<SimdLevel> slot{initial_level()};
    return slot;
}

}  // namespace

SimdLevel detected_level() {
    static const SimdLevel lvl = cpu_has_avx2() ? SimdLevel::avx2 : SimdLevel::scalar;
    return lvl;
}

bool level_available(SimdLevel level) {
    return level == SimdLevel::scalar || detected_level() == SimdLevel::avx2;
}

SimdLevel active_level() { return active_slot().load(std::memory_order_relaxed); }

void set_active_level(SimdLevel level) {
    if (!level_available(level))
        throw std::invalid_argument("SIMD level '" + std::string(to_string(level)) +
                                    "' is not available on this machine");
    active_slot().store(level, std::memory_order_relaxed);
}

std::string_view to_string(SimdLevel level) {
    switch (level) {
        case SimdLevel::avx2: return "avx2";
        case SimdLevel::scalar: break;
    }
    return "scalar";
}

SimdLevel parse_level(std::string_view text) {
    if (text == "scalar") return SimdLevel::scalar;
    if (text == "avx2") return SimdLevel::avx2;
    if (text == "auto") return detected_level();
    throw std::invalid_argument("unknown SIMD level '" + std::string(text) + "'");
}

SimdLevel resolve_level(std::string_view text) {
    return text == "auto" ? active_level() : parse_level(text);
}

KdeSumFn kde_sum() {
#if SWARMHEAT_WITH_AVX2
    if (active_level() == SimdLevel::avx2) return &kde_sum_avx2;
#endif
    return &kde_sum_scalar;
}

HeatRowFn heat_row() {
#if SWARMHEAT_WITH_AVX2
    if (active_level() == SimdLevel::avx2) return &heat_row_avx2;
#endif
    return &heat_row_scalar;
}

}  // namespace swarmheat::simd
