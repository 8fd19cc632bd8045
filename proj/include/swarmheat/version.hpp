#pragma once

namespace swarmheat {
inline constexpr const char* kVersion = "0.1.0";
}
