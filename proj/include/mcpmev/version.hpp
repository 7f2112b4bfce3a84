#pragma once

namespace mcpmev {
inline constexpr const char* kVersion = "0.1.0";
}
