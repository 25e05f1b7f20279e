#pragma once

namespace magwell {
inline constexpr const char* kVersion = "0.1.0";
}
