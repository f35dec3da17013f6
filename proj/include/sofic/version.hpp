#pragma once

namespace sofic {
inline constexpr const char* version = "0.1.0";
}
