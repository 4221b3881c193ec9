#pragma once

namespace gkp {
inline constexpr const char* kVersion = "gkpsim 0.1.0";
}
