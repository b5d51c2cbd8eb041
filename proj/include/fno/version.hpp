#pragma once

namespace fno {

inline constexpr const char* kVersion = "0.1.0";

}
