#pragma once

namespace isinglab {

inline constexpr const char* ISINGLAB_VERSION = "0.3.0";

}  // namespace isinglab
