#pragma once

namespace revmax {

inline constexpr const char* kLibraryVersion = "0.1.0";

} // namespace revmax
