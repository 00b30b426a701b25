#pragma once

namespace sreplicator {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace sreplicator
