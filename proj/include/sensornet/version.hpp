#pragma once

namespace sensornet {

inline constexpr const char* kVersion = "0.1.0";

} // namespace sensornet
