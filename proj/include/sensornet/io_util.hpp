#pragma once

#include <cstdint>
#include <string>

namespace sensornet {

// Shortest decimal form that round-trips the exact double, so numeric output
// is reproducible across runs, locales, and thread counts.
std::string format_double(double x);

// FNV-1a 64 over the file's bytes, hex-encoded.
std::string file_digest(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

} // namespace sensornet
