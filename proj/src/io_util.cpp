#include "sensornet/io_util.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace sensornet {

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{})
        throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

std::string file_digest(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read file for digest: " + path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
    }
    char out[17];
    const auto [ptr, ec] = std::to_chars(out, out + 16, hash, 16);
    std::string hex(out, ptr);
    return std::string(16 - hex.size(), '0') + hex;
}

void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << content;
}

} // namespace sensornet
