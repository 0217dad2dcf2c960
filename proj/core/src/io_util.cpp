#include "io_util.hpp"

#include <cstdio>
#include <memory>

namespace blockout::detail {

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "rb"),
                                                         &std::fclose);
    if (!file) throw ParseError(0, "cannot open \"" + path + "\" for reading");
    std::fseek(file.get(), 0, SEEK_END);
    const long size = std::ftell(file.get());
    if (size < 0) throw ParseError(0, "cannot determine size of \"" + path + "\"");
    std::fseek(file.get(), 0, SEEK_SET);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    if (!bytes.empty() && std::fread(bytes.data(), 1, bytes.size(), file.get()) != bytes.size())
        throw ParseError(0, "short read from \"" + path + "\"");
    return bytes;
}

void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "wb"),
                                                         &std::fclose);
    if (!file) throw ParseError(0, "cannot open \"" + path + "\" for writing");
    if (!bytes.empty() && std::fwrite(bytes.data(), 1, bytes.size(), file.get()) != bytes.size())
        throw ParseError(0, "short write to \"" + path + "\"");
}

}  // namespace blockout::detail
