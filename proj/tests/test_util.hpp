#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "quadsky/core.hpp"

namespace testutil {

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("quadsky_test_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline quadsky::SpatialEntity entity(std::string source, std::string id, double lat, double lon,
                                     std::string name,
                                     std::optional<std::string> address = std::nullopt,
                                     std::vector<std::string> categories = {},
                                     std::optional<std::string> phone = std::nullopt,
                                     std::optional<std::string> website = std::nullopt) {
    quadsky::SpatialEntity e;
    e.key = {std::move(source), std::move(id)};
    e.point = {lat, lon};
    e.name = std::move(name);
    e.address = std::move(address);
    e.categories = std::move(categories);
    e.phone = std::move(phone);
    e.website = std::move(website);
    return e;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace testutil
