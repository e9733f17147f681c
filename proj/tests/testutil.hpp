#pragma once

// Shared helpers for the test binaries: scratch directories and tolerance
// predicates.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace testutil {

// scratch directory removed on destruction
class TempDir {
  public:
    TempDir() {
        static std::atomic<uint64_t> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path_ = base / ("stylelab_test_" + std::to_string(rd()) + "_" +
                        std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string dir() const { return path_.string(); }

  private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// |a - b| <= tol, also true when both are NaN
inline bool close_abs(double a, double b, double tol) {
    if (std::isnan(a) && std::isnan(b)) return true;
    return std::fabs(a - b) <= tol;
}

// relative against the larger magnitude, floored at 1
inline bool close_rel(double a, double b, double tol) {
    if (std::isnan(a) && std::isnan(b)) return true;
    const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= tol * scale;
}

}  // namespace testutil
