#pragma once

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "depsig/corpus.hpp"

namespace testing {

/// Fresh scratch directory under the system temp dir, removed on exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("depsig_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& body) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << body;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline depsig::Timestamp at(int y, unsigned m, unsigned d, int hour = 12) {
    return depsig::Date::from_ymd(y, m, d).days * 86400 + hour * 3600;
}

inline depsig::Post post(std::string id, std::string user, depsig::Timestamp ts, std::string text) {
    depsig::Post p;
    p.id = std::move(id);
    p.user_id = std::move(user);
    p.timestamp = ts;
    p.text = std::move(text);
    return p;
}

inline depsig::TokenizedDoc doc(std::string id, std::vector<std::string> tokens) {
    return depsig::TokenizedDoc(std::move(id), std::move(tokens));
}

}  // namespace testing
