#pragma once

#include "cdd/engine/analyze.hpp"
#include "cdd/syntax/parser.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace testing {

inline std::filesystem::path fixtures() { return CDD_FIXTURES_DIR; }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

/// A fresh directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() / ("cdd-test-" + tag + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::vector<cdd::engine::UnitAnalysis> analyze(const std::string& source,
                                                       const cdd::engine::RuleSet& rules = {},
                                                       const std::string& path = "T.java") {
    return cdd::engine::analyze_unit(cdd::syntax::parse_unit(source, path), rules);
}

/// Total of the single class wrapping `body` inside one void method.
inline cdd::Points method_total(const std::string& body, const cdd::engine::RuleSet& rules = {}) {
    auto units = analyze("class T {\n  void m(int a, int b, int c, int d, boolean x) {\n" + body + "\n  }\n}\n", rules);
    return units.at(0).total;
}

} // namespace testing
