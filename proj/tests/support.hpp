#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "glsb/corpus.hpp"
#include "glsb/records.hpp"

namespace glsb::testing {

inline PostRecord question(PostId id, std::optional<std::int64_t> owner = 1, std::int64_t score = 0,
                           std::string title = "title", std::string body = "",
                           std::vector<std::string> tags = {}) {
    PostRecord p;
    p.id = id;
    p.kind = PostKind::Question;
    p.owner_id = owner;
    p.score = score;
    p.title = std::move(title);
    p.body = std::move(body);
    p.tags = std::move(tags);
    p.created_at = "2021-01-01T00:00:00.000";
    return p;
}

inline PostRecord answer(PostId id, PostId parent, std::optional<std::int64_t> owner = 2,
                         std::int64_t score = 0, std::string body = "") {
    PostRecord p;
    p.id = id;
    p.kind = PostKind::Answer;
    p.parent_id = parent;
    p.owner_id = owner;
    p.score = score;
    p.body = std::move(body);
    p.created_at = "2021-01-01T00:00:00.000";
    return p;
}

inline CommentRecord comment(std::int64_t id, PostId post, std::string body, std::int64_t score = 0) {
    return CommentRecord{id, post, std::move(body), score, 3};
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("glsb-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
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
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path data_dir() { return GLSB_TEST_DATA_DIR; }

}  // namespace glsb::testing
