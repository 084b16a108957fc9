#include "glsb/corpus_store.hpp"

#include <array>
#include <fstream>
#include <future>
#include <memory>

#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "glsb/error.hpp"
#include "glsb/jsonl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace glsb {

namespace {

constexpr const char* kPosts = "posts.jsonl";
constexpr const char* kComments = "comments.jsonl";
constexpr const char* kPostLinks = "postlinks.jsonl";
constexpr const char* kRelated = "related.jsonl";
constexpr const char* kManifest = "manifest.json";

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
            throw Error(ErrorCode::Io, "sha256 init failed");
    }
    void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        static constexpr char kHex[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out += kHex[md[i] >> 4];
            out += kHex[md[i] & 0xF];
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

json report_json(const ParseReport& r) {
    json errors = json::array();
    for (const auto& e : r.row_errors) errors.push_back({{"row", e.row_index}, {"error", e.message}});
    return {{"total_rows", r.total_rows},
            {"parsed", r.parsed},
            {"skipped_kind", r.skipped_kind},
            {"row_errors", errors}};
}

template <typename Record>
ParseResult<Record> parse_file(const fs::path& path, bool required,
                               ParseResult<Record> (*parse)(std::istream&)) {
    if (!fs::exists(path)) {
        if (required) throw Error(ErrorCode::NotFound, "missing dump file " + path.string());
        spdlog::info("{} not present, treating as empty", path.string());
        return {};
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return parse(in);
}

void write_manifest(const fs::path& dir, const CorpusRecords& records,
                    const std::vector<SourceInfo>& sources) {
    json src = json::array();
    for (const auto& s : sources) {
        src.push_back({{"file", s.file}, {"sha256", s.sha256}, {"report", report_json(s.report)}});
    }
    json manifest = {
        {"format_version", 1},
        {"dump_schema", kDumpSchemaNote},
        {"counts",
         {{"posts", records.posts.size()},
          {"comments", records.comments.size()},
          {"postlinks", records.postlinks.size()},
          {"related", records.related.size()}}},
        {"files",
         {{"posts", sha256_file(dir / kPosts)},
          {"comments", sha256_file(dir / kComments)},
          {"postlinks", sha256_file(dir / kPostLinks)},
          {"related", sha256_file(dir / kRelated)}}},
        {"sources", src},
    };
    std::ofstream out(dir / kManifest, std::ios::trunc);
    out << manifest.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::Io, "cannot write manifest in " + dir.string());
}

}  // namespace

std::string sha256_bytes(std::string_view bytes) {
    Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.hex();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in.read(buf.data(), buf.size()) || in.gcount() > 0) {
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

void write_corpus_store(const fs::path& dir, const CorpusRecords& records,
                        const std::vector<SourceInfo>& sources) {
    fs::create_directories(dir);
    write_jsonl(dir / kPosts, records.posts);
    write_jsonl(dir / kComments, records.comments);
    write_jsonl(dir / kPostLinks, records.postlinks);
    write_jsonl(dir / kRelated, records.related);
    write_manifest(dir, records, sources);
}

CorpusRecords read_corpus_store(const fs::path& dir) {
    if (!fs::exists(dir / kManifest))
        throw Error(ErrorCode::NotFound, "not a corpus store (no manifest): " + dir.string());
    CorpusRecords r;
    r.posts = read_jsonl<PostRecord>(dir / kPosts);
    r.comments = read_jsonl<CommentRecord>(dir / kComments);
    r.postlinks = read_jsonl<PostLinkRecord>(dir / kPostLinks);
    if (fs::exists(dir / kRelated)) r.related = read_jsonl<RelatedEdgeRecord>(dir / kRelated);
    return r;
}

json read_manifest(const fs::path& dir) {
    std::ifstream in(dir / kManifest);
    if (!in) throw Error(ErrorCode::NotFound, "no manifest in " + dir.string());
    return json::parse(in);
}

IngestSummary ingest_dump(const fs::path& dump_dir, const fs::path& store_dir) {
    const auto posts_path = dump_dir / "Posts.xml";
    const auto comments_path = dump_dir / "Comments.xml";
    const auto links_path = dump_dir / "PostLinks.xml";

    auto posts = std::async(std::launch::async, [&] {
        return parse_file<PostRecord>(posts_path, true, &parse_posts);
    });
    auto comments = std::async(std::launch::async, [&] {
        return parse_file<CommentRecord>(comments_path, false, &parse_comments);
    });
    auto links = std::async(std::launch::async, [&] {
        return parse_file<PostLinkRecord>(links_path, false, &parse_postlinks);
    });

    CorpusRecords records;
    std::vector<SourceInfo> sources;
    auto take = [&](auto& future, const fs::path& path, auto& dest) {
        auto result = future.get();
        dest = std::move(result.records);
        if (fs::exists(path)) {
            sources.push_back({path.filename().string(), sha256_file(path), result.report});
        }
    };
    take(posts, posts_path, records.posts);
    take(comments, comments_path, records.comments);
    take(links, links_path, records.postlinks);

    if (fs::exists(store_dir / kRelated)) {
        records.related = read_jsonl<RelatedEdgeRecord>(store_dir / kRelated);
    }
    write_corpus_store(store_dir, records, sources);

    IngestSummary summary;
    summary.sources = std::move(sources);
    summary.posts = records.posts.size();
    summary.comments = records.comments.size();
    summary.postlinks = records.postlinks.size();
    return summary;
}

void store_related_edges(const fs::path& store_dir, const std::vector<RelatedEdgeRecord>& edges) {
    auto manifest = read_manifest(store_dir);
    write_jsonl(store_dir / kRelated, edges);
    manifest["counts"]["related"] = edges.size();
    manifest["files"]["related"] = sha256_file(store_dir / kRelated);
    std::ofstream out(store_dir / kManifest, std::ios::trunc);
    out << manifest.dump(2) << '\n';
}

}  // namespace glsb
