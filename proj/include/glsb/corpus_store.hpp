#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "glsb/dump_parser.hpp"
#include "glsb/records.hpp"

namespace glsb {

/// Everything a corpus store directory holds.
///
/// Layout (one UTF-8 JSON record per line):
///   posts.jsonl, comments.jsonl, postlinks.jsonl, related.jsonl
///   manifest.json  counts, source checksums, dump schema note
struct CorpusRecords {
    std::vector<PostRecord> posts;
    std::vector<CommentRecord> comments;
    std::vector<PostLinkRecord> postlinks;
    std::vector<RelatedEdgeRecord> related;
};

struct SourceInfo {
    std::string file;
    std::string sha256;
    ParseReport report;
};

struct IngestSummary {
    std::vector<SourceInfo> sources;
    std::size_t posts = 0;
    std::size_t comments = 0;
    std::size_t postlinks = 0;
};

std::string sha256_file(const std::filesystem::path& path);
std::string sha256_bytes(std::string_view bytes);

void write_corpus_store(const std::filesystem::path& dir, const CorpusRecords& records,
                        const std::vector<SourceInfo>& sources);
CorpusRecords read_corpus_store(const std::filesystem::path& dir);
nlohmann::json read_manifest(const std::filesystem::path& dir);

/// Parses Posts.xml, Comments.xml and PostLinks.xml from dump_dir (the three
/// files in parallel) and writes a fresh store. Posts.xml is required; the
/// other two are treated as empty when absent. Existing related edges in the
/// store are preserved.
IngestSummary ingest_dump(const std::filesystem::path& dump_dir,
                          const std::filesystem::path& store_dir);

/// Replaces the store's related edges and refreshes the manifest counts.
void store_related_edges(const std::filesystem::path& store_dir,
                         const std::vector<RelatedEdgeRecord>& edges);

}  // namespace glsb
