#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "corgii/dataset.hpp"

namespace corgii {

/// Malformed input file; the message carries the file and line number.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One JSON object per line: {"id": int, "n": int, "edges": [[u,v],...]} with
/// 0-based u < v < n. Graphs are padded to the widest graph in the file;
/// callers repad to a dataset-wide width.
std::vector<Graph> read_graphs_jsonl(std::istream& in, const std::string& source = "<stream>");
void write_graphs_jsonl(std::ostream& out, const std::vector<Graph>& graphs);

/// Labels file: one line per query, "qid: cid cid cid" (relevant IDs only).
std::map<int, std::vector<int>> read_labels(std::istream& in, const std::string& source = "<stream>");
void write_labels(std::ostream& out, const Dataset& d);

/// Writes `<stem>.corpus.jsonl`, `<stem>.queries.jsonl`, `<stem>.labels.txt`
/// next to the manifest and the manifest JSON itself. Paths in the manifest
/// are relative to its directory.
void save_corpus(const Dataset& d, const std::filesystem::path& manifest);

/// Loads a dataset from a manifest (.json), a bare corpus file (.jsonl), or a
/// TUDataset-style directory holding `<name>_A.txt` and
/// `<name>_graph_indicator.txt`. All graphs are padded to the common width.
Dataset load_corpus(const std::filesystem::path& path);

/// TUDataset-style directory: 1-based global node IDs, one "u, v" edge per line
/// in `_A.txt`, one graph ID per node line in `_graph_indicator.txt`. Graph IDs
/// become 0-based corpus IDs.
Dataset load_tu_directory(const std::filesystem::path& dir);

}  // namespace corgii
