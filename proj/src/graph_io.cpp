#include "corgii/graph_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace corgii {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

[[noreturn]] void bad_line(const std::string& source, int line, const std::string& what) {
  throw FormatError(source + ":" + std::to_string(line) + ": " + what);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); });
}

std::vector<Graph> repad_all(std::vector<Graph> gs, int width) {
  for (auto& g : gs) g = g.repadded(width);
  return gs;
}

int max_n(const std::vector<Graph>& gs) {
  int w = 1;
  for (const auto& g : gs) w = std::max(w, g.n());
  return w;
}

}  // namespace

std::vector<Graph> read_graphs_jsonl(std::istream& in, const std::string& source) {
  struct Raw {
    int id, n;
    std::vector<Edge> edges;
  };
  std::vector<Raw> raw;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      bad_line(source, lineno, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("n") || !obj.contains("edges") ||
        !obj["id"].is_number_integer() || !obj["n"].is_number_integer() || !obj["edges"].is_array()) {
      bad_line(source, lineno, "expected {\"id\": int, \"n\": int, \"edges\": [[u,v],...]}");
    }
    Raw r{obj["id"].get<int>(), obj["n"].get<int>(), {}};
    if (r.n < 1) bad_line(source, lineno, "graph " + std::to_string(r.id) + " has n < 1");
    for (const auto& e : obj["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
        bad_line(source, lineno, "edge entries must be [u, v] integer pairs");
      }
      int u = e[0].get<int>(), v = e[1].get<int>();
      if (u < 0 || v < 0 || u >= r.n || v >= r.n) {
        bad_line(source, lineno,
                 "graph " + std::to_string(r.id) + ": dangling endpoint in edge (" +
                     std::to_string(u) + ", " + std::to_string(v) + ") with n=" + std::to_string(r.n));
      }
      if (u == v) bad_line(source, lineno, "graph " + std::to_string(r.id) + ": self loop");
      r.edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    raw.push_back(std::move(r));
  }
  int width = 1;
  for (const auto& r : raw) width = std::max(width, r.n);
  std::vector<Graph> out;
  out.reserve(raw.size());
  for (const auto& r : raw) out.emplace_back(r.id, r.n, width, r.edges);
  return out;
}

void write_graphs_jsonl(std::ostream& out, const std::vector<Graph>& graphs) {
  for (const auto& g : graphs) {
    ordered_json obj;
    obj["id"] = g.id();
    obj["n"] = g.n();
    obj["edges"] = ordered_json::array();
    for (auto [u, v] : g.edges()) obj["edges"].push_back({u, v});
    out << obj.dump() << '\n';
  }
}

std::map<int, std::vector<int>> read_labels(std::istream& in, const std::string& source) {
  std::map<int, std::vector<int>> labels;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) bad_line(source, lineno, "expected \"qid: cid cid ...\"");
    std::istringstream head(line.substr(0, colon));
    int qid;
    if (!(head >> qid)) bad_line(source, lineno, "query id is not an integer");
    std::istringstream rest(line.substr(colon + 1));
    std::vector<int> ids;
    std::string tok;
    while (rest >> tok) {
      try {
        size_t used = 0;
        int cid = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        ids.push_back(cid);
      } catch (const std::exception&) {
        bad_line(source, lineno, "corpus id '" + tok + "' is not an integer");
      }
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (!labels.emplace(qid, std::move(ids)).second) {
      bad_line(source, lineno, "duplicate labels for query " + std::to_string(qid));
    }
  }
  return labels;
}

void write_labels(std::ostream& out, const Dataset& d) {
  for (const auto& q : d.queries) {
    out << q.id() << ':';
    for (int cid : d.positives(q.id())) out << ' ' << cid;
    out << '\n';
  }
}

void save_corpus(const Dataset& d, const fs::path& manifest) {
  const fs::path dir = manifest.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  const std::string stem = manifest.stem().string();
  const std::string corpus_name = stem + ".corpus.jsonl";
  const std::string query_name = stem + ".queries.jsonl";
  const std::string label_name = stem + ".labels.txt";
  {
    auto out = open_out(dir / corpus_name);
    write_graphs_jsonl(out, d.corpus);
  }
  {
    auto out = open_out(dir / query_name);
    write_graphs_jsonl(out, d.queries);
  }
  {
    auto out = open_out(dir / label_name);
    write_labels(out, d);
  }
  ordered_json m;
  m["corpus"] = corpus_name;
  m["queries"] = query_name;
  m["labels"] = label_name;
  m["split"]["train"] = d.split.train;
  m["split"]["dev"] = d.split.dev;
  m["split"]["test"] = d.split.test;
  auto out = open_out(manifest);
  out << m.dump(2) << '\n';
}

Dataset load_corpus(const fs::path& path) {
  if (fs::is_directory(path)) return load_tu_directory(path);
  Dataset d;
  if (path.extension() == ".jsonl") {
    auto in = open_in(path);
    d.corpus = read_graphs_jsonl(in, path.string());
    d.reindex();
    return d;
  }
  json m;
  {
    auto in = open_in(path);
    try {
      in >> m;
    } catch (const json::parse_error& e) {
      throw FormatError(path.string() + ": malformed manifest: " + e.what());
    }
  }
  for (const char* key : {"corpus", "queries", "labels"}) {
    if (!m.contains(key) || !m[key].is_string()) {
      throw FormatError(path.string() + ": manifest lacks string field '" + key + "'");
    }
  }
  const fs::path dir = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : dir / p; };
  {
    const auto p = resolve(m["corpus"].get<std::string>());
    auto in = open_in(p);
    d.corpus = read_graphs_jsonl(in, p.string());
  }
  {
    const auto p = resolve(m["queries"].get<std::string>());
    auto in = open_in(p);
    d.queries = read_graphs_jsonl(in, p.string());
  }
  {
    const auto p = resolve(m["labels"].get<std::string>());
    auto in = open_in(p);
    d.relevant = read_labels(in, p.string());
  }
  const int width = std::max(max_n(d.corpus), max_n(d.queries));
  d.corpus = repad_all(std::move(d.corpus), width);
  d.queries = repad_all(std::move(d.queries), width);
  if (m.contains("split")) {
    const auto& s = m["split"];
    for (auto [key, dst] : {std::pair{"train", &d.split.train}, std::pair{"dev", &d.split.dev},
                            std::pair{"test", &d.split.test}}) {
      if (s.contains(key)) *dst = s[key].get<std::vector<int>>();
    }
  }
  for (const auto& q : d.queries) d.relevant.try_emplace(q.id());
  d.reindex();
  d.validate();
  return d;
}

Dataset load_tu_directory(const fs::path& dir) {
  fs::path a_file, ind_file;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    auto ends = [&](const std::string& suf) {
      return name.size() >= suf.size() && name.compare(name.size() - suf.size(), suf.size(), suf) == 0;
    };
    if (ends("_A.txt")) a_file = entry.path();
    if (ends("_graph_indicator.txt")) ind_file = entry.path();
  }
  if (a_file.empty() || ind_file.empty()) {
    throw FormatError(dir.string() + ": expected <name>_A.txt and <name>_graph_indicator.txt");
  }

  std::vector<int> graph_of;  // global node (0-based) -> graph id (1-based)
  {
    auto in = open_in(ind_file);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (blank(line)) continue;
      std::istringstream ss(line);
      int g;
      if (!(ss >> g) || g < 1) bad_line(ind_file.string(), lineno, "graph indicator must be a positive integer");
      graph_of.push_back(g);
    }
  }
  std::map<int, int> first_node, node_count;
  for (size_t v = 0; v < graph_of.size(); ++v) {
    const int g = graph_of[v];
    if (!first_node.count(g)) first_node[g] = static_cast<int>(v);
    ++node_count[g];
  }
  std::map<int, std::vector<Edge>> edges;
  {
    auto in = open_in(a_file);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (blank(line)) continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ss(line);
      int u, v;
      if (!(ss >> u >> v)) bad_line(a_file.string(), lineno, "expected \"u, v\"");
      if (u < 1 || v < 1 || u > static_cast<int>(graph_of.size()) || v > static_cast<int>(graph_of.size())) {
        bad_line(a_file.string(), lineno, "dangling endpoint: node id outside graph indicator range");
      }
      const int g = graph_of[u - 1];
      if (graph_of[v - 1] != g) {
        bad_line(a_file.string(), lineno,
                 "dangling endpoint: edge crosses graphs " + std::to_string(g - 1) + " and " +
                     std::to_string(graph_of[v - 1] - 1));
      }
      const int lu = u - 1 - first_node[g], lv = v - 1 - first_node[g];
      if (lu >= node_count[g] || lv >= node_count[g]) {
        bad_line(a_file.string(), lineno, "nodes of graph " + std::to_string(g - 1) + " are not contiguous");
      }
      if (lu == lv) continue;
      edges[g].emplace_back(std::min(lu, lv), std::max(lu, lv));
    }
  }
  int width = 1;
  for (auto [g, n] : node_count) width = std::max(width, n);
  Dataset d;
  for (auto [g, n] : node_count) d.corpus.emplace_back(g - 1, n, width, edges[g]);
  d.reindex();
  return d;
}

}  // namespace corgii
