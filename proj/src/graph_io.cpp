#include "sedge/graph_io.hpp"

#include <array>
#include <algorithm>
#include <limits>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sedge/errors.hpp"

namespace sedge {

namespace {

constexpr std::array<char, 8> kMagic{'S', 'E', 'D', 'G', 'R', 'A', 'P', 'H'};

template <typename T>
void put_le(std::ostream& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.put(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::istream& in) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) {
      throw ValidationError("truncated graph file header");
    }
    value |= static_cast<T>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return value;
}

void put_varint(std::ostream& out, std::uint64_t value) {
  while (value >= 0x80) {
    out.put(static_cast<char>((value & 0x7F) | 0x80));
    value >>= 7;
  }
  out.put(static_cast<char>(value));
}

std::uint64_t get_varint(std::istream& in) {
  std::uint64_t value = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) {
      throw ValidationError("truncated graph file body");
    }
    value |= static_cast<std::uint64_t>(c & 0x7F) << shift;
    if ((c & 0x80) == 0) {
      return value;
    }
  }
  throw ValidationError("malformed varint in graph file");
}

}  // namespace

void write_binary(const SparseGraph& g, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kGraphFormatVersion);
  put_le<std::uint64_t>(out, g.n_vertices());
  put_le<std::uint64_t>(out, g.edge_count());
  for (Vertex u = 0; u < g.n_vertices(); ++u) {
    const auto nb = g.neighbors(u);
    const auto* first_up = std::upper_bound(nb.data(), nb.data() + nb.size(), u);
    const auto count = static_cast<std::uint64_t>(nb.data() + nb.size() - first_up);
    put_varint(out, count);
    Vertex prev = u;
    for (const auto* it = first_up; it != nb.data() + nb.size(); ++it) {
      put_varint(out, *it - prev);
      prev = *it;
    }
  }
  if (!out) {
    throw std::runtime_error("failed writing graph");
  }
}

SparseGraph read_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw ValidationError("not a binary graph file (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kGraphFormatVersion) {
    throw ValidationError("unsupported graph format version " + std::to_string(version));
  }
  const auto n = get_le<std::uint64_t>(in);
  const auto m = get_le<std::uint64_t>(in);
  if (n > std::numeric_limits<Vertex>::max()) {
    throw ValidationError("vertex count exceeds 32-bit id space");
  }
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::uint64_t u = 0; u < n; ++u) {
    const auto count = get_varint(in);
    std::uint64_t prev = u;
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto gap = get_varint(in);
      if (gap == 0 || prev + gap >= n) {
        throw ValidationError("corrupt adjacency in graph file");
      }
      prev += gap;
      edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(prev));
    }
  }
  if (edges.size() != m) {
    throw ValidationError("edge count mismatch in graph file");
  }
  return SparseGraph::from_edges(n, edges);
}

void write_edge_list(const SparseGraph& g, std::ostream& out) {
  out << "# vertices " << g.n_vertices() << '\n';
  for (Vertex u = 0; u < g.n_vertices(); ++u) {
    for (Vertex v : g.neighbors(u)) {
      if (u < v) {
        out << u << ' ' << v << '\n';
      }
    }
  }
  if (!out) {
    throw std::runtime_error("failed writing edge list");
  }
}

SparseGraph read_edge_list(std::istream& in) {
  std::uint64_t n = 0;
  bool have_n = false;
  std::uint64_t max_id = 0;
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      if (hs >> key && key == "vertices" && hs >> n) {
        have_n = true;
      }
      continue;
    }
    std::istringstream ls(line);
    std::uint64_t u = 0;
    std::uint64_t v = 0;
    if (!(ls >> u >> v)) {
      throw ValidationError("bad edge on line " + std::to_string(line_no));
    }
    if (u > std::numeric_limits<Vertex>::max() || v > std::numeric_limits<Vertex>::max()) {
      throw ValidationError("vertex id out of range on line " + std::to_string(line_no));
    }
    max_id = std::max({max_id, u, v});
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  if (!have_n) {
    n = edges.empty() ? 0 : max_id + 1;
  }
  return SparseGraph::from_edges(n, edges);
}

void save_graph(const SparseGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  const bool text = path.size() >= 4 && (path.ends_with(".txt") || path.ends_with(".edges"));
  if (text) {
    write_edge_list(g, out);
  } else {
    write_binary(g, out);
  }
}

SparseGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::array<char, 8> head{};
  in.read(head.data(), head.size());
  const bool binary = in.gcount() == 8 && head == kMagic;
  in.clear();
  in.seekg(0);
  return binary ? read_binary(in) : read_edge_list(in);
}

}  // namespace sedge
