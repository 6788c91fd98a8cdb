#pragma once

#include <iosfwd>
#include <string>

#include "sedge/graph.hpp"

namespace sedge {

// Binary container layout (little endian):
//   8 bytes  magic "SEDGRAPH"
//   uint32   format version (1)
//   uint64   N
//   uint64   edge count
//   per vertex u: LEB128 count of neighbors v > u, then LEB128 gaps
//   (first gap is v0 - u, later gaps v_i - v_{i-1}).
inline constexpr std::uint32_t kGraphFormatVersion = 1;

void write_binary(const SparseGraph& g, std::ostream& out);
SparseGraph read_binary(std::istream& in);

// Text edge list: optional "# vertices N" header, then one "u v" per line
// with u < v. Lines starting with '#' are comments. Without the header, N is
// one more than the largest endpoint.
void write_edge_list(const SparseGraph& g, std::ostream& out);
SparseGraph read_edge_list(std::istream& in);

void save_graph(const SparseGraph& g, const std::string& path);
// Dispatches on the magic bytes, so either format can be loaded.
SparseGraph load_graph(const std::string& path);

}  // namespace sedge
