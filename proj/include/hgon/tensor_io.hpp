#pragma once

// Line-oriented text format:
//   n m
//   v1 v2 ... vm [value]
// one hyperedge per line, ids ascending and 0-based. Blank lines and lines
// starting with '#' are ignored on input.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hgon/tensor.hpp"

namespace hgon {

namespace io_detail {

inline bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return true;
  }
  return false;
}

inline void read_header(std::istream& in, std::size_t& n, std::size_t& m) {
  std::string line;
  require(next_content_line(in, line), "missing 'n m' header");
  std::istringstream hs(line);
  require(static_cast<bool>(hs >> n >> m), "malformed 'n m' header: " + line);
}

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace io_detail

inline void write_adjacency(std::ostream& out, const AdjacencyTensor& a) {
  out << a.n() << ' ' << a.m() << '\n';
  for (const auto& e : a.edges()) {
    for (std::size_t i = 0; i < e.order(); ++i) out << (i ? " " : "") << e[i];
    out << '\n';
  }
}

inline AdjacencyTensor read_adjacency(std::istream& in) {
  std::size_t n = 0, m = 0;
  io_detail::read_header(in, n, m);
  std::vector<Hyperedge> edges;
  std::vector<Vertex> ids(m);
  std::string line;
  while (io_detail::next_content_line(in, line)) {
    std::istringstream ls(line);
    for (auto& v : ids) require(static_cast<bool>(ls >> v), "malformed hyperedge line: " + line);
    edges.push_back(make_hyperedge(ids, n));
  }
  return AdjacencyTensor(n, m, edges);
}

/// Writes every increasing hyperedge with its value, in rank order.
inline void write_probability(std::ostream& out, const ProbabilityTensor& p) {
  out << p.n() << ' ' << p.m() << '\n';
  for_each_hyperedge(p.n(), p.m(), [&](const Hyperedge& e, Count r) {
    for (std::size_t i = 0; i < e.order(); ++i) out << e[i] << ' ';
    out << io_detail::format_real(p.at_rank(r)) << '\n';
  });
}

/// Hyperedges not listed read as 0.
inline ProbabilityTensor read_probability(std::istream& in) {
  std::size_t n = 0, m = 0;
  io_detail::read_header(in, n, m);
  std::vector<double> values(binomial(n, m), 0.0);
  std::vector<Vertex> ids(m);
  std::string line;
  while (io_detail::next_content_line(in, line)) {
    std::istringstream ls(line);
    for (auto& v : ids) require(static_cast<bool>(ls >> v), "malformed hyperedge line: " + line);
    double value = 0.0;
    require(static_cast<bool>(ls >> value), "missing value on line: " + line);
    values[make_hyperedge(ids, n).rank()] = value;
  }
  return ProbabilityTensor(n, m, std::move(values));
}

}  // namespace hgon
