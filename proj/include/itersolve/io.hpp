#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "itersolve/errors.hpp"
#include "itersolve/matrix.hpp"
#include "itersolve/solve.hpp"
#include "itersolve/traffic.hpp"

namespace itersolve::io {

using AnyMatrix = std::variant<DenseMatrix, SparseMatrix>;

// 17 significant digits round-trip every double exactly.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

struct Line {
  std::size_t number;  // 1-based
  std::vector<std::string_view> fields;
};

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (sep == ' ') {
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
      if (j > i) out.push_back(s.substr(i, j - i));
      i = j;
    }
    return out;
  }
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// Non-blank, non-comment lines, split on whitespace (or on `sep`).
inline std::vector<Line> content_lines(std::string_view text, char sep = ' ') {
  std::vector<Line> lines;
  std::size_t number = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    std::size_t first = raw.find_first_not_of(" \t");
    if (first != std::string_view::npos && raw[first] != '#') lines.push_back({number, split(raw, sep)});
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

inline double to_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(line, "invalid number '" + std::string(s) + "'");
  }
  return v;
}

inline std::size_t to_count(std::string_view s, std::size_t line) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError(line, "invalid count '" + std::string(s) + "'");
  }
  return v;
}

inline std::size_t eof_line(std::string_view text) {
  std::size_t n = 1;
  for (char c : text) n += c == '\n';
  return text.ends_with('\n') ? n : n + 1;
}

}  // namespace detail

/// "dense R C" followed by R rows of C values, or "sparse R C NNZ" followed by NNZ
/// "row col value" lines (0-based, sorted by row then column). '#' starts a comment line.
inline AnyMatrix parse_matrix(std::string_view text) {
  const auto lines = detail::content_lines(text);
  if (lines.empty()) throw ParseError(1, "missing matrix header");
  const auto& head = lines.front();
  const auto kind = head.fields.front();
  if (kind == "dense") {
    if (head.fields.size() != 3) throw ParseError(head.number, "expected 'dense R C'");
    const std::size_t r = detail::to_count(head.fields[1], head.number);
    const std::size_t c = detail::to_count(head.fields[2], head.number);
    if (lines.size() - 1 < r) {
      throw ParseError(detail::eof_line(text), "expected " + std::to_string(r) + " rows, found " +
                                                   std::to_string(lines.size() - 1));
    }
    if (lines.size() - 1 > r) throw ParseError(lines[r + 1].number, "unexpected data after matrix body");
    std::vector<double> e;
    e.reserve(r * c);
    for (std::size_t i = 1; i <= r; ++i) {
      const auto& ln = lines[i];
      if (ln.fields.size() != c) {
        throw ParseError(ln.number, "expected " + std::to_string(c) + " values, found " +
                                        std::to_string(ln.fields.size()));
      }
      for (auto f : ln.fields) e.push_back(detail::to_double(f, ln.number));
    }
    return DenseMatrix(r, c, std::move(e));
  }
  if (kind == "sparse") {
    if (head.fields.size() != 4) throw ParseError(head.number, "expected 'sparse R C NNZ'");
    const std::size_t r = detail::to_count(head.fields[1], head.number);
    const std::size_t c = detail::to_count(head.fields[2], head.number);
    const std::size_t nnz = detail::to_count(head.fields[3], head.number);
    if (lines.size() - 1 < nnz) {
      throw ParseError(detail::eof_line(text), "expected " + std::to_string(nnz) + " entries, found " +
                                                   std::to_string(lines.size() - 1));
    }
    if (lines.size() - 1 > nnz) throw ParseError(lines[nnz + 1].number, "unexpected data after matrix body");
    std::vector<std::size_t> offsets(r + 1, 0), cols;
    std::vector<double> vals;
    std::size_t prev_r = 0, prev_c = 0;
    for (std::size_t k = 1; k <= nnz; ++k) {
      const auto& ln = lines[k];
      if (ln.fields.size() != 3) {
        throw ParseError(ln.number, "expected 'row col value', found " + std::to_string(ln.fields.size()) + " fields");
      }
      const std::size_t i = detail::to_count(ln.fields[0], ln.number);
      const std::size_t j = detail::to_count(ln.fields[1], ln.number);
      if (i >= r || j >= c) throw ParseError(ln.number, "entry outside " + itersolve::detail::dims(r, c));
      if (k > 1 && (i < prev_r || (i == prev_r && j <= prev_c))) {
        throw ParseError(ln.number, "entries must be sorted by (row, col) without duplicates");
      }
      prev_r = i;
      prev_c = j;
      ++offsets[i + 1];
      cols.push_back(j);
      vals.push_back(detail::to_double(ln.fields[2], ln.number));
    }
    for (std::size_t i = 0; i < r; ++i) offsets[i + 1] += offsets[i];
    return SparseMatrix(r, c, std::move(offsets), std::move(cols), std::move(vals));
  }
  throw ParseError(head.number, "unknown matrix kind '" + std::string(kind) + "'");
}

inline std::string write_matrix(const DenseMatrix& m) {
  std::string out = "dense " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ' ';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

inline std::string write_matrix(const SparseMatrix& m) {
  std::string out = "sparse " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + " " +
                    std::to_string(m.nnz()) + "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    m.for_each_in_row(r, [&](std::size_t c, double v) {
      out += std::to_string(r) + " " + std::to_string(c) + " " + format_double(v) + "\n";
    });
  }
  return out;
}

inline std::string write_matrix(const AnyMatrix& m) {
  return std::visit([](const auto& x) { return write_matrix(x); }, m);
}

/// One value per line.
inline Vector parse_vector(std::string_view text) {
  Vector v;
  for (const auto& ln : detail::content_lines(text)) {
    if (ln.fields.size() != 1) {
      throw ParseError(ln.number, "expected 1 value, found " + std::to_string(ln.fields.size()));
    }
    v.push_back(detail::to_double(ln.fields[0], ln.number));
  }
  return v;
}

inline std::string write_vector(std::span<const double> v) {
  std::string out;
  for (double e : v) out += format_double(e) + "\n";
  return out;
}

/// `node <id> <external_net_inflow>` and `branch <from> <to>` records.
inline traffic::FlowNetwork parse_network(std::string_view text) {
  std::vector<traffic::Node> nodes;
  std::vector<traffic::Branch> branches;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& ln : detail::content_lines(text)) {
    const auto rec = ln.fields.front();
    if (rec == "node") {
      if (ln.fields.size() != 3) throw ParseError(ln.number, "expected 'node <id> <external_net_inflow>'");
      std::string id(ln.fields[1]);
      if (index.contains(id)) throw ParseError(ln.number, "duplicate node id '" + id + "'");
      index.emplace(id, nodes.size());
      nodes.push_back({id, detail::to_double(ln.fields[2], ln.number)});
    } else if (rec == "branch") {
      if (ln.fields.size() != 3) throw ParseError(ln.number, "expected 'branch <from> <to>'");
      std::size_t ends[2];
      for (int k = 0; k < 2; ++k) {
        auto it = index.find(std::string(ln.fields[1 + k]));
        if (it == index.end()) {
          throw ParseError(ln.number, "branch references unknown node '" + std::string(ln.fields[1 + k]) + "'");
        }
        ends[k] = it->second;
      }
      branches.push_back({ends[0], ends[1]});
    } else {
      throw ParseError(ln.number, "unknown record '" + std::string(rec) + "'");
    }
  }
  return {std::move(nodes), std::move(branches)};
}

inline std::string write_network(const traffic::FlowNetwork& net) {
  std::string out;
  for (const auto& n : net.nodes()) out += "node " + n.id + " " + format_double(n.external_net_inflow) + "\n";
  for (const auto& b : net.branches()) out += "branch " + net.nodes()[b.from].id + " " + net.nodes()[b.to].id + "\n";
  return out;
}

/// CSV with header `exit,inflow,outflow`, one row per exit in ring order.
inline traffic::RingSpec parse_aadt(std::string_view text) {
  const auto lines = detail::content_lines(text, ',');
  if (lines.empty()) throw ParseError(1, "missing header 'exit,inflow,outflow'");
  const auto& head = lines.front();
  if (head.fields.size() != 3 || head.fields[0] != "exit" || head.fields[1] != "inflow" || head.fields[2] != "outflow") {
    throw ParseError(head.number, "expected header 'exit,inflow,outflow'");
  }
  traffic::RingSpec spec;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& ln = lines[i];
    if (ln.fields.size() != 3) throw ParseError(ln.number, "expected 3 columns, found " + std::to_string(ln.fields.size()));
    const double in = detail::to_double(ln.fields[1], ln.number);
    const double out = detail::to_double(ln.fields[2], ln.number);
    if (in < 0.0 || out < 0.0) throw ParseError(ln.number, "AADT values must be non-negative");
    spec.exits.push_back({std::string(ln.fields[0]), in, out});
  }
  if (spec.size() < 3) {
    throw ParseError(detail::eof_line(text), "need at least 3 exits, found " + std::to_string(spec.size()));
  }
  return spec;
}

/// `segment,from_exit,to_exit,flow`, one row per branch.
inline std::string write_segments_csv(const traffic::FlowNetwork& net, std::span<const double> flows) {
  if (flows.size() != net.branches().size()) throw InvalidArgument("one flow per branch is required");
  std::string out = "segment,from_exit,to_exit,flow\n";
  for (std::size_t k = 0; k < flows.size(); ++k) {
    const auto& b = net.branches()[k];
    out += std::to_string(k) + "," + net.nodes()[b.from].id + "," + net.nodes()[b.to].id + "," +
           format_double(flows[k]) + "\n";
  }
  return out;
}

inline std::string write_history_csv(std::span<const ResidualSample> history) {
  std::string out = "iteration,residual_norm\n";
  for (const auto& s : history) out += std::to_string(s.iteration) + "," + format_double(s.norm) + "\n";
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << content;
}

}  // namespace itersolve::io
