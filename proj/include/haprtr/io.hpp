#pragma once

/** Text formats.
 *
 * Instance file:
 *
 *   HAP1 <m> <n>
 *   <m lines of exactly n characters over '+', '-', 'x'>
 *   TRUTH <n characters over '+', '-'>        (optional)
 *
 * 'x' marks an unobserved entry. Every line ends with '\n'.
 *
 * Config file: one `key = value` per line, '#' starts a comment, blank lines
 * are ignored. Lists are comma separated. See README.md for the keys.
 */

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "haprtr/errors.hpp"
#include "haprtr/haplotype.hpp"
#include "haprtr/objective.hpp"

namespace haprtr {

/// Contents of an instance file.
struct InstanceFile {
  ReadMatrix reads;
  std::optional<Haplotype> truth;
};

inline void write_instance(std::ostream &os, const ReadMatrix &reads,
                           const std::optional<Haplotype> &truth) {
  os << "HAP1 " << reads.rows() << ' ' << reads.cols() << '\n';
  std::string line(static_cast<std::size_t>(reads.cols()), 'x');
  for (Eigen::Index i = 0; i < reads.rows(); ++i) {
    for (Eigen::Index j = 0; j < reads.cols(); ++j) {
      const auto e = reads.entry(i, j);
      line[static_cast<std::size_t>(j)] = !e ? 'x' : (*e > 0 ? '+' : '-');
    }
    os << line << '\n';
  }
  if (truth) {
    detail::require_same_size(truth->size(), reads.cols(), "write_instance");
    os << "TRUTH " << truth->to_string() << '\n';
  }
}

namespace detail {

inline bool read_line(std::istream &is, std::string &line, std::size_t &lineno) {
  if (!std::getline(is, line))
    return false;
  ++lineno;
  if (is.eof())
    throw ParseError("missing trailing newline", lineno);
  return true;
}

inline long long parse_positive(std::string_view token, const char *what,
                                std::size_t lineno) {
  long long value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || value < 1)
    throw ParseError(std::string("invalid ") + what + " '" +
                         std::string(token) + "'",
                     lineno);
  return value;
}

} // namespace detail

inline InstanceFile read_instance(std::istream &is) {
  std::string line;
  std::size_t lineno = 0;
  if (!detail::read_line(is, line, lineno))
    throw ParseError("empty instance file", 1);

  std::istringstream header(line);
  std::string magic, m_tok, n_tok, extra;
  header >> magic >> m_tok >> n_tok;
  if (magic != "HAP1" || m_tok.empty() || n_tok.empty() || (header >> extra) ||
      line != "HAP1 " + m_tok + " " + n_tok)
    throw ParseError("expected header 'HAP1 <m> <n>'", lineno);
  const auto m = detail::parse_positive(m_tok, "row count", lineno);
  const auto n = detail::parse_positive(n_tok, "column count", lineno);
  if (n < 2)
    throw ParseError("column count must be at least 2", lineno);

  Matrix values = Matrix::Zero(m, n);
  Mask mask = Mask::Constant(m, n, false);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!detail::read_line(is, line, lineno))
      throw ParseError("expected " + std::to_string(m) + " read rows, found " +
                           std::to_string(i),
                       lineno + 1);
    if (static_cast<long long>(line.size()) != n)
      throw ParseError("row has " + std::to_string(line.size()) +
                           " characters, expected " + std::to_string(n),
                       lineno);
    for (Eigen::Index j = 0; j < n; ++j) {
      const char ch = line[static_cast<std::size_t>(j)];
      if (ch == '+' || ch == '-') {
        mask(i, j) = true;
        values(i, j) = ch == '+' ? 1.0 : -1.0;
      } else if (ch != 'x') {
        throw ParseError(std::string("unexpected character '") + ch +
                             "' at column " + std::to_string(j + 1),
                         lineno);
      }
    }
  }

  std::optional<Haplotype> truth;
  if (detail::read_line(is, line, lineno)) {
    if (line.rfind("TRUTH ", 0) != 0)
      throw ParseError("expected 'TRUTH <haplotype>' or end of file", lineno);
    const std::string_view sites = std::string_view(line).substr(6);
    if (static_cast<long long>(sites.size()) != n)
      throw ParseError("truth has " + std::to_string(sites.size()) +
                           " sites, expected " + std::to_string(n),
                       lineno);
    try {
      truth = Haplotype::from_string(sites);
    } catch (const ContractError &e) {
      throw ParseError(e.what(), lineno);
    }
    if (detail::read_line(is, line, lineno))
      throw ParseError("unexpected content after TRUTH line", lineno);
  }
  return InstanceFile{ReadMatrix(values, std::move(mask)), std::move(truth)};
}

/// Writes `contents` to `path` through a sibling temporary file and a rename,
/// so a failed write never leaves a truncated file behind.
inline void write_file_atomically(const std::filesystem::path &path,
                                  const std::string &contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os)
      throw IoError("cannot open for writing", tmp.string());
    os << contents;
    os.flush();
    if (!os) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("write failed", tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot rename into place (" + ec.message() + ")",
                  path.string());
  }
}

inline std::string read_file(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw IoError("cannot open for reading", path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void save_instance(const std::filesystem::path &path,
                          const ReadMatrix &reads,
                          const std::optional<Haplotype> &truth) {
  std::ostringstream os;
  write_instance(os, reads, truth);
  write_file_atomically(path, os.str());
}

inline InstanceFile load_instance(const std::filesystem::path &path) {
  std::istringstream is(read_file(path));
  return read_instance(is);
}

/// Flat key/value document; keeps the line of every key for diagnostics.
class KeyValueFile {
public:
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };

  static KeyValueFile parse(std::istream &is) {
    KeyValueFile out;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(is, raw)) {
      ++lineno;
      std::string_view line = raw;
      if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      line = trim(line);
      if (line.empty())
        continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ParseError("expected 'key = value'", lineno);
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty())
        throw ParseError("empty key", lineno);
      if (out.entries_.count(key))
        throw ParseError("duplicate key '" + key + "'", lineno);
      out.entries_[key] = Entry{value, lineno};
    }
    return out;
  }

  const std::map<std::string, Entry> &entries() const { return entries_; }

  static std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
      return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  }

private:
  std::map<std::string, Entry> entries_;
};

namespace detail {

inline double parse_double(const std::string &key, std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ParameterError(key + ": expected a number, got '" +
                         std::string(text) + "'");
  return value;
}

inline std::uint64_t parse_uint(const std::string &key, std::string_view text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ParameterError(key + ": expected a nonnegative integer, got '" +
                         std::string(text) + "'");
  return value;
}

inline bool parse_bool(const std::string &key, std::string_view text) {
  if (text == "true" || text == "1")
    return true;
  if (text == "false" || text == "0")
    return false;
  throw ParameterError(key + ": expected true or false, got '" +
                       std::string(text) + "'");
}

inline std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = text.find(',');
    out.emplace_back(KeyValueFile::trim(text.substr(0, comma)));
    if (comma == std::string_view::npos)
      break;
    text = text.substr(comma + 1);
  }
  return out;
}

inline std::vector<double> parse_double_list(const std::string &key,
                                             std::string_view text) {
  std::vector<double> out;
  for (const auto &item : split_list(text))
    out.push_back(parse_double(key, item));
  return out;
}

} // namespace detail
} // namespace haprtr
