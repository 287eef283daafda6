#ifndef RADBIF_IO_HPP
#define RADBIF_IO_HPP

/**
 * @file io.hpp
 * @brief Run configuration (key = value files), locale-independent number
 *        formatting, CSV tables and atomic file output.
 */

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <unistd.h>

namespace radbif::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed 17-significant-digit scientific notation ("1.2345678901234567e+00").
inline std::string format_fixed17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, r.ptr);
}

/// Shortest representation that round-trips exactly.
inline std::string format_shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError("invalid number for " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

inline int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError("invalid integer for " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

struct RunConfig {
  double p = 6.0;
  int N = 3;
  double tol = 1e-10;
  double gamma_min = 1e-4;
  double gamma_max = 1e6;
  int n = 1;  ///< branch index, or number of critical points for the singular profile
  std::string out = ".";

  bool operator==(const RunConfig&) const = default;

  /// Assign one key; throws ConfigError on unknown keys or malformed values.
  void set(std::string_view key, std::string_view value) {
    if (key == "p") p = parse_double(value, key);
    else if (key == "N") N = parse_int(value, key);
    else if (key == "tol") tol = parse_double(value, key);
    else if (key == "gamma_min") gamma_min = parse_double(value, key);
    else if (key == "gamma_max") gamma_max = parse_double(value, key);
    else if (key == "n") n = parse_int(value, key);
    else if (key == "out") out = std::string(value);
    else throw ConfigError("unknown key '" + std::string(key) + "'");
  }

  std::string to_text() const {
    std::string s;
    s += "p = " + format_shortest(p) + "\n";
    s += "N = " + std::to_string(N) + "\n";
    s += "tol = " + format_shortest(tol) + "\n";
    s += "gamma_min = " + format_shortest(gamma_min) + "\n";
    s += "gamma_max = " + format_shortest(gamma_max) + "\n";
    s += "n = " + std::to_string(n) + "\n";
    s += "out = " + out + "\n";
    return s;
  }
};

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

/// Apply "key = value" lines to cfg. Blank lines and lines starting with '#' are skipped.
inline void parse_config(std::string_view text, RunConfig& cfg) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  parse_config(text, cfg);
  return cfg;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Write `content` to a temporary file next to `path`, then rename it into place.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
    s += '\n';
    for (const auto& r : rows) {
      if (r.size() != header.size()) throw std::logic_error("CSV row width does not match header");
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) s += ',';
        s += format_fixed17(r[i]);
      }
      s += '\n';
    }
    return s;
  }
};

}  // namespace radbif::io

#endif  // RADBIF_IO_HPP
