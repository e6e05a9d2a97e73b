#ifndef ADMMTRACK_CSV_HPP_
#define ADMMTRACK_CSV_HPP_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "admmtrack/errors.hpp"

namespace admmtrack {
namespace csv {

// Shortest representation that round-trips a double.
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string num(long v) { return std::to_string(v); }
inline std::string num(int v) { return std::to_string(v); }

// Writes a whole file atomically: temp file in the same directory, then
// rename, so readers never observe a partial file.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) throw ConfigError("rename failed for '" + path.string() + "': " + ec.message());
}

}  // namespace csv
}  // namespace admmtrack

#endif  // ADMMTRACK_CSV_HPP_
