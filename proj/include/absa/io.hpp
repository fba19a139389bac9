#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "absa/error.hpp"

namespace absa {

inline std::string slurp_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for reading: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on file: " + path.string());
  return buf.str();
}

inline void spill_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path.string());
  out << content;
  if (!out) throw IoError("write failure on file: " + path.string());
}

}  // namespace absa
