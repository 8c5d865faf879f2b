#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace sgdcli {

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

// Shortest round-trip decimal form; NaN and infinities as nan, inf, -inf.
std::string format_number(double x);

/**
 * Files emitted by one command. Every file is recorded so that the manifest
 * can list it and a failed run can remove what it already wrote.
 */
class OutputSet {
 public:
  explicit OutputSet(std::string dir);

  std::string path(const std::string& name) const;
  void write(const std::string& name, const std::string& contents);
  // Records a file that was written by other code under `name`.
  void adopt(const std::string& name);
  void write_manifest(const nlohmann::json& config, double wall_seconds);
  void rollback();

  const std::vector<std::string>& files() const { return files_; }

 private:
  std::string dir_;
  std::vector<std::string> files_;
  bool manifest_written_ = false;
};

}  // namespace sgdcli
