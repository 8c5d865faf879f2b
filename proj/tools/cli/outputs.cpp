#include "cli/outputs.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>

#include "sgdphase/errors.hpp"

namespace sgdcli {

using sgdphase::ErrorKind;
using sgdphase::fail;

namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

std::string sha256_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::config_error, "cannot read " + path);
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::config_error, "SHA-256 failed for " + path);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

OutputSet::OutputSet(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_))
    fail(ErrorKind::config_error, "cannot create output directory " + dir_);
}

std::string OutputSet::path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

void OutputSet::write(const std::string& name, const std::string& contents) {
  files_.push_back(name);
  std::ofstream f(path(name), std::ios::binary);
  if (!f) fail(ErrorKind::config_error, "cannot write " + path(name));
  f << contents;
  if (!f) fail(ErrorKind::config_error, "write failed for " + path(name));
}

void OutputSet::adopt(const std::string& name) { files_.push_back(name); }

void OutputSet::write_manifest(const nlohmann::json& config, double wall_seconds) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& name : files_) {
    files.push_back({{"path", name},
                     {"sha256", sha256_file(path(name))},
                     {"bytes", fs::file_size(path(name))}});
  }
  nlohmann::json m = {{"tool", "sgdphaselab"},
                      {"version", kVersion},
                      {"config", config},
                      {"seed", config.value("seed", 0)},
                      {"wall_time_seconds", wall_seconds},
                      {"files", files}};
  manifest_written_ = true;
  std::ofstream f(path("manifest.json"), std::ios::binary);
  if (!f) fail(ErrorKind::config_error, "cannot write manifest");
  f << m.dump(2) << '\n';
}

void OutputSet::rollback() {
  std::error_code ec;
  for (const auto& name : files_) fs::remove(path(name), ec);
  if (manifest_written_) fs::remove(path("manifest.json"), ec);
  files_.clear();
}

}  // namespace sgdcli
