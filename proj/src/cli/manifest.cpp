#include "manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>
#include <memory>

#include "curvlab/errors.hpp"

#ifndef CURVLAB_VERSION
#define CURVLAB_VERSION "unknown"
#endif

namespace curvlab::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw CurvlabError("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read '" + path.string() + "'");
  return sha256_hex(std::string(std::istreambuf_iterator<char>(in), {}));
}

Manifest::Manifest(std::string command, std::vector<std::string> argv) {
  doc_["tool"] = "curvature-lab";
  doc_["version"] = CURVLAB_VERSION;
  doc_["command"] = std::move(command);
  doc_["argv"] = std::move(argv);
  doc_["parameters"] = nlohmann::json::object();
  doc_["inputs"] = nlohmann::json::array();
  doc_["outputs"] = nlohmann::json::array();
}

void Manifest::add_input(const std::filesystem::path& path) {
  doc_["inputs"].push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
}

void Manifest::add_output(const std::string& name, const std::filesystem::path& path) {
  doc_["outputs"].push_back({{"path", name}, {"sha256", sha256_file(path)}});
}

void Manifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << doc_.dump(2) << '\n';
}

}  // namespace curvlab::cli
