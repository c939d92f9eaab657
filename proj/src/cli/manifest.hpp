#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace curvlab::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Record of one invocation: enough to rerun it and to check that the rerun
/// produced the same bytes.
class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> argv);

  nlohmann::json& parameters() { return doc_["parameters"]; }
  void set_seed(unsigned long long seed) { doc_["seed"] = seed; }
  void add_input(const std::filesystem::path& path);
  /// `name` is recorded as given; the digest is taken from `path`.
  void add_output(const std::string& name, const std::filesystem::path& path);
  void set_result(nlohmann::json result) { doc_["result"] = std::move(result); }
  void set_exit_code(int code) { doc_["exit_code"] = code; }

  const nlohmann::json& document() const { return doc_; }
  void write(const std::filesystem::path& path) const;

 private:
  nlohmann::json doc_;
};

}  // namespace curvlab::cli
