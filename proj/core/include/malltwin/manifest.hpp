#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace malltwin {

inline constexpr const char* kToolVersion = "0.3.0";

struct OutputFile {
  std::string path;  // relative to the output directory
  std::string sha256;
};

// Provenance written next to every command's outputs as manifest.json.
struct RunManifest {
  std::string command;
  std::string tool_version = kToolVersion;
  std::string config_path;
  std::string config_sha256;
  std::string dataset_dir;
  std::vector<std::string> day_ids;
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> options;
  std::map<std::string, double> numbers;
  std::vector<OutputFile> outputs;
  std::string created_at;  // UTC; the only field that differs between identical runs
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(std::string_view text);
RunManifest load_manifest(const std::filesystem::path& dir);

// Paths of outputs whose current hash differs from the manifest (or that are missing).
std::vector<std::string> verify_manifest(const std::filesystem::path& dir);

// Collects a command's outputs in a sibling staging directory and moves them
// into place (replacing an older directory) only on commit(); an uncommitted stage is deleted.
class StagedOutput {
public:
  explicit StagedOutput(std::filesystem::path final_dir);
  ~StagedOutput();
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;

  void write(const std::string& relative_path, std::string_view contents);
  // Hashes the staged files into `manifest.outputs`, writes manifest.json, publishes.
  void commit(RunManifest manifest);

  const std::filesystem::path& staging_dir() const { return staging_; }
  const std::filesystem::path& final_dir() const { return final_; }

private:
  std::filesystem::path final_;
  std::filesystem::path staging_;
  std::vector<std::string> files_;
  bool committed_ = false;
};

}  // namespace malltwin
