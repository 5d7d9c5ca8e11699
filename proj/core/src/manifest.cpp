#include "malltwin/manifest.hpp"

#include <ctime>
#include <unistd.h>

#include <json.hpp>

#include "malltwin/errors.hpp"
#include "malltwin/hashing.hpp"
#include "malltwin/io.hpp"

namespace malltwin {

using nlohmann::json;

std::string manifest_to_json(const RunManifest& m) {
  json outputs = json::array();
  for (const auto& o : m.outputs) outputs.push_back({{"path", o.path}, {"sha256", o.sha256}});
  const json root = {
      {"command", m.command},
      {"tool_version", m.tool_version},
      {"config", {{"path", m.config_path}, {"sha256", m.config_sha256}}},
      {"dataset", {{"dir", m.dataset_dir}, {"day_ids", m.day_ids}}},
      {"seeds", m.seeds},
      {"options", m.options},
      {"numbers", m.numbers},
      {"outputs", outputs},
      {"created_at", m.created_at},
  };
  return root.dump(2) + "\n";
}

RunManifest manifest_from_json(std::string_view text) {
  try {
    const json root = json::parse(text);
    RunManifest m;
    m.command = root.at("command").get<std::string>();
    m.tool_version = root.at("tool_version").get<std::string>();
    m.config_path = root.at("config").at("path").get<std::string>();
    m.config_sha256 = root.at("config").at("sha256").get<std::string>();
    m.dataset_dir = root.at("dataset").at("dir").get<std::string>();
    m.day_ids = root.at("dataset").at("day_ids").get<std::vector<std::string>>();
    m.seeds = root.at("seeds").get<std::map<std::string, std::uint64_t>>();
    m.options = root.at("options").get<std::map<std::string, std::string>>();
    m.numbers = root.at("numbers").get<std::map<std::string, double>>();
    for (const auto& o : root.at("outputs")) {
      m.outputs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>()});
    }
    m.created_at = root.value("created_at", "");
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what());
  }
}

RunManifest load_manifest(const std::filesystem::path& dir) {
  return manifest_from_json(read_text_file(dir / "manifest.json"));
}

std::vector<std::string> verify_manifest(const std::filesystem::path& dir) {
  std::vector<std::string> bad;
  for (const auto& o : load_manifest(dir).outputs) {
    const auto path = dir / o.path;
    if (!std::filesystem::exists(path) || sha256_hex(read_text_file(path)) != o.sha256) bad.push_back(o.path);
  }
  return bad;
}

StagedOutput::StagedOutput(std::filesystem::path final_dir) : final_(std::move(final_dir)) {
  if (final_.filename().empty()) final_ = final_.parent_path();
  staging_ = final_;
  staging_ += ".staging-" + std::to_string(::getpid());
  std::filesystem::remove_all(staging_);
  std::filesystem::create_directories(staging_);
}

StagedOutput::~StagedOutput() {
  if (!committed_) {
    std::error_code ec;
    std::filesystem::remove_all(staging_, ec);
  }
}

void StagedOutput::write(const std::string& relative_path, std::string_view contents) {
  write_text_file_atomic(staging_ / relative_path, contents);
  files_.push_back(relative_path);
}

void StagedOutput::commit(RunManifest manifest) {
  manifest.outputs.clear();
  for (const auto& f : files_) manifest.outputs.push_back({f, sha256_hex(read_text_file(staging_ / f))});
  if (manifest.created_at.empty()) {
    char buf[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    manifest.created_at = buf;
  }
  write_text_file_atomic(staging_ / "manifest.json", manifest_to_json(manifest));

  if (final_.has_parent_path()) std::filesystem::create_directories(final_.parent_path());
  if (std::filesystem::exists(final_)) {
    auto previous = final_;
    previous += ".previous-" + std::to_string(::getpid());
    std::filesystem::remove_all(previous);
    std::filesystem::rename(final_, previous);
    std::filesystem::rename(staging_, final_);
    std::filesystem::remove_all(previous);
  } else {
    std::filesystem::rename(staging_, final_);
  }
  committed_ = true;
}

}  // namespace malltwin
