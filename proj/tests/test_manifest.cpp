#include <fstream>

#include "doctest.h"
#include "malltwin/errors.hpp"
#include "malltwin/hashing.hpp"
#include "malltwin/io.hpp"
#include "malltwin/manifest.hpp"
#include "test_support.hpp"

using namespace malltwin;
using malltwin::testing::TempDir;

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("manifest JSON round-trip") {
  RunManifest m;
  m.command = "train";
  m.config_path = "configs/x.json";
  m.config_sha256 = sha256_hex("x");
  m.dataset_dir = "data/train";
  m.day_ids = {"a", "b"};
  m.seeds = {{"seed", 3}};
  m.options = {{"topology", "centralized"}};
  m.numbers = {{"w_c", 0.0}, {"w_e", 1.0 / 220.0}};
  m.outputs = {{"model.json", sha256_hex("m")}};
  m.created_at = "2026-01-01T00:00:00Z";
  const auto back = manifest_from_json(manifest_to_json(m));
  CHECK(back.command == m.command);
  CHECK(back.day_ids == m.day_ids);
  CHECK(back.seeds == m.seeds);
  CHECK(back.options == m.options);
  CHECK(back.numbers == m.numbers);
  CHECK(back.outputs.size() == 1);
  CHECK(back.outputs[0].sha256 == m.outputs[0].sha256);
  CHECK(back.tool_version == kToolVersion);
  CHECK(manifest_to_json(back) == manifest_to_json(m));
  CHECK_THROWS_AS(manifest_from_json("[]"), ParseError);
}

TEST_CASE("staged output publishes only on commit") {
  TempDir dir("stage");
  const auto out = dir.path / "run";
  {
    StagedOutput stage(out);
    stage.write("a.csv", "1,2\n");
    stage.write("sub/b.txt", "hi");
    CHECK(std::filesystem::exists(stage.staging_dir() / "a.csv"));
    CHECK_FALSE(std::filesystem::exists(out));
  }
  CHECK_FALSE(std::filesystem::exists(out));
  for (const auto& e : std::filesystem::directory_iterator(dir.path)) FAIL("leftover " << e.path());

  {
    StagedOutput stage(out);
    stage.write("a.csv", "1,2\n");
    stage.write("sub/b.txt", "hi");
    RunManifest m;
    m.command = "test";
    stage.commit(m);
  }
  CHECK(read_text_file(out / "a.csv") == "1,2\n");
  const auto m = load_manifest(out);
  CHECK(m.outputs.size() == 2);
  CHECK(verify_manifest(out).empty());
  write_text_file_atomic(out / "a.csv", "tampered");
  CHECK(verify_manifest(out) == std::vector<std::string>{"a.csv"});

  // Re-running into an existing directory replaces it.
  {
    StagedOutput stage(out);
    stage.write("c.csv", "x");
    stage.commit(RunManifest{});
  }
  CHECK_FALSE(std::filesystem::exists(out / "a.csv"));
  CHECK(verify_manifest(out).empty());
}
