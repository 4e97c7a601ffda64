// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Run directories: <root>/<UTC yyyymmddThhmmssZ>-<config hash[:8]>[-N]
// holding manifest.json, config.snapshot and the subcommand outputs.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace ombal::cli {

std::string utc_timestamp_compact();  // 20261014T093000Z
std::string utc_timestamp_iso();      // 2026-10-14T09:30:00Z

// Writes `text` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

class RunDirectory {
 public:
  // Creates the directory and writes config.snapshot plus an initial
  // manifest.json (no end timestamp).
  RunDirectory(const std::filesystem::path& root, const std::string& subcommand, const std::string& snapshot,
               std::uint64_t seed);

  const std::filesystem::path& path() const { return path_; }
  const std::string& config_hash() const { return config_hash_; }

  // Records an output file (relative name) in the manifest.
  void add_output(const std::string& key, const std::string& name);
  void set_status(const std::string& status, const std::string& error = {});
  // Rewrites manifest.json; `finished` stamps the end time.
  void write_manifest(bool finished);

 private:
  std::filesystem::path path_;
  std::string subcommand_;
  std::string config_hash_;
  std::uint64_t seed_;
  std::string started_;
  std::optional<std::string> ended_;
  std::string status_ = "running";
  std::string error_;
  std::map<std::string, std::string> outputs_;
};

}  // namespace ombal::cli
