// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/cli/run_dir.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "ombal/core/hash.hpp"
#include "ombal/core/rng.hpp"
#include "ombal/kernels/kernels.hpp"

namespace ombal::cli {

namespace fs = std::filesystem;

namespace {

std::string utc_format(const char* fmt) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, fmt, &tm);
  return buf;
}

}  // namespace

std::string utc_timestamp_compact() { return utc_format("%Y%m%dT%H%M%SZ"); }
std::string utc_timestamp_iso() { return utc_format("%Y-%m-%dT%H:%M:%SZ"); }

void write_file_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

RunDirectory::RunDirectory(const fs::path& root, const std::string& subcommand, const std::string& snapshot,
                           std::uint64_t seed)
    : subcommand_(subcommand), config_hash_(sha256_hex(snapshot)), seed_(seed), started_(utc_timestamp_iso()) {
  fs::create_directories(root);
  const std::string base = utc_timestamp_compact() + "-" + config_hash_.substr(0, 8);
  path_ = root / base;
  for (int n = 1; !fs::create_directory(path_); ++n) path_ = root / (base + "-" + std::to_string(n));
  write_file_atomic(path_ / "config.snapshot", snapshot);
  outputs_["config"] = "config.snapshot";
  write_manifest(false);
}

void RunDirectory::add_output(const std::string& key, const std::string& name) { outputs_[key] = name; }

void RunDirectory::set_status(const std::string& status, const std::string& error) {
  status_ = status;
  error_ = error;
}

void RunDirectory::write_manifest(bool finished) {
  if (finished) ended_ = utc_timestamp_iso();
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand_;
  j["config_hash"] = config_hash_;
  j["seed"] = seed_;
  j["rng"] = std::string(Rng::kAlgorithm);
  j["kernels"] = std::string(kernels::to_string(kernels::active().isa));
  j["started"] = started_;
  j["ended"] = ended_ ? nlohmann::ordered_json(*ended_) : nlohmann::ordered_json(nullptr);
  j["status"] = status_;
  if (!error_.empty()) j["error"] = error_;
  j["outputs"] = outputs_;
  write_file_atomic(path_ / "manifest.json", j.dump(2) + "\n");
}

}  // namespace ombal::cli
