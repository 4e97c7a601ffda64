// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <fstream>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ombal {

enum class RecordKind { train, val, weight_update };

std::string_view to_string(RecordKind k);

struct MetricsRecord {
  std::uint64_t step = 0;
  std::int64_t stage = 0;
  std::string task;
  double loss = 0.0;
  double weight = 0.0;
  RecordKind kind = RecordKind::train;

  bool operator==(const MetricsRecord&) const = default;
};

// {"step":..,"stage":..,"task":..,"loss":..,"weight":..,"kind":..} with
// floats printed to 17 significant digits. No trailing newline.
std::string to_json_line(const MetricsRecord& r);
MetricsRecord parse_json_line(std::string_view line);

class MetricsSink {
 public:
  virtual ~MetricsSink() = default;
  // Throws std::logic_error when `r.step` is below the previous record's.
  void emit(const MetricsRecord& r);
  virtual void flush() {}

 protected:
  virtual void write(const MetricsRecord& r) = 0;

 private:
  std::uint64_t last_step_ = 0;
};

class NullSink final : public MetricsSink {
 protected:
  void write(const MetricsRecord&) override {}
};

class MemorySink final : public MetricsSink {
 public:
  const std::vector<MetricsRecord>& records() const { return records_; }

 protected:
  void write(const MetricsRecord& r) override { records_.push_back(r); }

 private:
  std::vector<MetricsRecord> records_;
};

class JsonlWriter final : public MetricsSink {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  void flush() override;

 protected:
  void write(const MetricsRecord& r) override;

 private:
  std::ofstream out_;
};

}  // namespace ombal
