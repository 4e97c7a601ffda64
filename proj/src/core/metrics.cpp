// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/core/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ombal/error.hpp"

namespace ombal {

std::string_view to_string(RecordKind k) {
  switch (k) {
    case RecordKind::train: return "train";
    case RecordKind::val: return "val";
    case RecordKind::weight_update: return "weight_update";
  }
  return "?";
}

namespace {

std::string fmt17(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_json_line(const MetricsRecord& r) {
  std::string out = "{\"step\":";
  out += std::to_string(r.step);
  out += ",\"stage\":";
  out += std::to_string(r.stage);
  out += ",\"task\":";
  out += nlohmann::json(r.task).dump();
  out += ",\"loss\":";
  out += fmt17(r.loss);
  out += ",\"weight\":";
  out += fmt17(r.weight);
  out += ",\"kind\":\"";
  out += to_string(r.kind);
  out += "\"}";
  return out;
}

MetricsRecord parse_json_line(std::string_view line) {
  try {
    auto j = nlohmann::json::parse(line);
    MetricsRecord r;
    r.step = j.at("step").get<std::uint64_t>();
    r.stage = j.at("stage").get<std::int64_t>();
    r.task = j.at("task").get<std::string>();
    auto number = [](const nlohmann::json& v) {
      return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    r.loss = number(j.at("loss"));
    r.weight = number(j.at("weight"));
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "train") r.kind = RecordKind::train;
    else if (kind == "val") r.kind = RecordKind::val;
    else if (kind == "weight_update") r.kind = RecordKind::weight_update;
    else throw ParseError("unknown record kind '" + kind + "'");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad metrics line: ") + e.what());
  }
}

void MetricsSink::emit(const MetricsRecord& r) {
  if (r.step < last_step_) throw std::logic_error("metrics records must be in non-decreasing step order");
  last_step_ = r.step;
  write(r);
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw RuntimeFailure("cannot open metrics file '" + path.string() + "'");
}

void JsonlWriter::write(const MetricsRecord& r) { out_ << to_json_line(r) << '\n'; }

void JsonlWriter::flush() { out_.flush(); }

}  // namespace ombal
