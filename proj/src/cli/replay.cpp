// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/cli/replay.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "ombal/error.hpp"

namespace ombal::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

LossTrace parse_loss_trace(std::istream& in) {
  LossTrace trace;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<bool> seen;
  std::size_t filled = 0;

  auto close_segment = [&](std::size_t at) {
    if (!trace.segments.empty() && filled != trace.task_ids.size())
      throw ParseError("segment " + std::to_string(trace.segments.back()) + " is missing tasks", at);
  };

  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto cols = split(text);
    if (!header) {
      if (cols.size() != 3 || cols[0] != "segment" || cols[1] != "task_id" || cols[2] != "val_loss")
        throw ParseError("expected header segment,task_id,val_loss", lineno);
      header = true;
      continue;
    }
    if (cols.size() != 3) throw ParseError("expected 3 columns, got " + std::to_string(cols.size()), lineno);

    std::int64_t segment = 0;
    auto [sp, sec] = std::from_chars(cols[0].data(), cols[0].data() + cols[0].size(), segment);
    if (sec != std::errc{} || sp != cols[0].data() + cols[0].size())
      throw ParseError("bad segment '" + std::string(cols[0]) + "'", lineno);
    if (cols[1].empty()) throw ParseError("empty task_id", lineno);
    double loss = 0.0;
    auto [lp, lec] = std::from_chars(cols[2].data(), cols[2].data() + cols[2].size(), loss);
    if (lec != std::errc{} || lp != cols[2].data() + cols[2].size())
      throw ParseError("bad val_loss '" + std::string(cols[2]) + "'", lineno);
    if (!std::isfinite(loss)) throw ParseError("val_loss is not finite", lineno);
    if (loss < 0) throw ParseError("val_loss is negative", lineno);

    if (trace.segments.empty() || segment != trace.segments.back()) {
      if (!trace.segments.empty() && segment < trace.segments.back())
        throw ParseError("segment " + std::to_string(segment) + " out of order", lineno);
      close_segment(lineno);
      trace.segments.push_back(segment);
      trace.losses.emplace_back(trace.task_ids.size(), 0.0);
      seen.assign(trace.task_ids.size(), false);
      filled = 0;
    }

    const std::string id(cols[1]);
    auto it = std::find(trace.task_ids.begin(), trace.task_ids.end(), id);
    std::size_t k = static_cast<std::size_t>(it - trace.task_ids.begin());
    if (it == trace.task_ids.end()) {
      if (trace.segments.size() > 1) throw ParseError("task '" + id + "' not present in the first segment", lineno);
      trace.task_ids.push_back(id);
      trace.losses.back().push_back(0.0);
      seen.push_back(false);
    }
    if (seen[k]) throw ParseError("task '" + id + "' repeated in segment " + std::to_string(segment), lineno);
    seen[k] = true;
    ++filled;
    trace.losses.back()[k] = loss;
  }
  if (!header) throw ParseError("empty trace", lineno);
  close_segment(lineno);
  return trace;
}

std::vector<ReplayRow> replay(const LossTrace& trace, const dynamic_balance::ControllerParams& params,
                              std::vector<std::string>* warnings) {
  std::vector<ReplayRow> rows;
  if (trace.task_ids.empty()) return rows;
  dynamic_balance::BalanceState state(trace.task_ids.size(), params);
  for (std::size_t s = 0; s < trace.segments.size(); ++s) {
    state.record_segment(trace.losses[s]);
    rows.push_back({trace.segments[s], state.step_weights()});
    if (warnings && state.last_update_degenerate()) warnings->push_back(state.last_warning());
  }
  return rows;
}

void write_replay_csv(std::ostream& out, const LossTrace& trace, std::span<const ReplayRow> rows) {
  out << "segment,task_id,weight\n";
  char buf[40];
  for (const auto& r : rows)
    for (std::size_t i = 0; i < trace.task_ids.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", r.weights[i]);
      out << r.segment << ',' << trace.task_ids[i] << ',' << buf << '\n';
    }
}

}  // namespace ombal::cli
