// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#include "shield/votes_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace shield::io {

namespace {

using core::ValidationError;

std::string strip(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::int64_t parse_int_field(const std::string& field, int line) {
  const std::string t = strip(field);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ValidationError("line " + std::to_string(line) +
                          ": expected an integer, got '" + field + "'");
  }
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return in;
}

}  // namespace

core::VoteMatrix read_votes_csv(std::istream& in,
                                std::optional<int> num_classes) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty votes file");
  if (strip(line) != "sample_id,teacher_id,class") {
    throw ValidationError(
        "votes file must start with header sample_id,teacher_id,class");
  }

  // sample_id -> teacher_id -> class; both maps keep ascending ids.
  std::map<std::int64_t, std::map<std::int64_t, int>> table;
  int max_class = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": expected 3 fields");
    }
    const std::int64_t sample = parse_int_field(fields[0], line_no);
    const std::int64_t teacher = parse_int_field(fields[1], line_no);
    const std::int64_t cls = parse_int_field(fields[2], line_no);
    if (sample < 0 || teacher < 0) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": ids must be nonnegative");
    }
    if (cls < 1 || cls > 1'000'000) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": class must be a positive integer");
    }
    auto [it, inserted] = table[sample].emplace(teacher, static_cast<int>(cls));
    if (!inserted) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate vote for sample " +
                            std::to_string(sample) + ", teacher " +
                            std::to_string(teacher));
    }
    max_class = std::max(max_class, static_cast<int>(cls));
  }
  if (table.empty()) throw ValidationError("votes file has no rows");

  int k = std::max(max_class, 2);
  if (num_classes.has_value()) {
    if (max_class > *num_classes) {
      throw ValidationError("vote class exceeds the declared class count");
    }
    k = *num_classes;
  }

  const auto& first_teachers = table.begin()->second;
  std::vector<std::vector<int>> votes;
  votes.reserve(table.size());
  for (const auto& [sample, row] : table) {
    if (row.size() != first_teachers.size()) {
      throw ValidationError("sample " + std::to_string(sample) +
                            " has a different teacher count");
    }
    std::vector<int> classes;
    classes.reserve(row.size());
    auto expect = first_teachers.begin();
    for (const auto& [teacher, cls] : row) {
      if (teacher != expect->first) {
        throw ValidationError("sample " + std::to_string(sample) +
                              " has a different teacher set");
      }
      ++expect;
      classes.push_back(cls);
    }
    votes.push_back(std::move(classes));
  }
  return core::VoteMatrix(k, std::move(votes));
}

core::VoteMatrix read_votes_csv_file(const std::string& path,
                                     std::optional<int> num_classes) {
  auto in = open_or_throw(path);
  return read_votes_csv(in, num_classes);
}

core::VoteHistogram read_histogram_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("histogram JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("K") || !doc.contains("counts")) {
    throw ValidationError(
        "histogram JSON needs an object with \"K\" and \"counts\"");
  }
  if (!doc["K"].is_number_integer() || !doc["counts"].is_array()) {
    throw ValidationError("histogram JSON: bad \"K\" or \"counts\" type");
  }
  const auto k = doc["K"].get<std::int64_t>();
  if (k < 2 || k > 1'000'000) {
    throw ValidationError("histogram JSON: K out of range");
  }
  if (doc["counts"].size() != static_cast<std::size_t>(k)) {
    throw ValidationError("histogram JSON: counts length must equal K");
  }
  std::vector<std::int64_t> counts;
  counts.reserve(doc["counts"].size());
  for (const auto& c : doc["counts"]) {
    if (!c.is_number_integer() || c.get<std::int64_t>() < 0) {
      throw ValidationError("histogram JSON: counts must be nonnegative");
    }
    counts.push_back(c.get<std::int64_t>());
  }
  std::int64_t offset = 0;
  if (doc.contains("offset")) {
    if (!doc["offset"].is_number_integer() ||
        doc["offset"].get<std::int64_t>() < 0) {
      throw ValidationError("histogram JSON: offset must be nonnegative");
    }
    offset = doc["offset"].get<std::int64_t>();
  }
  return core::VoteHistogram(std::move(counts), offset);
}

core::VoteHistogram read_histogram_json_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_histogram_json(in);
}

bool looks_like_histogram_json(const std::string& path) {
  auto in = open_or_throw(path);
  char c = 0;
  while (in.get(c)) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    return c == '{';
  }
  return false;
}

}  // namespace shield::io
