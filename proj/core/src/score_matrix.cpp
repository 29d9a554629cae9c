/*
 * Copyright 2026 The hdc Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hdc/score_matrix.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdc/error.hpp"

namespace hdc {

namespace {

constexpr std::string_view kCsvHeader = "image_id,label,t,noise_id,error";

std::vector<std::string> split_csv_line(std::string_view line, int line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError("matrix CSV line " + std::to_string(line_no) + ": unterminated quote");
  return fields;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

template <typename T>
T parse_number(std::string_view text, int line_no, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("matrix CSV line " + std::to_string(line_no) + ": bad " + what + " '" +
                     std::string(text) + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

MatrixFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? MatrixFormat::kCsv : MatrixFormat::kJson;
}

}  // namespace

void ScoreMatrix::insert(MatrixKey key, double error) {
  const auto [it, inserted] = entries_.emplace(std::move(key), error);
  if (!inserted && it->second != error) {
    throw InvalidArgument("conflicting matrix entries for image '" + it->first.image_id +
                          "' label '" + it->first.label + "'");
  }
}

std::optional<double> ScoreMatrix::find(const MatrixKey& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

ScoreMatrix load_score_matrix(std::istream& in, MatrixFormat format) {
  ScoreMatrix matrix;
  if (format == MatrixFormat::kJson) {
    try {
      const nlohmann::json doc = nlohmann::json::parse(in);
      for (const auto& row : doc) {
        matrix.insert({row.at("image_id").get<std::string>(), row.at("label").get<std::string>(),
                       row.at("t").get<int>(), row.at("noise_id").get<std::uint64_t>()},
                      row.at("error").get<double>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("matrix JSON: ") + e.what());
    }
    return matrix;
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kCsvHeader) {
        throw ParseError("matrix CSV: expected header '" + std::string(kCsvHeader) + "'");
      }
      continue;
    }
    const auto f = split_csv_line(line, line_no);
    if (f.size() != 5) {
      throw ParseError("matrix CSV line " + std::to_string(line_no) + ": expected 5 fields");
    }
    matrix.insert({f[0], f[1], parse_number<int>(f[2], line_no, "t"),
                   parse_number<std::uint64_t>(f[3], line_no, "noise_id")},
                  parse_number<double>(f[4], line_no, "error"));
  }
  return matrix;
}

ScoreMatrix load_score_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open score matrix " + path.string());
  return load_score_matrix(in, format_for(path));
}

void save_score_matrix(std::ostream& out, const ScoreMatrix& matrix, MatrixFormat format) {
  if (format == MatrixFormat::kCsv) {
    out << kCsvHeader << '\n';
    for (const auto& [key, error] : matrix.entries()) {
      out << csv_field(key.image_id) << ',' << csv_field(key.label) << ',' << key.t << ','
          << key.noise_id << ',' << format_double(error) << '\n';
    }
    return;
  }
  out << "[\n";
  std::size_t i = 0;
  for (const auto& [key, error] : matrix.entries()) {
    const nlohmann::ordered_json row = {{"image_id", key.image_id},
                                        {"label", key.label},
                                        {"t", key.t},
                                        {"noise_id", key.noise_id},
                                        {"error", error}};
    out << "  " << row.dump() << (++i < matrix.size() ? ",\n" : "\n");
  }
  out << "]\n";
}

void save_score_matrix_file(const std::filesystem::path& path, const ScoreMatrix& matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write score matrix " + path.string());
  save_score_matrix(out, matrix, format_for(path));
}

double ReplayScorer::score(const ScoreRequest& request) const {
  const auto found = matrix_.find({request.image.image_id, request.prompt.label,
                                   request.sample.t, request.sample.noise_id});
  if (!found) throw LookupError("no replay entry for this (image, label, t, noise)");
  return *found;
}

double RecordingScorer::score(const ScoreRequest& request) const {
  const double value = inner_.score(request);
  std::lock_guard lock(mu_);
  recorded_.insert({request.image.image_id, request.prompt.label, request.sample.t,
                    request.sample.noise_id},
                   value);
  return value;
}

ScoreMatrix RecordingScorer::snapshot() const {
  std::lock_guard lock(mu_);
  return recorded_;
}

}  // namespace hdc
