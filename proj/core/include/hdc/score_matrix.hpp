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

#ifndef HDC_SCORE_MATRIX_HPP_
#define HDC_SCORE_MATRIX_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>

#include "hdc/scoring.hpp"

namespace hdc {

struct MatrixKey {
  std::string image_id;
  std::string label;
  int t = 0;
  std::uint64_t noise_id = 0;

  friend auto operator<=>(const MatrixKey&, const MatrixKey&) = default;
};

// Precomputed (image, label, t, noise) -> error table. Files are JSON
// (array of {"image_id","label","t","noise_id","error"}) or CSV with header
// image_id,label,t,noise_id,error. Errors round-trip bit-exactly.
class ScoreMatrix {
 public:
  // Inserting an existing key with a different value throws InvalidArgument.
  void insert(MatrixKey key, double error);
  std::optional<double> find(const MatrixKey& key) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<MatrixKey, double>& entries() const { return entries_; }

 private:
  std::map<MatrixKey, double> entries_;
};

enum class MatrixFormat { kJson, kCsv };

ScoreMatrix load_score_matrix(std::istream& in, MatrixFormat format);
ScoreMatrix load_score_matrix_file(const std::filesystem::path& path);
void save_score_matrix(std::ostream& out, const ScoreMatrix& matrix, MatrixFormat format);
void save_score_matrix_file(const std::filesystem::path& path, const ScoreMatrix& matrix);

// Looks scores up by (image_id, prompt label, t, noise_id).
class ReplayScorer final : public Scorer {
 public:
  explicit ReplayScorer(ScoreMatrix matrix) : matrix_(std::move(matrix)) {}

  double score(const ScoreRequest& request) const override;
  const ScoreMatrix& matrix() const { return matrix_; }

 private:
  ScoreMatrix matrix_;
};

// Forwards to another scorer and records every answer, so a run can be
// replayed later without the original model.
class RecordingScorer final : public Scorer {
 public:
  explicit RecordingScorer(const Scorer& inner) : inner_(inner) {}

  double score(const ScoreRequest& request) const override;
  ScoreMatrix snapshot() const;

 private:
  const Scorer& inner_;
  mutable std::mutex mu_;
  mutable ScoreMatrix recorded_;
};

}  // namespace hdc

#endif  // HDC_SCORE_MATRIX_HPP_
