// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "uqoc/common.hpp"
#include "uqoc/sparse.hpp"

namespace uqoc {

/// 17 significant digits, "%.17g" style.
std::string format_double(double x);

/// Small column-oriented CSV table.
class CsvTable {
 public:
  using Cell = std::variant<long long, double, std::string>;

  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string> &header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }

  CsvTable &add_row(std::vector<Cell> row);
  std::string str() const;
  void write(const std::filesystem::path &path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

/// One value per line.
void write_vector_csv(const std::filesystem::path &path, const Vec &v);
Vec read_vector_csv(const std::filesystem::path &path);

/// (row, col, value) triples of the stored entries.
void write_matrix_csv(const std::filesystem::path &path, const SparseMat &a);

}  // namespace uqoc
