// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/csv.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace uqoc {

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable &CsvTable::add_row(std::vector<Cell> row) {
  if (row.size() != header_.size()) {
    throw InvalidArgument(fmt::format("CSV row has {} cells, header has {}",
                                      row.size(), header_.size()));
  }
  rows_.push_back(std::move(row));
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t c = 0; c < header_.size(); ++c) {
    if (c) out += ',';
    out += header_[c];
  }
  out += '\n';
  for (const auto &row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      std::visit(
          [&out](const auto &v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out += format_double(v);
            } else if constexpr (std::is_same_v<T, long long>) {
              out += std::to_string(v);
            } else {
              out += v;
            }
          },
          row[c]);
    }
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::filesystem::path &path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << str();
}

void write_vector_csv(const std::filesystem::path &path, const Vec &v) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  for (Eigen::Index i = 0; i < v.size(); ++i) f << format_double(v[i]) << '\n';
}

Vec read_vector_csv(const std::filesystem::path &path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path.string());
  std::vector<double> vals;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    vals.push_back(std::stod(line));
  }
  return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

void write_matrix_csv(const std::filesystem::path &path, const SparseMat &a) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  for (Eigen::Index r = 0; r < a.data().outerSize(); ++r) {
    for (SparseMat::Storage::InnerIterator it(a.data(), r); it; ++it) {
      f << r << ',' << it.col() << ',' << format_double(it.value()) << '\n';
    }
  }
}

}  // namespace uqoc
