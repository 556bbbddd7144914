// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/sparse.hpp"

#include <algorithm>
#include <fstream>

namespace aopt {

void SparseOperator::add(int row, int col, double value) {
  finalized_ = false;
  entries_.push_back({row, col, value});
}

void SparseOperator::finalize() {
  std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Entry> merged;
  merged.reserve(entries_.size());
  for (const Entry& e : entries_) {
    if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col)
      merged.back().value += e.value;
    else
      merged.push_back(e);
  }
  entries_.clear();
  for (const Entry& e : merged)
    if (e.value != 0.0) entries_.push_back(e);
  finalized_ = true;
}

Vec SparseOperator::apply(const Vec& x) const {
  check_shape(static_cast<int>(x.size()) == cols_, "SparseOperator::apply");
  Vec y(rows_, 0.0);
  for (const Entry& e : entries_) y[e.row] += e.value * x[e.col];
  return y;
}

Vec SparseOperator::apply_transpose(const Vec& x) const {
  check_shape(static_cast<int>(x.size()) == rows_, "SparseOperator::apply_transpose");
  Vec y(cols_, 0.0);
  for (const Entry& e : entries_) y[e.col] += e.value * x[e.row];
  return y;
}

SparseOperator SparseOperator::transposed() const {
  SparseOperator t(cols_, rows_);
  for (const Entry& e : entries_) t.add(e.col, e.row, e.value);
  t.finalize();
  return t;
}

SparseOperator SparseOperator::scaled(double factor) const {
  SparseOperator s(rows_, cols_);
  for (const Entry& e : entries_) s.add(e.row, e.col, factor * e.value);
  s.finalize();
  return s;
}

Eigen::SparseMatrix<double> SparseOperator::to_eigen() const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(entries_.size());
  for (const Entry& e : entries_) trip.emplace_back(e.row, e.col, e.value);
  Eigen::SparseMatrix<double> m(rows_, cols_);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

void SparseOperator::dump_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
  out << "row,col,value\n";
  for (const Entry& e : entries_) out << e.row << "," << e.col << "," << to17(e.value) << "\n";
}

}  // namespace aopt
