// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/SparseCore>
#include <string>

#include "aopt/common.hpp"

namespace aopt {

/// Deterministic sparse matrix in coordinate form. Assembly appends entries
/// in a fixed order, duplicates are merged and exact zeros dropped when the
/// matrix is finalized, so identical inputs give bit-identical entry lists.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(int rows, int cols) : rows_(rows), cols_(cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void add(int row, int col, double value);
  /// Merge duplicates, sort by (row, col), drop exact zeros.
  void finalize();
  bool finalized() const { return finalized_; }

  struct Entry {
    int row, col;
    double value;
  };
  const std::vector<Entry>& entries() const { return entries_; }

  Vec apply(const Vec& x) const;
  Vec apply_transpose(const Vec& x) const;
  SparseOperator transposed() const;

  /// Scale all entries (returns a new finalized operator).
  SparseOperator scaled(double factor) const;

  Eigen::SparseMatrix<double> to_eigen() const;

  /// Coordinate-list CSV (row, col, value); debugging aid, not a stable format.
  void dump_csv(const std::string& path) const;

 private:
  int rows_ = 0, cols_ = 0;
  bool finalized_ = false;
  std::vector<Entry> entries_;
};

}  // namespace aopt
