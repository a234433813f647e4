#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace ssel {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense n x m matrix of field snapshots, one column per time sample.
// Validated on construction: n >= 1, m >= 2, all entries finite.
class SnapshotMatrix {
 public:
  SnapshotMatrix() = default;
  explicit SnapshotMatrix(Matrix values);

  const Matrix& values() const { return values_; }
  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }

  // Column subset, e.g. the training part of a cross-validation fold.
  SnapshotMatrix columns(const std::vector<Index>& cols) const;

 private:
  Matrix values_;
};

// Ordered list of p distinct candidate indices in [0, n). Row j of the
// implied selection matrix H has its single unit entry at indices()[j].
class SensorSet {
 public:
  SensorSet() = default;

  // Throws IndexOutOfRange / DuplicateSensor. An empty list is rejected too.
  SensorSet(std::vector<Index> indices, Index n);

  const std::vector<Index>& indices() const { return indices_; }
  Index size() const { return static_cast<Index>(indices_.size()); }
  Index operator[](Index j) const { return indices_[static_cast<std::size_t>(j)]; }
  Index candidate_count() const { return n_; }

  // Dense p x n selection matrix. Only meant for tests and small instances.
  Matrix selection_matrix() const;

  SensorSet sorted() const;

  friend bool operator==(const SensorSet& a, const SensorSet& b) {
    return a.n_ == b.n_ && a.indices_ == b.indices_;
  }

 private:
  std::vector<Index> indices_;
  Index n_ = 0;
};

// Rows `rows` of `m`, in the given order.
Matrix gather_rows(const Matrix& m, const std::vector<Index>& rows);

}  // namespace ssel
