#include "ssel/types.hpp"

#include "ssel/errors.hpp"

#include <algorithm>
#include <string>

namespace ssel {

SnapshotMatrix::SnapshotMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 2) {
    throw Error(ErrorCode::DimensionError,
                "snapshot matrix needs n >= 1 rows and m >= 2 columns, got " +
                    std::to_string(values_.rows()) + "x" + std::to_string(values_.cols()));
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::DimensionError, "snapshot matrix contains non-finite entries");
  }
}

SnapshotMatrix SnapshotMatrix::columns(const std::vector<Index>& cols) const {
  Matrix out(values_.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] < 0 || cols[j] >= values_.cols()) {
      throw Error(ErrorCode::IndexOutOfRange, "column " + std::to_string(cols[j]));
    }
    out.col(static_cast<Index>(j)) = values_.col(cols[j]);
  }
  return SnapshotMatrix(std::move(out));
}

SensorSet::SensorSet(std::vector<Index> indices, Index n) : indices_(std::move(indices)), n_(n) {
  if (indices_.empty()) {
    throw Error(ErrorCode::IndexOutOfRange, "sensor set is empty");
  }
  std::vector<bool> seen(static_cast<std::size_t>(std::max<Index>(n, 0)), false);
  for (Index i : indices_) {
    if (i < 0 || i >= n) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "sensor index " + std::to_string(i) + " outside [0, " + std::to_string(n) + ")");
    }
    if (seen[static_cast<std::size_t>(i)]) {
      throw Error(ErrorCode::DuplicateSensor, "sensor index " + std::to_string(i) + " repeated");
    }
    seen[static_cast<std::size_t>(i)] = true;
  }
}

Matrix SensorSet::selection_matrix() const {
  Matrix h = Matrix::Zero(size(), n_);
  for (Index j = 0; j < size(); ++j) h(j, (*this)[j]) = 1.0;
  return h;
}

SensorSet SensorSet::sorted() const {
  auto idx = indices_;
  std::sort(idx.begin(), idx.end());
  return SensorSet(std::move(idx), n_);
}

Matrix gather_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t j = 0; j < rows.size(); ++j) out.row(static_cast<Index>(j)) = m.row(rows[j]);
  return out;
}

}  // namespace ssel
