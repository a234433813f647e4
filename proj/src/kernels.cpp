#include "ssel/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ssel::kernels {

namespace {

Index block_count(Index rows) { return (rows + kBlockRows - 1) / kBlockRows; }

Index block_begin(Index b) { return b * kBlockRows; }

Index block_len(Index b, Index rows) { return std::min(kBlockRows, rows - block_begin(b)); }

}  // namespace

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Matrix cross_gram(const Matrix& a, const Matrix& b) {
  const Index rows = a.rows();
  const Index nb = block_count(rows);
  // A single block is its own sum.
  if (nb <= 1) return a.transpose() * b;
  std::vector<Matrix> partial(static_cast<std::size_t>(nb));

#pragma omp parallel for schedule(static) if (nb > 1)
  for (Index blk = 0; blk < nb; ++blk) {
    const Index r0 = block_begin(blk);
    const Index len = block_len(blk, rows);
    partial[static_cast<std::size_t>(blk)].noalias() =
        a.middleRows(r0, len).transpose() * b.middleRows(r0, len);
  }

  Matrix out = Matrix::Zero(a.cols(), b.cols());
  for (const auto& p : partial) out += p;
  return out;
}

void multiply(Matrix& out, const Matrix& left, const Matrix& small) {
  out.resize(left.rows(), small.cols());
  const Index rows = left.rows();
  const Index nb = block_count(rows);

#pragma omp parallel for schedule(static) if (nb > 1)
  for (Index blk = 0; blk < nb; ++blk) {
    const Index r0 = block_begin(blk);
    const Index len = block_len(blk, rows);
    out.middleRows(r0, len).noalias() = left.middleRows(r0, len) * small;
  }
}

void sub_product(Matrix& out, const Matrix& left, const Matrix& small) {
  const Index rows = out.rows();
  const Index nb = block_count(rows);

#pragma omp parallel for schedule(static) if (nb > 1)
  for (Index blk = 0; blk < nb; ++blk) {
    const Index r0 = block_begin(blk);
    const Index len = block_len(blk, rows);
    out.middleRows(r0, len).noalias() -= left.middleRows(r0, len) * small;
  }
}

void scale_rows(Matrix& out, const Vector& d, const Matrix& m) {
  out.resize(m.rows(), m.cols());
  const Index rows = m.rows();

#pragma omp parallel for schedule(static) if (rows > kBlockRows)
  for (Index i = 0; i < rows; ++i) out.row(i) = d[i] * m.row(i);
}

Vector row_norms(const Matrix& m) {
  Vector out(m.rows());
  const Index rows = m.rows();

#pragma omp parallel for schedule(static) if (rows > kBlockRows)
  for (Index i = 0; i < rows; ++i) out[i] = m.row(i).norm();
  return out;
}

double weighted_row_energy(const Vector& w, const Matrix& m) {
  const Index rows = m.rows();
  const Index nb = block_count(rows);
  std::vector<double> partial(static_cast<std::size_t>(nb), 0.0);

#pragma omp parallel for schedule(static) if (nb > 1)
  for (Index blk = 0; blk < nb; ++blk) {
    const Index r0 = block_begin(blk);
    const Index len = block_len(blk, rows);
    double acc = 0.0;
    for (Index i = r0; i < r0 + len; ++i) acc += w[i] * m.row(i).squaredNorm();
    partial[static_cast<std::size_t>(blk)] = acc;
  }

  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

namespace serial {

Matrix cross_gram(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.cols(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) out.noalias() += a.row(i).transpose() * b.row(i);
  return out;
}

void multiply(Matrix& out, const Matrix& left, const Matrix& small) {
  out.resize(left.rows(), small.cols());
  for (Index i = 0; i < left.rows(); ++i) out.row(i).noalias() = left.row(i) * small;
}

void sub_product(Matrix& out, const Matrix& left, const Matrix& small) {
  for (Index i = 0; i < out.rows(); ++i) out.row(i).noalias() -= left.row(i) * small;
}

void scale_rows(Matrix& out, const Vector& d, const Matrix& m) {
  out = d.asDiagonal() * m;
}

Vector row_norms(const Matrix& m) { return m.rowwise().norm(); }

double weighted_row_energy(const Vector& w, const Matrix& m) {
  double total = 0.0;
  for (Index i = 0; i < m.rows(); ++i) total += w[i] * m.row(i).squaredNorm();
  return total;
}

}  // namespace serial

}  // namespace ssel::kernels
