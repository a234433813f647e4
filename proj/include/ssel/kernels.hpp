#pragma once

// Row-blocked dense kernels used on the hot paths of the ADMM and greedy
// selectors. Every kernel has an OpenMP version (ssel::kernels) and a plain
// serial reference (ssel::kernels::serial) that the tests compare against.
//
// Rows are partitioned into fixed blocks of kBlockRows regardless of the
// number of threads, and reductions over rows combine per-block partials in
// block order. Results are therefore bit-identical for any thread count.

#include "ssel/types.hpp"

namespace ssel::kernels {

inline constexpr Index kBlockRows = 512;

// Number of OpenMP threads in use (1 when built without OpenMP).
int thread_count();

// a^T b for tall a (n x ka) and b (n x kb), reduced over the n rows.
Matrix cross_gram(const Matrix& a, const Matrix& b);

// out = left * small, row-parallel. left is n x k, small is k x c.
void multiply(Matrix& out, const Matrix& left, const Matrix& small);

// out -= left * small, row-parallel. left is n x k, small is k x c, out is n x c.
void sub_product(Matrix& out, const Matrix& left, const Matrix& small);

// out = diag(d) * m.
void scale_rows(Matrix& out, const Vector& d, const Matrix& m);

// Euclidean norm of each row.
Vector row_norms(const Matrix& m);

// sum_i w_i * ||m_i||^2.
double weighted_row_energy(const Vector& w, const Matrix& m);

namespace serial {

Matrix cross_gram(const Matrix& a, const Matrix& b);
void multiply(Matrix& out, const Matrix& left, const Matrix& small);
void sub_product(Matrix& out, const Matrix& left, const Matrix& small);
void scale_rows(Matrix& out, const Vector& d, const Matrix& m);
Vector row_norms(const Matrix& m);
double weighted_row_energy(const Vector& w, const Matrix& m);

}  // namespace serial

}  // namespace ssel::kernels
