#pragma once

#include "ssel/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace ssel {

// Portable standard-normal stream. std::normal_distribution is not specified
// bit-for-bit across standard libraries, so the transform is done here:
// mt19937_64 -> 53-bit uniform -> Box-Muller.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stream roles. Each (seed, role) pair seeds its own engine with
// splitmix64(seed ^ role_tag), so U and V draws never share a stream.
enum class StreamRole : std::uint64_t {
  SpatialModes = 0x5553454c55ULL,   // U
  TemporalModes = 0x5553454c56ULL,  // V
  Auxiliary = 0x5553454c41ULL,
};

std::uint64_t splitmix64(std::uint64_t x);
NormalStream make_stream(std::uint64_t seed, StreamRole role);

struct SyntheticSpec {
  Index n = 0;
  Index m = 0;
  // Empty means the 1/sqrt(k) spectrum [1, 1/sqrt(2), ..., 1/sqrt(m)].
  std::vector<double> spectrum;
  std::uint64_t seed = 0;

  void validate() const;
  Vector singular_values() const;
};

struct SyntheticFactors {
  Matrix U;  // n x m, orthonormal columns
  Vector S;  // m
  Matrix V;  // m x m, orthogonal
};

// Q factor of the QR decomposition of `gaussian`, with column signs chosen so
// the triangular factor has a positive diagonal.
Matrix orthonormal_columns(const Matrix& gaussian);

Matrix gaussian_matrix(Index rows, Index cols, NormalStream& stream);

SyntheticFactors generate_factors(const SyntheticSpec& spec);

// U diag(S) V^T.
SnapshotMatrix generate(const SyntheticSpec& spec);

}  // namespace ssel
