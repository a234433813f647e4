#include "ssel/oracle.hpp"

#include "ssel/errors.hpp"
#include "ssel/estimation.hpp"

#include <exception>
#include <limits>
#include <string>
#include <vector>

namespace ssel {

namespace {

struct Best {
  double objective = std::numeric_limits<double>::infinity();
  std::vector<Index> subset;
  std::uint64_t evaluated = 0;
  std::exception_ptr failure;

  // Enumeration inside a chunk is lexicographic, so strict improvement keeps
  // the first of equal subsets.
  void offer(double obj, const std::vector<Index>& s) {
    if (obj < objective) {
      objective = obj;
      subset = s;
    }
  }
};

// Advances `s` (ascending, values < n) to the next combination that shares
// s[0]. Returns false once the prefix would change.
bool next_with_fixed_head(std::vector<Index>& s, Index n) {
  const Index p = static_cast<Index>(s.size());
  for (Index j = p - 1; j >= 1; --j) {
    if (s[static_cast<std::size_t>(j)] < n - p + j) {
      ++s[static_cast<std::size_t>(j)];
      for (Index t = j + 1; t < p; ++t) s[static_cast<std::size_t>(t)] = s[static_cast<std::size_t>(t - 1)] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

__extension__ using Wide = unsigned __int128;

std::uint64_t binomial(Index n, Index p) {
  if (p < 0 || p > n) return 0;
  p = std::min(p, n - p);
  Wide acc = 1;
  for (Index i = 1; i <= p; ++i) {
    acc = acc * static_cast<Wide>(n - p + i) / static_cast<Wide>(i);
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

OracleResult exhaustive_best(const ReducedOrderModel& rom, const NoiseModel& noise, Index p) {
  const Index n = rom.n();
  if (p < rom.r1 || p > n) {
    throw Error(ErrorCode::InfeasibleBudget, "oracle budget p=" + std::to_string(p) +
                                                 " must satisfy r1 <= p <= n");
  }
  const std::uint64_t total = binomial(n, p);
  if (total > kOracleSubsetLimit) {
    throw Error(ErrorCode::TooLarge, "C(" + std::to_string(n) + ", " + std::to_string(p) + ") = " +
                                         std::to_string(total) + " subsets exceeds the limit of " +
                                         std::to_string(kOracleSubsetLimit));
  }

  // One chunk per leading index; chunks are reduced in leading-index order.
  const Index heads = n - p + 1;
  std::vector<Best> chunk(static_cast<std::size_t>(heads));

#pragma omp parallel for schedule(dynamic, 1)
  for (Index head = 0; head < heads; ++head) {
    Best& best = chunk[static_cast<std::size_t>(head)];
    std::vector<Index> s(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) s[static_cast<std::size_t>(j)] = head + j;
    do {
      ++best.evaluated;
      try {
        best.offer(aopt_objective(rom, noise, SensorSet(s, n)), s);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularFIM) {
          best.failure = std::current_exception();
          break;
        }
      }
    } while (next_with_fixed_head(s, n));
  }
  for (const Best& b : chunk) {
    if (b.failure) std::rethrow_exception(b.failure);
  }

  Best overall;
  for (const Best& b : chunk) {
    overall.evaluated += b.evaluated;
    if (!b.subset.empty()) overall.offer(b.objective, b.subset);
  }
  if (overall.subset.empty()) {
    throw Error(ErrorCode::SingularFIM, "every subset has a singular Fisher information");
  }
  return OracleResult{SensorSet(overall.subset, n), overall.objective, overall.evaluated};
}

}  // namespace ssel
