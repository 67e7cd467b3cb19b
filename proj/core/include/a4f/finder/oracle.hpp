#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "a4f/finder/instance.hpp"
#include "a4f/lang/resolver.hpp"

namespace a4f {

inline constexpr int kOracleMaxVars = 24;

class OracleTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  bool sat = false;
  std::uint64_t count = 0;
  std::vector<Instance> instances;
};

/// Exhaustive reference search.
///
/// Walks every assignment of the bounds variables in increasing
/// lexicographic order (the order `enumerate` produces), prunes only
/// assignments that break a hierarchy or typing implication, and keeps the
/// instances that `validate_instance` accepts and that satisfy the facts
/// and command under the Evaluator. Throws OracleTooLarge above
/// kOracleMaxVars variables.
OracleResult brute_force_oracle(const ResolvedModel& model, const ResolvedCommand& command,
                                std::size_t keep_instances = SIZE_MAX);

}  // namespace a4f
