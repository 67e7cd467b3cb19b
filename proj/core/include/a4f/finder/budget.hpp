#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <stdexcept>

namespace a4f {

/// Limits for one command execution: translation, every enumeration step
/// and the SAT search share a single deadline and step counter.
struct ResourceBudget {
  static constexpr std::uint64_t kDefaultSteps = 10'000'000;
  static constexpr std::chrono::milliseconds kDefaultTimeout{10'000};

  std::uint64_t max_steps = kDefaultSteps;
  std::chrono::milliseconds timeout = kDefaultTimeout;
  /// Upper bound on circuit nodes built during translation.
  std::size_t max_circuit_nodes = 4'000'000;
  /// Optional external cancellation; polled at propagation granularity.
  const std::atomic<bool>* cancel = nullptr;
};

class ResourceLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Running meter for a ResourceBudget. Not thread-safe; one per solve.
class BudgetMeter {
 public:
  explicit BudgetMeter(const ResourceBudget& budget)
      : budget_(budget), deadline_(std::chrono::steady_clock::now() + budget.timeout) {}

  /// Charges `n` steps; throws ResourceLimitExceeded when exhausted.
  void charge(std::uint64_t n = 1) {
    steps_ += n;
    if (steps_ > budget_.max_steps) throw ResourceLimitExceeded("step budget exhausted");
    if ((steps_ & 0x3ff) < n || n > 0x3ff) poll();
  }

  /// Checks the deadline and cancellation flag without charging steps.
  void poll() const {
    if (budget_.cancel && budget_.cancel->load(std::memory_order_relaxed)) {
      throw ResourceLimitExceeded("cancelled");
    }
    if (std::chrono::steady_clock::now() >= deadline_) throw ResourceLimitExceeded("timeout");
  }

  [[nodiscard]] std::uint64_t steps() const { return steps_; }
  [[nodiscard]] const ResourceBudget& budget() const { return budget_; }

 private:
  ResourceBudget budget_;
  std::chrono::steady_clock::time_point deadline_;
  std::uint64_t steps_ = 0;
};

}  // namespace a4f
