#pragma once

#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cmpc/types.hpp"

namespace cmpc {

/// Index map for the stacked decision vector z = [U; X; Omega].
///
/// U holds u_i(k) for k = 0..T-1, X holds x_i(k) for k = 1..T (x_i(0) is the
/// measured state and is not a variable), Omega holds one slack per
/// (agent, constraint instance, order l, step k). All three blocks are
/// step-major, then agent-major.
class DecisionLayout {
 public:
  DecisionLayout() = default;

  DecisionLayout(Index n_agents, Index horizon, Index state_dim, Index input_dim,
                 std::vector<Index> instances_per_agent, Index order)
      : n_agents_(n_agents),
        horizon_(horizon),
        n_(state_dim),
        m_(input_dim),
        order_(order),
        instances_(std::move(instances_per_agent)) {
    if (n_agents < 1 || horizon < 1 || state_dim < 1 || input_dim < 1 || order < 1) {
      throw ValidationError("DecisionLayout: all sizes must be positive");
    }
    if (static_cast<Index>(instances_.size()) != n_agents) {
      throw DimensionError("DecisionLayout: one instance count per agent required");
    }
    slack_agent_offset_.resize(instances_.size());
    Index acc = 0;
    for (std::size_t i = 0; i < instances_.size(); ++i) {
      slack_agent_offset_[i] = acc;
      acc += instances_[i] * order_;
    }
    slacks_per_step_ = acc;
  }

  [[nodiscard]] Index n_agents() const noexcept { return n_agents_; }
  [[nodiscard]] Index horizon() const noexcept { return horizon_; }
  [[nodiscard]] Index state_dim() const noexcept { return n_; }
  [[nodiscard]] Index input_dim() const noexcept { return m_; }
  [[nodiscard]] Index order() const noexcept { return order_; }
  [[nodiscard]] Index instances(Index agent) const { return instances_.at(static_cast<std::size_t>(agent)); }

  [[nodiscard]] Index num_inputs() const noexcept { return n_agents_ * horizon_ * m_; }
  [[nodiscard]] Index num_states() const noexcept { return n_agents_ * horizon_ * n_; }
  [[nodiscard]] Index num_slacks() const noexcept { return slacks_per_step_ * horizon_; }
  [[nodiscard]] Index dim() const noexcept { return num_inputs() + num_states() + num_slacks(); }

  [[nodiscard]] Index input_index(Index agent, Index k, Index comp = 0) const {
    check(agent, k, 0, horizon_ - 1, "input");
    return (k * n_agents_ + agent) * m_ + comp;
  }

  /// Valid for k = 1..T.
  [[nodiscard]] Index state_index(Index agent, Index k, Index comp = 0) const {
    check(agent, k, 1, horizon_, "state");
    return num_inputs() + ((k - 1) * n_agents_ + agent) * n_ + comp;
  }

  /// `level` is the barrier order l in 1..r.
  [[nodiscard]] Index slack_index(Index agent, Index instance, Index level, Index k) const {
    check(agent, k, 0, horizon_ - 1, "slack");
    if (instance < 0 || instance >= instances(agent) || level < 1 || level > order_) {
      throw IndexError("slack index out of range");
    }
    return num_inputs() + num_states() + k * slacks_per_step_ +
           slack_agent_offset_[static_cast<std::size_t>(agent)] + instance * order_ + (level - 1);
  }

 private:
  void check(Index agent, Index k, Index k_lo, Index k_hi, const char* what) const {
    if (agent < 0 || agent >= n_agents_ || k < k_lo || k > k_hi) {
      throw IndexError(std::string(what) + " index out of range (agent " + std::to_string(agent) +
                       ", step " + std::to_string(k) + ")");
    }
  }

  Index n_agents_ = 0;
  Index horizon_ = 0;
  Index n_ = 0;
  Index m_ = 0;
  Index order_ = 1;
  std::vector<Index> instances_;
  std::vector<Index> slack_agent_offset_;
  Index slacks_per_step_ = 0;
};

}  // namespace cmpc
