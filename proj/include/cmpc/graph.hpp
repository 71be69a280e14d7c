#pragma once

// Directed communication topology. An edge (j, i) means agent i receives
// information from agent j, stored as adjacency(i, j) = a_ij > 0.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cmpc/types.hpp"

namespace cmpc {

class Topology {
 public:
  Topology() = default;

  explicit Topology(Mat adjacency) : adjacency_(std::move(adjacency)) {
    if (adjacency_.rows() != adjacency_.cols() || adjacency_.rows() == 0) {
      throw ValidationError("adjacency matrix must be square and non-empty");
    }
    for (Index i = 0; i < adjacency_.rows(); ++i) {
      for (Index j = 0; j < adjacency_.cols(); ++j) {
        const double a = adjacency_(i, j);
        if (!std::isfinite(a) || a < 0.0) {
          throw ValidationError("adjacency weights must be finite and non-negative");
        }
        if (i == j && a != 0.0) {
          throw ValidationError("self-loop on agent " + std::to_string(i));
        }
      }
    }
  }

  /// Builds the unit-weight topology whose Laplacian is `laplacian`.
  static Topology from_laplacian(const Mat& laplacian) {
    Mat adjacency = -laplacian;
    adjacency.diagonal().setZero();
    return Topology(std::move(adjacency));
  }

  [[nodiscard]] Index size() const noexcept { return adjacency_.rows(); }
  [[nodiscard]] const Mat& adjacency() const noexcept { return adjacency_; }
  [[nodiscard]] double weight(Index i, Index j) const { return adjacency_(i, j); }

  /// L = D - A with D the in-degree matrix.
  [[nodiscard]] Mat laplacian() const {
    Mat lap = -adjacency_;
    for (Index i = 0; i < size(); ++i) {
      // Summing the same terms the off-diagonals hold keeps row sums exactly 0.
      double degree = 0.0;
      for (Index j = 0; j < size(); ++j) degree += adjacency_(i, j);
      lap(i, i) = degree;
    }
    return lap;
  }

  [[nodiscard]] std::vector<Index> in_neighbors(Index i) const {
    if (i < 0 || i >= size()) {
      throw IndexError("agent index " + std::to_string(i) + " out of range [0, " +
                       std::to_string(size()) + ")");
    }
    std::vector<Index> out;
    for (Index j = 0; j < size(); ++j) {
      if (adjacency_(i, j) > 0.0) out.push_back(j);
    }
    return out;
  }

  /// Edges as (j, i) pairs, ordered by receiving agent i then sender j.
  [[nodiscard]] std::vector<std::pair<Index, Index>> edges() const {
    std::vector<std::pair<Index, Index>> out;
    for (Index i = 0; i < size(); ++i) {
      for (Index j : in_neighbors(i)) out.emplace_back(j, i);
    }
    return out;
  }

  /// True iff some root reaches every node along j -> i edges.
  [[nodiscard]] bool has_spanning_tree() const {
    for (Index root = 0; root < size(); ++root) {
      if (reachable_from(root) == static_cast<std::size_t>(size())) return true;
    }
    return false;
  }

 private:
  std::size_t reachable_from(Index root) const {
    std::vector<bool> seen(static_cast<std::size_t>(size()), false);
    std::vector<Index> stack{root};
    seen[static_cast<std::size_t>(root)] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const Index j = stack.back();
      stack.pop_back();
      for (Index i = 0; i < size(); ++i) {
        if (adjacency_(i, j) > 0.0 && !seen[static_cast<std::size_t>(i)]) {
          seen[static_cast<std::size_t>(i)] = true;
          ++count;
          stack.push_back(i);
        }
      }
    }
    return count;
  }

  Mat adjacency_;
};

}  // namespace cmpc
