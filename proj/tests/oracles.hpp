#pragma once

// Reference computations shared by the unit tests and the acceptance run.

#include <utility>
#include <vector>

namespace cmpc::testing {

// h_{level}(x(0)) along a sampled trajectory, evaluated straight from the
// recursion h_l(t) = h_{l-1}(t+1) - h_{l-1}(t) + g_l h_{l-1}(t).
inline double recursion_along(const std::vector<double>& h0_traj, const std::vector<double>& gammas, int level) {
  std::vector<double> h = h0_traj;
  for (int l = 1; l <= level; ++l) {
    std::vector<double> next(h.size() - 1);
    for (std::size_t t = 0; t + 1 < h.size(); ++t) next[t] = h[t + 1] - h[t] + gammas[static_cast<std::size_t>(l - 1)] * h[t];
    h = std::move(next);
  }
  return h[0];
}

}  // namespace cmpc::testing
