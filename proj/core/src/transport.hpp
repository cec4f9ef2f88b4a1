#pragma once

#include <vector>

namespace hydrolimit::detail {

// Balanced transportation problem: supplies a (n), demands b (m), dense cost
// matrix c (row-major n x m, nonnegative).  Returns the optimal total cost.
// Successive shortest paths with Dijkstra on reduced costs; O((n+m)^2) per
// augmentation and at most a few (n+m) augmentations in practice.
double min_cost_transport(const std::vector<double>& a, const std::vector<double>& b,
                          const std::vector<double>& c);

}  // namespace hydrolimit::detail
