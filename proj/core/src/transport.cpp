#include "transport.hpp"

#include <algorithm>
#include <limits>

#include "hydrolimit/errors.hpp"

namespace hydrolimit::detail {

double min_cost_transport(const std::vector<double>& a, const std::vector<double>& b,
                          const std::vector<double>& c) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (c.size() != n * m) throw DomainError("cost matrix has the wrong shape");
  if (n == 0 || m == 0) return 0.0;

  const double inf = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (double x : a) scale += x;
  const double eps = 1e-14 * std::max(scale, 1e-300);

  std::vector<double> rem_a = a;
  std::vector<double> rem_b = b;
  std::vector<double> flow(n * m, 0.0);
  // Reduced cost of A_i -> B_j is c_ij + pa_i - pb_j >= 0.  Sources with
  // supply left keep pa = 0 (their distance is always 0) and every sink with
  // demand left shares one potential, so the multi-source, multi-sink search
  // is a plain shortest path from a super source to a super sink.
  std::vector<double> pa(n, 0.0);
  std::vector<double> pb(m, 0.0);

  std::vector<double> da(n);
  std::vector<double> db(m);
  std::vector<char> done_a(n);
  std::vector<char> done_b(m);
  std::vector<std::size_t> prev_b(m);  // A node feeding B_j
  std::vector<std::size_t> prev_a(n);  // B node feeding A_i through a reverse edge
  std::vector<char> is_root(n);

  const std::size_t max_rounds = 50 * (n + m) + 1000;
  for (std::size_t round = 0;; ++round) {
    if (round > max_rounds) throw NumericalError("transport solver failed to converge");
    bool any_supply = false;
    for (std::size_t i = 0; i < n; ++i) {
      is_root[i] = rem_a[i] > eps;
      any_supply = any_supply || is_root[i];
      da[i] = is_root[i] ? 0.0 : inf;
      done_a[i] = 0;
    }
    bool any_demand = false;
    for (std::size_t j = 0; j < m; ++j) {
      any_demand = any_demand || rem_b[j] > eps;
      db[j] = inf;
      done_b[j] = 0;
    }
    if (!any_supply || !any_demand) break;

    std::size_t target = m;
    double d_target = inf;
    while (true) {
      // dense Dijkstra: pick the closest unsettled node on either side
      double best = inf;
      std::size_t pick = 0;
      bool pick_a = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (!done_a[i] && da[i] < best) {
          best = da[i];
          pick = i;
          pick_a = true;
        }
      }
      for (std::size_t j = 0; j < m; ++j) {
        if (!done_b[j] && db[j] < best) {
          best = db[j];
          pick = j;
          pick_a = false;
        }
      }
      if (best == inf) break;
      if (pick_a) {
        done_a[pick] = 1;
        const double* row = &c[pick * m];
        for (std::size_t j = 0; j < m; ++j) {
          if (done_b[j]) continue;
          double nd = best + std::max(0.0, row[j] + pa[pick] - pb[j]);
          if (nd < db[j]) {
            db[j] = nd;
            prev_b[j] = pick;
          }
        }
      } else {
        done_b[pick] = 1;
        if (rem_b[pick] > eps) {
          target = pick;
          d_target = best;
          break;
        }
        for (std::size_t i = 0; i < n; ++i) {
          if (done_a[i] || !(flow[i * m + pick] > 0.0)) continue;
          double nd = best + std::max(0.0, -c[i * m + pick] + pb[pick] - pa[i]);
          if (nd < da[i]) {
            da[i] = nd;
            prev_a[i] = pick;
          }
        }
      }
    }
    if (target == m) throw NumericalError("transport problem has no augmenting path");

    // bottleneck along the path
    double push = rem_b[target];
    std::size_t j = target;
    std::size_t i = prev_b[j];
    while (true) {
      if (is_root[i]) {
        push = std::min(push, rem_a[i]);
        break;
      }
      j = prev_a[i];
      push = std::min(push, flow[i * m + j]);
      i = prev_b[j];
    }
    // apply
    j = target;
    i = prev_b[j];
    rem_b[target] -= push;
    while (true) {
      flow[i * m + j] += push;
      if (is_root[i]) {
        rem_a[i] -= push;
        break;
      }
      j = prev_a[i];
      flow[i * m + j] = std::max(0.0, flow[i * m + j] - push);
      i = prev_b[j];
    }

    for (std::size_t r = 0; r < n; ++r) pa[r] += std::min(da[r], d_target);
    for (std::size_t s = 0; s < m; ++s) pb[s] += std::min(db[s], d_target);
  }

  double cost = 0.0;
  for (std::size_t k = 0; k < n * m; ++k) {
    if (flow[k] > 0.0) cost += flow[k] * c[k];
  }
  return cost;
}

}  // namespace hydrolimit::detail
