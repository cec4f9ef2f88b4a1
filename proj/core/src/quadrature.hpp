#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace hydrolimit::detail {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// 7-point Gauss / 15-point Kronrod pair on [a, b].
template <class F>
Panel kronrod15(const F& f, double a, double b) {
  static constexpr std::array<double, 8> xk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double kron = wk[7] * fc;
  double gauss = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    double s = f(c - h * xk[i]) + f(c + h * xk[i]);
    kron += wk[i] * s;
    if (i % 2 == 1) gauss += wg[i / 2] * s;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

// Globally adaptive: split the worst panel at its midpoint until the summed
// error estimate falls below `tol`.
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b, double tol,
                                    int max_panels = 4000) {
  QuadratureResult out;
  if (!(b > a)) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Panel> heap;
  Panel first = kronrod15(f, a, b);
  heap.push(first);
  double total = first.value;
  double err = first.error;
  int panels = 1;
  while (err > tol && panels < max_panels) {
    Panel worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    Panel left = kronrod15(f, worst.a, mid);
    Panel right = kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // re-sum to shed accumulated rounding from the running totals
  total = 0.0;
  err = 0.0;
  std::vector<Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  for (const auto& p : all) {
    total += p.value;
    err += p.error;
  }
  out.value = total;
  out.error = err;
  out.intervals = panels;
  out.converged = err <= tol;
  return out;
}

}  // namespace hydrolimit::detail
