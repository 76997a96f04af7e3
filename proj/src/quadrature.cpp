#include "crossci/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace crossci::quadrature {

GlRule gauss_legendre(int n) {
  GlRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

std::vector<double> panel_edges(double a, double b, std::vector<double> marks,
                                int panels) {
  marks.push_back(a);
  marks.push_back(b);
  std::sort(marks.begin(), marks.end());
  std::vector<double> seg;
  for (double v : marks) {
    if (v < a || v > b) continue;
    if (seg.empty() || v - seg.back() > 1e-12) seg.push_back(v);
  }
  if (seg.size() < 2) seg = {a, b};
  seg.front() = a;
  seg.back() = b;

  const double total = b - a;
  std::vector<double> edges;
  edges.push_back(a);
  for (std::size_t i = 0; i + 1 < seg.size(); ++i) {
    const double len = seg[i + 1] - seg[i];
    const int k =
        std::max(1, static_cast<int>(std::lround(panels * len / total)));
    for (int j = 1; j <= k; ++j) edges.push_back(seg[i] + len * j / k);
    edges.back() = seg[i + 1];
  }
  return edges;
}

CompositeRule composite(const std::vector<double>& edges, const GlRule& rule) {
  CompositeRule out;
  const int nn = static_cast<int>(rule.nodes.size());
  out.nodes.reserve((edges.size() - 1) * nn);
  out.weights.reserve((edges.size() - 1) * nn);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    for (int i = 0; i < nn; ++i) {
      out.nodes.push_back(mid + half * rule.nodes[i]);
      out.weights.push_back(half * rule.weights[i]);
    }
  }
  return out;
}

} // namespace crossci::quadrature
