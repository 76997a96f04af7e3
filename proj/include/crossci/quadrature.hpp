#ifndef CROSSCI_QUADRATURE_HPP
#define CROSSCI_QUADRATURE_HPP

#include <vector>

namespace crossci::quadrature {

struct GlRule {
  std::vector<double> nodes;   // on (-1, 1)
  std::vector<double> weights; // sum to 2
};

/// n-point Gauss-Legendre rule by Newton iteration on the Legendre
/// recurrence.
GlRule gauss_legendre(int n);

/// Panel edges on [a, b]: the marks inside become hard edges, then each
/// segment is subdivided so the total count reaches at least `panels`.
std::vector<double> panel_edges(double a, double b, std::vector<double> marks,
                                int panels);

/// Scaled nodes/weights for a composite rule over the given edges.
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
CompositeRule composite(const std::vector<double>& edges, const GlRule& rule);

template <class F>
double integrate(const std::vector<double>& edges, const GlRule& rule,
                 F&& integrand) {
  double acc = 0.0;
  const int nn = static_cast<int>(rule.nodes.size());
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    double panel = 0.0;
    for (int i = 0; i < nn; ++i)
      panel += rule.weights[i] * integrand(mid + half * rule.nodes[i]);
    acc += half * panel;
  }
  return acc;
}

} // namespace crossci::quadrature

#endif
