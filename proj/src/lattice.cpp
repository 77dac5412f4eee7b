#include "lrcert/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace lrcert {
namespace {

std::string join_ids(const std::vector<int>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + "}";
}

}  // namespace

MetricLattice MetricLattice::from_edges(int n_vertices,
                                        std::vector<std::pair<int, int>> edges,
                                        std::string id, int dimensionality) {
  if (n_vertices <= 0) throw std::invalid_argument("MetricLattice: vertex count must be positive");
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_vertices));
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n_vertices || v < 0 || v >= n_vertices)
      throw std::invalid_argument("MetricLattice: edge endpoint out of range");
    if (u == v) throw std::invalid_argument("MetricLattice: self-loop edge");
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }

  MetricLattice lat;
  lat.n_ = n_vertices;
  lat.dim_ = dimensionality;
  lat.id_ = std::move(id);
  lat.edges_ = std::move(edges);
  lat.dist_.assign(static_cast<std::size_t>(n_vertices) * n_vertices,
                   std::numeric_limits<double>::infinity());

  for (int src = 0; src < n_vertices; ++src) {
    auto* row = &lat.dist_[static_cast<std::size_t>(src) * n_vertices];
    row[src] = 0.0;
    std::deque<int> queue{src};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adj[static_cast<std::size_t>(u)]) {
        if (std::isinf(row[v])) {
          row[v] = row[u] + 1.0;
          queue.push_back(v);
        }
      }
    }
  }

  // Reject disconnected inputs, naming the components.
  std::vector<int> component(static_cast<std::size_t>(n_vertices), -1);
  int n_components = 0;
  for (int v = 0; v < n_vertices; ++v) {
    if (component[static_cast<std::size_t>(v)] >= 0) continue;
    for (int u = 0; u < n_vertices; ++u)
      if (!std::isinf(lat.dist_[static_cast<std::size_t>(v) * n_vertices + u]))
        component[static_cast<std::size_t>(u)] = n_components;
    ++n_components;
  }
  if (n_components > 1) {
    std::string msg = "MetricLattice: graph is disconnected; components:";
    for (int c = 0; c < n_components; ++c) {
      std::vector<int> members;
      for (int v = 0; v < n_vertices; ++v)
        if (component[static_cast<std::size_t>(v)] == c) members.push_back(v);
      msg += " " + join_ids(members);
    }
    throw std::invalid_argument(msg);
  }
  return lat;
}

MetricLattice MetricLattice::path(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return from_edges(n, std::move(edges), "path" + std::to_string(n), 1);
}

MetricLattice MetricLattice::ring(int n) {
  if (n < 3) throw std::invalid_argument("MetricLattice::ring: need at least 3 vertices");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return from_edges(n, std::move(edges), "ring" + std::to_string(n), 1);
}

MetricLattice MetricLattice::grid(const std::vector<int>& dims) {
  if (dims.empty()) throw std::invalid_argument("MetricLattice::grid: empty dimension list");
  int n = 1;
  std::string id = "grid";
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (dims[k] <= 0) throw std::invalid_argument("MetricLattice::grid: dimensions must be positive");
    n *= dims[k];
    id += (k ? "x" : "") + std::to_string(dims[k]);
  }
  // Vertex id = mixed-radix index over the grid coordinates, last axis fastest.
  std::vector<int> stride(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
    stride[static_cast<std::size_t>(k)] =
        stride[static_cast<std::size_t>(k) + 1] * dims[static_cast<std::size_t>(k) + 1];
  std::vector<std::pair<int, int>> edges;
  for (int v = 0; v < n; ++v) {
    int rem = v;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      const int coord = rem / stride[k];
      rem %= stride[k];
      if (coord + 1 < dims[k]) edges.emplace_back(v, v + stride[k]);
    }
  }
  return from_edges(n, std::move(edges), id, static_cast<int>(dims.size()));
}

double MetricLattice::distance(int x, int y) const {
  if (x < 0 || x >= n_ || y < 0 || y >= n_)
    throw std::invalid_argument("MetricLattice::distance: vertex out of range");
  return dist_[static_cast<std::size_t>(x) * n_ + y];
}

double MetricLattice::set_distance(std::span<const int> xs, std::span<const int> ys) const {
  if (xs.empty() || ys.empty())
    throw std::invalid_argument("MetricLattice::set_distance: empty vertex set");
  double best = std::numeric_limits<double>::infinity();
  for (int x : xs)
    for (int y : ys) best = std::min(best, distance(x, y));
  return best;
}

double FFunction::base(double r) const { return std::pow(1.0 + r, -p); }

double FFunction::operator()(double r) const { return std::exp(-a * r) * base(r); }

void FFunction::validate() const {
  if (!(p > 0.0)) throw std::invalid_argument("FFunction: profile exponent p must be positive");
  if (!(a >= 0.0)) throw std::invalid_argument("FFunction: tilt a must be nonnegative");
}

double f_norm(const MetricLattice& lattice, const FFunction& f) {
  f.validate();
  const int n = lattice.size();
  double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best)
  for (int x = 0; x < n; ++x) {
    double sum = 0.0;
    for (int y = 0; y < n; ++y) sum += f(lattice.distance(x, y));
    best = std::max(best, sum);
  }
  return best;
}

double convolution_constant(const MetricLattice& lattice, const FFunction& f) {
  f.validate();
  const int n = lattice.size();
  // Guard against profile underflow before entering the parallel loop; the
  // denominators below must stay strictly positive.
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (!(f(lattice.distance(x, y)) > 0.0))
        throw std::domain_error("convolution_constant: profile vanished at distance " +
                                std::to_string(lattice.distance(x, y)));
  double best = 0.0;
#pragma omp parallel for collapse(2) schedule(static) reduction(max : best)
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      double sum = 0.0;
      for (int z = 0; z < n; ++z)
        sum += f(lattice.distance(x, z)) * f(lattice.distance(z, y));
      best = std::max(best, sum / f(lattice.distance(x, y)));
    }
  }
  return best;
}

double exponential_counterexample_ratio(int path_length, double decay_rate) {
  if (path_length < 1)
    throw std::invalid_argument("exponential_counterexample_ratio: path length must be >= 1");
  if (!(decay_rate > 0.0))
    throw std::invalid_argument("exponential_counterexample_ratio: decay rate must be positive");
  const MetricLattice lat = MetricLattice::path(path_length + 1);
  const int x = 0, y = path_length;
  const auto g = [decay_rate](double r) { return std::exp(-decay_rate * r); };
  double sum = 0.0;
  for (int z = 0; z <= path_length; ++z)
    sum += g(lat.distance(x, z)) * g(lat.distance(z, y));
  return sum / g(lat.distance(x, y));
}

double z1_convolution_reference(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("z1_convolution_reference: eps must be positive");
  constexpr int kTruncation = 10000;
  double sum = 1.0;  // n = 0 term
  for (int n = 1; n <= kTruncation; ++n) sum += 2.0 * std::pow(1.0 + n, -1.0 - eps);
  return std::pow(2.0, 2.0 + eps) * sum;
}

}  // namespace lrcert
