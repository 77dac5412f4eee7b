#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lrcert {

// Finite vertex set with an all-pairs metric. Built from a connected graph;
// distances are shortest-path hop counts, stored as a dense table.
class MetricLattice {
 public:
  static MetricLattice path(int n);
  static MetricLattice ring(int n);
  static MetricLattice grid(const std::vector<int>& dims);

  // All-pairs BFS over the edge list. Throws std::invalid_argument naming the
  // connected components if the graph is disconnected.
  static MetricLattice from_edges(int n_vertices,
                                  std::vector<std::pair<int, int>> edges,
                                  std::string id, int dimensionality);

  int size() const { return n_; }
  double distance(int x, int y) const;
  // min over pairs; sets must be nonempty subsets of the vertex range.
  double set_distance(std::span<const int> xs, std::span<const int> ys) const;

  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::string& id() const { return id_; }
  // Spatial dimensionality of the builder (1 for path/ring, rank for grids);
  // sets the default profile exponent p = d + 1.
  int dimensionality() const { return dim_; }

 private:
  MetricLattice() = default;

  int n_ = 0;
  int dim_ = 1;
  std::string id_;
  std::vector<double> dist_;  // dense row-major n x n
  std::vector<std::pair<int, int>> edges_;
};

// Decay profile (1+r)^(-p) with exponential tilt e^(-a r).
struct FFunction {
  double p = 2.0;
  double a = 0.0;

  double base(double r) const;
  double operator()(double r) const;  // e^{-a r} (1+r)^{-p}
  FFunction tilted(double a_new) const { return FFunction{p, a_new}; }
  void validate() const;  // p > 0, a >= 0
};

// sup_x sum_y F_a(d(x,y)), the diagonal term included.
double f_norm(const MetricLattice& lattice, const FFunction& f);

// sup over ordered pairs (x,y), diagonal included, of
// sum_z F_a(d(x,z)) F_a(d(z,y)) / F_a(d(x,y)).
double convolution_constant(const MetricLattice& lattice, const FFunction& f);

// Convolution ratio of the pure exponential e^{-a r} between the endpoints of
// a path of length n. Every on-geodesic vertex contributes exactly 1, so the
// ratio is >= n+1 and grows without bound: the pure exponential admits no
// uniform convolution constant.
double exponential_counterexample_ratio(int path_length, double decay_rate = 1.0);

// Reference convolution bound for the one-dimensional power-law profile
// (1+r)^(-1-eps): 2^(2+eps) * sum_{|n| <= 1e4} (1+|n|)^(-1-eps). The
// truncation remainder is below 2^(3+eps) (1+1e4)^(-eps) / eps.
double z1_convolution_reference(double eps);

}  // namespace lrcert
