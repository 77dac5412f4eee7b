#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace lrcert {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Per-site Hilbert space dimensions, indexed by vertex id.
class SiteBasis {
 public:
  static constexpr std::int64_t kDefaultDimCap = 4096;

  SiteBasis() = default;
  explicit SiteBasis(int n_sites, int local_dim = 2);

  int sites() const { return static_cast<int>(dims_.size()); }
  int dim(int site) const;
  void set_dim(int site, int d);

  // Product of local dimensions over `sites`; throws std::invalid_argument
  // with the offending value if it exceeds `cap`.
  std::int64_t space_dim(std::span<const int> sites,
                         std::int64_t cap = kDefaultDimCap) const;

 private:
  std::vector<int> dims_;
};

namespace kernels {

// Composite-index offsets for a subset of tensor factors inside a volume.
// Sites are ordered by ascending vertex id; the first site is the most
// significant digit of the composite index.
struct IndexMap {
  IndexMap(std::span<const int> subset, std::span<const int> volume,
           const SiteBasis& basis);

  std::vector<std::int64_t> subset_offsets;  // one entry per subset index
  std::vector<std::int64_t> rest_offsets;    // one entry per complement index
  std::int64_t subset_dim = 1;
  std::int64_t rest_dim = 1;
  std::int64_t volume_dim = 1;
};

// op ⊗ identity on volume∖support. `support` must be a subset of `volume`,
// both in ascending vertex order.
Matrix embed(const Matrix& op, std::span<const int> support,
             std::span<const int> volume, const SiteBasis& basis);

// Trace out volume∖keep; the result is indexed by `keep` alone.
Matrix partial_trace(const Matrix& op, std::span<const int> volume,
                     std::span<const int> keep, const SiteBasis& basis);

// Tr[(⊗_x rho_x) op] with one density factor per volume site, in the same
// ascending site order as `op`.
Complex product_state_expectation(const Matrix& op,
                                  std::span<const Matrix> factors);

// Serial reference implementations. Same contracts, no threading; kept for
// the agreement tests and the kernel benchmark.
namespace serial {
Matrix embed(const Matrix& op, std::span<const int> support,
             std::span<const int> volume, const SiteBasis& basis);
Matrix partial_trace(const Matrix& op, std::span<const int> volume,
                     std::span<const int> keep, const SiteBasis& basis);
Complex product_state_expectation(const Matrix& op,
                                  std::span<const Matrix> factors);
}  // namespace serial

}  // namespace kernels
}  // namespace lrcert
