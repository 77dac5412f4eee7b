#include "lrcert/kernels.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace lrcert {

SiteBasis::SiteBasis(int n_sites, int local_dim) {
  if (n_sites < 0) throw std::invalid_argument("SiteBasis: negative site count");
  if (local_dim < 1) throw std::invalid_argument("SiteBasis: local dimension must be >= 1");
  dims_.assign(static_cast<std::size_t>(n_sites), local_dim);
}

int SiteBasis::dim(int site) const {
  if (site < 0 || site >= sites())
    throw std::invalid_argument("SiteBasis: site " + std::to_string(site) + " out of range");
  return dims_[static_cast<std::size_t>(site)];
}

void SiteBasis::set_dim(int site, int d) {
  if (site < 0 || site >= sites())
    throw std::invalid_argument("SiteBasis: site " + std::to_string(site) + " out of range");
  if (d < 1) throw std::invalid_argument("SiteBasis: local dimension must be >= 1");
  dims_[static_cast<std::size_t>(site)] = d;
}

std::int64_t SiteBasis::space_dim(std::span<const int> sites, std::int64_t cap) const {
  std::int64_t d = 1;
  for (int s : sites) {
    d *= dim(s);
    if (d > cap)
      throw std::invalid_argument("Hilbert space dimension exceeds cap " + std::to_string(cap) +
                                  " (got at least " + std::to_string(d) + ")");
  }
  return d;
}

namespace kernels {
namespace {

void require_ascending_subset(std::span<const int> subset, std::span<const int> volume) {
  if (!std::is_sorted(volume.begin(), volume.end()) ||
      std::adjacent_find(volume.begin(), volume.end()) != volume.end())
    throw std::invalid_argument("kernels: volume sites must be strictly ascending");
  if (!std::is_sorted(subset.begin(), subset.end()) ||
      std::adjacent_find(subset.begin(), subset.end()) != subset.end())
    throw std::invalid_argument("kernels: subset sites must be strictly ascending");
  if (!std::includes(volume.begin(), volume.end(), subset.begin(), subset.end()))
    throw std::invalid_argument("kernels: subset is not contained in the volume");
}

}  // namespace

IndexMap::IndexMap(std::span<const int> subset, std::span<const int> volume,
                   const SiteBasis& basis) {
  require_ascending_subset(subset, volume);

  const int n = static_cast<int>(volume.size());
  std::vector<std::int64_t> stride(static_cast<std::size_t>(n), 1);
  for (int k = n - 2; k >= 0; --k)
    stride[k] = stride[k + 1] * basis.dim(volume[static_cast<std::size_t>(k) + 1]);
  volume_dim = n == 0 ? 1 : stride[0] * basis.dim(volume[0]);

  std::vector<int> subset_pos, rest_pos;
  for (int k = 0; k < n; ++k) {
    if (std::binary_search(subset.begin(), subset.end(), volume[static_cast<std::size_t>(k)]))
      subset_pos.push_back(k);
    else
      rest_pos.push_back(k);
  }

  auto build = [&](const std::vector<int>& pos, std::int64_t& dim_out) {
    dim_out = 1;
    for (int k : pos) dim_out *= basis.dim(volume[static_cast<std::size_t>(k)]);
    std::vector<std::int64_t> offsets(static_cast<std::size_t>(dim_out), 0);
    for (std::int64_t idx = 0; idx < dim_out; ++idx) {
      std::int64_t rem = idx, off = 0;
      for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
        const int d = basis.dim(volume[static_cast<std::size_t>(*it)]);
        off += (rem % d) * stride[static_cast<std::size_t>(*it)];
        rem /= d;
      }
      offsets[static_cast<std::size_t>(idx)] = off;
    }
    return offsets;
  };

  subset_offsets = build(subset_pos, subset_dim);
  rest_offsets = build(rest_pos, rest_dim);
}

Matrix embed(const Matrix& op, std::span<const int> support,
             std::span<const int> volume, const SiteBasis& basis) {
  const IndexMap map(support, volume, basis);
  if (op.rows() != map.subset_dim || op.cols() != map.subset_dim)
    throw std::invalid_argument("embed: operator dimension does not match its support");

  Matrix out = Matrix::Zero(map.volume_dim, map.volume_dim);
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < map.rest_dim; ++r) {
    const std::int64_t base = map.rest_offsets[static_cast<std::size_t>(r)];
    for (std::int64_t j = 0; j < map.subset_dim; ++j)
      for (std::int64_t i = 0; i < map.subset_dim; ++i)
        out(base + map.subset_offsets[static_cast<std::size_t>(i)],
            base + map.subset_offsets[static_cast<std::size_t>(j)]) = op(i, j);
  }
  return out;
}

Matrix partial_trace(const Matrix& op, std::span<const int> volume,
                     std::span<const int> keep, const SiteBasis& basis) {
  const IndexMap map(keep, volume, basis);
  if (op.rows() != map.volume_dim || op.cols() != map.volume_dim)
    throw std::invalid_argument("partial_trace: operator dimension does not match the volume");

  Matrix out(map.subset_dim, map.subset_dim);
#pragma omp parallel for collapse(2) schedule(static)
  for (std::int64_t j = 0; j < map.subset_dim; ++j) {
    for (std::int64_t i = 0; i < map.subset_dim; ++i) {
      const std::int64_t oi = map.subset_offsets[static_cast<std::size_t>(i)];
      const std::int64_t oj = map.subset_offsets[static_cast<std::size_t>(j)];
      Complex sum = 0.0;
      for (std::int64_t r = 0; r < map.rest_dim; ++r) {
        const std::int64_t o = map.rest_offsets[static_cast<std::size_t>(r)];
        sum += op(oi + o, oj + o);
      }
      out(i, j) = sum;
    }
  }
  return out;
}

Complex product_state_expectation(const Matrix& op, std::span<const Matrix> factors) {
  // Contract one site at a time from the most significant factor:
  // op'[a,b] = sum_{i,j} rho[j,i] op[i*D + a, j*D + b].
  Matrix cur = op;
  for (const Matrix& rho : factors) {
    const std::int64_t d = rho.rows();
    if (rho.cols() != d || cur.rows() % d != 0)
      throw std::invalid_argument("product_state_expectation: factor dimensions do not divide the operator");
    const std::int64_t rest = cur.rows() / d;
    Matrix next = Matrix::Zero(rest, rest);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < rest; ++b)
      for (std::int64_t a = 0; a < rest; ++a) {
        Complex sum = 0.0;
        for (std::int64_t i = 0; i < d; ++i)
          for (std::int64_t j = 0; j < d; ++j) sum += rho(j, i) * cur(i * rest + a, j * rest + b);
        next(a, b) = sum;
      }
    cur.swap(next);
  }
  if (cur.rows() != 1 || cur.cols() != 1)
    throw std::invalid_argument("product_state_expectation: factor count does not exhaust the operator");
  return cur(0, 0);
}

namespace serial {

Matrix embed(const Matrix& op, std::span<const int> support,
             std::span<const int> volume, const SiteBasis& basis) {
  const IndexMap map(support, volume, basis);
  if (op.rows() != map.subset_dim || op.cols() != map.subset_dim)
    throw std::invalid_argument("embed: operator dimension does not match its support");

  Matrix out = Matrix::Zero(map.volume_dim, map.volume_dim);
  for (std::int64_t r = 0; r < map.rest_dim; ++r) {
    const std::int64_t base = map.rest_offsets[static_cast<std::size_t>(r)];
    for (std::int64_t j = 0; j < map.subset_dim; ++j)
      for (std::int64_t i = 0; i < map.subset_dim; ++i)
        out(base + map.subset_offsets[static_cast<std::size_t>(i)],
            base + map.subset_offsets[static_cast<std::size_t>(j)]) = op(i, j);
  }
  return out;
}

Matrix partial_trace(const Matrix& op, std::span<const int> volume,
                     std::span<const int> keep, const SiteBasis& basis) {
  const IndexMap map(keep, volume, basis);
  if (op.rows() != map.volume_dim || op.cols() != map.volume_dim)
    throw std::invalid_argument("partial_trace: operator dimension does not match the volume");

  Matrix out(map.subset_dim, map.subset_dim);
  for (std::int64_t j = 0; j < map.subset_dim; ++j)
    for (std::int64_t i = 0; i < map.subset_dim; ++i) {
      const std::int64_t oi = map.subset_offsets[static_cast<std::size_t>(i)];
      const std::int64_t oj = map.subset_offsets[static_cast<std::size_t>(j)];
      Complex sum = 0.0;
      for (std::int64_t r = 0; r < map.rest_dim; ++r) {
        const std::int64_t o = map.rest_offsets[static_cast<std::size_t>(r)];
        sum += op(oi + o, oj + o);
      }
      out(i, j) = sum;
    }
  return out;
}

Complex product_state_expectation(const Matrix& op, std::span<const Matrix> factors) {
  Matrix cur = op;
  for (const Matrix& rho : factors) {
    const std::int64_t d = rho.rows();
    if (rho.cols() != d || cur.rows() % d != 0)
      throw std::invalid_argument("product_state_expectation: factor dimensions do not divide the operator");
    const std::int64_t rest = cur.rows() / d;
    Matrix next = Matrix::Zero(rest, rest);
    for (std::int64_t b = 0; b < rest; ++b)
      for (std::int64_t a = 0; a < rest; ++a) {
        Complex sum = 0.0;
        for (std::int64_t i = 0; i < d; ++i)
          for (std::int64_t j = 0; j < d; ++j) sum += rho(j, i) * cur(i * rest + a, j * rest + b);
        next(a, b) = sum;
      }
    cur.swap(next);
  }
  if (cur.rows() != 1 || cur.cols() != 1)
    throw std::invalid_argument("product_state_expectation: factor count does not exhaust the operator");
  return cur(0, 0);
}

}  // namespace serial
}  // namespace kernels
}  // namespace lrcert
