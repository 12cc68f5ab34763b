#ifndef CTBN_COMPOSE_HPP
#define CTBN_COMPOSE_HPP

#include <Eigen/Dense>
#include <vector>

#include "ctbn/generator.hpp"

namespace ctbn {

/// Ordered conditional generators of one component given the other:
/// member k is the base_dim x base_dim generator active while the
/// conditioning component sits in its k-th state.
class ConditionalFamily {
 public:
  explicit ConditionalFamily(std::vector<Generator> members);

  int base_dim() const noexcept { return base_dim_; }
  int cond_dim() const noexcept { return static_cast<int>(members_.size()); }
  const std::vector<Generator>& members() const noexcept { return members_; }
  const Generator& member(int k) const { return members_.at(k - 1); }  // 1-based

 private:
  std::vector<Generator> members_;
  int base_dim_;
};

/// Composite state index and its coordinates, all 1-based:
/// w = x + nx * (y - 1).
struct CompositeIndex {
  int w;
  int x;
  int y;
};

/// Two-component model. The joint generator is always recomputed from the
/// families, never accepted from outside, so the sparsity and diagonal
/// structure of composability hold by construction.
class CtbnModel {
 public:
  CtbnModel(ConditionalFamily x_given_y, ConditionalFamily y_given_x);

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  const ConditionalFamily& x_given_y() const noexcept { return x_given_y_; }
  const ConditionalFamily& y_given_x() const noexcept { return y_given_x_; }
  const Generator& qw() const noexcept { return qw_; }

 private:
  ConditionalFamily x_given_y_;
  ConditionalFamily y_given_x_;
  int nx_;
  int ny_;
  Generator qw_;
};

/// Block-diagonal embedding: member k occupies rows and columns
/// (k-1)*base_dim+1 .. k*base_dim. Not itself a generator.
Eigen::MatrixXd direct_sum(const ConditionalFamily& family);

/// Interleaved embedding: entry (i,j) of member k lands at row
/// (i-1)*cond_dim+k, column (j-1)*cond_dim+k, where cond_dim is the
/// number of members. Not itself a generator.
Eigen::MatrixXd expansion(const ConditionalFamily& family);

/// Joint generator: direct_sum of X|Y plus expansion of Y|X. Throws
/// DimensionMismatch when the families disagree on nx or ny.
Generator compose_generators(const ConditionalFamily& x_given_y,
                             const ConditionalFamily& y_given_x);

int composite_index(int x, int y, int nx);
CompositeIndex split_index(int w, int nx);

/// True iff all members coincide entrywise within tol.
bool is_locally_independent(const ConditionalFamily& family, double tol);

/// True iff B(R(i), R(j)) = A(i, j) entrywise within 1e-12, where `perm`
/// lists R(1..n) as 1-based targets. Throws InvalidPermutation,
/// DimensionMismatch.
bool verify_equivalence(const Generator& a, const Generator& b,
                        const std::vector<int>& perm);

/// The coordinate-swap permutation: state (x, y) of an nx-by-ny grid maps
/// to state (y, x) of the ny-by-nx grid, w' = y + ny * (x - 1).
std::vector<int> swap_permutation(int nx, int ny);

}  // namespace ctbn

#endif  // CTBN_COMPOSE_HPP
