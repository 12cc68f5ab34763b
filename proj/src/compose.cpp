#include "ctbn/compose.hpp"

#include <sstream>
#include <vector>

namespace ctbn {

ConditionalFamily::ConditionalFamily(std::vector<Generator> members)
    : members_(std::move(members)) {
  if (members_.empty()) {
    throw ValidationError("EmptyInput", "conditional family has no members");
  }
  base_dim_ = members_.front().n();
  for (std::size_t k = 1; k < members_.size(); ++k) {
    if (members_[k].n() != base_dim_) {
      std::ostringstream os;
      os << "member " << k + 1 << " is " << members_[k].n() << "x"
         << members_[k].n() << ", expected " << base_dim_ << "x" << base_dim_;
      throw ValidationError("DimensionMismatch", os.str());
    }
  }
}

Eigen::MatrixXd direct_sum(const ConditionalFamily& family) {
  const int nb = family.base_dim();
  const int nc = family.cond_dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nb * nc, nb * nc);
  for (int k = 0; k < nc; ++k) {
    out.block(k * nb, k * nb, nb, nb) = family.members()[k].rates();
  }
  return out;
}

Eigen::MatrixXd expansion(const ConditionalFamily& family) {
  const int nb = family.base_dim();
  const int nc = family.cond_dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nb * nc, nb * nc);
  for (int k = 0; k < nc; ++k) {
    const Eigen::MatrixXd& b = family.members()[k].rates();
    for (int i = 0; i < nb; ++i) {
      for (int j = 0; j < nb; ++j) {
        out(i * nc + k, j * nc + k) = b(i, j);
      }
    }
  }
  return out;
}

CtbnModel::CtbnModel(ConditionalFamily x_given_y, ConditionalFamily y_given_x)
    : x_given_y_(std::move(x_given_y)),
      y_given_x_(std::move(y_given_x)),
      nx_(x_given_y_.base_dim()),
      ny_(y_given_x_.base_dim()),
      qw_(compose_generators(x_given_y_, y_given_x_)) {}

Generator compose_generators(const ConditionalFamily& x_given_y,
                             const ConditionalFamily& y_given_x) {
  if (x_given_y.base_dim() != y_given_x.cond_dim() ||
      x_given_y.cond_dim() != y_given_x.base_dim()) {
    std::ostringstream os;
    os << "X|Y is " << x_given_y.base_dim() << " states by "
       << x_given_y.cond_dim() << " members, Y|X is " << y_given_x.base_dim()
       << " states by " << y_given_x.cond_dim() << " members";
    throw ValidationError("DimensionMismatch", os.str());
  }
  const Eigen::MatrixXd joint = direct_sum(x_given_y) + expansion(y_given_x);
  try {
    return Generator(joint);
  } catch (const ValidationError& e) {
    // Valid inputs cannot produce this; a failure is a broken guarantee.
    throw InternalError("InvalidGenerator", e.what());
  }
}

int composite_index(int x, int y, int nx) {
  if (nx < 1 || x < 1 || x > nx || y < 1) {
    std::ostringstream os;
    os << "x=" << x << ", y=" << y << ", nx=" << nx;
    throw ValidationError("OutOfRange", os.str());
  }
  return x + nx * (y - 1);
}

CompositeIndex split_index(int w, int nx) {
  if (nx < 1 || w < 1) {
    std::ostringstream os;
    os << "w=" << w << ", nx=" << nx;
    throw ValidationError("OutOfRange", os.str());
  }
  const int x = 1 + (w - 1) % nx;
  const int y = 1 + (w - 1) / nx;
  return CompositeIndex{w, x, y};
}

bool is_locally_independent(const ConditionalFamily& family, double tol) {
  const auto& members = family.members();
  for (std::size_t k = 1; k < members.size(); ++k) {
    const double gap = (members[k].rates() - members[0].rates())
                           .cwiseAbs()
                           .maxCoeff();
    if (gap > tol) return false;
  }
  return true;
}

bool verify_equivalence(const Generator& a, const Generator& b,
                        const std::vector<int>& perm) {
  if (a.n() != b.n()) {
    std::ostringstream os;
    os << a.n() << " vs " << b.n() << " states";
    throw ValidationError("DimensionMismatch", os.str());
  }
  const int n = a.n();
  if (static_cast<int>(perm.size()) != n) {
    throw ValidationError("InvalidPermutation",
                          "length " + std::to_string(perm.size()) +
                              ", expected " + std::to_string(n));
  }
  std::vector<char> hit(n, 0);
  for (const int target : perm) {
    if (target < 1 || target > n || hit[target - 1]) {
      throw ValidationError("InvalidPermutation",
                            "not a bijection of 1.." + std::to_string(n));
    }
    hit[target - 1] = 1;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double relabeled = b.rates()(perm[i] - 1, perm[j] - 1);
      if (std::abs(relabeled - a.rates()(i, j)) > 1e-12) return false;
    }
  }
  return true;
}

std::vector<int> swap_permutation(int nx, int ny) {
  if (nx < 1 || ny < 1) {
    throw ValidationError("OutOfRange", "nx and ny must be positive");
  }
  std::vector<int> perm(static_cast<std::size_t>(nx) * ny);
  for (int w = 1; w <= nx * ny; ++w) {
    const CompositeIndex c = split_index(w, nx);
    perm[w - 1] = c.y + ny * (c.x - 1);
  }
  return perm;
}

}  // namespace ctbn
