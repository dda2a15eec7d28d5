#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "spiralpaste/errors.hpp"

namespace spiralpaste {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Shape of X = (⊕ₙ ℓ∞^{dₙ})_p. `p == +inf` selects sup-aggregation, which
/// models a c₀-type sum.
struct SumSpaceSpec {
  double p = 2.0;
  std::vector<int> block_dims;

  static SumSpaceSpec lp(double p, std::vector<int> dims) {
    SumSpaceSpec spec{p, std::move(dims)};
    spec.validate();
    return spec;
  }
  static SumSpaceSpec sup(std::vector<int> dims) {
    return lp(std::numeric_limits<double>::infinity(), std::move(dims));
  }

  bool is_sup() const { return std::isinf(p); }
  int num_blocks() const { return static_cast<int>(block_dims.size()); }
  int block_dim(int k) const { return block_dims.at(static_cast<std::size_t>(k)); }

  void validate() const;
};

/// Aggregates a nonnegative block profile: ℓ_p norm for finite p, max for sup.
///
/// A profile with a single nonzero entry returns that entry exactly, so that
/// one-block quantities never pick up pow() rounding.
template <typename Derived>
typename Derived::Scalar aggregate(const Eigen::MatrixBase<Derived>& profile, double p) {
  using Scalar = typename Derived::Scalar;
  if (profile.size() == 0) return Scalar(0);
  const Scalar top = profile.maxCoeff();
  if (top == Scalar(0)) return Scalar(0);
  if (std::isinf(p)) return top;
  Eigen::Index nonzero = 0;
  for (Eigen::Index i = 0; i < profile.size(); ++i) nonzero += profile(i) != Scalar(0);
  if (nonzero == 1) return top;
  if (p == 1.0) return profile.sum();
  Scalar acc(0);
  for (Eigen::Index i = 0; i < profile.size(); ++i) {
    if (profile(i) != Scalar(0)) acc += std::pow(profile(i) / top, p);
  }
  if (p == 2.0) return top * std::sqrt(acc);
  return top * std::pow(acc, Scalar(1) / p);
}

/// Finitely supported element of a sum space. Absent blocks are zero; the
/// vector itself carries no spec, conformance is checked against one.
template <std::floating_point Scalar>
class BasicBlockVector {
 public:
  using Block = VectorX<Scalar>;
  using Storage = std::map<int, Block>;

  BasicBlockVector() = default;

  static BasicBlockVector single(int block, Block values) {
    BasicBlockVector v;
    v.set_block(block, std::move(values));
    return v;
  }

  void set_block(int block, Block values) { blocks_[block] = std::move(values); }
  void erase_block(int block) { blocks_.erase(block); }

  const Block* find_block(int block) const {
    auto it = blocks_.find(block);
    return it == blocks_.end() ? nullptr : &it->second;
  }
  const Storage& blocks() const { return blocks_; }
  bool empty() const { return blocks_.empty(); }

  /// Indices of stored blocks that are not identically zero.
  std::vector<int> support() const {
    std::vector<int> out;
    for (const auto& [k, b] : blocks_)
      if (b.size() > 0 && b.cwiseAbs().maxCoeff() != Scalar(0)) out.push_back(k);
    return out;
  }

  BasicBlockVector& operator+=(const BasicBlockVector& other) { return axpy(Scalar(1), other); }
  BasicBlockVector& operator-=(const BasicBlockVector& other) { return axpy(Scalar(-1), other); }
  BasicBlockVector& operator*=(Scalar a) {
    for (auto& [k, b] : blocks_) b *= a;
    return *this;
  }

  friend BasicBlockVector operator+(BasicBlockVector a, const BasicBlockVector& b) { return a += b; }
  friend BasicBlockVector operator-(BasicBlockVector a, const BasicBlockVector& b) { return a -= b; }
  friend BasicBlockVector operator*(Scalar s, BasicBlockVector a) { return a *= s; }
  friend BasicBlockVector operator*(BasicBlockVector a, Scalar s) { return a *= s; }

  friend bool operator==(const BasicBlockVector& a, const BasicBlockVector& b) {
    auto is_zero = [](const Block& blk) { return blk.size() == 0 || (blk.array() == Scalar(0)).all(); };
    for (const auto& [k, blk] : a.blocks_) {
      const Block* other = b.find_block(k);
      if (other == nullptr) {
        if (!is_zero(blk)) return false;
      } else if (other->size() != blk.size() || !(other->array() == blk.array()).all()) {
        return false;
      }
    }
    for (const auto& [k, blk] : b.blocks_)
      if (a.find_block(k) == nullptr && !is_zero(blk)) return false;
    return true;
  }

 private:
  BasicBlockVector& axpy(Scalar a, const BasicBlockVector& other) {
    for (const auto& [k, b] : other.blocks_) {
      auto it = blocks_.find(k);
      if (it == blocks_.end()) {
        blocks_.emplace(k, a * b);
      } else {
        if (it->second.size() != b.size())
          throw InvalidArgument("block " + std::to_string(k) + " has mismatched dimensions");
        it->second += a * b;
      }
    }
    return *this;
  }

  Storage blocks_;
};

using BlockVector = BasicBlockVector<double>;

/// Throws InvalidArgument unless every stored block index lies in the spec
/// and has the spec's dimension.
template <std::floating_point Scalar>
void check_conforms(const BasicBlockVector<Scalar>& v, const SumSpaceSpec& spec) {
  for (const auto& [k, b] : v.blocks()) {
    if (k < 0 || k >= spec.num_blocks())
      throw InvalidArgument("block index " + std::to_string(k) + " outside the sum space");
    if (b.size() != spec.block_dim(k))
      throw InvalidArgument("block " + std::to_string(k) + " has dimension " + std::to_string(b.size()) +
                            ", expected " + std::to_string(spec.block_dim(k)));
  }
}

/// Sequence of block sup-norms over the full block range.
template <std::floating_point Scalar>
VectorX<Scalar> block_profile(const BasicBlockVector<Scalar>& v, const SumSpaceSpec& spec) {
  VectorX<Scalar> out = VectorX<Scalar>::Zero(spec.num_blocks());
  for (const auto& [k, b] : v.blocks()) {
    if (k < 0 || k >= spec.num_blocks())
      throw InvalidArgument("block index " + std::to_string(k) + " outside the sum space");
    if (b.size() > 0) out(k) = b.cwiseAbs().maxCoeff();
  }
  return out;
}

template <std::floating_point Scalar>
Scalar norm(const BasicBlockVector<Scalar>& v, const SumSpaceSpec& spec) {
  return aggregate(block_profile(v, spec), spec.p);
}

/// ‖a − b‖ without materialising the difference.
template <std::floating_point Scalar>
Scalar distance(const BasicBlockVector<Scalar>& a, const BasicBlockVector<Scalar>& b, const SumSpaceSpec& spec) {
  VectorX<Scalar> profile = VectorX<Scalar>::Zero(spec.num_blocks());
  auto ia = a.blocks().begin();
  auto ib = b.blocks().begin();
  const auto ea = a.blocks().end();
  const auto eb = b.blocks().end();
  auto put = [&](int k, Scalar value) {
    if (k < 0 || k >= spec.num_blocks())
      throw InvalidArgument("block index " + std::to_string(k) + " outside the sum space");
    profile(k) = value;
  };
  auto sup = [](const auto& blk) { return blk.size() == 0 ? Scalar(0) : blk.cwiseAbs().maxCoeff(); };
  while (ia != ea || ib != eb) {
    if (ib == eb || (ia != ea && ia->first < ib->first)) {
      put(ia->first, sup(ia->second));
      ++ia;
    } else if (ia == ea || ib->first < ia->first) {
      put(ib->first, sup(ib->second));
      ++ib;
    } else {
      if (ia->second.size() != ib->second.size())
        throw InvalidArgument("block " + std::to_string(ia->first) + " has mismatched dimensions");
      put(ia->first, ia->second.size() == 0 ? Scalar(0) : (ia->second - ib->second).cwiseAbs().maxCoeff());
      ++ia;
      ++ib;
    }
  }
  return aggregate(profile, spec.p);
}

/// Natural projection onto the first `k` blocks (1 ≤ k ≤ num_blocks).
template <std::floating_point Scalar>
BasicBlockVector<Scalar> project(const BasicBlockVector<Scalar>& v, int k, const SumSpaceSpec& spec) {
  if (k < 1 || k > spec.num_blocks())
    throw InvalidArgument("projection level " + std::to_string(k) + " outside [1, " +
                          std::to_string(spec.num_blocks()) + "]");
  BasicBlockVector<Scalar> out;
  for (const auto& [idx, b] : v.blocks())
    if (idx < k) out.set_block(idx, b);
  return out;
}

/// Fits `a ≈ c·b` with one multiplicative ratio over the union support.
/// Returns c when c > 0 and the sup residual is within `tol` (scaled by the
/// larger profile magnitude when that exceeds one).
std::optional<double> proportional_ratio(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol);

enum class FlatVerdict { FlatProportional, FlatNotProportional, NotFlat };

struct FlatTripleResult {
  FlatVerdict verdict = FlatVerdict::NotFlat;
  std::optional<double> ratio;
};

/// Tests ‖x−z‖ = ‖x−y‖ + ‖y−z‖ and, for flat triples, whether the block
/// profile of x−y is a positive multiple of that of y−z.
FlatTripleResult flat_triple_check(const BlockVector& x, const BlockVector& y, const BlockVector& z,
                                   const SumSpaceSpec& spec, double tol = 1e-8);

const char* to_string(FlatVerdict verdict);

}  // namespace spiralpaste
