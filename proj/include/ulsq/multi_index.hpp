#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "ulsq/errors.hpp"

namespace ulsq {

/// A d-tuple of non-negative orders, one per coordinate direction.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<int> entries);

  int dim() const { return static_cast<int>(entries_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& entries() const { return entries_; }

  bool operator==(const MultiIndex& other) const { return entries_ == other.entries_; }

 private:
  std::vector<int> entries_;
  int degree_ = 0;
};

/// Graded lexicographic order: first by total degree, then by the first
/// coordinate where the tuples differ. Total on tuples of equal dimension.
std::strong_ordering compare_graded_lex(const MultiIndex& a, const MultiIndex& b);

enum class SpaceKind {
  TensorProduct,  // max_j n_j <= q, dimension (q+1)^d
  TotalDegree,    // |n| <= q,      dimension binomial(q+d, d)
};

/// Finite multi-index set defining a multivariate approximation space.
/// Indices are stored in canonical graded lexicographic order.
class IndexSet {
 public:
  SpaceKind kind() const { return kind_; }
  int max_order() const { return q_; }
  int dim() const { return d_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }

  /// Largest order appearing in coordinate direction i.
  int max_entry(int i) const { return per_dim_max_[static_cast<std::size_t>(i)]; }

  friend IndexSet build_index_set(SpaceKind kind, int q, int d);

 private:
  IndexSet() = default;

  SpaceKind kind_ = SpaceKind::TotalDegree;
  int q_ = 0;
  int d_ = 1;
  std::vector<MultiIndex> indices_;
  std::vector<int> per_dim_max_;
};

/// Cardinality of the index set with checked arithmetic.
/// Throws CapacityError instead of wrapping around.
std::uint64_t index_set_cardinality(SpaceKind kind, int q, int d);

/// Enumerates the index set degree by degree, within each degree by
/// lexicographic scan, which yields the canonical order without a sort.
IndexSet build_index_set(SpaceKind kind, int q, int d);

}  // namespace ulsq
