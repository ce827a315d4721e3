#include "ulsq/multi_index.hpp"

#include <limits>
#include <numeric>
#include <string>

namespace ulsq {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ContractError("MultiIndex: dimension must be >= 1");
  for (int e : entries_) {
    if (e < 0) throw ContractError("MultiIndex: entries must be non-negative");
  }
  degree_ = std::accumulate(entries_.begin(), entries_.end(), 0);
}

std::strong_ordering compare_graded_lex(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim())
    throw ContractError("compare_graded_lex: dimension mismatch (" +
                        std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  if (a.degree() != b.degree()) return a.degree() <=> b.degree();
  for (int i = 0; i < a.dim(); ++i) {
    if (a[i] != b[i]) return a[i] <=> b[i];
  }
  return std::strong_ordering::equal;
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    throw CapacityError("index set cardinality overflows 64-bit range");
  return a * b;
}

std::uint64_t tensor_product_cardinality(int q, int d) {
  std::uint64_t n = 1;
  for (int i = 0; i < d; ++i) n = checked_mul(n, static_cast<std::uint64_t>(q) + 1);
  return n;
}

std::uint64_t total_degree_cardinality(int q, int d) {
  // binomial(q+d, d) built incrementally; every prefix is itself a binomial,
  // so the division is exact at each step.
  std::uint64_t n = 1;
  for (int i = 1; i <= d; ++i) {
    n = checked_mul(n, static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(i));
    n /= static_cast<std::uint64_t>(i);
  }
  return n;
}

// Appends, in lexicographic order, every tuple with total degree `degree`
// whose entries do not exceed `cap`.
void emit_degree_slice(int degree, int cap, int d, std::vector<int>& scratch, int pos,
                       std::vector<MultiIndex>& out) {
  if (pos == d - 1) {
    if (degree <= cap) {
      scratch[static_cast<std::size_t>(pos)] = degree;
      out.emplace_back(scratch);
    }
    return;
  }
  const int hi = std::min(cap, degree);
  for (int v = 0; v <= hi; ++v) {
    scratch[static_cast<std::size_t>(pos)] = v;
    emit_degree_slice(degree - v, cap, d, scratch, pos + 1, out);
  }
}

}  // namespace

std::uint64_t index_set_cardinality(SpaceKind kind, int q, int d) {
  if (q < 0) throw ContractError("index_set_cardinality: q must be >= 0");
  if (d < 1) throw ContractError("index_set_cardinality: d must be >= 1");
  return kind == SpaceKind::TensorProduct ? tensor_product_cardinality(q, d)
                                          : total_degree_cardinality(q, d);
}

IndexSet build_index_set(SpaceKind kind, int q, int d) {
  const std::uint64_t n = index_set_cardinality(kind, q, d);
  if (n > static_cast<std::uint64_t>(std::numeric_limits<std::ptrdiff_t>::max() / 16))
    throw CapacityError("index set with " + std::to_string(n) + " elements is not addressable");

  IndexSet set;
  set.kind_ = kind;
  set.q_ = q;
  set.d_ = d;
  set.indices_.reserve(static_cast<std::size_t>(n));

  const int cap = q;
  const int max_degree = kind == SpaceKind::TensorProduct ? q * d : q;
  std::vector<int> scratch(static_cast<std::size_t>(d), 0);
  for (int s = 0; s <= max_degree; ++s) {
    emit_degree_slice(s, cap, d, scratch, 0, set.indices_);
  }

  set.per_dim_max_.assign(static_cast<std::size_t>(d), 0);
  for (const MultiIndex& idx : set.indices_) {
    for (int i = 0; i < d; ++i)
      set.per_dim_max_[static_cast<std::size_t>(i)] =
          std::max(set.per_dim_max_[static_cast<std::size_t>(i)], idx[i]);
  }

  if (set.indices_.size() != n)
    throw ConvergenceError("build_index_set: enumeration does not match closed-form cardinality");
  return set;
}

}  // namespace ulsq
