#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace fkpde {

/// A multi-index nu = (nu_1, ..., nu_d) of non-negative degrees.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dimension) : entries_(dimension, 0) {}
  MultiIndex(std::initializer_list<int> entries);
  explicit MultiIndex(std::vector<int> entries);

  /// The unit index e_j in dimension d.
  static MultiIndex unit(std::size_t dimension, std::size_t j);

  std::size_t size() const noexcept { return entries_.size(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<int>& entries() const noexcept { return entries_; }

  int total_degree() const noexcept;
  int max_degree() const noexcept;
  bool is_zero() const noexcept;

  /// Copy with entry j changed by delta. Throws if the result would be negative.
  MultiIndex shifted(std::size_t j, int delta) const;

  bool operator==(const MultiIndex& other) const = default;

  std::string to_string() const;

 private:
  std::vector<int> entries_;
};

/// Graded lexicographic order: total degree first, then lexicographic.
struct GradedLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const noexcept;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& nu) const noexcept;
};

/// Stable 64-bit fingerprint, independent of the host's std::hash.
std::uint64_t fingerprint(const MultiIndex& nu) noexcept;

/// Immutable set of multi-indices of a common dimension, kept in graded
/// lexicographic order with an O(1) membership index.
class MultiIndexSet {
 public:
  MultiIndexSet() = default;
  explicit MultiIndexSet(std::size_t dimension);
  /// Sorts into canonical order and drops duplicates. Throws on dimension mismatch.
  MultiIndexSet(std::size_t dimension, std::vector<MultiIndex> members);

  /// {0_d}
  static MultiIndexSet root(std::size_t dimension);
  /// Full tensor set {nu : nu_i <= degree}.
  static MultiIndexSet tensor(std::size_t dimension, int degree);
  /// Total-degree set {nu : |nu| <= degree}.
  static MultiIndexSet total_degree(std::size_t dimension, int degree);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }

  const std::vector<MultiIndex>& members() const noexcept { return members_; }
  const MultiIndex& operator[](std::size_t i) const { return members_[i]; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  bool contains(const MultiIndex& nu) const;
  /// Position of nu in canonical order.
  std::optional<std::size_t> position(const MultiIndex& nu) const;

  /// Largest degree used in coordinate i (0 for an empty set).
  int max_degree(std::size_t i) const;
  /// Largest degree over all coordinates.
  int max_degree() const;

  bool operator==(const MultiIndexSet& other) const {
    return dimension_ == other.dimension_ && members_ == other.members_;
  }

 private:
  std::size_t dimension_ = 0;
  std::vector<MultiIndex> members_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> lookup_;
};

bool is_downward_closed(const MultiIndexSet& set);

/// {nu not in set : nu - e_j in set for every j with nu_j > 0}.
/// Requires a non-empty downward-closed set.
MultiIndexSet reduced_margin(const MultiIndexSet& set);

MultiIndexSet set_union(const MultiIndexSet& a, const MultiIndexSet& b);

/// Members of a that are not in b.
MultiIndexSet set_difference(const MultiIndexSet& a, const MultiIndexSet& b);

bool is_subset(const MultiIndexSet& a, const MultiIndexSet& b);

// One multi-index per line, entries separated by spaces.
void write_text(std::ostream& out, const MultiIndexSet& set);
std::string to_text(const MultiIndexSet& set);
/// Parses the line format. When dimension is 0 it is taken from the first
/// line; an empty input then needs an explicit dimension.
MultiIndexSet read_text(std::istream& in, std::size_t dimension = 0);
MultiIndexSet from_text(const std::string& text, std::size_t dimension = 0);

}  // namespace fkpde
