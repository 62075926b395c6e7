#include "fkpde/multiindex.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "fkpde/errors.hpp"

namespace fkpde {

namespace {

void check_entries(const std::vector<int>& entries) {
  for (int v : entries) {
    if (v < 0) throw InvalidArgument("multi-index entries must be non-negative");
  }
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

MultiIndex::MultiIndex(std::initializer_list<int> entries) : entries_(entries) {
  check_entries(entries_);
}

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  check_entries(entries_);
}

MultiIndex MultiIndex::unit(std::size_t dimension, std::size_t j) {
  if (j >= dimension) throw InvalidArgument("unit index out of range");
  MultiIndex e(dimension);
  e.entries_[j] = 1;
  return e;
}

int MultiIndex::total_degree() const noexcept {
  int s = 0;
  for (int v : entries_) s += v;
  return s;
}

int MultiIndex::max_degree() const noexcept {
  int m = 0;
  for (int v : entries_) m = std::max(m, v);
  return m;
}

bool MultiIndex::is_zero() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(), [](int v) { return v == 0; });
}

MultiIndex MultiIndex::shifted(std::size_t j, int delta) const {
  MultiIndex out = *this;
  out.entries_.at(j) += delta;
  if (out.entries_[j] < 0) throw InvalidArgument("shift produces a negative entry");
  return out;
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(entries_[i]);
  }
  return s + ")";
}

bool GradedLexLess::operator()(const MultiIndex& a, const MultiIndex& b) const noexcept {
  const int da = a.total_degree();
  const int db = b.total_degree();
  if (da != db) return da < db;
  return a.entries() < b.entries();
}

std::uint64_t fingerprint(const MultiIndex& nu) noexcept {
  std::uint64_t h = mix64(0x9e3779b97f4a7c15ULL ^ nu.size());
  for (int v : nu.entries()) h = mix64(h ^ (static_cast<std::uint64_t>(v) + 0x632be59bd9b4e019ULL));
  return h;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& nu) const noexcept {
  return static_cast<std::size_t>(fingerprint(nu));
}

MultiIndexSet::MultiIndexSet(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw InvalidArgument("multi-index set dimension must be positive");
}

MultiIndexSet::MultiIndexSet(std::size_t dimension, std::vector<MultiIndex> members)
    : MultiIndexSet(dimension) {
  for (const auto& nu : members) {
    if (nu.size() != dimension) {
      throw InvalidArgument("multi-index " + nu.to_string() + " does not have dimension " +
                            std::to_string(dimension));
    }
  }
  std::sort(members.begin(), members.end(), GradedLexLess{});
  members.erase(std::unique(members.begin(), members.end()), members.end());
  members_ = std::move(members);
  lookup_.reserve(members_.size());
  for (std::size_t i = 0; i < members_.size(); ++i) lookup_.emplace(members_[i], i);
}

MultiIndexSet MultiIndexSet::root(std::size_t dimension) {
  return MultiIndexSet(dimension, {MultiIndex(dimension)});
}

MultiIndexSet MultiIndexSet::tensor(std::size_t dimension, int degree) {
  if (degree < 0) throw InvalidArgument("degree must be non-negative");
  std::vector<MultiIndex> out;
  std::vector<int> cur(dimension, 0);
  while (true) {
    out.emplace_back(cur);
    std::size_t i = 0;
    while (i < dimension && cur[i] == degree) cur[i++] = 0;
    if (i == dimension) break;
    ++cur[i];
  }
  return MultiIndexSet(dimension, std::move(out));
}

MultiIndexSet MultiIndexSet::total_degree(std::size_t dimension, int degree) {
  auto full = tensor(dimension, degree);
  std::vector<MultiIndex> out;
  for (const auto& nu : full) {
    if (nu.total_degree() <= degree) out.push_back(nu);
  }
  return MultiIndexSet(dimension, std::move(out));
}

bool MultiIndexSet::contains(const MultiIndex& nu) const {
  return lookup_.find(nu) != lookup_.end();
}

std::optional<std::size_t> MultiIndexSet::position(const MultiIndex& nu) const {
  auto it = lookup_.find(nu);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

int MultiIndexSet::max_degree(std::size_t i) const {
  int m = 0;
  for (const auto& nu : members_) m = std::max(m, nu[i]);
  return m;
}

int MultiIndexSet::max_degree() const {
  int m = 0;
  for (const auto& nu : members_) m = std::max(m, nu.max_degree());
  return m;
}

bool is_downward_closed(const MultiIndexSet& set) {
  // Checking the backward neighbours nu - e_j suffices by induction on |nu|.
  for (const auto& nu : set) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      if (nu[j] > 0 && !set.contains(nu.shifted(j, -1))) return false;
    }
  }
  return true;
}

MultiIndexSet reduced_margin(const MultiIndexSet& set) {
  if (set.empty()) throw InvalidArgument("reduced margin of an empty set");
  if (!is_downward_closed(set)) throw InvalidArgument("reduced margin requires a downward-closed set");
  const std::size_t d = set.dimension();
  std::vector<MultiIndex> candidates;
  for (const auto& nu : set) {
    for (std::size_t j = 0; j < d; ++j) {
      MultiIndex cand = nu.shifted(j, 1);
      if (set.contains(cand)) continue;
      bool admissible = true;
      for (std::size_t i = 0; i < d && admissible; ++i) {
        if (i != j && cand[i] > 0 && !set.contains(cand.shifted(i, -1))) admissible = false;
      }
      if (admissible) candidates.push_back(std::move(cand));
    }
  }
  return MultiIndexSet(d, std::move(candidates));
}

MultiIndexSet set_union(const MultiIndexSet& a, const MultiIndexSet& b) {
  if (a.dimension() != b.dimension()) throw InvalidArgument("union of sets with different dimensions");
  std::vector<MultiIndex> all(a.members());
  all.insert(all.end(), b.begin(), b.end());
  return MultiIndexSet(a.dimension(), std::move(all));
}

MultiIndexSet set_difference(const MultiIndexSet& a, const MultiIndexSet& b) {
  if (a.dimension() != b.dimension()) throw InvalidArgument("difference of sets with different dimensions");
  std::vector<MultiIndex> out;
  for (const auto& nu : a) {
    if (!b.contains(nu)) out.push_back(nu);
  }
  return MultiIndexSet(a.dimension(), std::move(out));
}

bool is_subset(const MultiIndexSet& a, const MultiIndexSet& b) {
  if (a.dimension() != b.dimension()) return false;
  return std::all_of(a.begin(), a.end(), [&](const MultiIndex& nu) { return b.contains(nu); });
}

void write_text(std::ostream& out, const MultiIndexSet& set) {
  for (const auto& nu : set) {
    for (std::size_t i = 0; i < nu.size(); ++i) {
      if (i) out << ' ';
      out << nu[i];
    }
    out << '\n';
  }
}

std::string to_text(const MultiIndexSet& set) {
  std::ostringstream os;
  write_text(os, set);
  return os.str();
}

MultiIndexSet read_text(std::istream& in, std::size_t dimension) {
  std::vector<MultiIndex> members;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<int> entries;
    long v = 0;
    while (ls >> v) {
      if (v < 0 || v > 1'000'000) {
        throw InvalidArgument("line " + std::to_string(lineno) + ": degree out of range");
      }
      entries.push_back(static_cast<int>(v));
    }
    if (!ls.eof()) throw InvalidArgument("line " + std::to_string(lineno) + ": not an integer list");
    if (entries.empty()) continue;
    if (dimension == 0) dimension = entries.size();
    if (entries.size() != dimension) {
      throw InvalidArgument("line " + std::to_string(lineno) + ": expected " + std::to_string(dimension) +
                            " entries");
    }
    members.emplace_back(std::move(entries));
  }
  if (dimension == 0) throw InvalidArgument("cannot infer the dimension of an empty multi-index set");
  return MultiIndexSet(dimension, std::move(members));
}

MultiIndexSet from_text(const std::string& text, std::size_t dimension) {
  std::istringstream is(text);
  return read_text(is, dimension);
}

}  // namespace fkpde
