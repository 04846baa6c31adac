#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "eigcollide/curves.hpp"
#include "eigcollide/permutation.hpp"

namespace eigcollide {

/// Mutual nearest neighbours form a perfect matching; transport[i] is the
/// b-index paired with a[i].
struct Matched {
  Permutation transport;
};

/// Indices claimed as nearest by two or more points of the other list.
struct Conflict {
  std::vector<int> contested_b;
  std::vector<int> contested_a;
};

using MatchResult = std::variant<Matched, Conflict>;

inline bool is_matched(const MatchResult& r) { return std::holds_alternative<Matched>(r); }

namespace detail {

/// Index of the point of `pts` nearest to q; ties go to the lower index.
inline int nearest_index(std::span<const Complex> pts, Complex q) {
  int best = 0;
  double bd = std::norm(pts[0] - q);
  for (std::size_t j = 1; j < pts.size(); ++j) {
    const double d = std::norm(pts[j] - q);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

inline std::vector<int> contested(const std::vector<int>& claims, std::size_t n) {
  std::vector<int> count(n, 0), out;
  for (int c : claims) ++count[c];
  for (std::size_t j = 0; j < n; ++j)
    if (count[j] > 1) out.push_back(static_cast<int>(j));
  return out;
}

inline MatchResult match_from_nearest(const std::vector<int>& ab, const std::vector<int>& ba) {
  bool mutual = true;
  for (std::size_t i = 0; i < ab.size() && mutual; ++i) mutual = ba[ab[i]] == static_cast<int>(i);
  if (mutual) return Matched{Permutation(ab)};
  return Conflict{contested(ab, ba.size()), contested(ba, ab.size())};
}

}  // namespace detail

/// Greedy mutual-nearest matching of two equally long point lists.
inline MatchResult greedy_match(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw std::invalid_argument("greedy_match: lists differ in length");
  if (a.empty()) throw std::invalid_argument("greedy_match: empty lists");
  std::vector<int> ab(a.size()), ba(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ab[i] = detail::nearest_index(b, a[i]);
  for (std::size_t j = 0; j < b.size(); ++j) ba[j] = detail::nearest_index(a, b[j]);
  return detail::match_from_nearest(ab, ba);
}

}  // namespace eigcollide
