#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace eigcollide {

/// Bijection on {0..n-1}, stored as its image table: p[i] is where i goes.
///
/// Transport maps between eigenvalue lists use the same convention: if p maps
/// list A to list B then the eigenvalue at A[i] continues as B[p[i]].
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<int> image) : image_(std::move(image)) {
    if (!is_bijection(image_)) throw std::invalid_argument("Permutation: image is not a bijection");
  }

  Permutation(std::initializer_list<int> image) : Permutation(std::vector<int>(image)) {}

  static Permutation identity(std::size_t n) {
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    return Permutation(std::move(v), Unchecked{});
  }

  /// Builds the permutation from disjoint cycles on n symbols.
  static Permutation from_cycles(std::size_t n, const std::vector<std::vector<int>>& cycles) {
    auto p = identity(n);
    for (const auto& c : cycles)
      for (std::size_t k = 0; k < c.size(); ++k) p.image_[c[k]] = c[(k + 1) % c.size()];
    if (!is_bijection(p.image_)) throw std::invalid_argument("Permutation: cycles overlap");
    return p;
  }

  static bool is_bijection(const std::vector<int>& image) {
    std::vector<char> seen(image.size(), 0);
    for (int v : image) {
      if (v < 0 || static_cast<std::size_t>(v) >= image.size() || seen[v]) return false;
      seen[v] = 1;
    }
    return true;
  }

  std::size_t size() const noexcept { return image_.size(); }
  int operator[](std::size_t i) const { return image_[i]; }
  const std::vector<int>& image() const noexcept { return image_; }

  bool is_identity() const noexcept {
    for (std::size_t i = 0; i < image_.size(); ++i)
      if (image_[i] != static_cast<int>(i)) return false;
    return true;
  }

  Permutation inverse() const {
    std::vector<int> inv(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = static_cast<int>(i);
    return Permutation(std::move(inv), Unchecked{});
  }

  /// Apply this, then `next`: i -> next[this[i]].
  Permutation then(const Permutation& next) const {
    if (next.size() != size()) throw std::invalid_argument("Permutation::then: size mismatch");
    std::vector<int> out(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) out[i] = next.image_[image_[i]];
    return Permutation(std::move(out), Unchecked{});
  }

  /// Re-express this permutation in the labels of the far end of `path`:
  /// path^-1 then this then path.
  Permutation transported_along(const Permutation& path) const {
    return path.inverse().then(*this).then(path);
  }

  /// Cycles including fixed points, each starting at its smallest element,
  /// ordered by that element.
  std::vector<std::vector<int>> cycles() const {
    std::vector<std::vector<int>> out;
    std::vector<char> seen(image_.size(), 0);
    for (std::size_t start = 0; start < image_.size(); ++start) {
      if (seen[start]) continue;
      std::vector<int> c;
      for (int k = static_cast<int>(start); !seen[k]; k = image_[k]) {
        seen[k] = 1;
        c.push_back(k);
      }
      out.push_back(std::move(c));
    }
    return out;
  }

  /// Length of the cycle containing each index.
  std::vector<int> cycle_lengths() const {
    std::vector<int> len(image_.size());
    for (const auto& c : cycles())
      for (int k : c) len[k] = static_cast<int>(c.size());
    return len;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Permutation& p) {
    bool any = false;
    for (const auto& c : p.cycles()) {
      if (c.size() < 2) continue;
      any = true;
      os << '(';
      for (std::size_t k = 0; k < c.size(); ++k) os << (k ? " " : "") << c[k];
      os << ')';
    }
    if (!any) os << "()";
    return os;
  }

 private:
  struct Unchecked {};
  Permutation(std::vector<int> image, Unchecked) : image_(std::move(image)) {}

  std::vector<int> image_;
};

}  // namespace eigcollide
