#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace flexlat {

/// Element m*alpha + k*beta of the period lattice, in the basis (alpha, beta).
struct LatticeVector {
  std::int64_t m = 0;
  std::int64_t k = 0;

  friend constexpr auto operator<=>(const LatticeVector&, const LatticeVector&) = default;

  constexpr LatticeVector operator+(LatticeVector o) const { return {m + o.m, k + o.k}; }
  constexpr LatticeVector operator-(LatticeVector o) const { return {m - o.m, k - o.k}; }
  constexpr LatticeVector operator-() const { return {-m, -k}; }
  constexpr LatticeVector& operator+=(LatticeVector o) {
    m += o.m;
    k += o.k;
    return *this;
  }

  constexpr bool is_zero() const { return m == 0 && k == 0; }
  /// m > 0, or m == 0 and k > 0.
  constexpr bool lex_positive() const { return m > 0 || (m == 0 && k > 0); }

  std::string str() const;
};

bool is_primitive(LatticeVector v);
std::int64_t gcd(std::int64_t a, std::int64_t b);

/// Integer 2x2 matrix. Columns are the new basis vectors expressed in the old
/// basis: (a~, b~) = (a, b) C.
struct IntMatrix2 {
  std::array<std::array<std::int64_t, 2>, 2> v{{{1, 0}, {0, 1}}};

  static IntMatrix2 identity() { return {}; }
  static IntMatrix2 diag(std::int64_t x, std::int64_t y) { return {{{{x, 0}, {0, y}}}}; }
  static IntMatrix2 from_rows(std::int64_t c00, std::int64_t c01, std::int64_t c10, std::int64_t c11) {
    return {{{{c00, c01}, {c10, c11}}}};
  }

  std::int64_t operator()(int r, int c) const { return v[r][c]; }
  std::int64_t det() const { return v[0][0] * v[1][1] - v[0][1] * v[1][0]; }
  LatticeVector column(int c) const { return {v[0][c], v[1][c]}; }
  LatticeVector apply(LatticeVector x) const {
    return {v[0][0] * x.m + v[0][1] * x.k, v[1][0] * x.m + v[1][1] * x.k};
  }
  IntMatrix2 operator*(const IntMatrix2& o) const;
  friend bool operator==(const IntMatrix2&, const IntMatrix2&) = default;
};

/// A full-rank sublattice L~ = C Z^2 of Z^2 together with a fixed set of coset
/// representatives. The representatives are the box {0<=x<p, 0<=y<r} of the
/// column Hermite form [[p, 0], [q, r]] of C, enumerated x-major.
class Sublattice {
 public:
  explicit Sublattice(const IntMatrix2& basis);

  const IntMatrix2& basis() const { return basis_; }
  std::int64_t index() const { return p_ * r_; }
  const std::vector<LatticeVector>& coset_representatives() const { return reps_; }

  struct Reduced {
    std::size_t coset = 0;   // index into coset_representatives()
    LatticeVector coords;    // s - rep, written in the sublattice basis
  };
  /// Split s = rep + C * coords.
  Reduced reduce(LatticeVector s) const;

 private:
  IntMatrix2 basis_;
  std::int64_t p_ = 1, q_ = 0, r_ = 1;
  std::vector<LatticeVector> reps_;
};

}  // namespace flexlat
