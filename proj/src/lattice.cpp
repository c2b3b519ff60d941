#include "flexlat/lattice.hpp"

#include <cstdlib>
#include <stdexcept>

namespace flexlat {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Returns g = gcd(a, b) >= 0 and x, y with a*x + b*y = g.
std::int64_t extended_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
  std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    std::int64_t quot = old_r / r;
    std::int64_t tmp = old_r - quot * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quot * s;
    old_s = s;
    s = tmp;
    tmp = old_t - quot * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  x = old_s;
  y = old_t;
  return old_r;
}

}  // namespace

std::string LatticeVector::str() const { return "(" + std::to_string(m) + "," + std::to_string(k) + ")"; }

std::int64_t gcd(std::int64_t a, std::int64_t b) {
  a = std::llabs(a);
  b = std::llabs(b);
  while (b != 0) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool is_primitive(LatticeVector v) { return gcd(v.m, v.k) == 1; }

IntMatrix2 IntMatrix2::operator*(const IntMatrix2& o) const {
  IntMatrix2 out;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) out.v[r][c] = v[r][0] * o.v[0][c] + v[r][1] * o.v[1][c];
  return out;
}

Sublattice::Sublattice(const IntMatrix2& basis) : basis_(basis) {
  if (basis.det() == 0) throw std::invalid_argument("singular sublattice basis");

  // Column operations on C to reach [[p, 0], [q, r]].
  std::int64_t x = 0, y = 0;
  const std::int64_t c00 = basis(0, 0), c01 = basis(0, 1);
  const std::int64_t g = extended_gcd(c00, c01, x, y);
  LatticeVector col1 = LatticeVector{basis(0, 0) * x + basis(0, 1) * y, basis(1, 0) * x + basis(1, 1) * y};
  LatticeVector col2 = LatticeVector{basis(0, 0) * (-c01 / g) + basis(0, 1) * (c00 / g),
                                     basis(1, 0) * (-c01 / g) + basis(1, 1) * (c00 / g)};
  // col1 = (g, *), col2 = (0, *)
  p_ = col1.m;
  r_ = std::llabs(col2.k);
  q_ = col1.k - floor_div(col1.k, r_) * r_;

  reps_.reserve(static_cast<std::size_t>(p_ * r_));
  for (std::int64_t i = 0; i < p_; ++i)
    for (std::int64_t j = 0; j < r_; ++j) reps_.push_back({i, j});
}

Sublattice::Reduced Sublattice::reduce(LatticeVector s) const {
  const std::int64_t t = floor_div(s.m, p_);
  const std::int64_t x = s.m - t * p_;
  const std::int64_t y0 = s.k - t * q_;
  const std::int64_t u = floor_div(y0, r_);
  const std::int64_t y = y0 - u * r_;

  Reduced out;
  out.coset = static_cast<std::size_t>(x * r_ + y);
  const LatticeVector diff = s - LatticeVector{x, y};
  // Solve C w = diff with the adjugate.
  const std::int64_t d = basis_.det();
  const std::int64_t wm = basis_(1, 1) * diff.m - basis_(0, 1) * diff.k;
  const std::int64_t wk = -basis_(1, 0) * diff.m + basis_(0, 0) * diff.k;
  if (wm % d != 0 || wk % d != 0) throw std::logic_error("coset reduction left the sublattice");
  out.coords = {wm / d, wk / d};
  return out;
}

}  // namespace flexlat
