#pragma once

#include <random>
#include <vector>

#include "flexlat/builders.hpp"
#include "flexlat/reduction.hpp"

namespace flexlat::testing {

inline PlaneModel unit_plane(const IntMatrix2& C = IntMatrix2::identity()) {
  return triangulated_plane(Vec3(1, 0, 0), Vec3(0, 1, 0), C);
}

inline MiuraParams reference_miura() { return {1.0471975511965976, 2.0, 2.0, 0.3}; }

inline Realization random_realization(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Realization r;
  for (int i = 0; i < n; ++i) r.positions.push_back(Vec3(u(rng), u(rng), u(rng)));
  do {
    r.a = Vec3(u(rng), u(rng), u(rng));
    r.b = Vec3(u(rng), u(rng), u(rng));
  } while (r.lattice_area_sq() < 0.05 * r.a.squaredNorm() * r.b.squaredNorm());
  return r;
}

inline IntMatrix2 random_sublattice(std::mt19937& rng) {
  std::uniform_int_distribution<int> d(-2, 2);
  IntMatrix2 C;
  do {
    C = IntMatrix2::from_rows(d(rng), d(rng), d(rng), d(rng));
  } while (C.det() == 0 || std::abs(C.det()) > 4);
  return C;
}

/// Random star subdivisions and flips; every intermediate complex is valid.
inline PeriodicComplex scramble(PeriodicComplex c, int moves, std::mt19937& rng) {
  for (int m = 0; m < moves; ++m) {
    if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
      const auto& tris = c.triangles();
      c = star_subdivide(c, tris[std::uniform_int_distribution<std::size_t>(0, tris.size() - 1)(rng)]);
      continue;
    }
    std::vector<std::pair<int, int>> options;
    for (int u = 0; u < c.n_orbits(); ++u)
      for (int i : valid_diagonals(c, u)) options.push_back({u, i});
    if (options.empty()) continue;
    const auto [u, i] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    PeriodicComplex next = flip(c, u, i);
    if (validate(next).ok()) c = std::move(next);
  }
  return c;
}

}  // namespace flexlat::testing
