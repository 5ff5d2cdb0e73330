// Copyright 2026 The darkzeno Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "darkzeno/hilbert.hpp"

using namespace darkzeno;
using Catch::Approx;

TEST_CASE("product space dimensions", "[hilbert]") {
  CHECK(build_space(1).dim() == 8);
  CHECK(build_space(2).dim() == 12);
  CHECK(build_space(5).dim() == 24);
  CHECK_THROWS_MATCHES(build_space(0), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::invalid_truncation;
                       }));
}

TEST_CASE("index map is a photon-major bijection", "[hilbert]") {
  for (int n_max : {1, 2, 3}) {
    const auto space = build_space(n_max);
    std::set<BasisState> seen;
    for (int i = 0; i < space.dim(); ++i) {
      const auto s = space.state_of(i);
      CHECK(space.index_of(s) == i);
      CHECK(i == s.n_ph * 4 + s.s1 * 2 + s.s2);
      seen.insert(s);
    }
    CHECK(static_cast<int>(seen.size()) == space.dim());
  }
  const auto space = build_space(1);
  CHECK(space.index_of({0, 0, 0}) == 0);
  CHECK(space.state_of(space.index_of({1, 0, 1})) == BasisState{1, 0, 1});
  CHECK_THROWS_AS(space.index_of({2, 0, 0}), Error);
  CHECK_THROWS_AS(space.index_of({0, 2, 0}), Error);
  CHECK_THROWS_AS(space.state_of(8), Error);
  CHECK_THROWS_AS(space.state_of(-1), Error);
}

TEST_CASE("excitation cap keeps the low sectors", "[hilbert]") {
  const auto cap1 = build_space(1, 1);
  REQUIRE(cap1.dim() == 4);
  CHECK(cap1.states() == std::vector<BasisState>{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}});
  CHECK(build_space(2, 2).dim() == 8);
  CHECK_FALSE(cap1.contains({0, 1, 1}));
  CHECK_THROWS_AS(cap1.index_of({0, 1, 1}), Error);
  CHECK(cap1.parent() == build_space(1));
}

TEST_CASE("photon ladder", "[hilbert]") {
  const auto space = build_space(2);
  const Operator a = photon_annihilation(space);
  for (int s1 = 0; s1 <= 1; ++s1) {
    for (int s2 = 0; s2 <= 1; ++s2) {
      CHECK(a(space.index_of({0, s1, s2}), space.index_of({1, s1, s2})).real() == Approx(1.0));
      CHECK(a(space.index_of({1, s1, s2}), space.index_of({2, s1, s2})).real() == Approx(std::sqrt(2.0)));
      CHECK(a.col(space.index_of({0, s1, s2})).norm() == 0.0);
    }
  }
  // only the sqrt(n) entries are nonzero
  double expected = 0.0;
  for (int n = 1; n <= 2; ++n) expected += 4.0 * n;
  CHECK(a.squaredNorm() == Approx(expected));

  // [a, a^dag] = 1 below the truncation edge
  const Operator c = commutator(a, a.adjoint());
  for (int i = 0; i < space.dim(); ++i) {
    for (int j = 0; j < space.dim(); ++j) {
      if (space.state_of(i).n_ph == space.n_max() || space.state_of(j).n_ph == space.n_max()) continue;
      CHECK(std::abs(c(i, j) - (i == j ? 1.0 : 0.0)) < 1e-14);
    }
  }
}

TEST_CASE("atomic lowering and projectors", "[hilbert]") {
  const auto space = build_space(2);
  const Operator id = Operator::Identity(space.dim(), space.dim());
  for (int atom : {1, 2}) {
    const Operator s = atomic_lowering(space, atom);
    CHECK(max_abs(s * s) == 0.0);
    CHECK(max_abs(s.adjoint() * s + s * s.adjoint() - id) < 1e-15);
    const Operator d = excitation_projector(space, atom);
    CHECK(max_abs(d * d - d) < 1e-15);
    CHECK(hermiticity_deviation(d) == 0.0);
  }
  const Operator s1 = atomic_lowering(space, 1);
  for (int n = 0; n <= 2; ++n) {
    for (int s2 = 0; s2 <= 1; ++s2) {
      CHECK(s1(space.index_of({n, 0, s2}), space.index_of({n, 1, s2})) == Complex(1.0, 0.0));
    }
  }
  CHECK_THROWS_MATCHES(atomic_lowering(space, 3), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::invalid_argument;
                       }));
}

TEST_CASE("operators on different factors commute", "[hilbert]") {
  const auto space = build_space(3);
  const Operator a = photon_annihilation(space);
  const Operator s1 = atomic_lowering(space, 1);
  const Operator s2 = atomic_lowering(space, 2);
  CHECK(max_abs(commutator(s1, s2)) == 0.0);
  CHECK(max_abs(commutator(a, s1)) == 0.0);
  CHECK(max_abs(commutator(a, s2)) == 0.0);
  CHECK(max_abs(commutator(a, s1.adjoint())) == 0.0);
}

TEST_CASE("compressed operators match the product-space entries", "[hilbert]") {
  const auto full = build_space(1);
  const auto cap = build_space(1, 1);
  const Operator a_full = photon_annihilation(full);
  const Operator a_cap = photon_annihilation(cap);
  for (const auto& r : cap.states()) {
    for (const auto& c : cap.states()) {
      CHECK(a_cap(cap.index_of(r), cap.index_of(c)) == a_full(full.index_of(r), full.index_of(c)));
    }
  }
  CHECK(max_abs(cap.compress(cap.embed(a_cap)) - a_cap) == 0.0);
}

TEST_CASE("density matrix validation", "[hilbert]") {
  const auto space = build_space(1);
  const StateVector psi = basis_vector(space, {0, 0, 1});
  const auto rho = DensityMatrix::pure(psi);
  CHECK(rho.matrix()(1, 1) == Complex(1.0, 0.0));
  CHECK_THROWS_AS(DensityMatrix(2.0 * rho.matrix()), Error);
  Operator bad = rho.matrix();
  bad(0, 1) = Complex(0.0, 1e-3);
  CHECK_THROWS_AS(DensityMatrix(bad), Error);
  Operator neg = Operator::Zero(8, 8);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix(neg), Error);
  CHECK_THROWS_AS(DensityMatrix::pure(2.0 * psi), Error);

  const auto d = diagnose(rho.matrix());
  CHECK(d.trace_deviation == 0.0);
  CHECK(d.min_eigenvalue == Approx(0.0).margin(1e-15));
}
