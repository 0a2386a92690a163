#include <doctest.h>

#include "oracles.hpp"
#include "test_support.hpp"
#include "tfm/error.hpp"
#include "tfm/tensor.hpp"

using namespace tfm;

TEST_CASE("order-2 unfolding at mode 1 is the matrix itself") {
  Tensor x({2, 3}, {1, 2, 3, 4, 5, 6});
  const Matrix m = mode_k_unfold(x, 1);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(m(i, j) == x.at({i, j}));
}

TEST_CASE("2x2x2 canonical tensor unfolds as documented") {
  Tensor x({2, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8});

  const Matrix m1 = mode_k_unfold(x, 1);
  const double want1[2][4] = {{1, 3, 5, 7}, {2, 4, 6, 8}};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(m1(i, j) == want1[i][j]);

  const Matrix m2 = mode_k_unfold(x, 2);
  const double want2[2][4] = {{1, 2, 5, 6}, {3, 4, 7, 8}};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(m2(i, j) == want2[i][j]);

  CHECK_THROWS_AS(mode_k_unfold(x, 4), ModeIndexError);
  CHECK_THROWS_AS(mode_k_unfold(x, 0), ModeIndexError);
}

TEST_CASE("refold inverts unfold and checks shapes") {
  rng::RandomStream stream(7);
  const Tensor x = test::random_tensor(stream, {3, 4, 2});
  for (std::size_t k = 1; k <= 3; ++k) {
    const Tensor back = mode_k_refold(mode_k_unfold(x, k), k, x.dims());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(back.data()[i] == x.data()[i]);
  }

  // refold of [[1,3,5,7],[2,4,6,8]] at k=1 recovers the canonical tensor
  Matrix m1(2, 4);
  const double rows[2][4] = {{1, 3, 5, 7}, {2, 4, 6, 8}};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j) m1(i, j) = rows[i][j];
  const Tensor t = mode_k_refold(m1, 1, {2, 2, 2});
  for (std::size_t i = 0; i < 8; ++i) CHECK(t.data()[i] == double(i + 1));

  CHECK_THROWS_AS(mode_k_refold(m1, 1, {2, 3, 2}), DimensionError);
}

TEST_CASE("mode-k product: identity, rank-one, commutation") {
  rng::RandomStream stream(11);
  const Tensor x = test::random_tensor(stream, {4, 3});
  const Tensor same = mode_k_product(x, Matrix::identity(4), 1);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(same.data()[i] == doctest::Approx(x.data()[i]));

  // rank-one: (u1 (x) u2) x_1 A = (A u1) (x) u2
  Tensor u1({3}, {1.0, -2.0, 0.5});
  Tensor u2({2}, {2.0, 3.0});
  const Tensor r1 = outer_product(u1, u2);
  const Matrix a = test::random_matrix(stream, 5, 3);
  const Tensor lhs = mode_k_product(r1, a, 1);
  std::vector<double> au1 = matvec(a, u1.values());
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < 5; ++i)
      CHECK(lhs.at({i, j}) == doctest::Approx(au1[i] * u2.values()[j]).epsilon(1e-12));

  const Matrix b = test::random_matrix(stream, 2, 3);
  const Tensor xy = mode_k_product(mode_k_product(x, a, 1), b, 2);
  const Tensor yx = mode_k_product(mode_k_product(x, b, 2), a, 1);
  for (std::size_t i = 0; i < xy.size(); ++i)
    CHECK(xy.data()[i] == doctest::Approx(yx.data()[i]).epsilon(1e-12));

  CHECK_THROWS_AS(mode_k_product(x, Matrix(2, 5), 1), DimensionError);
}

TEST_CASE("vec stacks mode-1 fibers") {
  Tensor m({2, 2}, {1, 2, 3, 4});  // columns (1,2) and (3,4)
  const auto v = vec(m);
  CHECK(v == std::vector<double>{1, 2, 3, 4});

  Tensor o1({3}, {5, 6, 7});
  CHECK(vec(o1) == std::vector<double>{5, 6, 7});
}

TEST_CASE("outer product elementwise and identity") {
  Tensor x({2}, {1, 2});
  Tensor y({2}, {3, 4});
  const Tensor xy = outer_product(x, y);
  CHECK(xy.order() == 2);
  CHECK(xy.at({0, 0}) == 3);
  CHECK(xy.at({0, 1}) == 4);
  CHECK(xy.at({1, 0}) == 6);
  CHECK(xy.at({1, 1}) == 8);

  Tensor one({1}, {1.0});
  const Tensor same = outer_product(x, one);
  CHECK(same.size() == 2);
  CHECK(same.data()[0] == 1);
  CHECK(same.data()[1] == 2);
}

TEST_CASE("tensor constructors enforce invariants") {
  CHECK_THROWS_AS(Tensor({2, 3}, {1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(Tensor(std::vector<std::size_t>{}), DimensionError);
  CHECK_THROWS_AS(Tensor({2, 0}), DimensionError);
  CHECK_THROWS_AS(TensorSeries({2}, 0), DimensionError);

  TensorSeries s({2}, 1);
  CHECK_THROWS_AS(s.push_back(Tensor({3})), DimensionError);
}
