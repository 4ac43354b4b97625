#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "owl/dataset.hpp"

using owl::Index;
using owl::Vector;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content) : path(name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("libsvm loading") {
  SECTION("single sample, gaps filled with zeros") {
    TempFile f("libsvm_t1.txt", "1.5 1:0.5 3:-2\n");
    auto m = owl::load_libsvm(f.path);
    REQUIRE(m.n() == 1);
    REQUIRE(m.d() == 3);
    CHECK(m.X(0, 0) == 0.5);
    CHECK(m.X(0, 1) == 0.0);
    CHECK(m.X(0, 2) == -2.0);
    CHECK(m.y[0] == 1.5);
  }

  SECTION("label-only line becomes a zero row") {
    TempFile f("libsvm_t2.txt", "1.0 2:4\n2.0\n");
    auto m = owl::load_libsvm(f.path);
    REQUIRE(m.n() == 2);
    REQUIRE(m.d() == 2);
    CHECK(m.X.row(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.y[1] == 2.0);
  }

  SECTION("non-increasing indices are a parse error with the line number") {
    TempFile f("libsvm_t3.txt", "1.0 3:1 2:1\n");
    CHECK_THROWS_WITH(owl::load_libsvm(f.path), Catch::Matchers::ContainsSubstring("line 1"));
  }

  SECTION("bad value reports its line") {
    TempFile f("libsvm_t4.txt", "1.0 1:2\n2.0 1:x\n");
    CHECK_THROWS_WITH(owl::load_libsvm(f.path), Catch::Matchers::ContainsSubstring("line 2"));
  }

  SECTION("empty file") {
    TempFile f("libsvm_t5.txt", "");
    CHECK_THROWS_WITH(owl::load_libsvm(f.path), Catch::Matchers::ContainsSubstring("empty"));
  }

  SECTION("missing file") {
    CHECK_THROWS_WITH(owl::load_libsvm("no_such_file.libsvm"),
                      Catch::Matchers::ContainsSubstring("cannot open"));
  }

  SECTION("column norms are cached correctly") {
    TempFile f("libsvm_t6.txt", "1 1:3 2:4\n0 1:4\n");
    auto m = owl::load_libsvm(f.path);
    CHECK(m.col_norms[0] == Catch::Approx(5.0));
    CHECK(m.col_norms[1] == Catch::Approx(4.0));
    CHECK((owl::compute_col_norms(m.X) - m.col_norms).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("csv loading") {
  SECTION("named target column") {
    TempFile f("csv_t1.csv", "a,b,t\n1,2,3\n");
    auto m = owl::load_csv(f.path, "t");
    REQUIRE(m.n() == 1);
    REQUIRE(m.d() == 2);
    CHECK(m.X(0, 0) == 1.0);
    CHECK(m.X(0, 1) == 2.0);
    CHECK(m.y[0] == 3.0);
  }

  SECTION("target defaults to the last column") {
    TempFile f("csv_t2.csv", "a,b,t\n4,5,6\n");
    auto m = owl::load_csv(f.path);
    CHECK(m.y[0] == 6.0);
  }

  SECTION("target in the middle") {
    TempFile f("csv_t3.csv", "a,t,b\n1,9,2\n");
    auto m = owl::load_csv(f.path, "t");
    CHECK(m.y[0] == 9.0);
    CHECK(m.X(0, 0) == 1.0);
    CHECK(m.X(0, 1) == 2.0);
  }

  SECTION("non-numeric cell names column and row") {
    TempFile f("csv_t4.csv", "a,b,t\n1,x,3\n");
    CHECK_THROWS_WITH(owl::load_csv(f.path, "t"),
                      Catch::Matchers::ContainsSubstring("column b, row 1"));
  }

  SECTION("ragged row") {
    TempFile f("csv_t5.csv", "a,b,t\n1,2,3\n1,2\n");
    CHECK_THROWS_WITH(owl::load_csv(f.path), Catch::Matchers::ContainsSubstring("row 2"));
  }

  SECTION("no samples") {
    TempFile f("csv_t6.csv", "a,b,t\n");
    CHECK_THROWS_WITH(owl::load_csv(f.path), Catch::Matchers::ContainsSubstring("no samples"));
  }

  SECTION("missing target column") {
    TempFile f("csv_t7.csv", "a,b\n1,2\n");
    CHECK_THROWS_WITH(owl::load_csv(f.path, "zz"),
                      Catch::Matchers::ContainsSubstring("no column named 'zz'"));
  }
}

TEST_CASE("standardize") {
  owl::Matrix X(2, 2);
  X << 1, 3, -1, 3;
  Vector y(2);
  y << 1, 3;
  auto m = owl::make_design_matrix(X, y);

  auto s = owl::standardize(m, true);
  CHECK(s.X(0, 0) == Catch::Approx(1.0 / std::sqrt(2.0)));
  CHECK(s.X(1, 0) == Catch::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(s.col_norms[0] == Catch::Approx(1.0));
  // constant column collapses to zeros with zero norm
  CHECK(s.X(0, 1) == 0.0);
  CHECK(s.X(1, 1) == 0.0);
  CHECK(s.col_norms[1] == 0.0);
  // y = [1,3] centered is [-1,1]
  CHECK(s.y[0] == Catch::Approx(-1.0));
  CHECK(s.y[1] == Catch::Approx(1.0));

  SECTION("idempotent up to rounding") {
    std::mt19937_64 rng(21);
    auto r = owl::make_design_matrix(oracle::random_matrix(20, 6, rng),
                                     oracle::random_vector(20, rng));
    auto once = owl::standardize(r, true);
    auto twice = owl::standardize(once, true);
    CHECK((once.X - twice.X).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK((once.y - twice.y).lpNorm<Eigen::Infinity>() < 1e-12);
  }

  SECTION("needs two samples") {
    auto tiny = owl::make_design_matrix(owl::Matrix::Ones(1, 1), Vector::Ones(1));
    CHECK_THROWS_AS(owl::standardize(tiny), std::invalid_argument);
  }
}

TEST_CASE("synthetic generation") {
  SECTION("zero noise means y = X beta exactly") {
    owl::SyntheticSpec spec{4, 6, 1, 1, 0.0, 7};
    auto [m, beta] = owl::generate_synthetic(spec);
    CHECK((m.y - m.X * beta).norm() == 0.0);
    CHECK(beta.cwiseAbs().sum() == 1.0);  // one nonzero of magnitude 1
  }

  SECTION("same seed, same bytes") {
    owl::SyntheticSpec spec{4, 6, 1, 1, 0.0, 7};
    auto [m1, b1] = owl::generate_synthetic(spec);
    auto [m2, b2] = owl::generate_synthetic(spec);
    CHECK(m1.X == m2.X);
    CHECK(m1.y == m2.y);
    CHECK(b1 == b2);
  }

  SECTION("grouped columns are strongly correlated") {
    owl::SyntheticSpec spec{300, 9, 2, 3, 0.0, 5};
    auto [m, beta] = owl::generate_synthetic(spec);
    for (Index g = 0; g < 2; ++g) {
      for (Index a = 0; a < 3; ++a) {
        for (Index b = a + 1; b < 3; ++b) {
          Vector u = m.X.col(3 * g + a);
          Vector v = m.X.col(3 * g + b);
          u.array() -= u.mean();
          v.array() -= v.mean();
          const double corr = u.dot(v) / (u.norm() * v.norm());
          CHECK(corr > 0.9);
        }
      }
    }
    // magnitude-1 coefficients, signs shared within a group, rest zero
    CHECK(beta[0] == beta[1]);
    CHECK(beta[1] == beta[2]);
    CHECK(beta.head(6).cwiseAbs().minCoeff() == 1.0);
    CHECK(beta.tail(3).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("invalid specs are rejected") {
    CHECK_THROWS_AS(owl::generate_synthetic({4, 0, 0, 1, 0.0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(owl::generate_synthetic({4, 6, 7, 1, 0.0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(owl::generate_synthetic({4, 6, 2, 4, 0.0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(owl::generate_synthetic({4, 6, 1, 1, -0.1, 0}), std::invalid_argument);
  }
}

TEST_CASE("rmse") {
  Vector a(2), b(2);
  a << 1, 2;
  b << 1, 2;
  CHECK(owl::rmse(a, b) == 0.0);
  a << 0, 0;
  b << 3, 4;
  CHECK(owl::rmse(a, b) == Catch::Approx(std::sqrt(25.0 / 2.0)));
  Vector u(1), v(1);
  u << -1.5;
  v << 2.0;
  CHECK(owl::rmse(u, v) == Catch::Approx(3.5));
  CHECK_THROWS_AS(owl::rmse(a, u), std::invalid_argument);
}

TEST_CASE("design matrix construction rejects bad input") {
  CHECK_THROWS_AS(owl::make_design_matrix(owl::Matrix::Ones(2, 2), Vector::Ones(3)),
                  std::invalid_argument);
  owl::Matrix bad = owl::Matrix::Ones(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(owl::make_design_matrix(bad, Vector::Ones(2)), std::invalid_argument);
}
