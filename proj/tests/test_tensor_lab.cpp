#include <doctest.h>

#include <cmath>

#include "conekit/base_geometry.hpp"
#include "conekit/errors.hpp"
#include "conekit/tensor_lab.hpp"
#include "oracles.hpp"

using namespace conekit;

namespace {

MetricField euclidean(int d) {
  return {d, [d](CoordinateSpan) {
            JetMatrix g(d);
            for (int i = 0; i < d; ++i) g(i, i) = 1.0;
            return g;
          },
          "euclidean"};
}

MetricField polar_plane() {
  return {2, [](CoordinateSpan q) {
            JetMatrix g(2);
            g(0, 0) = 1.0;
            g(1, 1) = q[0] * q[0];
            return g;
          },
          "polar"};
}

MetricField round_sphere() {
  return {2, [](CoordinateSpan q) {
            JetMatrix g(2);
            g(0, 0) = 1.0;
            const Jet2 s = sin(q[0]);
            g(1, 1) = s * s;
            return g;
          },
          "sphere"};
}

// A lumpy positive-definite metric on R³ with no symmetries.
MetricField lumpy() {
  return {3, [](CoordinateSpan q) {
            JetMatrix g(3);
            const Jet2 &x = q[0], &y = q[1], &z = q[2];
            g(0, 0) = 2.0 + x * x + 0.3 * sin(y);
            g(1, 1) = 1.5 + y * y * z + 0.2 * cos(x * z);
            g(2, 2) = 1.0 + exp(0.3 * x) * 0.5;
            g(0, 1) = g(1, 0) = 0.2 * x * y;
            g(0, 2) = g(2, 0) = 0.1 * sin(z + x);
            g(1, 2) = g(2, 1) = 0.15 * y * z * x;
            return g;
          },
          "lumpy"};
}

}  // namespace

TEST_CASE("jet arithmetic follows product and chain rules") {
  const Jet2 x = Jet2::variable(0.7, 0, 2);
  const Jet2 y = Jet2::variable(-1.3, 1, 2);
  // f = x³y + x/y: hand derivatives
  const Jet2 f = x * x * x * y + x / y;
  const double xv = 0.7, yv = -1.3;
  CHECK(f.value() == doctest::Approx(xv * xv * xv * yv + xv / yv).epsilon(1e-15));
  CHECK(f.d(0) == doctest::Approx(3 * xv * xv * yv + 1 / yv).epsilon(1e-14));
  CHECK(f.d(1) == doctest::Approx(xv * xv * xv - xv / (yv * yv)).epsilon(1e-14));
  CHECK(f.dd(0, 0) == doctest::Approx(6 * xv * yv).epsilon(1e-14));
  CHECK(f.dd(0, 1) == doctest::Approx(3 * xv * xv - 1 / (yv * yv)).epsilon(1e-14));
  CHECK(f.dd(1, 0) == f.dd(0, 1));
  CHECK(f.dd(1, 1) == doctest::Approx(2 * xv / (yv * yv * yv)).epsilon(1e-14));

  const Jet2 g = sqrt(exp(x) + log(1.0 + y * y));
  const double inner = std::exp(xv) + std::log(1 + yv * yv);
  CHECK(g.d(0) == doctest::Approx(std::exp(xv) / (2 * std::sqrt(inner))).epsilon(1e-14));
  const double dy_inner = 2 * yv / (1 + yv * yv);
  CHECK(g.d(1) == doctest::Approx(dy_inner / (2 * std::sqrt(inner))).epsilon(1e-14));
}

TEST_CASE("metric jets agree with central differences") {
  const BaseManifold b = fubini_study_base(2);
  const std::vector<MetricField> fields{lumpy(), b.metric_field()};
  const std::vector<std::vector<double>> points{{0.3, -0.4, 0.8}, {0.2, -0.5, 0.4, 0.1}};
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const auto& p = points[f];
    const auto vars = seed_variables(p);
    const JetMatrix g = fields[f].eval(vars);
    double worst = 0.0;
    for (int k = 0; k < fields[f].dim; ++k) {
      const Eigen::MatrixXd fd = oracle::fd_metric_derivative(fields[f], p, k);
      const Eigen::MatrixXd jet = g.derivative(k);
      worst = std::max(worst, (fd - jet).cwiseAbs().maxCoeff() / std::max(1.0, jet.cwiseAbs().maxCoeff()));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("christoffel symbols") {
  SUBCASE("flat space vanishes") {
    const Christoffel c = christoffel(euclidean(4), std::vector<double>{0.1, 2.0, -3.0, 0.5});
    for (double v : c.data) CHECK(v == 0.0);
  }
  SUBCASE("polar plane at r = 2") {
    const Christoffel c = christoffel(polar_plane(), std::vector<double>{2.0, 0.3});
    CHECK(c(0, 1, 1) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(c(1, 0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c(1, 1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c(0, 0, 0) == 0.0);
  }
  SUBCASE("Fubini-Study at the origin matches the difference oracle") {
    const MetricField g = fubini_study_base(1).metric_field();
    const std::vector<double> p{0.0, 0.0};
    const Christoffel c = christoffel(g, p);
    const auto fd = oracle::fd_christoffel(g, p);
    for (std::size_t i = 0; i < fd.size(); ++i) CHECK(c.data[i] == doctest::Approx(fd[i]).epsilon(1e-7).scale(1.0));
  }
  SUBCASE("lumpy metric: symmetric lower indices, matches the oracle") {
    const MetricField g = lumpy();
    const std::vector<double> p{0.3, -0.4, 0.8};
    const Christoffel c = christoffel(g, p);
    const auto fd = oracle::fd_christoffel(g, p);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          CHECK(c(k, i, j) == c(k, j, i));
          CHECK(std::abs(c(k, i, j) - fd[static_cast<std::size_t>((k * 3 + i) * 3 + j)]) < 1e-8);
        }
  }
}

TEST_CASE("ricci curvature") {
  SUBCASE("flat space") { CHECK(ricci(euclidean(3), std::vector<double>{1, 2, 3}).max_abs_ricci == 0.0); }
  SUBCASE("unit sphere is Einstein with constant 1") {
    const CurvatureReport r = ricci(round_sphere(), std::vector<double>{0.9, 1.7});
    CHECK(r.einstein_residual(1.0) < 1e-10);
    CHECK(r.scalar == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("calibrated CP2 base has Ric = 6 g") {
    const CurvatureReport r = ricci(fubini_study_base(2).metric_field(), std::vector<double>{0.3, -0.2, 0.5, 0.4});
    CHECK(r.einstein_residual(6.0) < 1e-7);
  }
  SUBCASE("scalar curvature is the trace of g^-1 Ric") {
    const CurvatureReport r = ricci(lumpy(), std::vector<double>{0.3, -0.4, 0.8});
    CHECK(std::abs(r.scalar - (r.metric.inverse() * r.ricci).trace()) < 1e-10);
  }
  SUBCASE("constant rescaling leaves Ric unchanged") {
    const std::vector<double> p{0.3, -0.4, 0.8};
    const CurvatureReport a = ricci(lumpy(), p);
    const CurvatureReport b = ricci(scaled(lumpy(), 3.7), p);
    CHECK((a.ricci - b.ricci).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("first Bianchi identity") {
  const Riemann r = riemann(lumpy(), std::vector<double>{0.3, -0.4, 0.8});
  double worst = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) worst = std::max(worst, std::abs(r(a, b, c, d) + r(a, c, d, b) + r(a, d, b, c)));
  CHECK(worst < 1e-9);
}

TEST_CASE("singular metric reports its condition number") {
  MetricField degenerate{2, [](CoordinateSpan) {
                           JetMatrix g(2);
                           g(0, 0) = 1.0;
                           return g;
                         },
                         "degenerate"};
  CHECK_THROWS_AS(ricci(degenerate, std::vector<double>{0.0, 0.0}), NumericError);
}

TEST_CASE("exterior derivatives") {
  SUBCASE("d(x dy) = dx ^ dy") {
    CovectorField a{2, [](CoordinateSpan q) { return JetVector{Jet2(0.0), q[0]}; }};
    const Eigen::MatrixXd da = exterior_derivative(a, std::vector<double>{0.4, -1.1});
    CHECK(da(0, 1) == 1.0);
    CHECK(da(1, 0) == -1.0);
  }
  SUBCASE("d(df) = 0") {
    ScalarField f{3, [](CoordinateSpan q) { return sin(q[0] * q[1]) * exp(q[2]) + q[0] * q[0] * q[2]; }};
    CHECK(max_abs(second_exterior_derivative(f, std::vector<double>{0.3, 0.7, -0.2})) < 1e-12);
  }
  SUBCASE("base connection satisfies dA = 2 omega") {
    const BaseManifold b = fubini_study_base(2);
    const std::vector<double> p{0.3, -0.2, 0.5, 0.4};
    const Eigen::MatrixXd da = exterior_derivative(b.connection_field(), p);
    const Eigen::MatrixXd w = oracle::metric_value({b.real_dim(), b.kahler_form_field().eval, ""}, p);
    CHECK((da - 2.0 * w).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("nijenhuis tensor") {
  SUBCASE("constant standard J on R4") {
    EndomorphismField j{4, [](CoordinateSpan) {
                          JetMatrix m(4);
                          m(1, 0) = 1.0;
                          m(0, 1) = -1.0;
                          m(3, 2) = 1.0;
                          m(2, 3) = -1.0;
                          return m;
                        }};
    CHECK(max_abs(nijenhuis(j, std::vector<double>{1, 2, 3, 4})) == 0.0);
  }
  SUBCASE("Fubini-Study J is integrable") {
    const BaseManifold b = fubini_study_base(2);
    const EndomorphismField j = complex_structure(b.metric_field(), b.kahler_form_field());
    CHECK(max_abs(nijenhuis(j, std::vector<double>{0.3, -0.2, 0.5, 0.4})) < 1e-9);
  }
  SUBCASE("J squared away from -1 is a precondition failure") {
    EndomorphismField j{2, [](CoordinateSpan) {
                          JetMatrix m(2);
                          m(1, 0) = 2.0;
                          m(0, 1) = -2.0;
                          return m;
                        }};
    CHECK_THROWS_AS(nijenhuis(j, std::vector<double>{0.0, 0.0}), PreconditionError);
  }
}
