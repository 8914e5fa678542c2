#include <doctest.h>

#include <cmath>
#include <random>

#include "lrr/models.hpp"
#include "lrr/linalg.hpp"
#include "lrr/spectral.hpp"

using namespace lrr;

namespace {
IntVector iv(std::initializer_list<int> v) {
  IntVector out(static_cast<int>(v.size()));
  int i = 0;
  for (int x : v) out[i++] = x;
  return out;
}
RealVector rv(std::initializer_list<double> v) {
  RealVector out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}
const double kDiracK = 2.0 * kPi / 3.0;
}  // namespace

TEST_CASE("band structure: 1-D Laplacian dispersion on the grid") {
  auto L = laplacian(1);
  auto bs = band_structure(L, 9);
  for (std::size_t i = 0; i < bs.grid.size(); ++i) {
    const double k = bs.grid.point(i)[0];
    CHECK(bs.bands(i, 0) ==
          doctest::Approx(2.0 - 2.0 * std::cos(k)).epsilon(1e-13));
  }
}

TEST_CASE("band structure: single-cell general operator equals its symbol") {
  std::vector<HoppingTerm> terms{{0, 0, iv({1}), Complex(0.0, -1.0)},
                                 {0, 0, iv({-1}), Complex(0.0, -1.0)}};
  auto op = make_operator(1, 1, terms);  // symbol -2i cos k, not self-adjoint
  auto bs = band_structure_complex(op, 8);
  for (std::size_t i = 0; i < bs.grid.size(); ++i) {
    const double k = bs.grid.point(i)[0];
    CHECK(std::abs(bs.clouds(i, 0) - Complex(0.0, -2.0 * std::cos(k))) < 1e-13);
  }
  CHECK_THROWS_AS(band_structure(op, 8), ConfigError);
}

TEST_CASE("band structure: d=2 Laplacian grid extremes") {
  auto L = laplacian(2);
  auto bs = band_structure(L, 8);  // even grid contains k = -pi
  CHECK(bs.bands.minCoeff() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(bs.bands.maxCoeff() == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("bands agree across the grid seam and under k -> -k") {
  auto op = two_cell_gap_2d(1.0, 0.1);
  auto bs = band_structure(op, 12);
  for (int t = 0; t < 12; ++t) {
    RealVector a = rv({-kPi, bs.grid.axis_value(t - 6)});
    RealVector b = rv({kPi, bs.grid.axis_value(t - 6)});
    Eigen::SelfAdjointEigenSolver<Matrix> ea(fiber_matrix(op, a).entries);
    Eigen::SelfAdjointEigenSolver<Matrix> eb(fiber_matrix(op, b).entries);
    CHECK((ea.eigenvalues() - eb.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> en(
        fiber_matrix(op, (-a).eval()).entries);
    CHECK((ea.eigenvalues() - en.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("spectrum intervals") {
  SUBCASE("1-D Laplacian covers [0,4]") {
    auto s = spectrum_intervals(laplacian(1), 16);
    REQUIRE(s.merged.size() == 1);
    CHECK(std::abs(s.merged[0].first - 0.0) < 1e-6);
    CHECK(std::abs(s.merged[0].second - 4.0) < 1e-6);
  }
  SUBCASE("two-cell alternating potential opens the closed-form gap") {
    auto op = two_cell_gap_1d(1.0, 5.0);
    auto s = spectrum_intervals(op, 32);
    REQUIRE(s.merged.size() == 2);
    // eigenvalues 7 +- sqrt(3 + 2 cos k)
    CHECK(std::abs(s.merged[0].first - (7.0 - std::sqrt(5.0))) < 1e-6);
    CHECK(std::abs(s.merged[0].second - 6.0) < 1e-6);
    CHECK(std::abs(s.merged[1].first - 8.0) < 1e-6);
    CHECK(std::abs(s.merged[1].second - (7.0 + std::sqrt(5.0))) < 1e-6);
    REQUIRE(s.gaps.size() == 1);
    CHECK(std::abs(s.gaps[0].first - 6.0) < 1e-6);
    CHECK(std::abs(s.gaps[0].second - 8.0) < 1e-6);
  }
  SUBCASE("shifted Laplacian keeps 0 outside the spectrum") {
    auto s = spectrum_intervals(laplacian_plus_constant(2, 1.0), 16);
    REQUIRE(s.merged.size() == 1);
    CHECK(std::abs(s.merged[0].first - 1.0) < 1e-6);
    CHECK(std::abs(s.merged[0].second - 9.0) < 1e-6);
    CHECK(s.distance_to(0.0) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("riesz projector") {
  // two decoupled on-site levels 0 and 5 give the diagonal fiber
  std::vector<HoppingTerm> terms{{1, 1, iv({0}), Complex(5.0, 0.0)}};
  auto op = make_operator(1, 2, terms);
  SUBCASE("projector onto the zero eigenvalue") {
    auto pr = riesz_projector(op, Quasimomentum(rv({0.3})), ContourSpec{0.0, 1.0});
    CHECK(pr.rank == 1);
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = 1.0;
    CHECK((pr.P - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("contour around everything gives the identity") {
    auto pr = riesz_projector(op, Quasimomentum(rv({0.3})), ContourSpec{0.0, 10.0});
    CHECK(pr.rank == 2);
    CHECK((pr.P - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("eigenvalue in the annulus is rejected") {
    CHECK_THROWS_AS(
        riesz_projector(op, Quasimomentum(rv({0.0})), ContourSpec{0.0, 5.0}),
        NotApplicableError);
  }
  SUBCASE("graphene at the conical point has a rank-2 projector") {
    auto g = graphene();
    auto pr = riesz_projector(g, Quasimomentum(rv({kDiracK, -kDiracK})),
                              ContourSpec{0.0, 0.5});
    CHECK(pr.rank == 2);
    CHECK((pr.P * pr.P - pr.P).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("projector rank is constant over the validity neighborhood") {
    auto g = graphene();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(-0.05, 0.05);
    for (int t = 0; t < 10; ++t) {
      RealVector k = rv({kDiracK + U(rng), -kDiracK + U(rng)});
      auto pr = riesz_projector(g, Quasimomentum(k), ContourSpec{0.0, 0.5});
      CHECK(pr.rank == 2);
    }
  }
}

TEST_CASE("fermi points: d=2 and d=3 Laplacian edges") {
  for (int d : {2, 3}) {
    auto pts = fermi_points(laplacian(d));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].k.real().cwiseAbs().maxCoeff() < 1e-9);
    CHECK(pts[0].multiplicity == 1);
    CHECK(pts[0].simple);
    CHECK(pts[0].ell0 == 2);
    CHECK(pts[0].det_leading_nonzero);
    REQUIRE(pts[0].hessian.has_value());
    CHECK((*pts[0].hessian - 2.0 * RealMatrix::Identity(d, d))
              .cwiseAbs()
              .maxCoeff() < 1e-4);
  }
}

TEST_CASE("fermi points: conical crossings of the honeycomb model") {
  auto pts = fermi_points(graphene());
  REQUIRE(pts.size() == 2);
  for (const auto& p : pts) {
    CHECK(p.multiplicity == 2);
    CHECK(p.ell0 == 1);
    CHECK(p.det_leading_nonzero);
    CHECK_FALSE(p.hessian.has_value());
    CHECK(std::abs(std::abs(p.k.real()[0]) - kDiracK) < 1e-8);
    CHECK(std::abs(std::abs(p.k.real()[1]) - kDiracK) < 1e-8);
    CHECK(p.k.real()[0] * p.k.real()[1] < 0);  // (K, -K) pattern
  }
  // the two points are negatives of each other
  CHECK(pts[0].k.equals(Quasimomentum((-pts[1].k.real()).eval()), 1e-7));
}

TEST_CASE("fermi points: empty surface for the shifted Laplacian") {
  auto pts = fermi_points(laplacian_plus_constant(2, 1.0));
  CHECK(pts.empty());
}

TEST_CASE("fermi points: level inside a band is not a finite surface") {
  FermiOptions opts;
  opts.level = 2.0;
  opts.annotate = false;
  CHECK_THROWS_AS(fermi_points(laplacian(2), opts), NotApplicableError);
}

TEST_CASE("fermi symmetry: points of the transpose sit at -k") {
  std::vector<HoppingTerm> terms{{0, 0, iv({1, 0}), Complex(-1.0, 0.3)},
                                 {0, 0, iv({-1, 0}), Complex(-1.0, -0.3)},
                                 {0, 0, iv({0, 1}), Complex(-1.0, 0.0)},
                                 {0, 0, iv({0, -1}), Complex(-1.0, 0.0)},
                                 {0, 0, iv({0, 0}), Complex(4.0, 0.0)}};
  auto op = make_operator(2, 1, terms);
  REQUIRE(op.self_adjoint);
  auto s = spectrum_intervals(op, 24);
  auto shifted = shift_spectrum(op, s.merged[0].first);
  FermiOptions opts;
  opts.annotate = false;
  auto pts = fermi_points(shifted, opts);
  REQUIRE(!pts.empty());
  auto tpts = fermi_points(transpose(shifted), opts);
  REQUIRE(tpts.size() == pts.size());
  for (const auto& p : pts) {
    bool matched = false;
    for (const auto& q : tpts)
      matched = matched ||
                q.k.equals(Quasimomentum((-p.k.real()).eval()), 1e-7);
    CHECK(matched);
  }
}

TEST_CASE("det of the fiber is reciprocal-lattice periodic") {
  auto op = two_cell_gap_2d(1.0, 0.1);
  RealVector k = rv({0.37, -1.12});
  Complex a = fiber_matrix(op, k).entries.determinant();
  Complex b =
      fiber_matrix(op, (k + rv({kTwoPi, 0.0})).eval()).entries.determinant();
  CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("reduced matrix behaves like the vanishing branch") {
  SUBCASE("d=2 Laplacian: lambda(kappa) tracks |kappa|^2") {
    ReducedModel red(laplacian(2), rv({0.0, 0.0}));
    REQUIRE(red.multiplicity() == 1);
    for (double r : {1e-2, 5e-3}) {
      RealVector kappa = rv({r, 0.5 * r});
      const double expect = 4.0 - 2.0 * std::cos(kappa[0]) - 2.0 * std::cos(kappa[1]);
      CHECK(std::abs(red.sample(kappa)(0, 0) - Complex(expect, 0.0)) <
            1e-6 * expect + 1e-12);
    }
  }
  SUBCASE("conical point: singular values grow linearly along rays") {
    ReducedModel red(graphene(), rv({kDiracK, -kDiracK}));
    REQUIRE(red.multiplicity() == 2);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 5; ++trial) {
      RealVector u = rv({gauss(rng), gauss(rng)});
      u.normalize();
      const double s1 = smallest_singular_value(red.sample((1e-2 * u).eval()));
      const double s2 = smallest_singular_value(red.sample((5e-3 * u).eval()));
      CHECK(s1 / s2 == doctest::Approx(2.0).epsilon(2e-2));
    }
  }
}

TEST_CASE("taylor order") {
  SUBCASE("quadratic edge of the Laplacian") {
    ReducedModel red(laplacian(2), rv({0.0, 0.0}));
    auto td = taylor_order(
        [&](const RealVector& kappa) { return red.sample(kappa); }, 2, 1);
    CHECK(td.ell0 == 2);
    CHECK(td.det_leading_nonzero);
    // leading layer is kappa_1^2 + kappa_2^2
    for (const auto& [alpha, coef] : td.leading) {
      const double expect = (alpha.maxCoeff() == 2) ? 1.0 : 0.0;
      CHECK(std::abs(coef(0, 0) - Complex(expect, 0.0)) < 1e-6);
    }
  }
  SUBCASE("conical point of the honeycomb model") {
    ReducedModel red(graphene(), rv({kDiracK, -kDiracK}));
    auto td = taylor_order(
        [&](const RealVector& kappa) { return red.sample(kappa); }, 2, 2);
    CHECK(td.ell0 == 1);
    CHECK(td.det_leading_nonzero);
  }
  SUBCASE("identically zero family is undetermined") {
    auto td = taylor_order(
        [&](const RealVector&) { return Matrix::Zero(1, 1).eval(); }, 2, 1);
    CHECK(td.ell0 == 0);
  }
  SUBCASE("invariance under constant invertible factors") {
    ReducedModel red(graphene(), rv({kDiracK, -kDiracK}));
    Matrix B(2, 2);
    B << Complex(1.2, 0.1), Complex(0.3, -0.2), Complex(0.0, 0.4),
        Complex(0.9, 0.0);
    auto base = taylor_order(
        [&](const RealVector& kappa) { return red.sample(kappa); }, 2, 2);
    auto scaled = taylor_order(
        [&](const RealVector& kappa) { return (B * red.sample(kappa)).eval(); },
        2, 2);
    CHECK(base.ell0 == scaled.ell0);
    CHECK(base.det_leading_nonzero == scaled.det_leading_nonzero);

    // unitary factors keep the leading singular values
    Matrix U(2, 2);
    const double c = std::cos(0.7), s = std::sin(0.7);
    U << Complex(c, 0), Complex(-s, 0), Complex(s, 0), Complex(c, 0);
    auto rot = taylor_order(
        [&](const RealVector& kappa) { return (U * red.sample(kappa)).eval(); },
        2, 2);
    RealVector u = rv({0.6, 0.8});
    auto eval_layer = [&](const TaylorData& td) {
      Matrix m = Matrix::Zero(2, 2);
      for (const auto& [alpha, coef] : td.leading) {
        double mono = 1.0;
        for (int i = 0; i < 2; ++i) mono *= std::pow(u[i], alpha[i]);
        m += mono * coef;
      }
      return Eigen::JacobiSVD<Matrix>(m).singularValues().eval();
    };
    CHECK((eval_layer(base) - eval_layer(rot)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("integrability audit") {
  SUBCASE("d=3 edge, q=1: integrable, numeric agrees") {
    auto pts = fermi_points(laplacian(3));
    REQUIRE(pts.size() == 1);
    auto rep = integrability_audit(laplacian(3), pts[0], 1);
    REQUIRE(rep.analytic.has_value());
    CHECK(*rep.analytic);
    CHECK(rep.converged);
    CHECK(rep.integrable);
  }
  SUBCASE("d=2 edge, q=1: log-divergent tail") {
    auto pts = fermi_points(laplacian(2));
    auto rep = integrability_audit(laplacian(2), pts[0], 1);
    REQUIRE(rep.analytic.has_value());
    CHECK_FALSE(*rep.analytic);
    CHECK_FALSE(rep.converged);
    CHECK_FALSE(rep.integrable);
    // annulus contributions settle to a constant: ratios near 1
    CHECK(rep.ratios.back() > 0.9);
  }
  SUBCASE("d=5 edge, q=2: integrable (4 < 5)") {
    FermiPoint p;
    p.k = Quasimomentum(RealVector(RealVector::Zero(5)));
    p.multiplicity = 1;
    p.kernel_dim = 1;
    p.simple = true;
    p.ell0 = 2;
    for (int a = 0; a < 5; ++a) {
      MultiIndex alpha = MultiIndex::Zero(5);
      alpha[a] = 2;
      p.leading_taylor.emplace_back(alpha, Matrix::Identity(1, 1));
    }
    auto rep = integrability_audit(laplacian(5), p, 2);
    REQUIRE(rep.analytic.has_value());
    CHECK(*rep.analytic);
    CHECK(rep.converged);
  }
  SUBCASE("conical point, q=2 in d=2 diverges") {
    auto pts = fermi_points(graphene());
    auto rep = integrability_audit(graphene(), pts[0], 2);
    CHECK_FALSE(rep.converged);
    CHECK_FALSE(rep.integrable);
  }
}

TEST_CASE("principal eigenvalue") {
  SUBCASE("Laplacian closed form 2d - 2 sum cosh") {
    for (int d : {1, 2}) {
      auto L = laplacian(d);
      std::mt19937_64 rng(41);
      std::uniform_real_distribution<double> U(-2.0, 2.0);
      for (int t = 0; t < 20; ++t) {
        RealVector xi(d);
        for (int a = 0; a < d; ++a) xi[a] = U(rng);
        double expect = 0.0;
        for (int a = 0; a < d; ++a) expect += 2.0 - 2.0 * std::cosh(xi[a]);
        auto pp = principal_eigenvalue(L, xi);
        CHECK(pp.lambda == doctest::Approx(expect).epsilon(1e-12));
        CHECK(pp.eigenvector.minCoeff() > 1e-10);
      }
    }
  }
  SUBCASE("no zeroth-order term: Lambda(0) = 0") {
    auto op = laplacian_drift_1d(0.4);
    CHECK(std::abs(principal_eigenvalue(op, rv({0.0})).lambda) < 1e-12);
  }
  SUBCASE("nonnegative zeroth-order coefficient: Lambda(0) >= 0") {
    auto op = laplacian_plus_constant(2, 0.7);
    CHECK(principal_eigenvalue(op, rv({0.0, 0.0})).lambda >=
          doctest::Approx(0.7).epsilon(1e-12));
  }
  SUBCASE("complex coefficients are rejected") {
    std::vector<HoppingTerm> terms{{0, 0, iv({1}), Complex(0.0, 1.0)},
                                   {0, 0, iv({-1}), Complex(0.0, -1.0)}};
    auto op = make_operator(1, 1, terms);
    CHECK_THROWS_AS(principal_eigenvalue(op, rv({0.0})), ConfigError);
  }
}

TEST_CASE("maximize principal eigenvalue") {
  SUBCASE("drift-free Laplacian peaks at the origin") {
    auto curve = maximize_principal(laplacian(2));
    CHECK(curve.xi0.cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::abs(curve.lambda_max) < 1e-10);
    CHECK(curve.concavity_ok);
  }
  SUBCASE("forward drift shifts the maximizer to the symbolic optimum") {
    // Lambda(xi) = 2 - 2 cosh xi + b (e^{-xi} - 1) maximized at
    // xi0 = log(1-b)/2 with value 2 - 2 sqrt(1-b) - b
    const double b = 0.5;
    auto curve = maximize_principal(laplacian_drift_1d(b));
    CHECK(curve.xi0[0] ==
          doctest::Approx(0.5 * std::log(1.0 - b)).epsilon(1e-6));
    CHECK(curve.lambda_max ==
          doctest::Approx(2.0 - 2.0 * std::sqrt(1.0 - b) - b).epsilon(1e-9));
    CHECK(curve.concavity_ok);
  }
}

TEST_CASE("riesz projector falls back to quadrature on a defective fiber") {
  // single off-diagonal coupling: the fiber is nilpotent, eigenvectors
  // degenerate
  std::vector<HoppingTerm> terms{{0, 1, iv({0}), Complex(1.0, 0.0)}};
  auto op = make_operator(1, 2, terms);
  auto pr = riesz_projector(op, Quasimomentum(rv({0.4})), ContourSpec{0.0, 1.0});
  CHECK(pr.quadrature_fallback);
  CHECK(pr.rank == 2);
  CHECK((pr.P - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("positive off-diagonal couplings fall outside the sign class") {
  CHECK_THROWS_AS(principal_eigenvalue(graphene(), rv({0.1, 0.2})),
                  NotApplicableError);
}

TEST_CASE("reduced model refuses samples outside its validity neighborhood") {
  ReducedModel red(laplacian(2), rv({0.0, 0.0}));
  CHECK_THROWS(red.sample(rv({2.0, 2.0})));
}

TEST_CASE("d=2 edge is gated out even in the p=2 regime") {
  // growth conditions hold but both integrability audits fail in d=2
  auto L = laplacian(2);
  auto pts = fermi_points(L);
  REQUIRE(pts.size() == 1);
  PointAudit audit{integrability_audit(L, pts[0], 1).integrable,
                   integrability_audit(L, pts[0], 2).integrable};
  CHECK_FALSE(audit.a2);
  CHECK_FALSE(audit.strength);
  DegreeReport deg;
  deg.ell_plus = 1;
  deg.degree = 1;
  auto rep = lrr_bounds(deg, deg, edge_data(pts), GrowthSpec(2.0, 2.0), 2,
                        {audit});
  CHECK_FALSE(rep.applicable);
}
