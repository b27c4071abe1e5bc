#include <cmath>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "doctest.h"
#include "support.hpp"

#include "edumine/eda.hpp"
#include "edumine/random.hpp"
#include "edumine/special.hpp"

using namespace edumine;
using testing::Builder;

namespace {

// One-pass textbook formula, deliberately different from the two-pass code.
double raw_sums_r(const std::vector<double>& x, const std::vector<double>& y) {
  long double n = x.size(), sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += (long double)x[i] * x[i];
    syy += (long double)y[i] * y[i];
    sxy += (long double)x[i] * y[i];
  }
  return static_cast<double>((n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy)));
}

double pooled_t(const std::vector<double>& a, const std::vector<double>& b) {
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / v.size();
  };
  const double ma = mean(a), mb = mean(b);
  double ss = 0;
  for (double x : a) ss += (x - ma) * (x - ma);
  for (double x : b) ss += (x - mb) * (x - mb);
  const double sp2 = ss / (a.size() + b.size() - 2.0);
  return (ma - mb) / std::sqrt(sp2 * (1.0 / a.size() + 1.0 / b.size()));
}

}  // namespace

TEST_CASE("descriptives fixtures") {
  const std::vector<double> v = {2, 4, 6};
  const auto d = eda::describe(v);
  CHECK(d.n == 3);
  CHECK(d.mean == 4.0);
  CHECK(d.std_dev == 2.0);
  const std::vector<double> c = {5, 5, 5, 5};
  CHECK(eda::describe(c).std_dev == 0.0);
  const std::vector<double> tenth(7, 0.1);
  CHECK(eda::describe(tenth).std_dev == 0.0);
  CHECK(eda::describe(tenth).mean == 0.1);
  CHECK_THROWS_AS(eda::describe({}), DataError);
}

TEST_CASE("grouped descriptives skip missing cells") {
  const auto d = Builder(6)
                     .interval("score", {1, 2, NAN, 10, 20, 30}, Role::target)
                     .categorical("gender", {"f", "f", "f", "m", "", "m"}, Level::binary)
                     .build();
  const auto all = eda::descriptives(d, "score");
  REQUIRE(all.size() == 1);
  CHECK(all[0].stats.n == 5);
  const auto g = eda::descriptives(d, "score", "gender");
  REQUIRE(g.size() == 2);
  CHECK(g[0].group == "f");
  CHECK(g[0].stats.mean == 1.5);
  CHECK(g[1].group == "m");
  CHECK(g[1].stats.mean == 20.0);
  CHECK_THROWS_AS(eda::descriptives(d, "gender"), SchemaError);
}

TEST_CASE("band thresholds") {
  CHECK(eda::band_of(0.72) == eda::Band::very_high);
  CHECK(eda::band_of(0.60) == eda::Band::moderate);
  CHECK(eda::band_of(0.0) == eda::Band::low);
  CHECK(eda::band_of(-0.65) == eda::Band::high);
  CHECK_THROWS_AS(eda::band_of(1.01), DataError);
  CHECK_THROWS_AS(eda::band_of(NAN), DataError);
}

TEST_CASE("band is a total, monotone function on a grid") {
  int previous = 0;
  for (int i = 0; i <= 20000; ++i) {
    const double r = i / 20000.0;
    const auto b = static_cast<int>(eda::band_of(r));
    CHECK(b >= previous);
    previous = b;
    CHECK(eda::band_of(-r) == eda::band_of(r));
    const int expected = r > 0.70 ? 3 : r > 0.60 ? 2 : r > 0.50 ? 1 : 0;
    CHECK(b == expected);
  }
}

TEST_CASE("pearson fixtures") {
  const std::vector<double> x = {1, 2, 3, 4, 5}, y = {2, 1, 4, 3, 6};
  CHECK(eda::pearson_r(x, y) == doctest::Approx(raw_sums_r(x, y)).epsilon(1e-12));
  const auto d = Builder(5).interval("a", x).interval("b", {-1, -2, -3, -4, -5}).interval("c", x).build();
  const auto self = eda::pearson(d, "a", "c");
  CHECK(self.r == 1.0);
  CHECK(self.band == eda::Band::very_high);
  CHECK(eda::pearson(d, "a", "b").r == -1.0);
}

TEST_CASE("pearson uses pairwise complete rows") {
  const auto d = Builder(6)
                     .interval("a", {1, 2, NAN, 4, 5, 6})
                     .interval("b", {2, 1, 3, NAN, 6, 5})
                     .interval("k", {1, 1, 1, 1, 1, 2})
                     .build();
  const auto r = eda::pearson(d, "a", "b");
  CHECK(r.n_pairs == 4);
  CHECK(r.r == doctest::Approx(raw_sums_r({1, 2, 5, 6}, {2, 1, 6, 5})).epsilon(1e-12));
  const auto few = Builder(3).interval("a", {1, 2, NAN}).interval("b", {1, 2, 3}).build();
  CHECK_THROWS_AS(eda::pearson(few, "a", "b"), DataError);
  const auto flat = Builder(4).interval("a", {1, 2, 3, 4}).interval("b", {7, 7, 7, 7}).build();
  CHECK_THROWS_AS(eda::pearson(flat, "a", "b"), DataError);
}

TEST_CASE("pearson symmetry and affine invariance") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.below(60);
    std::vector<double> x(n), y(n), ax(n), ny(n);
    const double scale = 0.01 + 100 * rng.uniform(), shift = rng.normal() * 50;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = 0.5 * x[i] + rng.normal();
      ax[i] = scale * x[i] + shift;
      ny[i] = -y[i];
    }
    const double r = eda::pearson_r(x, y);
    CHECK(r == doctest::Approx(raw_sums_r(x, y)).epsilon(1e-10));
    CHECK(eda::pearson_r(y, x) == doctest::Approx(r).epsilon(1e-14));
    CHECK(eda::pearson_r(ax, y) == doctest::Approx(r).epsilon(1e-10));
    CHECK(eda::pearson_r(x, ny) == doctest::Approx(-r).epsilon(1e-14));
  }
}

TEST_CASE("anova hand-computed table") {
  const std::vector<std::vector<double>> g = {{1, 2, 3}, {4, 5, 6}};
  const auto a = eda::anova_one_way(g);
  // grand mean 3.5; SSB = 3(1.5^2) + 3(1.5^2) = 13.5, SSW = 2 + 2 = 4
  CHECK(a.ss_between == doctest::Approx(13.5).epsilon(1e-15));
  CHECK(a.ss_within == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(a.df_between == 1);
  CHECK(a.df_within == 4);
  CHECK(std::fabs(a.f_stat - 13.5) <= 1e-9);
  const double p = boost::math::cdf(boost::math::complement(boost::math::fisher_f(1.0, 4.0), 13.5));
  CHECK(a.p_value == doctest::Approx(p).epsilon(1e-10));

  const std::vector<std::vector<double>> shifted = {{101, 102, 103}, {104, 105, 106}};
  CHECK(std::fabs(eda::anova_one_way(shifted).f_stat - 13.5) <= 1e-9);
}

TEST_CASE("anova equal means and errors") {
  const std::vector<std::vector<double>> same = {{1, 5, 3}, {3, 1, 5}};
  const auto a = eda::anova_one_way(same);
  CHECK(a.f_stat == 0.0);
  CHECK(a.p_value == 1.0);
  const std::vector<std::vector<double>> one = {{1, 2, 3}};
  CHECK_THROWS_AS(eda::anova_one_way(one), DataError);
  const std::vector<std::vector<double>> flat = {{2, 2}, {2, 2}};
  CHECK_THROWS_AS(eda::anova_one_way(flat), DataError);
  const std::vector<std::vector<double>> tiny = {{1}, {2}};
  CHECK_THROWS_AS(eda::anova_one_way(tiny), DataError);
  const std::vector<std::vector<double>> exact = {{1, 1}, {2, 2}};
  CHECK(std::isinf(eda::anova_one_way(exact).f_stat));
  CHECK(eda::anova_one_way(exact).p_value == 0.0);
}

TEST_CASE("anova on a dataset") {
  const auto d = Builder(7)
                     .interval("score", {1, 2, 3, 4, 5, 6, NAN}, Role::target)
                     .categorical("gender", {"f", "f", "f", "m", "m", "m", "m"}, Level::binary)
                     .build();
  CHECK(std::fabs(eda::anova_one_way(d, "score", "gender").f_stat - 13.5) <= 1e-9);
}

TEST_CASE("two-group F equals pooled t squared; affine invariance") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<double>> g(2);
    for (auto& grp : g) {
      const std::size_t n = 2 + rng.below(40);
      const double mu = rng.normal();
      for (std::size_t i = 0; i < n; ++i) grp.push_back(mu + rng.normal());
    }
    const auto a = eda::anova_one_way(g);
    const double t = pooled_t(g[0], g[1]);
    CHECK(std::fabs(a.f_stat - t * t) <= 1e-9 * std::max(1.0, a.f_stat));

    const double scale = 0.1 + 10 * rng.uniform(), shift = 100 * rng.normal();
    auto h = g;
    for (auto& grp : h)
      for (auto& v : grp) v = scale * v + shift;
    CHECK(eda::anova_one_way(h).f_stat == doctest::Approx(a.f_stat).epsilon(1e-8));
  }
}

TEST_CASE("incomplete beta against an independent implementation") {
  Rng rng(31);
  for (int trial = 0; trial < 2000; ++trial) {
    const double a = 0.05 + 60 * rng.uniform(), b = 0.05 + 60 * rng.uniform(), x = rng.uniform();
    CHECK(std::fabs(special::incomplete_beta(a, b, x) - boost::math::ibeta(a, b, x)) <= 1e-10);
  }
  CHECK(special::incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(special::incomplete_beta(2, 3, 1.0) == 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double d1 = 1 + rng.below(20), d2 = 1 + rng.below(200), f = 10 * rng.uniform();
    const double p = boost::math::cdf(boost::math::complement(boost::math::fisher_f(d1, d2), f));
    CHECK(std::fabs(special::f_upper_tail(f, d1, d2) - p) <= 1e-10);
  }
}
