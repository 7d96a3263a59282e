#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ineq/energy.hpp"
#include "ineq/error.hpp"

using namespace ineq::energy;

namespace {

CountryRecord kw(std::string label, double eps, double pop) {
  CountryRecord r;
  r.name = label;
  r.label = std::move(label);
  r.year = 2005;
  r.energy = eps;
  r.population = pop;
  r.per_capita = true;
  return r;
}

IngestResult ingest(const std::string& energy, const std::string& population, int year = 2005,
                    bool per_capita = false) {
  std::istringstream e(energy);
  std::istringstream p(population);
  return ingest_wri(e, p, year, per_capita);
}

}  // namespace

TEST(Ingest, JoinsOnCountry) {
  const auto r = ingest("country,year,value\nUSA,2005,2300000\n",
                        "country,year,value\nUSA,2005,296500000\n");
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].name, "USA");
  EXPECT_EQ(r.records[0].label, "USA");
  EXPECT_TRUE(r.dropped.empty());
}

TEST(Ingest, EnergyOnlyCountryIsDropped) {
  try {
    ingest("country,year,value\nUSA,2005,2300000\n", "country,year,value\n");
    FAIL() << "expected an empty join";
  } catch (const EmptyJoinError& e) {
    ASSERT_EQ(e.dropped().size(), 1u);
    EXPECT_EQ(e.dropped()[0].country, "USA");
  }
}

TEST(Ingest, DropsBadRowsAndOtherYears) {
  const std::string energy =
      "country,year,value,label\n"
      "Alpha,2005,100,ALP\n"
      "Beta,2005,,BET\n"
      "Gamma,2005,-5,GAM\n"
      "Delta,2005,50,DEL\n"
      "Alpha,2000,999,ALP\n"
      "Eps,2005,10,EPS\n";
  const std::string pop =
      "country,year,value\n"
      "Alpha,2005,1000\n"
      "Beta,2005,1000\n"
      "Gamma,2005,1000\n"
      "Delta,2005,0\n"
      "Zeta,2005,5\n"
      "Eps,2005,abc\n";
  const auto r = ingest(energy, pop);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].label, "ALP");
  EXPECT_EQ(r.records[0].energy, 100.0);
  // parse stage: Beta value, Eps population; join stage: Gamma, Delta, Eps,
  // and Beta and Zeta with a population row only
  EXPECT_EQ(r.dropped.size(), 7u);
  for (const auto& d : r.dropped) EXPECT_FALSE(d.reason.empty());
}

TEST(Ingest, FormatErrorsCarryLine) {
  try {
    ingest("country,year,value\nUSA,2005\n", "country,year,value\n");
    FAIL();
  } catch (const ineq::FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(ingest("name,value\nUSA,1\n", "country,year,value\n"), ineq::FormatError);
}

TEST(PerCapita, UnitArithmetic) {
  CountryRecord r;
  r.energy = 0.001;  // 1 toe
  r.population = 1.0;
  EXPECT_NEAR(per_capita_kw(r), 1.3261, 1e-4);
  EXPECT_NEAR(per_capita_kw(r), 41.85e9 / 3.15576e7 / 1000.0, 1e-12);
  const double one = per_capita_kw(r);
  r.population = 2.0;
  EXPECT_EQ(per_capita_kw(r), one / 2.0);
  r.energy = 0.0;
  EXPECT_EQ(per_capita_kw(r), 0.0);
  r.population = 0.0;
  EXPECT_THROW(per_capita_kw(r), ineq::DomainError);
  EXPECT_DOUBLE_EQ(per_capita_kw(kw("X", 3.5, 10.0)), 3.5);
}

TEST(WeightedCdf, Examples) {
  const auto one = weighted_cdf({kw("A", 2.0, 5.0)});
  EXPECT_EQ(one[0].ccdf, 1.0);
  const auto two = weighted_cdf({kw("B", 3.0, 1.0), kw("A", 1.0, 1.0)});
  EXPECT_EQ(two[0].value, 1.0);
  EXPECT_EQ(two[0].ccdf, 1.0);
  EXPECT_EQ(two[1].ccdf, 0.5);
  EXPECT_EQ(world_average({kw("A", 1.0, 1.0), kw("B", 3.0, 1.0)}), 2.0);
  EXPECT_THROW(weighted_cdf({}), ineq::DomainError);
}

TEST(WeightedCdf, IntegralOfCcdfIsTheMean) {
  const auto recs = table2_fixture(2005);
  const auto cdf = weighted_cdf(recs);
  double integral = 0.0;
  double prev = 0.0;
  for (const auto& l : cdf.levels()) {
    integral += l.ccdf * (l.value - prev);
    prev = l.value;
  }
  EXPECT_NEAR(integral, world_average(recs), 1e-12);
}

TEST(Lorenz, Examples) {
  const auto diag = lorenz_energy({kw("A", 2.0, 1.0), kw("B", 2.0, 1.0)});
  EXPECT_NEAR(diag.gini, 0.0, 1e-15);
  const auto conc = lorenz_energy({kw("A", 0.0, 1e9), kw("B", 1.0, 1e-3)});
  EXPECT_GT(conc.gini, 0.999);
  EXPECT_THROW(lorenz_energy({kw("A", 0.0, 1.0), kw("B", 0.0, 1.0)}), ineq::MalformedCurveError);
  EXPECT_THROW(lorenz_energy({kw("A", 1.0, 1.0)}), ineq::DomainError);
  EXPECT_EQ(diag.points.front().x, 0.0);
  EXPECT_EQ(diag.points.back().x, 1.0);
}

TEST(SlopeProfile, TwoSegmentKink) {
  std::vector<ineq::LorenzPoint> pts;
  for (int k = 0; k <= 7; ++k) pts.push_back({0.1 * k, 0.05 * k});
  for (int k = 1; k <= 3; ++k) pts.push_back({0.7 + 0.1 * k, 0.35 + 0.65 / 3.0 * k});
  const auto p = slope_profile(ineq::make_lorenz_curve(pts));
  EXPECT_NEAR(p.kink_x, 0.7, 1e-12);
  EXPECT_NEAR(p.max_jump, 0.65 / 0.3 - 0.5, 1e-9);
  EXPECT_EQ(p.slopes.size(), 10u);
}

TEST(SlopeProfile, DiagonalAndErrors) {
  std::vector<ineq::LorenzPoint> pts;
  for (int k = 0; k <= 10; ++k) pts.push_back({0.1 * k, 0.1 * k});
  const auto p = slope_profile(ineq::make_lorenz_curve(pts));
  for (double s : p.slopes) EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_NEAR(p.max_jump, 0.0, 1e-12);
  EXPECT_THROW(slope_profile(ineq::make_lorenz_curve({{0, 0}, {1, 1}})), ineq::DomainError);
}

TEST(Fixture, PublishedRatios) {
  const auto recs = table2_fixture(2005);
  EXPECT_EQ(recs.size(), 22u);
  const double avg = table2_world_average(2005);
  EXPECT_EQ(avg, 2.3);
  auto find = [&](const std::string& label) {
    return std::find_if(recs.begin(), recs.end(), [&](auto& r) { return r.label == label; });
  };
  ASSERT_NE(find("USA"), recs.end());
  EXPECT_NEAR(per_capita_kw(*find("USA")) / avg, 4.5, 0.1);
  EXPECT_NEAR(per_capita_kw(*find("IND")) / avg, 0.25, 0.02);
  EXPECT_EQ(table2_world_average(1990), 2.2);
  EXPECT_THROW(table2_fixture(1999), ineq::DomainError);
}

TEST(Fixture, LorenzConvexAndGiniDecreasing) {
  double prev = 2.0;
  for (int year : {1990, 2000, 2005}) {
    const auto curve = lorenz_energy(table2_fixture(year));
    const auto p = slope_profile(curve);
    for (std::size_t k = 1; k < p.slopes.size(); ++k)
      EXPECT_GE(p.slopes[k], p.slopes[k - 1] - 1e-12) << year;
    EXPECT_LT(curve.gini, prev) << year;
    prev = curve.gini;
  }
}

TEST(Fixture, PermutationInvariance) {
  auto recs = table2_fixture(2000);
  const std::string ref = to_json(summarize(recs, 2000));
  std::ostringstream ref_cdf;
  write_cdf_csv(ref_cdf, weighted_cdf(recs));
  std::mt19937 g(4);
  for (int k = 0; k < 10; ++k) {
    std::shuffle(recs.begin(), recs.end(), g);
    EXPECT_EQ(to_json(summarize(recs, 2000)), ref);
    std::ostringstream cdf;
    write_cdf_csv(cdf, weighted_cdf(recs));
    EXPECT_EQ(cdf.str(), ref_cdf.str());
  }
}

TEST(Fixture, CsvRoundTripThroughIngest) {
  std::ostringstream e, p;
  write_fixture_csv(e, p);
  for (int year : {1990, 2000, 2005}) {
    std::istringstream ei(e.str()), pi(p.str());
    const auto r = ingest_wri(ei, pi, year, true);
    EXPECT_EQ(r.records.size(), 22u);
    EXPECT_TRUE(r.dropped.empty());
    EXPECT_NEAR(world_average(r.records), world_average(table2_fixture(year)), 1e-12);
  }
}

TEST(Overlay, UsesWorldAverage) {
  const auto cdf = weighted_cdf({kw("A", 1.0, 1.0), kw("B", 3.0, 1.0)});
  std::ostringstream out;
  write_exponential_overlay_csv(out, cdf, 2.0);
  std::istringstream in(out.str());
  std::string header, l1, l2;
  std::getline(in, header);
  std::getline(in, l1);
  std::getline(in, l2);
  EXPECT_EQ(header, "epsilon_kw,C");
  EXPECT_EQ(l2.substr(0, 2), "3,");
  EXPECT_NEAR(std::stod(l2.substr(2)), std::exp(-1.5), 1e-15);
}
