#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "symprop/distributions.hpp"

using namespace symprop;

namespace {

double sum(std::span<const double> p) { return std::accumulate(p.begin(), p.end(), 0.0); }

}  // namespace

TEST(Distributions, UniformExamples) {
  auto u2 = make_uniform(2);
  EXPECT_EQ(u2.alphabet_size(), 2u);
  EXPECT_DOUBLE_EQ(u2[0], 0.5);
  EXPECT_DOUBLE_EQ(u2[1], 0.5);
  auto u5 = make_uniform(5);
  for (double p : u5.probs()) EXPECT_DOUBLE_EQ(p, 0.2);
  EXPECT_DOUBLE_EQ(make_uniform(1)[0], 1.0);
  EXPECT_THROW(make_uniform(0), std::invalid_argument);
}

TEST(Distributions, ZipfExamples) {
  auto z = make_zipf(2, 1.0);
  EXPECT_NEAR(z[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(z[1], 1.0 / 3.0, 1e-15);
  auto flat = make_zipf(3, 0.0);
  for (double p : flat.probs()) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
  auto z4 = make_zipf(4, 2.0);
  const double c = 1.0 / (1.0 + 0.25 + 1.0 / 9.0 + 1.0 / 16.0);
  EXPECT_NEAR(z4[0], c, 1e-15);
  EXPECT_NEAR(z4[1], c / 4, 1e-15);
  EXPECT_NEAR(z4[2], c / 9, 1e-15);
  EXPECT_NEAR(z4[3], c / 16, 1e-15);
}

TEST(Distributions, ConstructorsNormalize) {
  for (const auto& d : {make_uniform(7), make_zipf(1000, 1.3), make_twostep(10, 4.0),
                        make_point_mass(5, 2), parse_distribution("twostep:9:2")}) {
    EXPECT_NEAR(sum(d.probs()), 1.0, 1e-12);
  }
}

TEST(Distributions, TwoStepHeavyHalf) {
  auto d = make_twostep(10, 4.0);
  // Five heavy symbols at 4w, five light at w: w = 1/25.
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(d[i], 4.0 / 25.0, 1e-15);
  for (int i = 5; i < 10; ++i) EXPECT_NEAR(d[i], 1.0 / 25.0, 1e-15);
}

TEST(Distributions, RejectsInvalidVectors) {
  EXPECT_THROW(DiscreteDistribution({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(DiscreteDistribution({-0.1, 1.1}), std::invalid_argument);
  EXPECT_THROW(DiscreteDistribution(std::vector<double>{}), std::invalid_argument);
  EXPECT_NO_THROW(DiscreteDistribution({0.25, 0.75}));
}

TEST(Distributions, ParseSpecs) {
  EXPECT_EQ(parse_distribution("uniform:4").alphabet_size(), 4u);
  EXPECT_NEAR(parse_distribution("zipf:2:1")[0], 2.0 / 3.0, 1e-15);
  EXPECT_EQ(parse_distribution("point:3").support_size(), 1u);
  EXPECT_THROW(parse_distribution("uniform"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("gauss:3"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("uniform:x"), std::invalid_argument);
}

TEST(Distributions, PropertyStringsRoundTrip) {
  for (const char* text : {"entropy", "support", "coverage:12", "dtu:7"}) {
    EXPECT_EQ(to_string(parse_property(text)), text);
  }
  EXPECT_THROW(parse_property("coverage"), std::invalid_argument);
  EXPECT_THROW(parse_property("coverage:0"), std::invalid_argument);
  EXPECT_THROW(parse_property("variance"), std::invalid_argument);
}

TEST(Distributions, SamplePointMass) {
  auto xs = sample(make_point_mass(4, 3), 50, 123);
  ASSERT_EQ(xs.size(), 50u);
  for (auto x : xs) EXPECT_EQ(x, 3u);
}

TEST(Distributions, SampleLawOfLargeNumbers) {
  auto xs = sample(make_uniform(2), 100000, 7);
  const auto zeros = std::count(xs.begin(), xs.end(), 0u);
  EXPECT_NEAR(static_cast<double>(zeros) / 1e5, 0.5, 0.01);
}

TEST(Distributions, SampleDeterministic) {
  auto d = make_zipf(50, 1.0);
  EXPECT_EQ(sample(d, 1000, 99), sample(d, 1000, 99));
  EXPECT_NE(sample(d, 1000, 99), sample(d, 1000, 100));
}

TEST(Distributions, SampleNeverHitsZeroMass) {
  DiscreteDistribution d({0.0, 0.5, 0.0, 0.5, 0.0});
  for (auto x : sample(d, 5000, 1)) EXPECT_TRUE(x == 1 || x == 3);
}

TEST(Distributions, TruePropertyExamples) {
  for (std::size_t k : {1u, 2u, 10u, 1000u}) {
    EXPECT_NEAR(true_property(make_uniform(k), Entropy{}), std::log(static_cast<double>(k)), 1e-12);
  }
  for (std::uint64_t k : {2u, 5u, 100u}) {
    EXPECT_NEAR(true_property(make_point_mass(k), DistanceToUniform{k}), 2.0 * (1.0 - 1.0 / k),
                1e-12);
  }
  EXPECT_NEAR(true_property(make_uniform(2), SupportCoverage{2}), 1.5, 1e-15);
  EXPECT_THROW(true_property(make_uniform(2), SupportCoverage{0}), std::invalid_argument);
  EXPECT_EQ(true_property(DiscreteDistribution({0.5, 0.0, 0.5}), SupportSize{}), 2.0);
}

TEST(Distributions, PropertyInvariants) {
  for (const auto& d : {make_uniform(9), make_zipf(30, 1.0), make_twostep(12, 3.0),
                        make_point_mass(6)}) {
    const double h = entropy(d.probs());
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log(static_cast<double>(d.support_size())) + 1e-12);
    double prev = 0.0;
    for (std::uint64_t m : {1u, 2u, 5u, 20u, 100u}) {
      const double s = support_coverage(d.probs(), m);
      EXPECT_GE(s, prev - 1e-12);
      EXPECT_LE(s, std::min<double>(m, d.support_size()) + 1e-12);
      prev = s;
    }
    const auto k = d.alphabet_size();
    const double dtu = distance_to_uniform(d.probs(), k);
    EXPECT_GE(dtu, 0.0);
    EXPECT_LE(dtu, 2.0 * (1.0 - 1.0 / static_cast<double>(k)) + 1e-12);
  }
}

TEST(Distributions, EmpiricalDistributionOfAbracadabra) {
  // a b r a c a d a b r a with a=0, b=1, r=2, c=3, d=4.
  const Sample xs{0, 1, 2, 0, 3, 0, 4, 0, 1, 2, 0};
  auto e = empirical_distribution(xs);
  EXPECT_NEAR(e[0], 5.0 / 11, 1e-15);
  EXPECT_NEAR(e[1], 2.0 / 11, 1e-15);
  EXPECT_NEAR(e[2], 2.0 / 11, 1e-15);
  EXPECT_NEAR(e[3], 1.0 / 11, 1e-15);
  EXPECT_NEAR(e[4], 1.0 / 11, 1e-15);
}

TEST(Distributions, SampleFileRoundTrip) {
  std::vector<Sample> seqs{{1, 2, 3}, {0}, {4, 4, 4, 4}};
  std::stringstream io;
  write_samples(io, seqs);
  EXPECT_EQ(read_samples(io), seqs);
}

TEST(Distributions, SampleFileErrorsNameTheLine) {
  std::stringstream io("1 2 3\n\n4 x 5\n");
  try {
    read_samples(io);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}
