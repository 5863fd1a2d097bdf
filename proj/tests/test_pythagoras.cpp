#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "grsum/pythagoras.hpp"

using namespace grsum;
using Catch::Approx;

namespace {

struct FixtureRow {
  long long N, x, y, z;
};

std::vector<FixtureRow> load_fixture_rows() {
  std::ifstream in(std::string(GRSUM_FIXTURE_DIR) + "/somos_rows.csv");
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);  // header
  std::vector<FixtureRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    FixtureRow r{};
    ss >> r.N >> r.x >> r.y >> r.z;
    rows.push_back(r);
  }
  REQUIRE(rows.size() == 30);
  return rows;
}

}  // namespace

TEST_CASE("ppt_from_pair generates canonical triples") {
  auto t = ppt_from_pair(2, 1);
  CHECK(t.x == 3);
  CHECK(t.y == 4);
  CHECK(t.z == 5);
  auto t2 = ppt_from_pair(3, 2);
  CHECK(t2.x == 5);
  CHECK(t2.y == 12);
  CHECK(t2.z == 13);
  auto t3 = ppt_from_pair(97, 32);
  CHECK(t3.x == 8385);
  CHECK(t3.y == 6208);
  CHECK(t3.z == 10433);
  CHECK(t3.x * t3.x + t3.y * t3.y == t3.z * t3.z);

  CHECK_THROWS_AS(ppt_from_pair(1, 1), std::invalid_argument);   // m > n fails
  CHECK_THROWS_AS(ppt_from_pair(4, 2), std::invalid_argument);   // gcd fails
  CHECK_THROWS_AS(ppt_from_pair(5, 3), std::invalid_argument);   // parity fails
  CHECK_THROWS_AS(ppt_from_pair(3, 0), std::invalid_argument);   // n >= 1 fails
}

TEST_CASE("every enumerated triple satisfies the type invariants") {
  for (const auto& t : enumerate_ppt(2000)) {
    CHECK(t.x * t.x + t.y * t.y == t.z * t.z);
    CHECK(std::gcd(t.x, t.y) == 1);
    CHECK(std::gcd(t.y, t.z) == 1);
    CHECK(std::gcd(t.x, t.z) == 1);
    CHECK(t.x % 2 == 1);
    CHECK(t.y % 2 == 0);
    CHECK(t.m > t.n);
    CHECK(std::gcd(t.m, t.n) == 1);
    CHECK((t.m - t.n) % 2 == 1);
    CHECK(t.x == t.m * t.m - t.n * t.n);
    CHECK(t.y == 2 * t.m * t.n);
    CHECK(t.z == t.m * t.m + t.n * t.n);
  }
}

TEST_CASE("enumeration order fixes the published tie-breaks") {
  auto list = enumerate_ppt(70);
  REQUIRE(list.size() >= 11);
  CHECK(list[9] == PPTriple{63, 16, 65, 8, 1});
  CHECK(list[10] == PPTriple{33, 56, 65, 7, 4});
  CHECK(enumerate_ppt(5).size() == 1);
  CHECK(enumerate_ppt(5)[0] == PPTriple{3, 4, 5, 2, 1});
  CHECK(enumerate_ppt(4).empty());
}

TEST_CASE("the thirty fixture rows are reproduced exactly") {
  const auto rows = load_fixture_rows();
  const auto list = enumerate_ppt(9425);
  REQUIRE(list.size() == 1500);
  for (const auto& r : rows) {
    const auto& t = list[static_cast<std::size_t>(r.N - 1)];
    CHECK(t.x == r.x);
    CHECK(t.y == r.y);
    CHECK(t.z == r.z);
  }
}

TEST_CASE("lehmer_ratio fixtures and trend toward 2 pi") {
  CHECK(lehmer_ratio(1) == 5.0);
  CHECK(lehmer_ratio(100) == Approx(6.29).margin(1e-12));      // z_100 = 629
  CHECK(lehmer_ratio(1000) == Approx(6.277).margin(1e-12));    // z_1000 = 6277
  CHECK(lehmer_ratio(1500) == Approx(6.28333333333).margin(1e-9));  // z_1500 = 9425
  const double two_pi = 2.0 * std::numbers::pi;
  CHECK(std::abs(lehmer_ratio(1500) - two_pi) < std::abs(lehmer_ratio(100) - two_pi));
}

TEST_CASE("hypotenuse sequence is non-decreasing") {
  const auto list = enumerate_ppt(15000);
  for (std::size_t i = 1; i < list.size(); ++i) CHECK(list[i].z >= list[i - 1].z);
}

TEST_CASE("sector_count boundary case and preconditions") {
  // brute force over m,n <= 5 gives the pairs (2,1),(3,2),(4,1),(4,3);
  // (4,3) sits exactly on the boundary 16+9 = 25 and counts inclusively
  long long brute = 0;
  for (long long m = 1; m * m <= 25; ++m)
    for (long long n = 1; n <= m && m * m + n * n <= 25; ++n)
      if (std::gcd(m, n) == 1 && ((m - n) & 1)) ++brute;
  REQUIRE(brute == 4);
  CHECK(sector_count(25, 0.0, 1.0) == 4);
  CHECK(sector_count(24, 0.0, 1.0) == 3);  // boundary pair drops out
  CHECK_THROWS_AS(sector_count(25, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(sector_count(0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("sector counts are the triple counts") {
  for (long long N : {10LL, 25LL, 100LL, 1000LL, 10000LL})
    CHECK(static_cast<long long>(enumerate_ppt(N).size()) == sector_count(N, 0.0, 1.0));
}

TEST_CASE("sector limit 1/(2 pi)") {
  const long long c = sector_count(1000000, 0.0, 1.0);
  const double lim = 1.0 / (2.0 * std::numbers::pi);
  CHECK(std::abs(static_cast<double>(c) / 1e6 - lim) / lim < 0.02);
}

TEST_CASE("rational_circle_points counts and exactness") {
  CHECK(rational_circle_points(1).size() == 4);
  CHECK(rational_circle_points(5).size() == 12);
  auto pts = rational_circle_points(200);
  for (const auto& p : pts) {
    CHECK(p.p * p.p + p.q * p.q == Rational(1));
    CHECK(p.angle >= 0.0);
    CHECK(p.angle < 2.0 * std::numbers::pi);
  }
}

TEST_CASE("heights equal hypotenuses and the parity classes balance") {
  auto pts = rational_circle_points(10000);
  std::set<long long> heights;
  long long odd = 0, even = 0;
  for (const auto& p : pts) {
    if (p.height == 1) continue;
    heights.insert(p.height);
    const BigInt num = boost::multiprecision::numerator(rational_abs(p.p));
    (num % 2 == 1 ? odd : even) += 1;
  }
  CHECK(odd == even);  // (p,q) -> (q,p) swaps the classes
  // every non-trivial height is a hypotenuse of the enumeration
  std::set<long long> zs;
  for (const auto& t : enumerate_ppt(10000)) zs.insert(t.z);
  for (long long h : heights) CHECK(zs.count(h) == 1);
}

TEST_CASE("angle doubling: theta(p,q) = 2 Theta(m,n)") {
  for (const auto& t : enumerate_ppt(1000)) {
    const double theta = std::atan2(static_cast<double>(t.y) / static_cast<double>(t.z),
                                    static_cast<double>(t.x) / static_cast<double>(t.z));
    const double Theta = std::atan2(static_cast<double>(t.n), static_cast<double>(t.m));
    CHECK(std::abs(theta - 2.0 * Theta) < 1e-12);
  }
}

TEST_CASE("equidistribution_stat") {
  auto full = equidistribution_stat(0.0, 2.0 * std::numbers::pi, 1000);
  CHECK(full.ratio == 1.0);

  auto quarter = equidistribution_stat(0.0, std::numbers::pi / 2, 10000);
  CHECK(std::abs(quarter.ratio - 0.25) / 0.25 < 0.02);

  auto eighth = equidistribution_stat(0.0, std::numbers::pi / 4, 100000);
  const double expect_count = 2.0 * (std::numbers::pi / 4) / (std::numbers::pi * std::numbers::pi) * 1e5;
  CHECK(std::abs(static_cast<double>(eighth.count) - expect_count) / expect_count < 0.02);
  CHECK(eighth.expected == Approx(0.125));
  CHECK_THROWS_AS(equidistribution_stat(1.0, 0.5, 100), std::invalid_argument);
}

TEST_CASE("fermat characterization: multiplicity 2^(nu-1) on 1-mod-4 hypotenuses") {
  auto list = enumerate_ppt(9425);
  long long m65 = 0, m9425 = 0, m9 = 0;
  for (const auto& t : list) {
    if (t.z == 65) ++m65;
    if (t.z == 9425) ++m9425;
    if (t.z == 9) ++m9;
  }
  CHECK(m65 == 2);    // 65 = 5 * 13, nu = 2
  CHECK(m9425 == 4);  // 9425 = 5^2 * 13 * 29, nu = 3
  CHECK(m9 == 0);     // 3 = 3 mod 4 divides 9

  auto fc = fermat_characterization_check(10000);
  CHECK(fc.consistent);
  CHECK(fc.mismatches.empty());
}
