#include <doctest.h>

#include <cmath>
#include <random>

#include "tdel/eval.hpp"

using namespace tdel;

namespace {

struct ZCase {
  std::uint64_t k1, n1, k2, n2;
  double z, p;
};

// Reference values from statsmodels' proportions_ztest (pooled, two-sided).
constexpr ZCase kReference[] = {
    {976, 2744, 5090, 15118, 1.9335173436030149, 0.053172498639991475},
    {1176, 2653, 1954, 4088, -2.791818433328938, 0.005241275739748902},
    {1296, 19864, 778, 8006, -9.191259998131823, 3.8826638666779674e-20},
    {1497, 17035, 106, 945, -2.5506488442977773, 0.010752260044413996},
    {675, 12065, 991, 13111, -6.262070316280553, 3.7989955068613346e-10},
    {2851, 8534, 1664, 5283, 2.3265156270375544, 0.01999105979117488},
    {5424, 10979, 31, 54, -1.1735337338345118, 0.24058183728969562},
    {2638, 5683, 6566, 14344, 0.8243154822516627, 0.4097603238059846},
    {4947, 9964, 2243, 4465, -0.6512622081948629, 0.5148772394757826},
    {2158, 7741, 353, 1611, 4.9155859939784134, 8.851728418726235e-07},
    {3102, 7180, 592, 1410, 0.8442631168248848, 0.39852239161640757},
    {2949, 10857, 2437, 8980, 0.038013152317764344, 0.9696771955748138},
    {5103, 13279, 1941, 5721, 5.893137450565277, 3.789309497756089e-09},
    {1723, 13653, 2503, 19312, -0.9120139115747453, 0.3617613943296072},
    {701, 4561, 834, 6091, 2.4387631975522432, 0.014737622168461237},
    {711, 5783, 488, 7272, 10.97381359315433, 5.1071870596707595e-28},
    {5201, 16171, 2983, 11882, 12.849060403854166, 8.70612635107409e-38},
    {1590, 12430, 2571, 17489, -4.702737590031075, 2.5669624206137963e-06},
    {4739, 10358, 3158, 7773, 6.886850763180569, 5.704100527973762e-12},
    {540, 14454, 344, 8290, -1.5531778469195703, 0.12038065223744293},
};

}  // namespace

TEST_CASE("z-test worked example") {
  auto t = two_proportion_ztest(50, 1000, 270, 9000);
  REQUIRE(t.z.has_value());
  CHECK(*t.z == doctest::Approx(3.4090909090909096).epsilon(1e-12));
  CHECK(*t.p_value == doctest::Approx(0.0006517975514402834).epsilon(1e-9));
}

TEST_CASE("z-test agrees with the reference tuples") {
  for (const auto& c : kReference) {
    auto t = two_proportion_ztest(c.k1, c.n1, c.k2, c.n2);
    REQUIRE(t.z.has_value());
    CHECK(std::fabs(*t.z - c.z) < 1e-6);
    CHECK(*t.p_value == doctest::Approx(c.p).epsilon(1e-6));
  }
}

TEST_CASE("z-test degenerate inputs") {
  CHECK_FALSE(two_proportion_ztest(0, 10, 0, 20).z.has_value());
  CHECK_FALSE(two_proportion_ztest(10, 10, 20, 20).z.has_value());
  CHECK_THROWS_AS(two_proportion_ztest(1, 0, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(two_proportion_ztest(3, 2, 1, 2), std::invalid_argument);
  auto same = two_proportion_ztest(5, 100, 10, 200);
  CHECK(*same.z == 0.0);
  CHECK(*same.p_value == 1.0);
}

TEST_CASE("metrics") {
  std::vector<int> gold = {1, 1, 0, 0, 1};
  std::vector<int> pred = {1, 0, 1, 0, 1};
  auto m = evaluate(pred, gold);
  CHECK(m.confusion == ConfusionCounts{2, 1, 1, 1});
  CHECK(m.precision == doctest::Approx(2.0 / 3.0));
  CHECK(m.recall == doctest::Approx(2.0 / 3.0));
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(m.prevalence == doctest::Approx(0.6));
  CHECK(evaluate(std::vector<int>{0, 0}, std::vector<int>{1, 0}).f1 == 0.0);
  CHECK(evaluate(gold, gold).f1 == 1.0);
  CHECK_THROWS_AS(evaluate(std::vector<int>{1}, std::vector<int>{1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(std::vector<int>{}, std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("baseline closed forms") {
  CHECK(expected_all_positive_f1(0.031) == doctest::Approx(2 * 0.031 / 1.031));
  CHECK(100 * expected_all_positive_f1(0.031) == doctest::Approx(6.0).epsilon(0.01));
  CHECK(100 * expected_random_f1(0.031) == doctest::Approx(5.8).epsilon(0.01));
  CHECK(expected_random_f1(0.0) == 0.0);

  std::mt19937_64 rng(77);
  std::vector<int> gold(200000);
  for (auto& g : gold) g = std::bernoulli_distribution(0.1)(rng) ? 1 : 0;
  const auto pi = evaluate(all_positive_baseline(gold.size()), gold).prevalence;
  CHECK(evaluate(all_positive_baseline(gold.size()), gold).f1 == doctest::Approx(expected_all_positive_f1(pi)));
  CHECK(std::fabs(evaluate(random_baseline(gold.size(), 3), gold).f1 - expected_random_f1(pi)) < 0.01);
}

TEST_CASE("random baseline is deterministic and thread-count independent") {
  auto a = random_baseline(100000, 9);
  CHECK(a == random_baseline(100000, 9));
  CHECK(a != random_baseline(100000, 10));
  auto ones = std::count(a.begin(), a.end(), 1);
  CHECK(std::abs(static_cast<double>(ones) / 100000.0 - 0.5) < 0.01);
  auto prefix = random_baseline(1000, 9);
  CHECK(std::equal(prefix.begin(), prefix.end(), a.begin()));
}

TEST_CASE("approximate randomization") {
  std::mt19937_64 rng(4);
  const std::size_t n = 4000;
  std::vector<int> gold(n), good(n), noisy(n);
  for (std::size_t i = 0; i < n; ++i) {
    gold[i] = rng() % 5 == 0;
    good[i] = rng() % 10 == 0 ? 1 - gold[i] : gold[i];
    noisy[i] = rng() % 3 == 0 ? 1 - gold[i] : gold[i];
  }
  const double p = compare_models(good, noisy, gold, 2000, 1);
  CHECK(p < 0.01);
  CHECK(p == compare_models_serial(good, noisy, gold, 2000, 1));
  CHECK(compare_models(good, good, gold, 1000, 1) == 1.0);

  // Two equally noisy systems with independent errors.
  std::vector<int> other(n);
  for (std::size_t i = 0; i < n; ++i) other[i] = rng() % 3 == 0 ? 1 - gold[i] : gold[i];
  CHECK(compare_models(noisy, other, gold, 2000, 1) > 0.01);
  CHECK_THROWS_AS(compare_models(good, noisy, gold, 999, 1), std::invalid_argument);
}
