#include <doctest.h>

#include <cmath>
#include <random>

#include "eqs/ingest.hpp"
#include "eqs/kernel.hpp"
#include "eqs/simulator.hpp"
#include "eqs/spectral.hpp"
#include "test_support.hpp"

using namespace eqs;
using namespace eqs::spectral;

namespace {

num::Matrix dense_observable(std::span<const StateVector> states, std::span<const double> alpha) {
  const std::size_t d = states[0].dim();
  num::Matrix o(d, d);
  for (std::size_t m = 0; m < states.size(); ++m)
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) o(r, c) += alpha[m] * states[m][r] * std::conj(states[m][c]);
  return o;
}

SpectralObservable with_values(std::vector<double> v) {
  SpectralObservable o;
  o.subspace_dim = v.size();
  o.values = std::move(v);
  o.coeffs = num::Matrix(o.subspace_dim, o.subspace_dim);
  o.vectors.resize(o.subspace_dim);
  return o;
}

struct Split {
  std::vector<StateVector> train, test;
  std::vector<int> train_labels, test_labels;
};

Split clustered(int n, int labels, int per_label, double noise, std::uint64_t seed) {
  const auto ds = ingest::generate_clustered_dataset({n, labels, per_label, 12, 1, noise, seed});
  Split s;
  for (std::size_t i = 0; i < ds.items.size(); ++i) {
    auto st = ingest::to_feature_state(ds.items[i].program);
    if (i % 2 == 0) {
      s.train.push_back(std::move(st));
      s.train_labels.push_back(ds.items[i].label);
    } else {
      s.test.push_back(std::move(st));
      s.test_labels.push_back(ds.items[i].label);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("build_observable_matrix: trivial cases") {
  std::mt19937_64 rng(1);
  const std::vector<StateVector> one{testing::random_state(3, rng)};
  const auto gs1 = num::gram_schmidt(one);
  const auto o1 = build_observable_matrix(kernel::gram(one), gs1, std::vector<double>{1.0});
  REQUIRE(o1.dim() == 1);
  CHECK(std::abs(o1(0, 0) - 1.0) < 1e-12);
  const auto d1 = diagonalize_observable(o1, gs1.basis);
  CHECK(d1.values[0] == doctest::Approx(1.0));
  CHECK(std::norm(sim::inner_product(d1.vectors[0], one[0])) == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<StateVector> two{StateVector::basis(2, 1), StateVector::basis(2, 2)};
  const auto o2 = build_observable_matrix(kernel::gram(two), num::gram_schmidt(two), std::vector<double>{2.0, -1.0});
  CHECK(std::abs(o2(0, 0) - 2.0) < 1e-15);
  CHECK(std::abs(o2(1, 1) + 1.0) < 1e-15);
  CHECK(std::abs(o2(0, 1)) < 1e-15);

  CHECK_THROWS_AS(build_observable_matrix(kernel::gram(two), gs1, std::vector<double>{1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("build_observable_matrix and diagonalize: dense oracle, M=30, n=5") {
  std::mt19937_64 rng(2);
  std::vector<StateVector> st;
  std::vector<double> alpha;
  std::normal_distribution<double> nd;
  for (int i = 0; i < 30; ++i) {
    st.push_back(testing::random_state(5, rng));
    alpha.push_back(nd(rng));
  }
  const auto gs = num::gram_schmidt(st);
  const auto o = build_observable_matrix(kernel::gram(st), gs, alpha);
  const auto dense = dense_observable(st, alpha);
  for (std::size_t i = 0; i < gs.rank; ++i)
    for (std::size_t j = 0; j < gs.rank; ++j) {
      const auto dj = num::matvec(dense, gs.basis[j].amplitudes());
      cplx e{};
      for (std::size_t a = 0; a < dj.size(); ++a) e += std::conj(gs.basis[i][a]) * dj[a];
      CHECK(std::abs(o(i, j) - e) < 1e-10);
    }

  const auto obs = diagonalize_observable(o, gs.basis, 3);
  CHECK(obs.label == 3);
  CHECK(obs.subspace_dim == 30);
  double sum_l = 0.0, sum_a = 0.0;
  for (double v : obs.values) sum_l += v;
  for (double a : alpha) sum_a += a;
  CHECK(std::abs(sum_l - sum_a) < 1e-8);
  for (std::size_t k = 1; k < obs.values.size(); ++k)
    CHECK(obs.values[k - 1] * obs.values[k - 1] >= obs.values[k] * obs.values[k]);
  for (std::size_t k = 0; k < obs.vectors.size(); ++k) {
    const auto ov = num::matvec(dense, obs.vectors[k].amplitudes());
    double res = 0.0;
    for (std::size_t a = 0; a < ov.size(); ++a) res += std::norm(ov[a] - obs.values[k] * obs.vectors[k][a]);
    CHECK(std::sqrt(res) <= 1e-7);
    for (std::size_t q = 0; q < obs.vectors.size(); ++q)
      CHECK(std::abs(sim::inner_product(obs.vectors[k], obs.vectors[q]) - (k == q ? 1.0 : 0.0)) < 1e-8);
  }
}

TEST_CASE("truncate and cumulative_contribution") {
  const auto a = with_values({3, -3, 1});
  const auto t = truncate(a, 2);
  CHECK(t.values == std::vector<double>{3, -3});
  CHECK(truncate(a, 3).values == a.values);
  CHECK_THROWS_AS(truncate(a, 0), std::invalid_argument);
  CHECK_THROWS_AS(truncate(a, 4), std::invalid_argument);

  const auto b = with_values({2, -2, 1, -1});
  CHECK(cumulative_contribution(b, 2) == doctest::Approx(0.8));
  CHECK(cumulative_contribution(b, 4) == 1.0);
  CHECK_THROWS_AS(cumulative_contribution(b, 0), std::invalid_argument);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<double> v(20);
  for (auto& x : v) x = nd(rng);
  std::sort(v.begin(), v.end(), [](double x, double y) { return x * x > y * y; });
  const auto c = with_values(v);
  double total = 0.0;
  for (double x : v) total += x * x;
  double prev = 0.0, head = 0.0;
  for (std::size_t k = 1; k <= v.size(); ++k) {
    head += v[k - 1] * v[k - 1];
    const double r = cumulative_contribution(c, k);
    CHECK(r == doctest::Approx(head / total).epsilon(1e-12));
    CHECK(r >= prev);
    prev = r;
  }
  CHECK(prev == doctest::Approx(1.0));
}

TEST_CASE("low-rank model: exact at full rank") {
  const auto s = clustered(4, 3, 12, 0.3, 7);
  const auto g = kernel::gram(s.train);
  const auto km = kernel::train_one_vs_rest(g, s.train, s.train_labels, 3);
  const auto gs = num::gram_schmidt(s.train);
  const auto full = decompose(km, g, gs);
  const auto lr = make_low_rank(km, gs, full, gs.rank, 1e-8);
  double worst = 0.0;
  for (const auto* set : {&s.train, &s.test})
    for (const auto& x : *set) {
      const auto a = kernel::predict_implicit(km, x), b = predict_low_rank(lr, x);
      for (int l = 0; l < 3; ++l) worst = std::max(worst, std::abs(a.decisions[l] - b.decisions[l]));
      CHECK(a.label == b.label);
    }
  CHECK(worst <= 1e-8);
  CHECK_THROWS_AS(make_low_rank(km, gs, full, 0, 1e-8), std::invalid_argument);
  CHECK_THROWS_AS(predict_low_rank(lr, StateVector(2)), std::invalid_argument);
}

TEST_CASE("low-rank model: K=1 keeps accuracy on zero-noise clusters; top eigenvector aligns with its label") {
  const auto s = clustered(5, 4, 10, 0.0, 8);
  const auto g = kernel::gram(s.train);
  const auto km = kernel::train_one_vs_rest(g, s.train, s.train_labels, 4);
  const auto gs = num::gram_schmidt(s.train);
  const auto full = decompose(km, g, gs);
  const auto lr1 = make_low_rank(km, gs, full, 1, 1e-8);
  int full_ok = 0, k1_ok = 0;
  for (std::size_t i = 0; i < s.test.size(); ++i) {
    full_ok += kernel::predict_implicit(km, s.test[i]).label == s.test_labels[i];
    k1_ok += predict_low_rank(lr1, s.test[i]).label == s.test_labels[i];
  }
  CHECK(k1_ok == full_ok);

  for (int l = 0; l < 4; ++l) {
    double same = 0.0, cross = 0.0;
    int ns = 0, nc = 0;
    for (std::size_t i = 0; i < s.train.size(); ++i) {
      const double f = std::norm(sim::inner_product(full[l].vectors[0], s.train[i]));
      if (s.train_labels[i] == l) {
        same += f;
        ++ns;
      } else {
        cross += f;
        ++nc;
      }
    }
    CHECK(same / ns >= cross / nc);
  }
}

TEST_CASE("spectrum CSV and bundle round trip") {
  const auto s = clustered(3, 2, 6, 0.3, 9);
  const auto g = kernel::gram(s.train);
  const auto km = kernel::train_one_vs_rest(g, s.train, s.train_labels, 2);
  const auto gs = num::gram_schmidt(s.train);
  const auto full = decompose(km, g, gs);
  const auto csv = spectrum_csv(full);
  CHECK(csv.rfind("label,k,lambda,cumulative_ratio\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == 1 + 2 * gs.rank);

  const auto lr = make_low_rank(km, gs, full, 2, 1e-8);
  const auto back = low_rank_from_json(nlohmann::json::parse(low_rank_to_json(lr).dump()), s.train);
  REQUIRE(back.observables.size() == 2);
  for (const auto& x : s.test) {
    const auto a = predict_low_rank(lr, x), b = predict_low_rank(back, x);
    for (int l = 0; l < 2; ++l) CHECK(std::abs(a.decisions[l] - b.decisions[l]) < 1e-12);
  }
  std::vector<StateVector> wrong(s.train.begin() + 1, s.train.end());
  CHECK_THROWS_AS(low_rank_from_json(low_rank_to_json(lr), wrong), std::invalid_argument);
}
