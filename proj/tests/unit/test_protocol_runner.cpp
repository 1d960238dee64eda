#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mbloch/errors.hpp"
#include "mbloch/protocol_runner.hpp"
#include "oracles.hpp"

using namespace mbloch;
using V3 = Eigen::Vector3d;

namespace {

constexpr double kPi = std::numbers::pi;
const V3 kNorth(0, 0, 1);

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

/// Ramsey population for two pi/2 pulses of length tp around a free
/// precession T. A detuned pulse adds 2 tp/pi of effective precession time on
/// each side; tp = 0 is the instantaneous-pulse limit.
double ramsey_ideal(double delta, double gamma, double T, double tp) {
  const double c = std::cos(delta * (T + 4 * tp / kPi) / 2);
  return c * c * std::exp(-gamma * (T + 2 * tp));
}

void check_consistent(const ProtocolResult& r, double tol) {
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    CHECK(r.popA[i] >= -tol);
    CHECK(r.popB[i] >= -tol);
    CHECK(r.popA[i] + r.popB[i] == doctest::Approx(r.bloch[i].norm()).epsilon(tol));
  }
}

}  // namespace

TEST_CASE("single pulses") {
  const auto pi = run_sequence({{Pulse{0.1, 0, kPi / 0.1}}, 0}, kNorth, 10, Model::BlochExact);
  CHECK(pi.popB.back() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pi.popA.back() < 1e-15);
  const auto twoPi = run_sequence({{Pulse{0.1, 0, 2 * kPi / 0.1}}, 0}, kNorth, 10, Model::BlochExact);
  CHECK(twoPi.popA.back() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((twoPi.bloch.back() - kNorth).norm() < 1e-14);

  const auto wait = run_sequence({{Wait{0.2, 10}}, 0}, V3(0, 1, 0), 5, Model::BlochExact);
  CHECK((wait.bloch.back() - V3(-std::sin(2.0), std::cos(2.0), 0)).norm() < 1e-15);
}

TEST_CASE("sample layout") {
  const PulseSequence seq{{Pulse{0.1, 0, 4}, Wait{0, 0}, Wait{0, 6}}, 0.01};
  const auto r = run_sequence(seq, kNorth, 4, Model::BlochExact);
  REQUIRE(r.t.size() == 13);
  CHECK(r.model == Model::BlochExact);
  CHECK(r.t[0] == 0);
  CHECK(r.t[1] == 1);
  CHECK(r.t[4] == 4);
  CHECK(r.t[5] == 4);
  CHECK(r.t[8] == 4);
  CHECK(r.t[12] == 10);
  for (std::size_t i = 1; i < r.t.size(); ++i) CHECK(r.t[i] >= r.t[i - 1]);
  check_consistent(r, 1e-14);
}

TEST_CASE("sequence validation") {
  CHECK_THROWS_AS(run_sequence({{}, 0}, kNorth, 5, Model::BlochExact), ValidationError);
  CHECK_THROWS_AS(run_sequence({{Pulse{0.1, 0, -1}}, 0}, kNorth, 5, Model::BlochExact), ValidationError);
  CHECK_THROWS_AS(run_sequence({{Wait{0, NAN}}, 0}, kNorth, 5, Model::BlochExact), ValidationError);
  CHECK_THROWS_AS(run_sequence({{Pulse{0.1, 0, 1}}, -0.1}, kNorth, 5, Model::BlochExact), ValidationError);
  CHECK_THROWS_AS(run_sequence({{Pulse{0.1, 0, 1}}, 0}, kNorth, 0, Model::BlochExact), ValidationError);
  CHECK_THROWS_AS(run_sequence({{Pulse{0.1, 0, 1}}, 0}, V3(NAN, 0, 1), 5, Model::BlochExact), ValidationError);
  CHECK_THROWS_AS(run_sequence({{Pulse{0.1, 0, 1}}, 0}, kNorth, 5, Model::NewtonFull), ConfigurationError);

  const NewtonRealization realization{{1, 1, 0.1, 0}};
  CHECK_THROWS_AS(run_sequence({{Pulse{0.01, 0, 10}, Wait{0.001, 10}}, 0}, kNorth, 5, Model::NewtonFull, realization),
                  ValidationError);

  CHECK(parse_model("bloch") == Model::BlochExact);
  CHECK(parse_model("rwa") == Model::EnvelopeRWA);
  CHECK(parse_model("newton") == Model::NewtonFull);
  CHECK_THROWS_AS(parse_model("exact"), ValidationError);
  for (Model m : {Model::BlochExact, Model::EnvelopeRWA, Model::NewtonFull}) CHECK(parse_model(model_name(m)) == m);
}

TEST_CASE("Rabi closed form") {
  const double A = 0.1;
  const DriveParams<double> d{A, 0, A / 25};
  for (Model m : {Model::BlochExact, Model::EnvelopeRWA}) {
    const auto r = rabi_scan(d, 4 * 2 * kPi / A, 801, m);
    REQUIRE(r.t.size() == 801);
    CHECK(r.model == m);
    CHECK(r.popA[0] == 1.0);
    double worst = 0;
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      const double c = std::cos(A * r.t[i] / 2), s = std::sin(A * r.t[i] / 2), e = std::exp(-d.gamma * r.t[i]);
      worst = std::max({worst, std::abs(r.popA[i] - c * c * e), std::abs(r.popB[i] - s * s * e)});
    }
    CHECK(worst < 1e-10);
    check_consistent(r, 1e-12);
  }
}

TEST_CASE("detuned Rabi ceiling") {
  const DriveParams<double> d{0.1, 0.1, 0};
  const double omegaR = rabi_frequency(d);
  const auto r = rabi_scan(d, 2 * kPi / omegaR, 201, Model::BlochExact);
  const auto peak = std::max_element(r.popB.begin(), r.popB.end());
  CHECK(*peak == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.t[static_cast<std::size_t>(peak - r.popB.begin())] == doctest::Approx(kPi / omegaR));

  const auto idle = rabi_scan(DriveParams<double>{0, 0.3, 0.01}, 50, 51, Model::BlochExact);
  for (double p : idle.popB) CHECK(p == 0);
  CHECK_THROWS_AS(rabi_scan(d, 0, 10, Model::BlochExact), ValidationError);
  CHECK_THROWS_AS(rabi_scan(d, 1, 1, Model::BlochExact), ValidationError);
}

TEST_CASE("Ramsey return points") {
  const double delta = 0.05;
  const DriveParams<double> d{1e4 * delta, delta, 0};
  const std::vector<double> T{kPi / delta, 2 * kPi / delta};
  const auto r = ramsey_scan(d, T, Model::BlochExact);
  CHECK(r.popB[0] < 1e-6);
  CHECK(r.popB[1] > 1 - 1e-6);

  const std::vector<double> zero{0};
  const auto back = ramsey_scan(DriveParams<double>{0.1, 0, 0}, zero, Model::BlochExact);
  CHECK(back.popB[0] == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(ramsey_scan(DriveParams<double>{0, delta, 0}, T, Model::BlochExact), ValidationError);
  const std::vector<double> negative{-1};
  CHECK_THROWS_AS(ramsey_scan(d, negative, Model::BlochExact), ValidationError);
}

TEST_CASE("Ramsey fringes") {
  const double delta = 0.05, gamma = 0.002, A = 100 * delta;
  const DriveParams<double> d{A, delta, gamma};
  std::vector<double> T;
  for (int i = 0; i <= 1600; ++i) T.push_back(0.25 * i);
  const auto r = ramsey_scan(d, T, Model::BlochExact);
  const double tp = (kPi / 2) / A;
  double plain = 0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    CHECK(std::abs(r.popB[i] - ramsey_ideal(delta, gamma, T[i], tp)) < 1e-7);
    const double c = std::cos(delta * T[i] / 2);
    plain = std::max(plain, std::abs(r.popB[i] - c * c * std::exp(-gamma * (T[i] + 2 * tp))));
  }
  // the uncorrected closed form is off by a fringe shift of 2 delta/A
  CHECK(plain < delta / A);
  CHECK(plain > 0.5 * delta / A);

  std::vector<double> maxima;
  for (std::size_t i = 1; i + 1 < T.size(); ++i)
    if (r.popB[i] > r.popB[i - 1] && r.popB[i] >= r.popB[i + 1]) maxima.push_back(T[i]);
  REQUIRE(maxima.size() == 3);
  CHECK(std::abs(maxima[1] - maxima[0] - 2 * kPi / delta) <= 0.25);
  CHECK(std::abs(maxima[2] - maxima[1] - 2 * kPi / delta) <= 0.25);

  const std::vector<std::pair<double, double>> golden{
      {0, 0.99864428158767993},       {31.25, 0.463626433595419},   {62.5, 2.5580861481300232e-06},
      {125, 0.77778892087036655},     {187.5, 0.00015215787636357891}, {250, 0.60544336999505743}};
  std::vector<double> gT;
  for (const auto& g : golden) gT.push_back(g.first);
  const auto gr = ramsey_scan(d, gT, Model::BlochExact);
  for (std::size_t i = 0; i < golden.size(); ++i) CHECK(gr.popB[i] == doctest::Approx(golden[i].second).epsilon(1e-12));

  const auto flat = ramsey_scan(DriveParams<double>{A, 0, gamma}, T, Model::BlochExact);
  for (std::size_t i = 0; i < T.size(); ++i)
    CHECK(flat.popB[i] == doctest::Approx(std::exp(-gamma * (T[i] + 2 * tp))).epsilon(1e-12));
}

TEST_CASE("Hahn echo") {
  const double A = 1e9;
  std::vector<double> T;
  for (int i = 0; i < 20; ++i) T.push_back(5.0 * i);

  const std::vector<double> t50{50};
  const auto one = hahn_scan(DriveParams<double>{A, 0.03, 0.01}, t50, Model::BlochExact);
  CHECK(std::abs(one.popB[0] - std::exp(-0.5)) < 1e-9);

  for (double delta : {0.0, 0.013, 0.05, 0.2}) {
    const auto free = hahn_scan(DriveParams<double>{1.0, delta, 0}, T, Model::BlochExact);
    const auto ideal = hahn_scan(DriveParams<double>{A, delta, 0}, T, Model::BlochExact);
    for (std::size_t i = 0; i < T.size(); ++i) {
      CHECK(ideal.popB[i] == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(ideal.popA[i] < 1e-9);
      if (delta == 0) CHECK(free.popB[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  const auto lo = hahn_scan(DriveParams<double>{A, 0.02, 0.004}, T, Model::BlochExact);
  const auto hi = hahn_scan(DriveParams<double>{A, 0.07, 0.004}, T, Model::BlochExact);
  for (std::size_t i = 0; i < T.size(); ++i) {
    CHECK(std::abs(lo.popB[i] - hi.popB[i]) < 1e-9);
    CHECK(std::abs(lo.popB[i] - std::exp(-0.004 * T[i])) < 1e-9);
  }

  CHECK_THROWS_AS(hahn_scan(DriveParams<double>{0, 0.02, 0}, T, Model::BlochExact), ValidationError);
  CHECK_THROWS_AS(hahn_scan(DriveParams<double>{-1, 0.02, 0}, T, Model::BlochExact), ValidationError);
}

TEST_CASE("Hahn closing pulse variants agree") {
  std::vector<double> T{0, 3, 17};
  const auto a = hahn_scan(DriveParams<double>{0.4, 0, 0}, T, Model::BlochExact, std::nullopt,
                           HahnFinalPulse::ThreeHalvesPi);
  const auto b = hahn_scan(DriveParams<double>{0.4, 0, 0}, T, Model::BlochExact, std::nullopt,
                           HahnFinalPulse::NegatedHalfPi);
  for (std::size_t i = 0; i < T.size(); ++i) CHECK((a.bloch[i] - b.bloch[i]).norm() < 1e-12);

  const auto seq = hahn_sequence(DriveParams<double>{0.4, 0.1, 0}, 10, HahnFinalPulse::NegatedHalfPi);
  REQUIRE(seq.segments.size() == 5);
  CHECK(std::get<Pulse>(seq.segments.back()).A == -0.4);
  CHECK(std::get<Wait>(seq.segments[1]).duration == 5);
}

TEST_CASE("closed-form amplitudes and Bloch propagation agree on random sequences") {
  auto gen = oracle::rng();
  std::uniform_real_distribution<double> u(-1, 1), pos(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    PulseSequence seq{{}, 0.02 * pos(gen)};
    const int n = 1 + trial % 5;
    for (int i = 0; i < n; ++i) {
      if (i % 2) seq.segments.push_back(Wait{0.1 * u(gen), 20 * pos(gen)});
      else seq.segments.push_back(Pulse{0.3 * u(gen), 0.1 * u(gen), 20 * pos(gen)});
    }
    V3 s0(u(gen), u(gen), u(gen));
    const auto b = run_sequence(seq, s0, 7, Model::BlochExact);
    const auto r = run_sequence(seq, s0, 7, Model::EnvelopeRWA);
    CHECK(max_diff(b.popA, r.popA) < 1e-9);
    CHECK(max_diff(b.popB, r.popB) < 1e-9);
    for (std::size_t i = 0; i < b.t.size(); ++i) CHECK((b.bloch[i] - r.bloch[i]).norm() < 1e-9);
    check_consistent(b, 1e-12);
    check_consistent(r, 1e-12);
  }

  std::vector<double> T{0, 10, 40};
  const DriveParams<double> d{0.2, 0.03, 0.005};
  for (auto scan : {&ramsey_scan}) {
    const auto x = scan(d, T, Model::BlochExact, std::nullopt);
    const auto y = scan(d, T, Model::EnvelopeRWA, std::nullopt);
    CHECK(max_diff(x.popB, y.popB) < 1e-9);
  }
  const auto hx = hahn_scan(d, T, Model::BlochExact);
  const auto hy = hahn_scan(d, T, Model::EnvelopeRWA);
  CHECK(max_diff(hx.popB, hy.popB) < 1e-9);
  CHECK(max_diff(hx.popA, hy.popA) < 1e-9);
}

TEST_CASE("pulse area invariance") {
  for (double theta : {kPi / 2, kPi, 1.3}) {
    const auto a = run_sequence({{Pulse{0.1, 0, theta / 0.1}}, 0}, kNorth, 1, Model::BlochExact);
    const auto b = run_sequence({{Pulse{0.2, 0, theta / 0.2}}, 0}, kNorth, 1, Model::BlochExact);
    CHECK((a.bloch.back() - b.bloch.back()).norm() < 1e-12);
  }
  double prev = 1e300;
  for (double A : {0.1, 0.4, 1.6, 6.4}) {
    const auto a = run_sequence({{Pulse{A, 0.05, (kPi / 2) / A}}, 0}, kNorth, 1, Model::BlochExact);
    const auto b = run_sequence({{Pulse{2 * A, 0.05, (kPi / 2) / (2 * A)}}, 0}, kNorth, 1, Model::BlochExact);
    const double diff = (a.bloch.back() - b.bloch.back()).norm();
    CHECK(diff < prev);
    prev = diff;
  }
}

TEST_CASE("scans are ordered and match individual runs") {
  std::vector<double> T;
  for (int i = 0; i < 37; ++i) T.push_back(2.5 * (36 - i));
  const DriveParams<double> d{0.3, 0.04, 0.003};
  const auto scan = ramsey_scan(d, T, Model::BlochExact);
  CHECK(scan.T == T);
  for (std::size_t i = 0; i < T.size(); ++i) {
    const auto single = run_sequence(ramsey_sequence(d, T[i]), kNorth, 1, Model::BlochExact);
    CHECK(scan.popB[i] == single.popB.back());
    CHECK(scan.bloch[i] == single.bloch.back());
  }
  const auto again = ramsey_scan(d, T, Model::BlochExact);
  CHECK(again.popB == scan.popB);
  CHECK_THROWS_AS(ramsey_scan(d, T, Model::NewtonFull), ConfigurationError);
}

TEST_CASE("Newtonian realization follows the Bloch picture for slow drives") {
  SystemParams<double> p{1, 1, 0.1, 0};
  const double omega0 = derive_frequencies(p).omega0;
  for (double ratio : {200.0, 500.0}) {
    for (double g : {0.0, omega0 / 500}) {
      const DriveParams<double> d{omega0 / ratio, 0, g};
      const NewtonRealization realization{p};
      const auto n = rabi_scan(d, 2 * kPi / d.A, 401, Model::NewtonFull, realization);
      const auto b = rabi_scan(d, 2 * kPi / d.A, 401, Model::BlochExact);
      CHECK(n.model == Model::NewtonFull);
      CHECK(n.t == b.t);
      CHECK(max_diff(n.popA, b.popA) < 2e-2);
      CHECK(max_diff(n.popB, b.popB) < 2e-2);
    }
  }

  const double A = omega0 / 200;
  const DriveParams<double> d{A, A / 4, omega0 / 1000};
  const auto seq = ramsey_sequence(d, 300.0);
  const auto n = run_sequence(seq, kNorth, 40, Model::NewtonFull, NewtonRealization{p});
  const auto b = run_sequence(seq, kNorth, 40, Model::BlochExact);
  CHECK(max_diff(n.popA, b.popA) < 2e-2);
  CHECK(max_diff(n.popB, b.popB) < 2e-2);
}

TEST_CASE("layer comparison") {
  SystemParams<double> p{1, 1, 0.05, 0};
  p.gamma = derive_frequencies(p).omega0 / 5000;
  const std::vector<double> ratios{1.0 / 500, 1.0 / 50, 1.0 / 5};
  const auto report = compare_layers(p, ratios);
  REQUIRE(report.entries.size() == 3);
  CHECK(report.entries[0].maxDiscrepancy < 1e-2);
  CHECK(report.entries[0].maxDiscrepancy < report.entries[1].maxDiscrepancy);
  CHECK(report.entries[1].maxDiscrepancy < report.entries[2].maxDiscrepancy);
  CHECK(report.monotonicIncreasing);
  CHECK(report.entries[1].A == doctest::Approx(derive_frequencies(p).omega0 / 50));
  CHECK(report.entries[1].duration == doctest::Approx(2 * kPi / report.entries[1].A));

  const std::vector<double> idle{0};
  const auto still = compare_layers(SystemParams<double>{1, 1, 0.05, 0}, idle);
  CHECK(still.entries[0].maxDiscrepancy < 1e-3);

  const std::vector<double> reversed{1.0 / 5, 1.0 / 500};
  CHECK_FALSE(compare_layers(p, reversed).monotonicIncreasing);
  CHECK_THROWS_AS(compare_layers(p, std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS(compare_layers(p, std::vector<double>{-0.1}), ValidationError);
}
