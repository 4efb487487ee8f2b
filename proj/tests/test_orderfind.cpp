#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "diffusion_factor/error.hpp"
#include "diffusion_factor/orderfind.hpp"

using namespace diffusion_factor;

namespace {

u64 naive_order(u64 a, u64 n) {
  u64 x = a % n;
  u64 r = 1;
  while (x != 1) {
    x = x * a % n;
    ++r;
  }
  return r;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::EngineError;
}

OrderFindConfig walk_only(OrderMode mode = OrderMode::FullBound) {
  OrderFindConfig c;
  c.mode = mode;
  c.repetition_shortcut = false;
  return c;
}

}  // namespace

TEST_CASE("required steps") {
  CHECK(required_steps(1363) == 347);
  CHECK(required_steps(33) == 98);
  CHECK(required_steps(2) == 9);
  for (u64 n : {35ULL, 105ULL, 1000003ULL}) {
    const double m = std::floor(std::log2(static_cast<double>(n))) + 1;
    CHECK(required_steps(n) == static_cast<u64>(std::floor(4 * (m + 1) * std::log(n))) + 1);
  }
}

TEST_CASE("decode") {
  CHECK(decode_order(1.0 / 161, 1363) == std::vector<u64>{161});
  CHECK(decode_order(1.0 / 160.6, 1363) == std::vector<u64>{161});
  CHECK(decode_order(1.0, 33) == std::vector<u64>{1});
  CHECK(decode_order(1.0 / 2.5, 33) == std::vector<u64>{2, 3});
  CHECK(decode_order(1e-9, 33) == std::vector<u64>{33});
  CHECK(code_of([] { decode_order(0.0, 33); }) == Errc::NonpositiveProbability);
  CHECK(code_of([] { decode_order(-1e-3, 33); }) == Errc::NonpositiveProbability);
  CHECK(code_of([] { decode_order(1.5, 33); }) == Errc::PreconditionViolated);
}

TEST_CASE("candidate intervals") {
  const std::vector<double> one{1.0};
  const CandidateInterval exact = candidate_interval(one, 1e-6, 33);
  CHECK(exact.candidates() == std::vector<u64>{1});

  const CandidateInterval all = candidate_interval(one, 1.0, 33);
  CHECK(all.first == 1);
  CHECK(all.last == 33);

  const std::vector<double> near{1.0 / 160.9, 1.0 / 161.1};
  const CandidateInterval tight = candidate_interval(near, 1e-5, 1363);
  CHECK(tight.first <= 161);
  CHECK(tight.last >= 161);
  for (u64 h : tight.candidates()) {
    CHECK(1.0 / h >= tight.lower);
    CHECK(1.0 / h <= tight.upper);
  }
  // inconsistent measurements give an empty set, not a wrap-around
  const std::vector<double> far{0.5, 0.01};
  CHECK(candidate_interval(far, 1e-3, 1363).empty());

  const std::vector<double> none;
  CHECK(code_of([&] { candidate_interval(none, 0.1, 33); }) == Errc::EmptyMeasurements);
  CHECK(code_of([&] { candidate_interval(one, 0.0, 33); }) == Errc::PreconditionViolated);
}

TEST_CASE("measurement bracket") {
  const std::vector<double> p{1.0 / 160.42, 1.0 / 161.5, 1.0 / 161.0};
  const CandidateInterval b = measurement_bracket(p, 1363);
  CHECK(b.first == 160);
  CHECK(b.last == 162);
  CHECK(b.error_bound == 0.0);
  const std::vector<double> exact{1.0 / 5};
  CHECK(measurement_bracket(exact, 33).candidates() == std::vector<u64>{5});
}

TEST_CASE("candidate verification") {
  const Residue b(944, 1363);
  StepLedger ledger;
  const std::vector<u64> bracket{160, 161, 162};
  CHECK(verify_candidates(b, bracket, &ledger) == 161);
  CHECK(ledger.digital_ops > 0);
  const std::vector<u64> multiple{322};
  CHECK(!verify_candidates(b, multiple));
  const std::vector<u64> wrong{100, 200};
  CHECK(!verify_candidates(b, wrong));
}

TEST_CASE("full-bound order of 944 mod 1363") {
  const OrderResult r = find_order(Residue(944, 1363), walk_only());
  CHECK(r.order == 161);
  CHECK(r.decode_path == DecodePath::FullBoundDecode);
  CHECK(r.iterations == 347);
  CHECK(r.ledger.matrix_applications == 347);
  CHECK(r.ledger.measurements == 1);
  REQUIRE(r.probability_at_start);
  CHECK(std::abs(*r.probability_at_start - 1.0 / 161) < 1.0 / (1363.0 * 1363.0));
  REQUIRE(r.final_state);
  CHECK(r.final_state->iteration == 347);
}

TEST_CASE("early stop on 944 mod 1363") {
  const OrderResult r = find_order(Residue(944, 1363), walk_only(OrderMode::EarlyStop));
  CHECK(r.order == 161);
  CHECK(r.decode_path == DecodePath::EarlyStopDecode);
  CHECK(r.iterations == 25);
  CHECK(r.ledger.diffusion_steps() == 36);
  REQUIRE(r.last_check);
  CHECK(r.last_check->measurements.size() == 11);
  for (double p : r.last_check->measurements) {
    CHECK(p > 1.0 / 162);
    CHECK(p < 1.0 / 160);
  }
  const auto candidates = r.last_check->bracket.candidates();
  CHECK(std::set<u64>(candidates.begin(), candidates.end()) <= std::set<u64>{160, 161, 162});
  // the provable bound is still far from tight at m = 25
  CHECK(r.last_check->bound_interval.size() > 8);
}

TEST_CASE("measured vertex sets") {
  const Residue b(944, 1363);
  const PowerTable t = build_power_table(b);
  const CayleyGraph g = build_cayley_graph(t);
  CHECK(measured_vertices(g, t, MeasureSet::StartOnly) == std::vector<VertexId>{0});
  CHECK(measured_vertices(g, t, MeasureSet::SquareChain).size() == 11);
  CHECK(measured_vertices(g, t, MeasureSet::All).size() == 161);
  const auto s = measured_vertices(g, t, MeasureSet::SPowers);
  CHECK(s.front() == 0);
  CHECK(std::set<VertexId>(s.begin(), s.end()).size() == s.size());
}

TEST_CASE("repetition shortcut") {
  const OrderResult one = find_order(Residue(1, 33));
  CHECK(one.order == 1);
  CHECK(one.decode_path == DecodePath::RepetitionShortcut);
  CHECK(one.ledger.diffusion_steps() == 0);

  const OrderResult five = find_order(Residue(25, 33));
  CHECK(five.order == 5);
  CHECK(five.decode_path == DecodePath::RepetitionShortcut);
}

TEST_CASE("walk decode for every odd-order unit of small moduli") {
  for (u64 n : {33ULL, 35ULL}) {
    for (u64 b = 1; b < n; ++b) {
      if (std::gcd(b, n) != 1) continue;
      const u64 r = naive_order(b, n);
      if (r % 2 == 0) {
        CHECK(code_of([&] { find_order(Residue(b, n), walk_only()); }) == Errc::OrderNotOdd);
        CHECK(code_of([&] { find_order(Residue(b, n)); }) == Errc::OrderNotOdd);
        continue;
      }
      CHECK(find_order(Residue(b, n), walk_only()).order == r);
      CHECK(find_order(Residue(b, n), walk_only(OrderMode::EarlyStop)).order == r);
      CHECK(find_order(Residue(b, n)).order == r);
    }
  }
}

TEST_CASE("order finding errors") {
  CHECK(code_of([] { find_order(Residue(3, 33)); }) == Errc::NotAUnit);
  OrderFindConfig short_walk = walk_only();
  short_walk.steps_override = 3;
  CHECK(code_of([&] { find_order(Residue(944, 1363), short_walk); }) == Errc::DecodeFailure);
}
