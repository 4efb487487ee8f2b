#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "diffusion_factor/cli.hpp"

namespace py = pybind11;
using namespace diffusion_factor;

namespace {

// Python int -> Exponent through 64-bit limbs, so exponents need not fit a u64.
Exponent to_exponent(const py::int_& value) {
  if (py::int_(0).attr("__gt__")(value).cast<bool>()) {
    throw py::value_error("exponent must be nonnegative");
  }
  std::vector<u64> limbs;
  py::object v = value;
  const py::int_ mask(~u64{0});
  const py::int_ shift(64);
  while (v.attr("__bool__")().cast<bool>()) {
    limbs.push_back(v.attr("__and__")(mask).cast<u64>());
    v = v.attr("__rshift__")(shift);
  }
  return Exponent::from_limbs(std::move(limbs));
}

py::object to_fraction(const Rational& q) {
  const py::object fraction = py::module_::import("fractions").attr("Fraction");
  return fraction(py::int_(py::str(numerator(q).str())), py::int_(py::str(denominator(q).str())));
}

py::dict ledger_dict(const StepLedger& l) {
  py::dict d;
  d["matrix_applications"] = l.matrix_applications;
  d["measurements"] = l.measurements;
  d["diffusion_steps"] = l.diffusion_steps();
  d["digital_ops"] = l.digital_ops;
  return d;
}

py::object json_to_py(const nlohmann::json& j) {
  const py::object loads = py::module_::import("json").attr("loads");
  return loads(j.dump());
}

OrderFindConfig make_config(const std::string& mode, u64 check_every, u64 max_candidates,
                            const std::string& measure, bool shortcut, std::optional<u64> steps) {
  OrderFindConfig c;
  if (mode == "full") {
    c.mode = OrderMode::FullBound;
  } else if (mode == "early") {
    c.mode = OrderMode::EarlyStop;
  } else {
    throw py::value_error("mode must be 'full' or 'early'");
  }
  c.check_every = check_every;
  c.max_candidates = max_candidates;
  if (measure == "start") {
    c.measure_set = MeasureSet::StartOnly;
  } else if (measure == "s-powers") {
    c.measure_set = MeasureSet::SPowers;
  } else if (measure == "square-chain") {
    c.measure_set = MeasureSet::SquareChain;
  } else if (measure == "all") {
    c.measure_set = MeasureSet::All;
  } else {
    throw py::value_error("unknown measure set: " + measure);
  }
  c.repetition_shortcut = shortcut;
  c.steps_override = steps;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Integer factorization by simulated diffusion on Cayley graphs";

  py::register_exception<Error>(m, "DiffusionError", PyExc_RuntimeError);

  m.def("gcd", &gcd);
  m.def("is_prime", &is_prime);
  m.def("exponent_bound", &exponent_bound);
  m.def("mod_pow", [](u64 base, const py::int_& exponent, u64 modulus) {
    return mod_pow(Residue(base, modulus), to_exponent(exponent)).value();
  }, py::arg("base"), py::arg("exponent"), py::arg("modulus"));
  m.def("order_bruteforce", [](u64 a, u64 n) { return order_bruteforce(Residue(a, n)); });
  m.def("factorize", [](u64 n) {
    std::vector<std::pair<u64, unsigned>> out;
    for (const auto& pp : factorize(n)) out.emplace_back(pp.prime, pp.exponent);
    return out;
  });
  m.def("screen", [](u64 n) { return screen_input(n).describe(); });
  m.def("p_success", [](unsigned m) { return to_fraction(p_success(m)); });

  m.def("power_table", [](u64 a, u64 n) {
    const PowerTable t = build_power_table(Residue(a, n));
    std::vector<u64> plus, minus;
    for (const auto& r : t.plus_powers) plus.push_back(r.value());
    for (const auto& r : t.minus_powers) minus.push_back(r.value());
    return py::make_tuple(t.M, plus, minus);
  });
  m.def("find_repetition", [](u64 a, u64 n) -> py::object {
    const auto w = find_repetition(build_power_table(Residue(a, n)));
    if (!w) return py::none();
    py::dict d;
    d["l"] = w->l;
    d["l_prime"] = w->l_prime;
    d["sign"] = static_cast<int>(w->sign);
    d["q"] = w->q;
    return d;
  });
  m.def("cayley_vertices", [](u64 b, u64 n) { return build_cayley_graph(Residue(b, n)).labels(); });

  m.def("walk", [](u64 b, u64 n, u64 steps) {
    const WalkState s = run_walk(std::make_shared<const CayleyGraph>(build_cayley_graph(Residue(b, n))), steps);
    return py::make_tuple(s.graph->labels(), s.probabilities);
  }, py::arg("b"), py::arg("n"), py::arg("steps"),
     "Vertex residues and p_steps after a half-lazy walk from 1 on X_{N,b}.");
  m.def("spectrum", [](u64 r, unsigned M) {
    const SpectralData s = spectral_data(r, M);
    return py::make_tuple(s.lambda, s.lambda_star);
  });
  m.def("spectral_probability", py::overload_cast<u64, unsigned, u64, u64>(&spectral_walk_oracle),
        py::arg("r"), py::arg("M"), py::arg("steps"), py::arg("vertex"));

  m.def("required_steps", &required_steps);
  m.def("find_order", [](u64 b, u64 n, const std::string& mode, u64 check_every,
                         u64 max_candidates, const std::string& measure, bool shortcut,
                         std::optional<u64> steps) {
    const OrderResult r = find_order(
        Residue(b, n), make_config(mode, check_every, max_candidates, measure, shortcut, steps));
    py::dict d = json_to_py(cli::order_json(r));
    d["ledger"] = ledger_dict(r.ledger);
    return d;
  }, py::arg("b"), py::arg("n"), py::arg("mode") = "full", py::arg("check_every") = 25,
     py::arg("max_candidates") = 8, py::arg("measure") = "square-chain",
     py::arg("shortcut") = true, py::arg("steps") = py::none());

  m.def("factor", [](u64 n, u64 a, const std::string& mode, u64 check_every) {
    const FactorOutcome o = factor_once(n, a, make_config(mode, check_every, 8, "square-chain", true, std::nullopt));
    return json_to_py(cli::outcome_json(o));
  }, py::arg("n"), py::arg("a"), py::arg("mode") = "full", py::arg("check_every") = 25);
  m.def("factor_random", [](u64 n, u64 seed, u64 attempts) -> py::object {
    const TrialReport r = factor_with_retries(n, attempts, seed);
    if (!r.success) return py::none();
    return py::int_(*r.success);
  }, py::arg("n"), py::arg("seed") = 1, py::arg("attempts") = 16);
  m.def("success_rate", [](u64 n, unsigned threads) {
    SuccessRate s;
    {
      py::gil_scoped_release release;
      s = exhaustive_success_rate(n, {}, threads);
    }
    py::dict d;
    d["rate_over_units"] = to_fraction(s.rate_over_units);
    d["rate_over_all"] = to_fraction(s.rate_over_all);
    d["bound"] = to_fraction(s.bound);
    d["histogram"] = s.histogram;
    return d;
  }, py::arg("n"), py::arg("threads") = 0);

  m.def("main", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, "Runs the command-line interface in-process; returns (exit code, stdout, stderr).");
}
