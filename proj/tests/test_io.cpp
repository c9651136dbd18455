#include <doctest.h>

#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "perturbatrix/io.hpp"

using namespace perturbatrix;

namespace {

std::string data(const std::string& name) { return std::string(PERTURBATRIX_DATA_DIR) + "/" + name; }

ErrorKind parse_error_kind(const std::string& text) {
  try {
    parse_problem_spec(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("problem spec parsing") {
  const auto dense = parse_problem_spec(R"({"name": "d", "A": [[1, [0, 1]], [[0, -1], 2]], "B": [[1, 0], [0, 0]]})");
  CHECK(dense.name == "d");
  CHECK(dense.problem.a(0, 1) == cplx(0, 1));
  CHECK(dense.problem.a(1, 0) == cplx(0, -1));
  CHECK(dense.problem.b(0, 0) == cplx(1, 0));

  const auto r1 = parse_problem_spec(R"({"A": {"diagonal": [1, 2]}, "B": {"rank_one": {"e": [0.6, [0, 0.8]]}}})");
  VectorC e(2);
  e << 0.6, cplx(0, 0.8);
  CHECK((r1.problem.b - e * e.adjoint()).norm() < 1e-15);

  const auto rk = parse_problem_spec(R"({"A": {"diagonal": [1, 2, 3]}, "B": {"rank_k": {"vectors": [[1, 0, 0], [0, 2, 0]]}},
                                         "sector": {"sigma1_deg": 0, "sigma2_deg": 10}, "run": {"theta_deg": [45, 60], "t_max": 3}})");
  CHECK(rk.problem.b(0, 0) == cplx(1));
  CHECK(rk.problem.b(1, 1) == cplx(4));
  CHECK(rk.sigma2.value() == doctest::Approx(10 * oracle::pi / 180));
  CHECK(rk.run.theta_deg == std::vector<double>{45, 60});
  CHECK(rk.run.t_max == 3.0);

  const auto z = parse_problem_spec(R"({"A": {"diagonal": [1, 2]}, "B": {"zero": true}})");
  CHECK(z.problem.b.norm() == 0.0);

  CHECK(parse_error_kind("{not json") == ErrorKind::ParseError);
  CHECK(parse_error_kind(R"({"A": {"diagonal": [1, 2]}})") == ErrorKind::ParseError);
  CHECK(parse_error_kind(R"({"A": {"diagonal": [1, 2]}, "B": {"rank_one": {"e": [1, 1]}}})") == ErrorKind::NotUnitVector);
  CHECK(parse_error_kind(R"({"A": {"diagonal": [1, 2]}, "B": {"rank_one": {"e": [1, 0, 0]}}})") ==
        ErrorKind::DimensionMismatch);
  CHECK(parse_error_kind(R"({"A": [[1, 1], [0, 1]], "B": {"zero": true}})") == ErrorKind::NotHermitian);
}

TEST_CASE("family spec parsing") {
  const auto f = load_family_spec(data("uniform_family.json"));
  CHECK(f.N == 100);
  CHECK(f.model.tag == DensityTag::Uniform);
  CHECK(f.grid.nx == 81);
  CHECK(f.levels.size() == 5);
  const auto g = parse_family_spec(R"({"family": {"density": {"grid": {"s": [0, 0.5, 0.5, 1], "f": [2, 2, 0, 0]}}, "N": 20}})");
  CHECK(g.model.sup_norm == 2.0);
  CHECK(g.N == 20);
  CHECK_THROWS_AS(parse_family_spec(R"({"family": {"density": "cubic"}})"), Error);
}

TEST_CASE("number formatting and deterministic JSON") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  Json j = {{"b", 1.5}, {"a", Json::array({1, 2, 3})}, {"c", {{"x", 0.1}}}};
  const std::string s1 = dump_json(j), s2 = dump_json(j);
  CHECK(s1 == s2);
  CHECK(s1.find("\"b\"") < s1.find("\"a\""));
  CHECK(s1.find("0.10000000000000001") != std::string::npos);
  CHECK(Json::parse(s1)["c"]["x"].get<double>() == 0.1);
}

TEST_CASE("check reports") {
  const auto neq5 = run_check(load_problem_spec(data("neq5.json")));
  CHECK(neq5.failures.empty());
  CHECK(neq5.report["pass"].get<bool>());
  CHECK(neq5.report["cyclicity"]["cyclic"].get<bool>());

  const auto h3 = run_check(load_problem_spec(data("h3_fail.json")));
  CHECK(std::find(h3.failures.begin(), h3.failures.end(), "H3") != h3.failures.end());
  CHECK_FALSE(h3.report["pass"].get<bool>());

  const auto r2 = run_check(load_problem_spec(data("rank2.json")));
  CHECK(r2.failures.empty());
  CHECK(r2.report["spectra"]["delta"].size() == 3);
  bool h5 = false;
  for (const auto& h : r2.report["hypotheses"])
    if (h["name"] == "H5") h5 = h["pass"].get<bool>();
  CHECK(h5);

  const auto z = run_check(load_problem_spec(data("zero_coupling.json")));
  CHECK_FALSE(z.failures.empty());
}

TEST_CASE("trace CSV") {
  const auto spec = load_problem_spec(data("zero_coupling.json"));
  const auto an = analyze_problem(spec.problem);
  const auto out = run_trace(an, {90.0}, 2.0, true);
  std::istringstream in(out.csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "theta_deg,curve_id,t,re_lambda,im_lambda,end_class,end_index");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> cols;
    size_t start = 0;
    for (size_t pos = line.find(','); pos != std::string::npos; pos = line.find(',', start)) {
      cols.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    cols.push_back(line.substr(start));
    REQUIRE(cols.size() == 7);
    const int id = std::stoi(cols[1]);
    CHECK(std::stod(cols[3]) == doctest::Approx(an.alpha(id - 1)));
    CHECK(std::stod(cols[4]) == 0.0);
  }
  CHECK(rows > 0);

  const auto r1 = load_problem_spec(data("rank1.json"));
  const auto a1 = analyze_problem(r1.problem);
  const auto t1 = run_trace(a1, r1.run.theta_deg, r1.run.t_max, false);
  CHECK(t1.warnings.empty());
  CHECK(run_trace(a1, r1.run.theta_deg, r1.run.t_max, false).csv == t1.csv);
}

TEST_CASE("monodromy report for the 2x2 example") {
  const auto an = analyze_problem(load_problem_spec(data("rank1.json")).problem);
  const auto out = run_monodromy(an, 18, 1e-6, 1);
  CHECK(out.report["table"].size() == 17);
  REQUIRE(out.report["brackets"].size() == 1);
  const auto& b = out.report["brackets"][0];
  CHECK(b["theta_lo_deg"].get<double>() <= 120.0);
  CHECK(b["theta_hi_deg"].get<double>() >= 120.0 - 1e-7);
  CHECK(out.csv.rfind("theta_deg,tau_1,tau_2\n", 0) == 0);
}

TEST_CASE("limit outputs") {
  FamilySpec spec;
  spec.name = "small";
  spec.model = LimitModel::uniform();
  spec.N = 30;
  spec.grid.nx = 12;
  spec.grid.ny = 9;
  const auto out = run_limit(spec, 1);
  CHECK(out.mu_csv.rfind("re_gamma,im_gamma,mu\n", 0) == 0);
  CHECK(std::count(out.mu_csv.begin(), out.mu_csv.end(), '\n') == 1 + 12 * 9);
  CHECK(out.region["disc"]["radius"].get<double>() == doctest::Approx(1 / (2 * oracle::pi)));
  CHECK(out.region["mu"]["lower_bound_violations"].get<int>() == 0);
  CHECK(run_limit(spec, 1).mu_csv == out.mu_csv);
}
