#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "fhops/fhops.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SystemDel {
  void operator()(fhops_system* p) const { fhops_system_free(p); }
};
struct FieldDel {
  void operator()(fhops_field* p) const { fhops_field_free(p); }
};
struct DataDel {
  void operator()(fhops_data* p) const { fhops_data_free(p); }
};
struct CoeffDel {
  void operator()(fhops_coeffset* p) const { fhops_coeffset_free(p); }
};
using SystemPtr = std::unique_ptr<fhops_system, SystemDel>;
using FieldPtr = std::unique_ptr<fhops_field, FieldDel>;
using DataPtr = std::unique_ptr<fhops_data, DataDel>;
using CoeffPtr = std::unique_ptr<fhops_coeffset, CoeffDel>;

std::string take_string(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  fhops_string_free(s);
  return out;
}

json take_json(char* s) { return json::parse(take_string(s)); }

SystemPtr make_system(const std::string& text) {
  fhops_system* raw = nullptr;
  REQUIRE(fhops_system_from_json(text.c_str(), nullptr, &raw) == FHOPS_OK);
  return SystemPtr(raw);
}

// D_t + c H on the 1-torus with the harmonic oscillator spectrum
std::string dt_plus_json(const std::string& c) {
  return std::string(R"({
    "space": {"m": 1, "n": 1, "sigma": 1, "mu": 0.5},
    "eigen": {"kind": "harmonic1d"},
    "operators": [{"Q": {"terms": [{"alpha": [1], "c": 1}]}, "d": ")") +
         c + R"("}]
  })";
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("fhops_capi_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

// one-mode field CSV plus the sidecar the reader requires
std::string write_mode_csv(const TempDir& dir, const std::string& name,
                           long long tau, long long j, double re, double im,
                           long long tauMax, long long jMax) {
  std::string csv = dir.file(name);
  {
    std::ofstream out(csv);
    out << "tau_1,j,re,im\n" << tau << "," << j << "," << re << "," << im
        << "\n";
  }
  {
    std::ofstream out(csv + ".meta.json");
    out << R"({"space": {"m": 1, "n": 1, "sigma": 1, "mu": 0.5},)"
        << R"( "bounds": {"tauMax": [)" << tauMax << R"(], "jMax": )" << jMax
        << "}}\n";
  }
  return csv;
}

}  // namespace

TEST_CASE("version string and error channel") {
  CHECK(std::string(fhops_version()) == "1.0.0");

  fhops_system* raw = nullptr;
  CHECK(fhops_system_from_json("{not json", nullptr, &raw) ==
        FHOPS_E_PRECONDITION);
  CHECK(raw == nullptr);
  CHECK(std::string(fhops_last_error()) == "invalid JSON");

  CHECK(fhops_system_from_json(nullptr, nullptr, &raw) ==
        FHOPS_E_PRECONDITION);
  CHECK(std::string(fhops_last_error()) == "null argument");
}

TEST_CASE("system construction, info, and serialization") {
  SystemPtr s = make_system(dt_plus_json("1/2"));
  int m = 0, n = 0, ops = 0;
  REQUIRE(fhops_system_info(s.get(), &m, &n, &ops) == FHOPS_OK);
  CHECK(m == 1);
  CHECK(n == 1);
  CHECK(ops == 1);

  char* text = nullptr;
  REQUIRE(fhops_system_to_json(s.get(), &text) == FHOPS_OK);
  json j = take_json(text);
  CHECK(j.at("operators")[0].at("d") == "1/2");
  CHECK(j.at("space").at("m") == 1);

  CHECK(fhops_system_info(nullptr, &m, &n, &ops) == FHOPS_E_PRECONDITION);
}

TEST_CASE("system load from disk") {
  TempDir dir;
  std::string path = dir.file("system.json");
  {
    std::ofstream out(path);
    out << dt_plus_json("1/2");
  }
  fhops_system* raw = nullptr;
  REQUIRE(fhops_system_load(path.c_str(), &raw) == FHOPS_OK);
  SystemPtr s(raw);
  int ops = 0;
  REQUIRE(fhops_system_info(s.get(), nullptr, nullptr, &ops) == FHOPS_OK);
  CHECK(ops == 1);

  CHECK(fhops_system_load(dir.file("missing.json").c_str(), &raw) ==
        FHOPS_E_PRECONDITION);
}

TEST_CASE("pointwise queries match hand values") {
  SystemPtr s = make_system(dt_plus_json("1/2"));
  int64_t tau3 = 3;

  double w = 0;
  REQUIRE(fhops_weight(s.get(), &tau3, 1, 1, &w) == FHOPS_OK);
  CHECK(w == doctest::Approx(5.0).epsilon(1e-15));  // |3| + (1+1)^1

  double re = 0, im = 1;
  REQUIRE(fhops_symbol_eval(s.get(), 1, &tau3, 1, 1, &re, &im) == FHOPS_OK);
  CHECK(re == doctest::Approx(4.5).epsilon(1e-15));  // 3 + (1/2)(2*1+1)
  CHECK(im == 0.0);

  double norm = 0;
  int argmax = 0;
  REQUIRE(fhops_system_norm(s.get(), &tau3, 1, 1, &norm, &argmax) == FHOPS_OK);
  CHECK(norm == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(argmax == 1);

  double lambda = 0;
  REQUIRE(fhops_eigenvalue(s.get(), 3, &lambda) == FHOPS_OK);
  CHECK(lambda == 7.0);

  double h = 0;
  REQUIRE(fhops_hermite_eval(2, 0.0, &h) == FHOPS_OK);
  CHECK(h == doctest::Approx(-0.5311259660135984).epsilon(1e-14));

  // 1-based operator index and dimension mismatches are rejected
  CHECK(fhops_symbol_eval(s.get(), 0, &tau3, 1, 1, &re, &im) ==
        FHOPS_E_PRECONDITION);
  CHECK(fhops_symbol_eval(s.get(), 2, &tau3, 1, 1, &re, &im) ==
        FHOPS_E_PRECONDITION);
  CHECK(fhops_weight(s.get(), &tau3, 2, 1, &w) == FHOPS_E_PRECONDITION);
  CHECK(fhops_eigenvalue(s.get(), -1, &lambda) == FHOPS_E_PRECONDITION);
}

TEST_CASE("zero set enumeration") {
  SystemPtr s = make_system(dt_plus_json("-1"));
  int64_t tauMax = 9;
  char* text = nullptr;
  REQUIRE(fhops_zero_set(s.get(), &tauMax, 1, 6, 1, &text) == FHOPS_OK);
  json j = take_json(text);
  CHECK(j.at("count") == 5);  // tau = 2j+1 for j = 0..4 inside the box
  CHECK(j.at("exact") == true);
  CHECK(j.at("modes")[0].at("tau")[0] == 1);
  CHECK(j.at("modes")[0].at("j") == 0);
  CHECK(j.at("caveats").empty());
}

TEST_CASE("check runs honor the threshold overrides") {
  SystemPtr s = make_system(dt_plus_json("1/2"));
  int64_t tauMax = 200;

  char* text = nullptr;
  REQUIRE(fhops_check(s.get(), &tauMax, 1, 200, 0, 0, 0, 1, 0, &text) ==
          FHOPS_OK);
  json strict = take_json(text);
  CHECK(strict.at("resonance").at("kind") == "FiniteCertified");
  CHECK(strict.at("profileExact") == true);
  CHECK(strict.at("minNorm") == 0.5);
  CHECK(strict.at("zeroCount") == 0);

  // looser thresholds flip the trend on the same small box
  REQUIRE(fhops_check(s.get(), &tauMax, 1, 200, 0, 0.01, 0.05, 1, 0, &text) ==
          FHOPS_OK);
  json loose = take_json(text);
  CHECK(loose.at("trend") == "ConditionHolds");
  CHECK(loose.at("verdict") == "Holds");
  CHECK(strict.at("trend") != "ConditionHolds");

  // solvability mode carries the same grid summary
  REQUIRE(fhops_check(s.get(), &tauMax, 1, 200, 0, 0.01, 0.05, 1, 1, &text) ==
          FHOPS_OK);
  json solv = take_json(text);
  CHECK(solv.at("verdict") == "Holds");
  CHECK(solv.at("grid").at("jMax") == 200);
  CHECK(solv.at("exact") == true);
}

TEST_CASE("check payloads are byte-identical across thread counts") {
  SystemPtr s = make_system(dt_plus_json("1/2"));
  int64_t tauMax = 150;
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(fhops_check(s.get(), &tauMax, 1, 150, 0, 0, 0, 1, 0, &a) ==
          FHOPS_OK);
  REQUIRE(fhops_check(s.get(), &tauMax, 1, 150, 0, 0, 0, 8, 0, &b) ==
          FHOPS_OK);
  std::string sa = take_string(a);
  std::string sb = take_string(b);
  CHECK(sa == sb);
}

TEST_CASE("profile CSV artifact matches the run") {
  TempDir dir;
  SystemPtr s = make_system(dt_plus_json("1/2"));
  int64_t tauMax = 100;
  std::string csv = dir.file("profile.csv");
  char* text = nullptr;
  REQUIRE(fhops_check_profile_csv(s.get(), &tauMax, 1, 100, 0, 0, 0, 1, 0,
                                  csv.c_str(), &text) == FHOPS_OK);
  json j = take_json(text);
  std::ifstream in(csv);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "R,epsHat");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == j.at("shellEps").size());
}

TEST_CASE("apply, admissibility, solve, and division agree") {
  TempDir dir;
  SystemPtr s = make_system(dt_plus_json("1/2"));
  std::string csv = write_mode_csv(dir, "u.csv", 3, 1, 1.0, 2.0, 8, 4);

  fhops_field* uRaw = nullptr;
  REQUIRE(fhops_field_read_csv(csv.c_str(), &uRaw) == FHOPS_OK);
  FieldPtr u(uRaw);

  fhops_data* FRaw = nullptr;
  REQUIRE(fhops_apply(s.get(), u.get(), 1, &FRaw) == FHOPS_OK);
  DataPtr F(FRaw);

  // F_1 = sigma * u = 4.5 * (1 + 2i) on the single mode
  fhops_field* compRaw = nullptr;
  REQUIRE(fhops_data_component(F.get(), 1, &compRaw) == FHOPS_OK);
  FieldPtr comp(compRaw);
  std::string outCsv = dir.file("F1.csv");
  REQUIRE(fhops_field_write_csv(comp.get(), outCsv.c_str()) == FHOPS_OK);
  {
    std::ifstream in(outCsv);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(row == "3,1,4.5,9");
  }
  CHECK(fhops_data_component(F.get(), 0, &compRaw) == FHOPS_E_PRECONDITION);
  CHECK(fhops_data_component(F.get(), 2, &compRaw) == FHOPS_E_PRECONDITION);

  char* text = nullptr;
  REQUIRE(fhops_admissibility(s.get(), F.get(), 0, 1, &text) == FHOPS_OK);
  json adm = take_json(text);
  CHECK(adm.at("admissible") == true);
  CHECK(adm.at("kernelViolations").empty());

  fhops_field* solvedRaw = nullptr;
  REQUIRE(fhops_solve(s.get(), F.get(), nullptr, 1, &solvedRaw, &text) ==
          FHOPS_OK);
  FieldPtr solved(solvedRaw);
  json report = take_json(text);
  CHECK(report.at("residual").get<double>() <= 1e-12);
  CHECK(report.at("zeroedModes") == 0);

  std::string backCsv = dir.file("u_back.csv");
  REQUIRE(fhops_field_write_csv(solved.get(), backCsv.c_str()) == FHOPS_OK);
  {
    std::ifstream in(backCsv);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(row == "3,1,1,2");
  }

  fhops_field* divRaw = nullptr;
  REQUIRE(fhops_symbol_division(s.get(), F.get(), 1, &divRaw) == FHOPS_OK);
  FieldPtr div(divRaw);
  std::string divCsv = dir.file("u_div.csv");
  REQUIRE(fhops_field_write_csv(div.get(), divCsv.c_str()) == FHOPS_OK);
  {
    std::ifstream in(divCsv);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(row == "3,1,1,2");
  }
}

TEST_CASE("data manifests round trip through the handle API") {
  TempDir dir;
  SystemPtr s = make_system(dt_plus_json("1/2"));
  std::string csv = write_mode_csv(dir, "u.csv", 2, 0, 0.5, -0.25, 4, 2);
  fhops_field* uRaw = nullptr;
  REQUIRE(fhops_field_read_csv(csv.c_str(), &uRaw) == FHOPS_OK);
  FieldPtr u(uRaw);
  fhops_data* FRaw = nullptr;
  REQUIRE(fhops_apply(s.get(), u.get(), 1, &FRaw) == FHOPS_OK);
  DataPtr F(FRaw);

  std::string manifest = dir.file("F_manifest.json");
  REQUIRE(fhops_data_write_manifest(F.get(), manifest.c_str(), "F") ==
          FHOPS_OK);
  fhops_data* backRaw = nullptr;
  REQUIRE(fhops_data_read_manifest(manifest.c_str(), &backRaw) == FHOPS_OK);
  DataPtr back(backRaw);

  fhops_field* compRaw = nullptr;
  REQUIRE(fhops_data_component(back.get(), 1, &compRaw) == FHOPS_OK);
  FieldPtr comp(compRaw);
  std::string echoCsv = dir.file("echo.csv");
  REQUIRE(fhops_field_write_csv(comp.get(), echoCsv.c_str()) == FHOPS_OK);
  std::ifstream in(echoCsv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  // sigma(2, 0) = 2 + 1/2, so F_1 = 2.5 * (0.5 - 0.25i)
  CHECK(row == "2,0,1.25,-0.625");
}

TEST_CASE("counterexample pairs for both flavors") {
  SystemPtr s = make_system(dt_plus_json("1/2"));
  int64_t tauMax = 40;

  fhops_data* FRaw = nullptr;
  fhops_field* uRaw = nullptr;
  char* text = nullptr;
  REQUIRE(fhops_counterexample(s.get(), &tauMax, 1, 40, "gh", 0.02, 1, &FRaw,
                               &uRaw, &text) == FHOPS_OK);
  DataPtr F(FRaw);
  FieldPtr u(uRaw);
  json gh = take_json(text);
  CHECK(gh.at("flavor") == "gh");
  CHECK(gh.at("eps") == 0.02);
  CHECK(gh.at("witnessCount").get<int>() >= 1);
  CHECK(u != nullptr);

  FRaw = nullptr;
  uRaw = nullptr;
  REQUIRE(fhops_counterexample(s.get(), &tauMax, 1, 40, "gs", 0.02, 1, &FRaw,
                               &uRaw, &text) == FHOPS_OK);
  DataPtr F2(FRaw);
  json gs = take_json(text);
  CHECK(gs.at("flavor") == "gs");
  CHECK(gs.at("witnessCount") == 1);
  CHECK(uRaw == nullptr);

  // derived epsilon keeps every witness inside the window
  FRaw = nullptr;
  uRaw = nullptr;
  REQUIRE(fhops_counterexample(s.get(), &tauMax, 1, 40, "gh", 0, 1, &FRaw,
                               &uRaw, &text) == FHOPS_OK);
  DataPtr F3(FRaw);
  FieldPtr u3(uRaw);
  json derived = take_json(text);
  CHECK(derived.at("eps").get<double>() > 0);
  CHECK(derived.at("witnessCount").get<int>() >= 1);

  CHECK(fhops_counterexample(s.get(), &tauMax, 1, 40, "nope", 0.02, 1, &FRaw,
                             &uRaw, &text) == FHOPS_E_PRECONDITION);
}

TEST_CASE("decay fit labels a smooth field") {
  TempDir dir;
  std::string csv = dir.file("smooth.csv");
  {
    std::ofstream out(csv);
    out.precision(17);
    out << "tau_1,j,re,im\n";
    for (long long tau = -20; tau <= 20; ++tau)
      for (long long j = 0; j <= 7; ++j) {
        double w = std::abs(static_cast<double>(tau)) + (j + 1);
        out << tau << "," << j << "," << std::exp(-w) << ",0\n";
      }
  }
  {
    std::ofstream out(csv + ".meta.json");
    out << R"({"space": {"m": 1, "n": 1, "sigma": 1, "mu": 0.5},)"
        << R"( "bounds": {"tauMax": [20], "jMax": 7}})" << "\n";
  }
  fhops_field* fRaw = nullptr;
  REQUIRE(fhops_field_read_csv(csv.c_str(), &fRaw) == FHOPS_OK);
  FieldPtr f(fRaw);
  char* text = nullptr;
  REQUIRE(fhops_decay_fit(f.get(), &text) == FHOPS_OK);
  json j = take_json(text);
  CHECK(j.at("label") == "Smooth");
  CHECK(j.at("epsilonHat").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("liouville configs cover quotients, rules, and vectors") {
  char* text = nullptr;
  REQUIRE(fhops_liouville(R"({"quotients": [2, 3, 4]})", &text) == FHOPS_OK);
  json q = take_json(text);
  CHECK(q.at("verdict") == "FlaggedExpLiouville");
  CHECK(q.at("depth") == 2);  // defaults to the full representable depth
  CHECK(q.at("maxDepth") == 2);
  CHECK(q.at("describe") == "quotients[3]");
  CHECK(q.at("epsHat").get<double>() ==
        doctest::Approx(std::log(30.0) / 7.0).epsilon(1e-12));
  CHECK(q.at("convergents")[0].at("p") == "1");
  CHECK(q.at("convergents")[0].at("q") == "2");
  CHECK(q.at("convergents")[1].at("p") == "3");
  CHECK(q.at("convergents")[1].at("q") == "7");

  REQUIRE(fhops_liouville(
              R"({"rule": {"kind": "factorial-power", "base": 10}, "depth": 4})",
              &text) == FHOPS_OK);
  json fact = take_json(text);
  CHECK(fact.at("verdict") == "NotFlaggedUpToDepth");
  CHECK(fact.at("describe") == "factorial-power(base=10)");

  REQUIRE(fhops_liouville(
              R"({"rule": {"kind": "exp-rule", "base": 2, "a1": 2}, "depth": 3})",
              &text) == FHOPS_OK);
  json exp2 = take_json(text);
  CHECK(exp2.at("verdict") == "FlaggedExpLiouville");
  CHECK(exp2.at("epsHat").get<double>() >= 0.69);

  json vec;
  vec["vector"] = json::array();
  json golden;
  golden["quotients"] = std::vector<int>(21, 1);
  vec["vector"].push_back(golden);
  vec["vector"].push_back(
      json{{"rule", {{"kind", "factorial-power"}, {"base", 10}}}});
  vec["depth"] = 20;
  REQUIRE(fhops_liouville(vec.dump().c_str(), &text) == FHOPS_OK);
  json v = take_json(text);
  CHECK(v.at("certified") == true);
  CHECK(v.at("coordinate") == 1);
  CHECK(v.at("perCoordinate").size() == 2);
  CHECK(v.at("perCoordinate")[0].at("verdict") == "NotFlaggedUpToDepth");

  CHECK(fhops_liouville(R"({"sigma": 1})", &text) == FHOPS_E_PRECONDITION);
  CHECK(fhops_liouville(R"({"quotients": [0]})", &text) ==
        FHOPS_E_PRECONDITION);
}

TEST_CASE("weyl fit and eigen info run from eigen configs") {
  char* text = nullptr;
  REQUIRE(fhops_weyl(R"({"kind": "harmonic1d"})", nullptr, 1000, 100000,
                     &text) == FHOPS_OK);
  json j = take_json(text);
  CHECK(j.at("exponentHat").get<double>() == doctest::Approx(1.0).epsilon(0.01));
  CHECK(j.at("rhoHat").get<double>() == doctest::Approx(2.0).epsilon(0.02));
  CHECK(j.at("M") == 2.0);
  CHECK(j.at("n") == 1);

  int M = 0, n = 0;
  REQUIRE(fhops_eigen_info(
              R"({"kind": "power_of", "base": {"kind": "harmonic1d"},
                  "exponent": 2})",
              nullptr, &M, &n) == FHOPS_OK);
  CHECK(M == 4);
  CHECK(n == 1);

  CHECK(fhops_eigen_info(R"({"kind": "bogus"})", nullptr, &M, &n) ==
        FHOPS_E_PRECONDITION);
}

TEST_CASE("normal form pipeline through the handle API") {
  TempDir dir;
  fhops_coeffset* cRaw = nullptr;
  REQUIRE(fhops_coeffset_from_json(R"({
    "space": {"m": 1, "n": 1, "sigma": 1, "mu": 0.5},
    "eigen": {"kind": "harmonic1d"},
    "coefficients": [{"const": "1/2", "cos": [1.0]}]
  })",
                                   nullptr, &cRaw) == FHOPS_OK);
  CoeffPtr c(cRaw);

  fhops_system* sRaw = nullptr;
  char* text = nullptr;
  REQUIRE(fhops_reduce_system(c.get(), &sRaw, &text) == FHOPS_OK);
  SystemPtr s(sRaw);
  json reduced = take_json(text);
  CHECK(reduced.at("operators")[0].at("d") == "1/2");
  int64_t tau3 = 3;
  double re = 0, im = 0;
  REQUIRE(fhops_symbol_eval(s.get(), 1, &tau3, 1, 1, &re, &im) == FHOPS_OK);
  CHECK(re == doctest::Approx(4.5).epsilon(1e-15));

  std::string csv = write_mode_csv(dir, "u.csv", 0, 1, 1.0, 0.0, 64, 4);
  fhops_field* uRaw = nullptr;
  REQUIRE(fhops_field_read_csv(csv.c_str(), &uRaw) == FHOPS_OK);
  FieldPtr u(uRaw);

  fhops_field* fwdRaw = nullptr;
  REQUIRE(fhops_psi_apply(c.get(), u.get(), 0, 512, 1, &fwdRaw, &text) ==
          FHOPS_OK);
  FieldPtr fwd(fwdRaw);
  json fwdReport = take_json(text);
  CHECK(fwdReport.at("Nt") == 512);

  fhops_field* backRaw = nullptr;
  REQUIRE(fhops_psi_apply(c.get(), fwd.get(), 1, 512, 1, &backRaw, &text) ==
          FHOPS_OK);
  FieldPtr back(backRaw);
  take_string(text);

  // round trip returns the single input mode
  std::string backCsv = dir.file("back.csv");
  REQUIRE(fhops_field_write_csv(back.get(), backCsv.c_str()) == FHOPS_OK);
  {
    std::ifstream in(backCsv);
    std::string header, row;
    std::getline(in, header);
    bool found = false;
    while (std::getline(in, row)) {
      if (row.empty()) continue;
      auto firstComma = row.find(',');
      auto secondComma = row.find(',', firstComma + 1);
      std::string tau = row.substr(0, firstComma);
      std::string jIdx =
          row.substr(firstComma + 1, secondComma - firstComma - 1);
      if (tau == "0" && jIdx == "1") {
        auto thirdComma = row.find(',', secondComma + 1);
        double reBack = std::stod(
            row.substr(secondComma + 1, thirdComma - secondComma - 1));
        double imBack = std::stod(row.substr(thirdComma + 1));
        CHECK(reBack == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(imBack) <= 1e-10);
        found = true;
      }
    }
    CHECK(found);
  }

  double residual = -1;
  REQUIRE(fhops_conjugation_residual(c.get(), u.get(), 512, 1, &residual) ==
          FHOPS_OK);
  CHECK(residual >= 0);
  CHECK(residual <= 1e-8);

  REQUIRE(fhops_compat_integral(c.get(), u.get(), 1, 1, 512, &text) ==
          FHOPS_OK);
  json compat = take_json(text);
  CHECK(compat.at("applicable") == false);
  CHECK(compat.at("maxAbs") == 0.0);
  CHECK(fhops_compat_integral(c.get(), u.get(), 2, 1, 512, &text) ==
        FHOPS_E_PRECONDITION);
}

TEST_CASE("compat integral activates on integer phase offsets") {
  TempDir dir;
  fhops_coeffset* cRaw = nullptr;
  REQUIRE(fhops_coeffset_from_json(R"({
    "space": {"m": 1, "n": 1, "sigma": 1, "mu": 0.5},
    "eigen": {"kind": "harmonic1d"},
    "coefficients": [{"const": 1, "cos": [1.0]}]
  })",
                                   nullptr, &cRaw) == FHOPS_OK);
  CoeffPtr c(cRaw);

  std::string csv = write_mode_csv(dir, "g.csv", -3, 1, 1.0, 0.0, 8, 2);
  fhops_field* gRaw = nullptr;
  REQUIRE(fhops_field_read_csv(csv.c_str(), &gRaw) == FHOPS_OK);
  FieldPtr g(gRaw);

  char* text = nullptr;
  REQUIRE(fhops_compat_integral(c.get(), g.get(), 1, 1, 512, &text) ==
          FHOPS_OK);
  json compat = take_json(text);
  CHECK(compat.at("applicable") == true);
  // 2*pi*|J_0(3)| with lambda_1 = 3 and the charge at tau = -3
  double expected = 2.0 * 3.14159265358979323846 * 0.2600519549019334;
  CHECK(compat.at("maxAbs").get<double>() ==
        doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("reconstruction samples the torus grid") {
  TempDir dir;
  std::string csv = write_mode_csv(dir, "f.csv", 2, 0, 1.0, 0.0, 4, 1);
  fhops_field* fRaw = nullptr;
  REQUIRE(fhops_field_read_csv(csv.c_str(), &fRaw) == FHOPS_OK);
  FieldPtr f(fRaw);

  double x0 = 0.0;
  double* re = nullptr;
  double* im = nullptr;
  int64_t count = 0;
  REQUIRE(fhops_reconstruct(f.get(), R"({"kind": "harmonic1d"})", nullptr, 4,
                            &x0, 1, &re, &im, &count) == FHOPS_OK);
  REQUIRE(count == 4);
  double h0 = 0.7511255444649425;  // pi^(-1/4)
  for (int k = 0; k < 4; ++k) {
    double angle = 2.0 * 3.14159265358979323846 * 2.0 * k / 4.0;
    CHECK(re[k] == doctest::Approx(h0 * std::cos(angle)).epsilon(1e-12));
    CHECK(std::abs(im[k] - h0 * std::sin(angle)) <= 1e-12);
  }
  fhops_buffer_free(re);
  fhops_buffer_free(im);
}
