#include "fhops/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <system_error>

namespace fhops::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

// JSON value for a double that may be infinite; JSON numbers cannot carry
// inf, so those become the strings "inf" / "-inf" / "nan".
json js_double(double v) {
  if (std::isfinite(v)) return json(v);
  if (std::isnan(v)) return json("nan");
  return json(v > 0 ? "inf" : "-inf");
}

[[noreturn]] void bad_config(const std::string& msg) {
  throw precondition_error("config: " + msg);
}

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    bad_config(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double as_double(const json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return to_double(parse_rational(j.get<std::string>()));
  bad_config(std::string(what) + " must be a number or rational string");
}

long long as_ll(const json& j, const char* what) {
  if (!j.is_number_integer())
    bad_config(std::string(what) + " must be an integer");
  return j.get<long long>();
}

// scalar coefficient: number (exact when integral), "p/q" string (exact)
std::pair<double, std::optional<Rational>> parse_scalar(const json& j,
                                                        const char* what) {
  if (j.is_number_integer())
    return {static_cast<double>(j.get<long long>()),
            Rational(static_cast<long>(j.get<long long>()))};
  if (j.is_number()) return {j.get<double>(), std::nullopt};
  if (j.is_string()) {
    Rational q = parse_rational(j.get<std::string>());
    return {to_double(q), q};
  }
  bad_config(std::string(what) + " must be a number or rational string");
}

// complex coefficient: scalar or {"re": scalar, "im": scalar}
std::pair<std::complex<double>, std::optional<CRational>> parse_cvalue(
    const json& j, const char* what) {
  if (j.is_object()) {
    auto [re, reQ] = j.contains("re")
                         ? parse_scalar(j.at("re"), what)
                         : std::pair<double, std::optional<Rational>>{
                               0.0, Rational(0)};
    auto [im, imQ] = j.contains("im")
                         ? parse_scalar(j.at("im"), what)
                         : std::pair<double, std::optional<Rational>>{
                               0.0, Rational(0)};
    std::optional<CRational> exact;
    if (reQ && imQ) exact = CRational(*reQ, *imQ);
    return {{re, im}, exact};
  }
  auto [re, reQ] = parse_scalar(j, what);
  std::optional<CRational> exact;
  if (reQ) exact = CRational(*reQ, Rational(0));
  return {{re, 0.0}, exact};
}

json scalar_to_json(double v, const std::optional<Rational>& exact) {
  if (exact) return json(rational_to_string(*exact));
  return js_double(v);
}

json cvalue_to_json(std::complex<double> v,
                    const std::optional<CRational>& exact) {
  if (v.imag() == 0.0 && (!exact || sgn(exact->im) == 0))
    return scalar_to_json(v.real(),
                          exact ? std::optional<Rational>(exact->re)
                                : std::nullopt);
  json out = json::object();
  out["re"] = scalar_to_json(v.real(),
                             exact ? std::optional<Rational>(exact->re)
                                   : std::nullopt);
  out["im"] = scalar_to_json(v.imag(),
                             exact ? std::optional<Rational>(exact->im)
                                   : std::nullopt);
  return out;
}

json bounds_to_json(const Bounds& b) {
  json out = json::object();
  out["tauMax"] = b.tauMax;
  out["jMax"] = b.jMax;
  return out;
}

Bounds bounds_from_json(const json& j) {
  Bounds b;
  const json& tm = need(j, "tauMax");
  if (!tm.is_array()) bad_config("tauMax must be an array");
  for (const json& v : tm) b.tauMax.push_back(as_ll(v, "tauMax entry"));
  b.jMax = as_ll(need(j, "jMax"), "jMax");
  return b;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

long long cell_ll(const std::string& s) {
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    bad_config("bad integer cell \"" + s + "\"");
  return v;
}

double cell_double(const std::string& s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    bad_config("bad numeric cell \"" + s + "\"");
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw precondition_error("cannot open: " + path);
  return in;
}

// Uniform samples of a 2pi-periodic coefficient, rows "t,value".
std::vector<double> read_sample_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<double> values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("t,", 0) == 0) continue;  // header row
    }
    auto cells = split_csv_line(line);
    if (cells.size() != 2) bad_config("sample row needs two cells: " + line);
    values.push_back(cell_double(cells[1]));
  }
  if (values.size() < 4) bad_config("sample file needs at least 4 rows");
  const double step = 2.0 * std::numbers::pi / double(values.size());
  in.clear();
  in.seekg(0);
  size_t idx = 0;
  first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("t,", 0) == 0) continue;
    }
    auto cells = split_csv_line(line);
    double t = cell_double(cells[0]);
    if (std::abs(t - step * double(idx)) > 1e-9 * (1.0 + std::abs(t)))
      bad_config("sample times must be the uniform grid k*2pi/N");
    ++idx;
  }
  return values;
}

// Serializer with std::to_chars doubles; object keys come out sorted
// because nlohmann's default object container is an ordered map.
void dump_rec(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dump_rec(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const json& v : j) {
        if (!first) out += ',';
        first = false;
        dump_rec(v, out);
      }
      out += ']';
      break;
    }
    case json::value_t::string:
      out += j.dump();
      break;
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      break;
    case json::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      break;
    case json::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      break;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    default:
      out += "null";
      break;
  }
}

}  // namespace

void write_field_csv(const SpectralField& field, const std::string& csvPath) {
  std::ofstream out = open_out(csvPath);
  const int m = field.params().m;
  for (int i = 1; i <= m; ++i) out << "tau_" << i << ",";
  out << "j,re,im\n";
  for (const FieldEntry& e : field.entries()) {
    for (long long t : e.mode.tau) out << t << ",";
    out << e.mode.j << "," << format_double(e.a.real()) << ","
        << format_double(e.a.imag()) << "\n";
  }
  out.close();
  if (!out) throw std::runtime_error("write failed: " + csvPath);

  json meta = json::object();
  meta["space"] = space_to_json(field.params());
  meta["bounds"] = bounds_to_json(field.bounds());
  write_json(meta, csvPath + ".meta.json");
}

SpectralField read_field_csv(const std::string& csvPath) {
  json meta = read_json_file(csvPath + ".meta.json");
  SpaceParams params = space_from_json(need(meta, "space"));
  Bounds bounds = bounds_from_json(need(meta, "bounds"));
  bounds.validate(params.m);

  std::ifstream in = open_in(csvPath);
  SpectralField field(params, bounds);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("tau_", 0) == 0) continue;  // header row
    }
    auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != params.m + 3)
      bad_config("field row needs m+3 cells: " + line);
    ModeIndex mode;
    for (int i = 0; i < params.m; ++i)
      mode.tau.push_back(cell_ll(cells[static_cast<std::size_t>(i)]));
    mode.j = cell_ll(cells[static_cast<std::size_t>(params.m)]);
    double re = cell_double(cells[static_cast<std::size_t>(params.m) + 1]);
    double im = cell_double(cells[static_cast<std::size_t>(params.m) + 2]);
    field.accumulate(mode, {re, im});
  }
  field.finalize();
  return field;
}

void write_data_vector(const DataVector& F, const std::string& manifestPath,
                       const std::string& stem) {
  fs::path dir = fs::path(manifestPath).parent_path();
  json manifest = json::object();
  json names = json::array();
  for (std::size_t r = 0; r < F.components.size(); ++r) {
    std::string name = stem + "_" + std::to_string(r + 1) + ".csv";
    write_field_csv(F.components[r], (dir / name).string());
    names.push_back(name);
  }
  manifest["components"] = names;
  write_json(manifest, manifestPath);
}

DataVector read_data_vector(const std::string& manifestPath) {
  json manifest = read_json_file(manifestPath);
  const json& names = need(manifest, "components");
  if (!names.is_array() || names.empty())
    bad_config("manifest needs a nonempty components array");
  fs::path dir = fs::path(manifestPath).parent_path();
  DataVector F;
  for (const json& name : names) {
    if (!name.is_string()) bad_config("component paths must be strings");
    F.components.push_back(
        read_field_csv((dir / name.get<std::string>()).string()));
  }
  return F;
}

SpaceParams space_from_json(const json& j) {
  SpaceParams p;
  p.m = static_cast<int>(as_ll(need(j, "m"), "m"));
  p.n = static_cast<int>(as_ll(need(j, "n"), "n"));
  p.sigma = as_double(need(j, "sigma"), "sigma");
  p.mu = as_double(need(j, "mu"), "mu");
  p.validate();
  return p;
}

json space_to_json(const SpaceParams& p) {
  json out = json::object();
  out["m"] = p.m;
  out["n"] = p.n;
  out["sigma"] = p.sigma;
  out["mu"] = p.mu;
  return out;
}

EigenProvider eigen_from_json(const json& j, const std::string& baseDir) {
  std::string kind = need(j, "kind").get<std::string>();
  if (kind == "harmonic1d") return EigenProvider::harmonic1d();
  if (kind == "harmonic_nd")
    return EigenProvider::harmonic_nd(
        static_cast<int>(as_ll(need(j, "n"), "n")));
  if (kind == "power_of")
    return EigenProvider::power_of(
        eigen_from_json(need(j, "base"), baseDir),
        static_cast<int>(as_ll(need(j, "exponent"), "exponent")));
  if (kind == "custom") {
    if (j.contains("path")) {
      fs::path p = j.at("path").get<std::string>();
      if (p.is_relative()) p = fs::path(baseDir) / p;
      return load_custom_eigen(p.string());
    }
    const json& vals = need(j, "values");
    if (!vals.is_array()) bad_config("custom values must be an array");
    std::vector<double> values;
    std::vector<Rational> exact;
    bool allExact = true;
    for (const json& v : vals) {
      auto [d, q] = parse_scalar(v, "eigenvalue");
      values.push_back(d);
      if (q && allExact)
        exact.push_back(*q);
      else
        allExact = false;
    }
    if (!allExact) exact.clear();
    return EigenProvider::custom(std::move(values),
                                 as_double(need(j, "M"), "M"),
                                 static_cast<int>(as_ll(need(j, "n"), "n")),
                                 std::move(exact));
  }
  bad_config("unknown eigen kind \"" + kind + "\"");
}

json eigen_to_json(const EigenProvider& p) {
  json out = json::object();
  if (p.index_count() < std::numeric_limits<long long>::max()) {
    out["kind"] = "custom";
    json values = json::array();
    for (long long j = 0; j < p.index_count(); ++j)
      values.push_back(scalar_to_json(p.eigenvalue(j), p.eigenvalue_exact(j)));
    out["values"] = values;
  } else {
    auto spectrum = p.exact_spectrum();
    require_pre(spectrum.has_value(),
                "eigen provider has no serializable form");
    json base = json::object();
    base["kind"] = p.dim_n() == 1 ? "harmonic1d" : "harmonic_nd";
    if (p.dim_n() > 1) base["n"] = p.dim_n();
    if (spectrum->exponent == 1) {
      out = std::move(base);
    } else {
      out["kind"] = "power_of";
      out["base"] = std::move(base);
      out["exponent"] = spectrum->exponent;
    }
  }
  out["describe"] = p.describe();
  out["M"] = p.order_M();
  out["n"] = p.dim_n();
  return out;
}

namespace {

TimeSymbol symbol_from_json(const json& j) {
  if (j.is_object() && j.contains("tabulated")) {
    const json& t = j.at("tabulated");
    TabulatedSymbol tab;
    for (const json& v : need(t, "tauMax"))
      tab.tauMax.push_back(as_ll(v, "tauMax entry"));
    tab.growthC = as_double(need(t, "growthC"), "growthC");
    tab.growthNu = as_double(need(t, "growthNu"), "growthNu");
    for (const json& row : need(t, "values")) {
      std::vector<long long> tau;
      for (const json& v : need(row, "tau")) tau.push_back(as_ll(v, "tau"));
      auto [c, exact] = parse_cvalue(need(row, "c"), "tabulated value");
      (void)exact;
      tab.values[tau] = c;
    }
    tab.validate_growth();
    return tab;
  }
  PolySymbol poly;
  const json& terms = need(j, "terms");
  if (!terms.is_array()) bad_config("terms must be an array");
  for (const json& t : terms) {
    PolySymbol::Term term;
    for (const json& a : need(t, "alpha"))
      term.alpha.push_back(static_cast<int>(as_ll(a, "alpha entry")));
    auto [c, exact] = parse_cvalue(need(t, "c"), "coefficient");
    term.c = c;
    term.exact = exact;
    poly.terms.push_back(std::move(term));
  }
  return poly;
}

json symbol_to_json(const TimeSymbol& sym) {
  if (const auto* poly = std::get_if<PolySymbol>(&sym)) {
    json terms = json::array();
    for (const PolySymbol::Term& t : poly->terms) {
      json term = json::object();
      term["alpha"] = t.alpha;
      term["c"] = cvalue_to_json(t.c, t.exact);
      terms.push_back(std::move(term));
    }
    json out = json::object();
    out["terms"] = terms;
    return out;
  }
  const auto& tab = std::get<TabulatedSymbol>(sym);
  json values = json::array();
  for (const auto& [tau, c] : tab.values) {
    json row = json::object();
    row["tau"] = tau;
    row["c"] = cvalue_to_json(c, std::nullopt);
    values.push_back(std::move(row));
  }
  json t = json::object();
  t["tauMax"] = tab.tauMax;
  t["growthC"] = tab.growthC;
  t["growthNu"] = tab.growthNu;
  t["values"] = values;
  json out = json::object();
  out["tabulated"] = t;
  return out;
}

}  // namespace

SystemSpec system_from_json(const json& j, const std::string& baseDir) {
  SystemSpec spec;
  spec.params = space_from_json(need(j, "space"));
  spec.eigen = eigen_from_json(need(j, "eigen"), baseDir);
  const json& ops = need(j, "operators");
  if (!ops.is_array() || ops.empty())
    bad_config("operators must be a nonempty array");
  for (const json& op : ops) {
    OperatorSpec o;
    o.Q = symbol_from_json(need(op, "Q"));
    auto [d, exact] = parse_cvalue(need(op, "d"), "coupling");
    o.d.v = d;
    o.d.exact = exact;
    spec.ops.push_back(std::move(o));
  }
  spec.validate();
  return spec;
}

SystemSpec load_system(const std::string& path) {
  return system_from_json(read_json_file(path),
                          fs::path(path).parent_path().string());
}

json system_to_json(const SystemSpec& spec) {
  json out = json::object();
  out["space"] = space_to_json(spec.params);
  out["eigen"] = eigen_to_json(spec.eigen);
  json ops = json::array();
  for (const OperatorSpec& op : spec.ops) {
    json o = json::object();
    o["Q"] = symbol_to_json(op.Q);
    o["d"] = cvalue_to_json(op.d.v, op.d.exact);
    ops.push_back(std::move(o));
  }
  out["operators"] = ops;
  return out;
}

TimeCoefficientSet coefficient_set_from_json(const json& j,
                                             const std::string& baseDir) {
  TimeCoefficientSet set;
  set.params = space_from_json(need(j, "space"));
  set.eigen = eigen_from_json(need(j, "eigen"), baseDir);
  const json& coeffs = need(j, "coefficients");
  if (!coeffs.is_array()) bad_config("coefficients must be an array");
  for (const json& c : coeffs) {
    if (c.is_object() && c.contains("samples")) {
      SampledCoeff s;
      const json& samples = c.at("samples");
      if (samples.is_string()) {
        fs::path p(samples.get<std::string>());
        if (p.is_relative() && !baseDir.empty()) p = fs::path(baseDir) / p;
        s.values = read_sample_csv(p.string());
      } else {
        for (const json& v : samples)
          s.values.push_back(as_double(v, "sample"));
      }
      set.a.emplace_back(std::move(s));
    } else {
      TrigPoly trig;
      const char* meanKey =
          c.contains("const") ? "const" : (c.contains("c0") ? "c0" : nullptr);
      if (meanKey) {
        auto [d, q] = parse_scalar(c.at(meanKey), meanKey);
        trig.c0 = d;
        trig.c0Exact = q;
      }
      if (c.contains("cos"))
        for (const json& v : c.at("cos"))
          trig.cosC.push_back(as_double(v, "cos coefficient"));
      if (c.contains("sin"))
        for (const json& v : c.at("sin"))
          trig.sinC.push_back(as_double(v, "sin coefficient"));
      set.a.emplace_back(std::move(trig));
    }
  }
  set.validate();
  return set;
}

TimeCoefficientSet load_coefficient_set(const std::string& path) {
  return coefficient_set_from_json(read_json_file(path),
                                   fs::path(path).parent_path().string());
}

EigenProvider load_custom_eigen(const std::string& csvPath) {
  json meta = read_json_file(csvPath + ".meta.json");
  double M = as_double(need(meta, "M"), "M");
  int n = static_cast<int>(as_ll(need(meta, "n"), "n"));

  std::ifstream in = open_in(csvPath);
  std::vector<double> values;
  std::vector<Rational> exact;
  bool allExact = true;
  std::string line;
  bool first = true;
  long long row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("j,", 0) == 0) continue;  // header row
    }
    auto cells = split_csv_line(line);
    if (cells.size() != 2) bad_config("eigen row needs two cells: " + line);
    if (cell_ll(cells[0]) != row)
      bad_config("eigen rows must list j = 0,1,... in order");
    ++row;
    if (allExact) {
      try {
        Rational q = parse_rational(cells[1]);
        exact.push_back(q);
        values.push_back(to_double(q));
        continue;
      } catch (const precondition_error&) {
        allExact = false;
        exact.clear();
      }
    }
    values.push_back(cell_double(cells[1]));
  }
  if (!allExact) {
    // reparse every row as a plain double for consistency
    in.clear();
    in.seekg(0);
    values.clear();
    first = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (first) {
        first = false;
        if (line.rfind("j,", 0) == 0) continue;
      }
      auto cells = split_csv_line(line);
      values.push_back(cell_double(cells[1]));
    }
  }
  return EigenProvider::custom(std::move(values), M, n, std::move(exact));
}

json mode_to_json(const ModeIndex& mode) {
  json out = json::object();
  out["tau"] = mode.tau;
  out["j"] = mode.j;
  return out;
}

json decay_to_json(const DecayProfile& profile) {
  json out = json::object();
  out["label"] = decay_label_name(profile.label);
  out["epsilonHat"] = js_double(profile.epsilonHat);
  out["intercept"] = js_double(profile.intercept);
  out["liminfProxy"] = js_double(profile.liminfProxy);
  out["limsupNegProxy"] = js_double(profile.limsupNegProxy);
  out["pointCount"] = profile.points.size();
  out["caveats"] = profile.caveats;
  return out;
}

namespace {

json profile_to_json(const DiophantineProfile& profile) {
  json out = json::object();
  out["trend"] = trend_name(profile.trend);
  json shells = json::array();
  for (const auto& [edge, eps] : profile.shellEps)
    shells.push_back(json::array({js_double(edge), js_double(eps)}));
  out["shellEps"] = shells;
  json worst = json::array();
  for (const WorstMode& w : profile.worstModes) {
    json e = json::object();
    e["mode"] = mode_to_json(w.mode);
    e["norm"] = js_double(w.norm);
    e["weight"] = js_double(w.weight);
    e["ratio"] = js_double(w.ratio);
    worst.push_back(std::move(e));
  }
  out["worstModes"] = worst;
  out["exact"] = profile.exact;
  out["caveats"] = profile.caveats;
  return out;
}

}  // namespace

json verdict_to_json(const VerdictReport& report) {
  json out = json::object();
  out["verdict"] = verdict_name(report.verdict);
  out["exact"] = report.exact;
  out["grid"] = bounds_to_json(report.grid);
  json profile = profile_to_json(report.profile);
  out["trend"] = profile.at("trend");
  out["shellEps"] = profile.at("shellEps");
  out["worstModes"] = profile.at("worstModes");
  out["profileExact"] = profile.at("exact");
  out["profileCaveats"] = profile.at("caveats");
  json res = json::object();
  res["kind"] = resonance_kind_name(report.resonance.kind);
  res["count"] = report.resonance.count;
  res["detail"] = report.resonance.detail;
  out["resonance"] = res;
  out["zeroCount"] = report.zeroCount;
  json sample = json::array();
  for (const ModeIndex& mode : report.zeroSample)
    sample.push_back(mode_to_json(mode));
  out["zeroSample"] = sample;
  out["minNorm"] = js_double(report.minNorm);
  out["minNonzeroNorm"] = js_double(report.minNonzeroNorm);
  out["caveats"] = report.caveats;
  return out;
}

json admissibility_to_json(const AdmissibilityReport& report) {
  json out = json::object();
  out["admissible"] = report.admissible;
  out["commutationResidual"] = js_double(report.commutationResidual);
  out["maxAbs"] = js_double(report.maxAbs);
  out["tol"] = js_double(report.tol);
  json viol = json::array();
  for (const ModeIndex& mode : report.kernelViolations)
    viol.push_back(mode_to_json(mode));
  out["kernelViolations"] = viol;
  out["caveats"] = report.caveats;
  return out;
}

json liouville_to_json(const LiouvilleVerdict& verdict) {
  json out = json::object();
  out["verdict"] =
      verdict.flagged ? "FlaggedExpLiouville" : "NotFlaggedUpToDepth";
  out["flagged"] = verdict.flagged;
  out["epsHat"] = js_double(verdict.epsHat);
  json seq = json::array();
  for (double e : verdict.epsSeq) seq.push_back(js_double(e));
  out["epsSeq"] = seq;
  json cert = json::array();
  for (const auto& [eps, k0] : verdict.certifiedFrom)
    cert.push_back(json::array({js_double(eps), json(k0)}));
  out["certifiedFrom"] = cert;
  out["certifiedTail"] = verdict.certifiedTail;
  out["caveats"] = verdict.caveats;
  return out;
}

json convergents_to_json(const std::vector<ConvergentBounds>& bounds) {
  json out = json::array();
  for (const ConvergentBounds& b : bounds) {
    json e = json::object();
    e["k"] = b.k;
    if (b.p) e["p"] = b.p->get_str();
    if (b.q) e["q"] = b.q->get_str();
    e["logQ"] = js_double(b.logQ);
    e["logLower"] = js_double(b.logLower);
    e["logUpper"] = js_double(b.logUpper);
    out.push_back(std::move(e));
  }
  return out;
}

void write_profile_csv(const DiophantineProfile& profile,
                       const std::string& path) {
  std::ofstream out = open_out(path);
  out << "R,epsHat\n";
  for (const auto& [edge, eps] : profile.shellEps)
    out << format_double(edge) << "," << format_double(eps) << "\n";
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string dump_json(const json& j) {
  std::string out;
  dump_rec(j, out);
  out += '\n';
  return out;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out = open_out(path);
  std::string text = dump_json(j);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream in = open_in(path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw precondition_error("invalid JSON in " + path);
  return j;
}

}  // namespace fhops::io
