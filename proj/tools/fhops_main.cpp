// Command-line driver for the Fourier-Hermite operator system library.
// All numerical work happens behind the C API in fhops.h; this file only
// parses configuration, shuttles files, and prints JSON payloads.

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fhops/fhops.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct cli_exit {
  int code;
};

[[noreturn]] void fail_pre(const std::string& msg) {
  std::cerr << "precondition violated: " << msg << "\n";
  throw cli_exit{2};
}

void ok(fhops_status st) {
  if (st == FHOPS_OK) return;
  const char* msg = fhops_last_error();
  if (st == FHOPS_E_PRECONDITION)
    std::cerr << "precondition violated: " << (msg ? msg : "") << "\n";
  else
    std::cerr << "internal error: " << (msg ? msg : "") << "\n";
  throw cli_exit{st == FHOPS_E_PRECONDITION ? 2 : 1};
}

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
  std::string out = s ? s : "";
  fhops_string_free(s);
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_pre("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/* ----- TOML subset -------------------------------------------------------
 * Enough of TOML for the config files: [table] and [[array-of-table]]
 * headers, dotted and bare keys, strings, integers, floats, booleans,
 * arrays, and inline tables.  Dates and multi-line strings are not part of
 * the config surface and are rejected.
 */

class TomlParser {
 public:
  explicit TomlParser(const std::string& text) : text_(text) {}

  json parse() {
    json root = json::object();
    json* current = &root;
    skip_trivia(true);
    while (pos_ < text_.size()) {
      if (peek() == '[') {
        current = header(root);
      } else {
        key_value(*current);
        expect_line_end();
      }
      skip_trivia(true);
    }
    return root;
  }

 private:
  const std::string& text_;
  size_t pos_ = 0;

  [[noreturn]] void err(const std::string& msg) {
    fail_pre("config: " + msg);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  char get() { return pos_ < text_.size() ? text_[pos_++] : '\0'; }

  void skip_trivia(bool newlines) {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '\n' && newlines) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  void expect_line_end() {
    skip_trivia(false);
    if (pos_ < text_.size() && text_[pos_] != '\n')
      err("unexpected trailing text near \"" + text_.substr(pos_, 12) + "\"");
  }

  static bool bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string key_part() {
    skip_trivia(false);
    if (peek() == '"' || peek() == '\'') return string_value();
    std::string out;
    while (bare_char(peek())) out += get();
    if (out.empty()) err("expected a key");
    return out;
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{key_part()};
    skip_trivia(false);
    while (peek() == '.') {
      get();
      parts.push_back(key_part());
      skip_trivia(false);
    }
    return parts;
  }

  // [a.b] selects/creates nested tables; [[a.b]] appends to an array of
  // tables.  Navigation through an existing array of tables descends into
  // its last element, as in standard TOML.
  json* header(json& root) {
    get();  // '['
    bool isArray = peek() == '[';
    if (isArray) get();
    auto parts = dotted_key();
    skip_trivia(false);
    if (get() != ']') err("unterminated table header");
    if (isArray && get() != ']') err("unterminated array-of-tables header");
    expect_line_end();

    json* node = &root;
    for (size_t i = 0; i + 1 < parts.size(); ++i) node = descend(node, parts[i]);
    const std::string& last = parts.back();
    if (isArray) {
      json& slot = (*node)[last];
      if (slot.is_null()) slot = json::array();
      if (!slot.is_array()) err("\"" + last + "\" is not an array of tables");
      slot.push_back(json::object());
      return &slot.back();
    }
    json& slot = (*node)[last];
    if (slot.is_null()) slot = json::object();
    if (!slot.is_object()) err("\"" + last + "\" is not a table");
    return &slot;
  }

  json* descend(json* node, const std::string& key) {
    json& slot = (*node)[key];
    if (slot.is_null()) slot = json::object();
    if (slot.is_array()) {
      if (slot.empty()) err("\"" + key + "\" has no entries yet");
      return &slot.back();
    }
    if (!slot.is_object()) err("\"" + key + "\" is not a table");
    return &slot;
  }

  void key_value(json& table) {
    auto parts = dotted_key();
    skip_trivia(false);
    if (get() != '=') err("expected '=' after key \"" + parts.back() + "\"");
    json* node = &table;
    for (size_t i = 0; i + 1 < parts.size(); ++i) node = descend(node, parts[i]);
    if (node->contains(parts.back()))
      err("duplicate key \"" + parts.back() + "\"");
    (*node)[parts.back()] = value();
  }

  json value() {
    skip_trivia(false);
    char c = peek();
    if (c == '"' || c == '\'') return json(string_value());
    if (c == '[') return array_value();
    if (c == '{') return inline_table();
    if (std::strncmp(text_.c_str() + pos_, "true", 4) == 0 &&
        !bare_char(pos_ + 4 < text_.size() ? text_[pos_ + 4] : '\0')) {
      pos_ += 4;
      return json(true);
    }
    if (std::strncmp(text_.c_str() + pos_, "false", 5) == 0 &&
        !bare_char(pos_ + 5 < text_.size() ? text_[pos_ + 5] : '\0')) {
      pos_ += 5;
      return json(false);
    }
    return number_value();
  }

  std::string string_value() {
    char quote = get();
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) err("unterminated string");
      char c = get();
      if (c == quote) break;
      if (c == '\n') err("newline inside string");
      if (quote == '"' && c == '\\') {
        char e = get();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: err(std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  json array_value() {
    get();  // '['
    json out = json::array();
    skip_trivia(true);
    if (peek() == ']') {
      get();
      return out;
    }
    while (true) {
      out.push_back(value());
      skip_trivia(true);
      char c = get();
      if (c == ']') break;
      if (c != ',') err("expected ',' or ']' in array");
      skip_trivia(true);
      if (peek() == ']') {  // trailing comma
        get();
        break;
      }
    }
    return out;
  }

  json inline_table() {
    get();  // '{'
    json out = json::object();
    skip_trivia(false);
    if (peek() == '}') {
      get();
      return out;
    }
    while (true) {
      key_value(out);
      skip_trivia(false);
      char c = get();
      if (c == '}') break;
      if (c != ',') err("expected ',' or '}' in inline table");
      skip_trivia(false);
    }
    return out;
  }

  json number_value() {
    std::string tok;
    while (bare_char(peek()) || peek() == '+' || peek() == '-' ||
           peek() == '.') {
      char c = get();
      if (c != '_') tok += c;
    }
    if (tok.empty()) err("expected a value");
    bool isFloat = tok.find_first_of(".eE") != std::string::npos ||
                   tok == "inf" || tok == "+inf" || tok == "-inf" ||
                   tok == "nan";
    try {
      if (!isFloat) return json(static_cast<int64_t>(std::stoll(tok)));
      if (tok == "inf" || tok == "+inf") return json("inf");
      if (tok == "-inf") return json("-inf");
      if (tok == "nan") return json("nan");
      return json(std::stod(tok));
    } catch (const std::exception&) {
      err("bad number \"" + tok + "\"");
    }
  }
};

// Configs load from TOML or JSON; they are JSON objects exactly when the
// first non-space byte is '{' (a TOML table header also starts with '[').
json load_config(const std::string& path) {
  std::string text = slurp(path);
  size_t i = text.find_first_not_of(" \t\r\n");
  if (i != std::string::npos && text[i] == '{') {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail_pre("invalid JSON in " + path);
    return j;
  }
  return TomlParser(text).parse();
}

std::string base_dir(const std::string& path) {
  std::string dir = fs::path(path).parent_path().string();
  return dir.empty() ? "." : dir;
}

/* ----- output plumbing --------------------------------------------------- */

std::string g_outDir;

std::string resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  const char* env = std::getenv("FHOPS_OUT_DIR");
  if (env && *env) return env;
  return ".";
}

std::string artifact_path(const std::string& name) {
  fs::create_directories(g_outDir);
  return (fs::path(g_outDir) / name).string();
}

// Run provenance (timestamp, argv, artifact list) goes to a sidecar file so
// the JSON payloads stay byte-deterministic.
void write_provenance(const std::string& subcommand,
                      const std::vector<std::string>& argv,
                      const std::vector<std::string>& artifacts) {
  json meta = json::object();
  meta["tool"] = "fhops";
  meta["version"] = fhops_version();
  meta["subcommand"] = subcommand;
  meta["argv"] = argv;
  meta["artifacts"] = artifacts;
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  meta["timestamp"] = stamp;
  std::ofstream out(artifact_path(subcommand + ".provenance.json"),
                    std::ios::binary);
  out << meta.dump(2) << "\n";
}

void print_payload(const std::string& jsonText) {
  std::fwrite(jsonText.data(), 1, jsonText.size(), stdout);
  if (jsonText.empty() || jsonText.back() != '\n') std::fputc('\n', stdout);
}

void print_payload(const json& j) { print_payload(j.dump() + "\n"); }

/* ----- argument helpers --------------------------------------------------- */

std::vector<int64_t> parse_int_list(const std::string& text,
                                    const char* what) {
  std::vector<int64_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stoll(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail_pre(std::string(what) + ": bad integer \"" + tok + "\"");
    }
  }
  if (out.empty()) fail_pre(std::string(what) + ": empty list");
  return out;
}

std::vector<int64_t> tau_bounds(const std::string& text, int m) {
  auto list = parse_int_list(text, "--tau-max");
  if (list.size() == 1 && m > 1) list.assign(static_cast<size_t>(m), list[0]);
  if (static_cast<int>(list.size()) != m)
    fail_pre("--tau-max needs " + std::to_string(m) + " entries");
  return list;
}

SystemPtr load_system_handle(const std::string& specPath) {
  json cfg = load_config(specPath);
  fhops_system* raw = nullptr;
  ok(fhops_system_from_json(cfg.dump().c_str(), base_dir(specPath).c_str(),
                            &raw));
  return SystemPtr(raw);
}

CoeffPtr load_coeff_handle(const std::string& path) {
  json cfg = load_config(path);
  fhops_coeffset* raw = nullptr;
  ok(fhops_coeffset_from_json(cfg.dump().c_str(), base_dir(path).c_str(),
                              &raw));
  return CoeffPtr(raw);
}

FieldPtr read_field(const std::string& path) {
  fhops_field* raw = nullptr;
  ok(fhops_field_read_csv(path.c_str(), &raw));
  return FieldPtr(raw);
}

DataPtr read_data(const std::string& path) {
  fhops_data* raw = nullptr;
  ok(fhops_data_read_manifest(path.c_str(), &raw));
  return DataPtr(raw);
}

json eigen_section(const json& cfg) {
  if (cfg.is_object() && cfg.contains("eigen")) return cfg.at("eigen");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> argvCopy(argv, argv + argc);
  CLI::App app{"Fourier-Hermite operator system toolkit"};
  app.set_version_flag("--version", fhops_version());
  app.require_subcommand(0, 1);

  std::function<int()> handler;
  std::string outDirFlag;
  int threads = 1;

  auto addCommon = [&](CLI::App* sub) {
    sub->add_option("--out-dir", outDirFlag,
                    "artifact directory (default $FHOPS_OUT_DIR or .)");
    sub->add_option("--threads", threads, "worker threads (0 = hardware)");
  };

  /* symbol */
  {
    auto* sub = app.add_subcommand("symbol", "evaluate operator symbols at a mode");
    static std::string spec, tauText;
    static int64_t j = 0;
    sub->add_option("--spec", spec, "system config")->required();
    sub->add_option("--tau", tauText, "comma-separated torus frequency")->required();
    sub->add_option("--j", j, "Hermite index")->required();
    addCommon(sub);
    sub->callback([&]() {
      handler = [&]() -> int {
        SystemPtr s = load_system_handle(spec);
        int m = 0, n = 0, opCount = 0;
        ok(fhops_system_info(s.get(), &m, &n, &opCount));
        auto tau = parse_int_list(tauText, "--tau");
        if (static_cast<int>(tau.size()) != m)
          fail_pre("--tau needs " + std::to_string(m) + " entries");
        double w = 0;
        ok(fhops_weight(s.get(), tau.data(), m, j, &w));
        json ops = json::array();
        for (int r = 1; r <= opCount; ++r) {
          double re = 0, im = 0;
          ok(fhops_symbol_eval(s.get(), r, tau.data(), m, j, &re, &im));
          json e = json::object();
          e["re"] = re;
          e["im"] = im;
          e["abs"] = std::hypot(re, im);
          ops.push_back(std::move(e));
        }
        double norm = 0;
        int argmax = 0;
        ok(fhops_system_norm(s.get(), tau.data(), m, j, &norm, &argmax));
        json out = json::object();
        out["tau"] = tau;
        out["j"] = j;
        out["weight"] = w;
        out["operators"] = ops;
        out["norm"] = norm;
        out["argmax"] = argmax;
        print_payload(out);
        return 0;
      };
    });
  }

  /* zero-set */
  {
    auto* sub = app.add_subcommand("zero-set", "enumerate the common symbol zeros");
    static std::string spec, tauText;
    static int64_t jMax = 0;
    sub->add_option("--spec", spec, "system config")->required();
    sub->add_option("--tau-max", tauText, "torus bounds")->required();
    sub->add_option("--j-max", jMax, "Hermite bound")->required();
    addCommon(sub);
    sub->callback([&]() {
      handler = [&]() -> int {
        SystemPtr s = load_system_handle(spec);
        int m = 0;
        ok(fhops_system_info(s.get(), &m, nullptr, nullptr));
        auto tau = tau_bounds(tauText, m);
        char* raw = nullptr;
        ok(fhops_zero_set(s.get(), tau.data(), m, jMax, threads, &raw));
        std::string payload = take_string(raw);
        g_outDir = resolve_out_dir(outDirFlag);
        json parsed = json::parse(payload);
        std::ofstream csv(artifact_path("zeros.csv"), std::ios::binary);
        for (int a = 1; a <= m; ++a) csv << "tau_" << a << ",";
        csv << "j\n";
        for (const json& mode : parsed.at("modes")) {
          for (const json& c : mode.at("tau")) csv << c.get<int64_t>() << ",";
          csv << mode.at("j").get<int64_t>() << "\n";
        }
        csv.close();
        write_provenance("zero-set", argvCopy, {"zeros.csv"});
        print_payload(payload);
        return 0;
      };
    });
  }

  /* check-hypo / check-solv */
  auto addCheck = [&](const char* name, const char* blurb, int solvability) {
    auto* sub = app.add_subcommand(name, blurb);
    static std::string spec[2], tauText[2], csvName[2];
    static int64_t jMax[2];
    static int shells[2];
    static double delta0[2], delta1[2];
    int k = solvability;
    spec[k].clear();
    tauText[k].clear();
    csvName[k] = std::string(name) + "_profile.csv";
    jMax[k] = 0;
    shells[k] = 8;
    delta0[k] = 0;
    delta1[k] = 0;
    sub->add_option("--spec", spec[k], "system config")->required();
    sub->add_option("--tau-max", tauText[k], "torus bounds")->required();
    sub->add_option("--j-max", jMax[k], "Hermite bound")->required();
    sub->add_option("--shells", shells[k], "number of weight shells");
    sub->add_option("--delta0", delta0[k], "decay threshold");
    sub->add_option("--delta1", delta1[k], "divergence threshold");
    sub->add_option("--profile-csv", csvName[k], "profile artifact name");
    addCommon(sub);
    sub->callback([&, k]() {
      handler = [&, k]() -> int {
        SystemPtr s = load_system_handle(spec[k]);
        int m = 0;
        ok(fhops_system_info(s.get(), &m, nullptr, nullptr));
        auto tau = tau_bounds(tauText[k], m);
        g_outDir = resolve_out_dir(outDirFlag);
        std::string csvPath = artifact_path(csvName[k]);
        char* raw = nullptr;
        ok(fhops_check_profile_csv(s.get(), tau.data(), m, jMax[k], shells[k],
                                   delta0[k], delta1[k], threads, k,
                                   csvPath.c_str(), &raw));
        write_provenance(k ? "check-solv" : "check-hypo", argvCopy,
                         {csvName[k]});
        print_payload(take_string(raw));
        return 0;
      };
    });
  };
  addCheck("check-hypo", "grid hypoellipticity verdict", 0);
  addCheck("check-solv", "grid solvability verdict", 1);

  /* apply */
  {
    auto* sub = app.add_subcommand("apply", "apply the system to a field");
    static std::string spec, fieldPath, stem;
    stem = "F";
    sub->add_option("--spec", spec, "system config")->required();
    sub->add_option("--field", fieldPath, "input field CSV")->required();
    sub->add_option("--out-stem", stem, "artifact stem");
    addCommon(sub);
    sub->callback([&]() {
      handler = [&]() -> int {
        SystemPtr s = load_system_handle(spec);
        FieldPtr u = read_field(fieldPath);
        fhops_data* rawData = nullptr;
        ok(fhops_apply(s.get(), u.get(), threads, &rawData));
        DataPtr F(rawData);
        g_outDir = resolve_out_dir(outDirFlag);
        std::string manifest = stem + "_manifest.json";
        ok(fhops_data_write_manifest(F.get(), artifact_path(manifest).c_str(),
                                     stem.c_str()));
        int opCount = 0;
        ok(fhops_system_info(s.get(), nullptr, nullptr, &opCount));
        json out = json::object();
        out["manifest"] = manifest;
        out["components"] = opCount;
        write_provenance("apply", argvCopy, {manifest});
        print_payload(out);
        return 0;
      };
    });
  }

  /* solve */
  {
    auto* sub = app.add_subcommand("solve", "solve L u = F on the grid");
    static std::string spec, dataPath, kernelPath, stem;
    static double tol;
    stem = "u";
    kernelPath.clear();
    tol = 1e-10;
    sub->add_option("--spec", spec, "system config")->required();
    sub->add_option("--data", dataPath, "data manifest JSON")->required();
    sub->add_option("--kernel", kernelPath, "kernel field CSV");
    sub->add_option("--tol", tol, "admissibility tolerance");
    sub->add_option("--out-stem", stem, "artifact stem");
    addCommon(sub);
    sub->callback([&]() {
      handler = [&]() -> int {
        SystemPtr s = load_system_handle(spec);
        DataPtr F = read_data(dataPath);
        char* admRaw = nullptr;
        ok(fhops_admissibility(s.get(), F.get(), tol, threads, &admRaw));
        std::string admText = take_string(admRaw);
        json adm = json::parse(admText);
        if (!adm.at("admissible").get<bool>()) {
          std::fwrite(admText.data(), 1, admText.size(), stderr);
          return 2;
        }
        FieldPtr kernel;
        if (!kernelPath.empty()) kernel = read_field(kernelPath);
        fhops_field* rawU = nullptr;
        char* repRaw = nullptr;
        ok(fhops_solve(s.get(), F.get(), kernel.get(), threads, &rawU,
                       &repRaw));
        FieldPtr u(rawU);
        g_outDir = resolve_out_dir(outDirFlag);
        std::string uName = stem + ".csv";
        ok(fhops_field_write_csv(u.get(), artifact_path(uName).c_str()));
        json out = json::object();
        out["admissibility"] = adm;
        out["solve"] = json::parse(take_string(repRaw));
        out["solution"] = uName;
        write_provenance("solve", argvCopy, {uName});
        print_payload(out);
        return 0;
      };
    });
  }

  /* counterexample */
  {
    auto* sub = app.add_subcommand("counterexample",
                                   "plant a regularity or solvability gap");
    static std::string spec, tauText, flavor, stem;
    static int64_t jMax;
    static double eps;
    flavor = "gh";
    stem = "ce";
    jMax = 0;
    eps = 0;
    sub->add_option("--spec", spec, "system config")->required();
    sub->add_option("--tau-max", tauText, "torus bounds")->required();
    sub->add_option("--j-max", jMax, "Hermite bound")->required();
    sub->add_option("--flavor", flavor, "gh or gs");
    sub->add_option("--eps", eps, "decay window (<= 0 derives one)");
    sub->add_option("--out-stem", stem, "artifact stem");
    addCommon(sub);
    sub->callback([&]() {
      handler = [&]() -> int {
        SystemPtr s = load_system_handle(spec);
        int m = 0;
        ok(fhops_system_info(s.get(), &m, nullptr, nullptr));
        auto tau = tau_bounds(tauText, m);
        fhops_data* rawF = nullptr;
        fhops_field* rawU = nullptr;
        char* rawJson = nullptr;
        ok(fhops_counterexample(s.get(), tau.data(), m, jMax, flavor.c_str(),
                                eps, threads, &rawF, &rawU, &rawJson));
        DataPtr F(rawF);
        FieldPtr u(rawU);
        g_outDir = resolve_out_dir(outDirFlag);
        std::vector<std::string> artifacts;
        std::string manifest = stem + "_F_manifest.json";
        ok(fhops_data_write_manifest(F.get(), artifact_path(manifest).c_str(),
                                     (stem + "_F").c_str()));
        artifacts.push_back(manifest);
        json out = json::parse(take_string(rawJson));
        out["manifest"] = manifest;
        if (u) {
          std::string uName = stem + "_u.csv";
          ok(fhops_field_write_csv(u.get(), artifact_path(uName).c_str()));
          artifacts.push_back(uName);
          out["solution"] = uName;
        }
        write_provenance("counterexample", argvCopy, artifacts);
        print_payload(out);
        return 0;
      };
    });
  }

  /* decay-fit */
  {
    auto* sub = app.add_subcommand("decay-fit", "classify coefficient decay");
    static std::string fieldPath;
    sub->add_option("--field", fieldPath, "field CSV")->required();
    addCommon(sub);
    sub->callback([&]() {
      handler = [&]() -> int {
        FieldPtr f = read_field(fieldPath);
        char* raw = nullptr;
        ok(fhops_decay_fit(f.get(), &raw));
        print_payload(take_string(raw));
        return 0;
      };
    });
  }

  /* liouville */
  {
    auto* sub = app.add_subcommand("liouville",
                                   "exponential-Liouville screen for a continued fraction");
    static std::string rule, quotients, configPath;
    static double sigma;
    static int depth;
    rule.clear();
    quotients.clear();
    configPath.clear();
    sigma = 1.0;
    depth = 0;
    sub->add_option("--rule", rule,
                    "kind:base[:a1] with kind factorial-power|exp-rule|constant");
    sub->add_option("--quotients", quotients, "comma-separated partial quotients");
    sub->add_option("--config", configPath, "full JSON/TOML config");
    sub->add_option("--sigma", sigma, "time regularity index");
    sub->add_option("--depth", depth, "convergent depth (0 = default)");
    addCommon(sub);
    sub->callback([&]() {
      handler = [&]() -> int {
        json cfg = json::object();
        if (!configPath.empty()) {
          cfg = load_config(configPath);
        } else if (!rule.empty()) {
          std::vector<std::string> parts;
          std::stringstream ss(rule);
          std::string tok;
          while (std::getline(ss, tok, ':')) parts.push_back(tok);
          if (parts.empty()) fail_pre("--rule: empty");
          json r = json::object();
          r["kind"] = parts[0];
          auto numeric = [&](const std::string& text) -> int64_t {
            try {
              return std::stoll(text);
            } catch (const std::exception&) {
              fail_pre("--rule: bad number \"" + text + "\"");
            }
          };
          if (parts[0] == "constant") {
            if (parts.size() != 2) fail_pre("--rule: constant:value");
            r["value"] = numeric(parts[1]);
          } else if (parts[0] == "factorial-power") {
            if (parts.size() != 2) fail_pre("--rule: factorial-power:base");
            r["base"] = numeric(parts[1]);
          } else if (parts[0] == "exp-rule") {
            if (parts.size() < 2 || parts.size() > 3)
              fail_pre("--rule: exp-rule:base[:a1]");
            r["base"] = numeric(parts[1]);
            r["a1"] = parts.size() == 3 ? numeric(parts[2]) : int64_t{1};
          } else {
            fail_pre("--rule: unknown kind \"" + parts[0] + "\"");
          }
          cfg["rule"] = r;
        } else if (!quotients.empty()) {
          auto list = parse_int_list(quotients, "--quotients");
          cfg["quotients"] = list;
        } else {
          fail_pre("one of --rule, --quotients, --config is required");
        }
        if (!cfg.contains("sigma")) cfg["sigma"] = sigma;
        if (depth > 0) cfg["depth"] = depth;
        char* raw = nullptr;
        ok(fhops_liouville(cfg.dump().c_str(), &raw));
        print_payload(take_string(raw));
        return 0;
      };
    });
  }

  /* weyl */
  {
    auto* sub = app.add_subcommand("weyl", "fit eigenvalue growth");
    static std::string eigenPath;
    static int64_t jLo, jHi;
    jLo = 1;
    jHi = 1000;
    sub->add_option("--eigen", eigenPath, "eigen config (or full system config)")
        ->required();
    sub->add_option("--j-lo", jLo, "fit window start");
    sub->add_option("--j-hi", jHi, "fit window end");
    addCommon(sub);
    sub->callback([&]() {
      handler = [&]() -> int {
        json cfg = eigen_section(load_config(eigenPath));
        char* raw = nullptr;
        ok(fhops_weyl(cfg.dump().c_str(), base_dir(eigenPath).c_str(), jLo,
                      jHi, &raw));
        print_payload(take_string(raw));
        return 0;
      };
    });
  }

  /* normal-form */
  {
    auto* sub = app.add_subcommand("normal-form",
                                   "average time coefficients into a constant system");
    static std::string coeffPath, outName, compatField;
    static int compatOp;
    static int64_t compatLevel, nt;
    outName = "reduced_system.json";
    compatField.clear();
    compatOp = 1;
    compatLevel = 0;
    nt = 0;
    sub->add_option("--coeffs", coeffPath, "coefficient config")->required();
    sub->add_option("--out-spec", outName, "reduced system artifact name");
    sub->add_option("--compat-field", compatField,
                    "component field CSV for a compatibility integral");
    sub->add_option("--compat-op", compatOp, "1-based operator index");
    sub->add_option("--compat-level", compatLevel, "Hermite level j");
    sub->add_option("--nt", nt, "time grid size (0 = automatic)");
    addCommon(sub);
    sub->callback([&]() {
      handler = [&]() -> int {
        CoeffPtr c = load_coeff_handle(coeffPath);
        fhops_system* rawSys = nullptr;
        char* rawJson = nullptr;
        ok(fhops_reduce_system(c.get(), &rawSys, &rawJson));
        SystemPtr reduced(rawSys);
        std::string sysText = take_string(rawJson);
        g_outDir = resolve_out_dir(outDirFlag);
        {
          std::ofstream outFile(artifact_path(outName), std::ios::binary);
          outFile.write(sysText.data(),
                        static_cast<std::streamsize>(sysText.size()));
        }
        json out = json::object();
        out["reducedSystem"] = outName;
        out["system"] = json::parse(sysText);
        if (!compatField.empty()) {
          FieldPtr fr = read_field(compatField);
          char* compatRaw = nullptr;
          ok(fhops_compat_integral(c.get(), fr.get(), compatOp, compatLevel,
                                   nt, &compatRaw));
          out["compat"] = json::parse(take_string(compatRaw));
        }
        write_provenance("normal-form", argvCopy, {outName});
        print_payload(out);
        return 0;
      };
    });
  }

  /* psi */
  {
    auto* sub = app.add_subcommand("psi", "apply the integrating-factor conjugation");
    static std::string coeffPath, fieldPath, outName;
    static bool inverse, residual;
    static int64_t nt;
    outName = "psi_u.csv";
    inverse = false;
    residual = false;
    nt = 0;
    sub->add_option("--coeffs", coeffPath, "coefficient config")->required();
    sub->add_option("--field", fieldPath, "input field CSV")->required();
    sub->add_flag("--inverse", inverse, "apply the inverse conjugation");
    sub->add_flag("--residual", residual,
                  "report the conjugation residual instead of a field");
    sub->add_option("--nt", nt, "time grid size (0 = automatic)");
    sub->add_option("--out", outName, "output field artifact name");
    addCommon(sub);
    sub->callback([&]() {
      handler = [&]() -> int {
        CoeffPtr c = load_coeff_handle(coeffPath);
        FieldPtr u = read_field(fieldPath);
        if (residual) {
          double v = 0;
          ok(fhops_conjugation_residual(c.get(), u.get(), nt, threads, &v));
          json out = json::object();
          out["residual"] = v;
          print_payload(out);
          return 0;
        }
        fhops_field* rawOut = nullptr;
        char* repRaw = nullptr;
        ok(fhops_psi_apply(c.get(), u.get(), inverse ? 1 : 0, nt, threads,
                           &rawOut, &repRaw));
        FieldPtr result(rawOut);
        g_outDir = resolve_out_dir(outDirFlag);
        ok(fhops_field_write_csv(result.get(), artifact_path(outName).c_str()));
        json out = json::parse(take_string(repRaw));
        out["output"] = outName;
        write_provenance("psi", argvCopy, {outName});
        print_payload(out);
        return 0;
      };
    });
  }

  /* reconstruct */
  {
    auto* sub = app.add_subcommand("reconstruct",
                                   "sample a coefficient field on a space-time grid");
    static std::string fieldPath, eigenPath, xsText, outName;
    static int tPerAxis;
    outName = "reconstruction.csv";
    tPerAxis = 16;
    xsText = "0";
    sub->add_option("--field", fieldPath, "field CSV")->required();
    sub->add_option("--eigen", eigenPath, "eigen config (or full system config)")
        ->required();
    sub->add_option("--t-per-axis", tPerAxis, "torus samples per axis");
    sub->add_option("--xs", xsText,
                    "semicolon-separated points, comma-separated coordinates");
    addCommon(sub);
    sub->callback([&]() {
      handler = [&]() -> int {
        json cfg = eigen_section(load_config(eigenPath));
        std::string cfgText = cfg.dump();
        std::string baseDir = base_dir(eigenPath);
        int M = 0, n = 0;
        ok(fhops_eigen_info(cfgText.c_str(), baseDir.c_str(), &M, &n));
        std::vector<double> xs;
        int xCount = 0;
        std::stringstream ss(xsText);
        std::string point;
        while (std::getline(ss, point, ';')) {
          std::stringstream ps(point);
          std::string coord;
          int got = 0;
          while (std::getline(ps, coord, ',')) {
            try {
              xs.push_back(std::stod(coord));
            } catch (const std::exception&) {
              fail_pre("--xs: bad coordinate \"" + coord + "\"");
            }
            ++got;
          }
          if (got != n)
            fail_pre("--xs: each point needs " + std::to_string(n) +
                     " coordinates");
          ++xCount;
        }
        if (xCount == 0) fail_pre("--xs: empty");
        FieldPtr f = read_field(fieldPath);
        double* re = nullptr;
        double* im = nullptr;
        int64_t count = 0;
        ok(fhops_reconstruct(f.get(), cfgText.c_str(), baseDir.c_str(),
                             tPerAxis, xs.data(), xCount, &re, &im, &count));
        g_outDir = resolve_out_dir(outDirFlag);
        {
          std::ofstream csv(artifact_path(outName), std::ios::binary);
          csv << "x_index,t_index,re,im\n";
          int64_t perPoint = count / xCount;
          csv.precision(17);
          for (int64_t i = 0; i < count; ++i)
            csv << (i / perPoint) << "," << (i % perPoint) << "," << re[i]
                << "," << im[i] << "\n";
        }
        fhops_buffer_free(re);
        fhops_buffer_free(im);
        json out = json::object();
        out["samples"] = count;
        out["tPerAxis"] = tPerAxis;
        out["points"] = xCount;
        out["artifact"] = outName;
        write_provenance("reconstruct", argvCopy, {outName});
        print_payload(out);
        return 0;
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ExtrasError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 64;
  } catch (const CLI::ParseError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 2;
  } catch (const cli_exit& e) {
    return e.code;
  }

  if (!handler) {
    std::cerr << app.help() << std::flush;
    return 64;
  }
  try {
    return handler();
  } catch (const cli_exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
