#include "fhops/fhops.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>

#include "fhops/diagnostics.hpp"
#include "fhops/io.hpp"
#include "fhops/liouville.hpp"
#include "fhops/normal_form.hpp"
#include "fhops/solver.hpp"

struct fhops_system {
  fhops::SystemSpec spec;
};
struct fhops_field {
  fhops::SpectralField field;
};
struct fhops_data {
  fhops::DataVector data;
};
struct fhops_coeffset {
  fhops::TimeCoefficientSet set;
};

namespace {

thread_local std::string g_lastError;

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) return nullptr;
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <typename Fn>
fhops_status guarded(Fn&& fn) {
  try {
    fn();
    return FHOPS_OK;
  } catch (const fhops::precondition_error& e) {
    g_lastError = e.what();
    return FHOPS_E_PRECONDITION;
  } catch (const std::exception& e) {
    g_lastError = e.what();
    return FHOPS_E_INTERNAL;
  } catch (...) {
    g_lastError = "unknown error";
    return FHOPS_E_INTERNAL;
  }
}

void check(bool ok, const char* msg) { fhops::require_pre(ok, msg); }

fhops::Bounds make_bounds(const int64_t* tauMax, int m, int64_t jMax) {
  check(tauMax != nullptr, "null tauMax");
  fhops::Bounds b;
  b.tauMax.assign(tauMax, tauMax + m);
  b.jMax = jMax;
  return b;
}

fhops::ModeIndex make_mode(const int64_t* tau, int m, int64_t j) {
  check(tau != nullptr, "null tau");
  fhops::ModeIndex mode;
  mode.tau.assign(tau, tau + m);
  mode.j = j;
  return mode;
}

void emit_json(char** jsonOut, const nlohmann::json& j) {
  if (jsonOut) *jsonOut = dup_string(fhops::io::dump_json(j));
}

fhops::ContinuedFraction cf_from_json(const nlohmann::json& j) {
  using fhops::ContinuedFraction;
  if (j.contains("quotients")) {
    std::vector<mpz_class> qs;
    for (const nlohmann::json& v : j.at("quotients")) {
      if (v.is_number_integer()) {
        qs.emplace_back(static_cast<long>(v.get<long long>()));
      } else if (v.is_string()) {
        std::string text = v.get<std::string>();
        check(!text.empty() &&
                  text.find_first_not_of("0123456789") == std::string::npos,
              "quotients must be positive integers");
        qs.emplace_back(text);
      } else {
        fhops::require_pre(false, "quotients must be integers or strings");
      }
    }
    return ContinuedFraction::from_quotients(std::move(qs));
  }
  check(j.contains("rule"), "config needs \"quotients\" or \"rule\"");
  const nlohmann::json& rule = j.at("rule");
  std::string kind = rule.at("kind").get<std::string>();
  auto base = rule.value("base", 0ULL);
  if (kind == "factorial-power")
    return ContinuedFraction::factorial_power(base);
  if (kind == "exp-rule")
    return ContinuedFraction::exp_rule(base, rule.value("a1", 1ULL));
  if (kind == "constant")
    return ContinuedFraction::constant(
        rule.contains("value") ? rule.value("value", 1ULL) : base);
  fhops::require_pre(false, "unknown rule kind \"" + kind + "\"");
  return ContinuedFraction::constant(1);  // unreachable
}

nlohmann::json liouville_json(const fhops::ContinuedFraction& cf, double sigma,
                              int depth) {
  fhops::LiouvilleVerdict verdict = fhops::exp_liouville_test(cf, sigma, depth);
  nlohmann::json out = fhops::io::liouville_to_json(verdict);
  out["describe"] = cf.describe();
  out["depth"] = depth;
  out["sigma"] = sigma;
  out["maxDepth"] = cf.max_depth();
  out["convergents"] = fhops::io::convergents_to_json(convergents(cf, depth));
  return out;
}

struct WitnessPick {
  std::vector<fhops::ModeIndex> witnesses;
  double eps = 0;
};

// Chooses witnesses among the profile's worst modes and an epsilon that
// keeps every pick strictly inside the counterexample window.
WitnessPick pick_witnesses(const fhops::SystemSpec& spec,
                           const fhops::Bounds& bounds, double eps,
                           fhops::CounterexampleFlavor flavor, int threads) {
  fhops::DiophantineProfile prof =
      fhops::diophantine_profile(spec, bounds, {}, threads);
  std::vector<fhops::WorstMode> cand = prof.worstModes;
  std::stable_sort(cand.begin(), cand.end(),
                   [](const fhops::WorstMode& a, const fhops::WorstMode& b) {
                     if (a.weight != b.weight) return a.weight < b.weight;
                     return mode_less(a.mode, b.mode);
                   });

  WitnessPick pick;
  const bool gs = flavor == fhops::CounterexampleFlavor::GS;
  if (eps > 0) {
    std::size_t k = 0;
    for (const fhops::WorstMode& w : cand) {
      double allowed = std::exp(-eps * w.weight);
      if (gs) allowed /= static_cast<double>(k + 1);
      if (w.norm > 0 && w.norm < allowed) {
        pick.witnesses.push_back(w.mode);
        ++k;
      }
    }
    pick.eps = eps;
  } else {
    double minTerm = std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    for (const fhops::WorstMode& w : cand) {
      if (w.norm <= 0) continue;
      double term = -std::log(w.norm);
      if (gs) term -= std::log(static_cast<double>(k + 1));
      term /= w.weight;
      if (term <= 1e-12) continue;
      pick.witnesses.push_back(w.mode);
      minTerm = std::min(minTerm, term);
      ++k;
    }
    pick.eps = 0.9 * minTerm;
  }
  fhops::require_pre(!pick.witnesses.empty(),
                     "no grid mode lies inside the counterexample window");
  return pick;
}

}  // namespace

extern "C" {

const char* fhops_version(void) { return "1.0.0"; }

const char* fhops_last_error(void) { return g_lastError.c_str(); }

void fhops_string_free(char* s) { std::free(s); }
void fhops_buffer_free(double* p) { std::free(p); }

fhops_status fhops_system_from_json(const char* jsonText, const char* baseDir,
                                    fhops_system** out) {
  return guarded([&] {
    check(jsonText && out, "null argument");
    nlohmann::json j = nlohmann::json::parse(jsonText, nullptr, false);
    check(!j.is_discarded(), "invalid JSON");
    *out = new fhops_system{
        fhops::io::system_from_json(j, baseDir ? baseDir : ".")};
  });
}

fhops_status fhops_system_load(const char* path, fhops_system** out) {
  return guarded([&] {
    check(path && out, "null argument");
    *out = new fhops_system{fhops::io::load_system(path)};
  });
}

fhops_status fhops_system_info(const fhops_system* s, int* m, int* n,
                               int* opCount) {
  return guarded([&] {
    check(s, "null argument");
    if (m) *m = s->spec.params.m;
    if (n) *n = s->spec.params.n;
    if (opCount) *opCount = static_cast<int>(s->spec.op_count());
  });
}

fhops_status fhops_system_to_json(const fhops_system* s, char** jsonOut) {
  return guarded([&] {
    check(s && jsonOut, "null argument");
    emit_json(jsonOut, fhops::io::system_to_json(s->spec));
  });
}

void fhops_system_free(fhops_system* s) { delete s; }

fhops_status fhops_field_read_csv(const char* csvPath, fhops_field** out) {
  return guarded([&] {
    check(csvPath && out, "null argument");
    *out = new fhops_field{fhops::io::read_field_csv(csvPath)};
  });
}

fhops_status fhops_field_write_csv(const fhops_field* f, const char* csvPath) {
  return guarded([&] {
    check(f && csvPath, "null argument");
    fhops::io::write_field_csv(f->field, csvPath);
  });
}

void fhops_field_free(fhops_field* f) { delete f; }

fhops_status fhops_data_read_manifest(const char* manifestPath,
                                      fhops_data** out) {
  return guarded([&] {
    check(manifestPath && out, "null argument");
    *out = new fhops_data{fhops::io::read_data_vector(manifestPath)};
  });
}

fhops_status fhops_data_write_manifest(const fhops_data* F,
                                       const char* manifestPath,
                                       const char* stem) {
  return guarded([&] {
    check(F && manifestPath && stem, "null argument");
    fhops::io::write_data_vector(F->data, manifestPath, stem);
  });
}

fhops_status fhops_data_component(const fhops_data* F, int r,
                                  fhops_field** out) {
  return guarded([&] {
    check(F && out, "null argument");
    check(r >= 1 && r <= static_cast<int>(F->data.components.size()),
          "component index out of range (1-based)");
    *out = new fhops_field{F->data.components[static_cast<std::size_t>(r - 1)]};
  });
}

void fhops_data_free(fhops_data* F) { delete F; }

fhops_status fhops_coeffset_load(const char* path, fhops_coeffset** out) {
  return guarded([&] {
    check(path && out, "null argument");
    *out = new fhops_coeffset{fhops::io::load_coefficient_set(path)};
  });
}

fhops_status fhops_coeffset_from_json(const char* jsonText, const char* baseDir,
                                      fhops_coeffset** out) {
  return guarded([&] {
    check(jsonText && out, "null argument");
    nlohmann::json j = nlohmann::json::parse(jsonText, nullptr, false);
    check(!j.is_discarded(), "invalid JSON");
    *out = new fhops_coeffset{
        fhops::io::coefficient_set_from_json(j, baseDir ? baseDir : ".")};
  });
}

void fhops_coeffset_free(fhops_coeffset* c) { delete c; }

fhops_status fhops_weight(const fhops_system* s, const int64_t* tau, int m,
                          int64_t j, double* out) {
  return guarded([&] {
    check(s && out, "null argument");
    check(m == s->spec.params.m, "tau dimension mismatch");
    *out = fhops::weight(s->spec.params, make_mode(tau, m, j));
  });
}

fhops_status fhops_symbol_eval(const fhops_system* s, int r,
                               const int64_t* tau, int m, int64_t j,
                               double* re, double* im) {
  return guarded([&] {
    check(s && re && im, "null argument");
    check(m == s->spec.params.m, "tau dimension mismatch");
    check(r >= 1 && r <= s->spec.op_count(),
          "operator index out of range (1-based)");
    std::complex<double> v =
        fhops::symbol_eval(s->spec, r - 1, make_mode(tau, m, j));
    *re = v.real();
    *im = v.imag();
  });
}

fhops_status fhops_system_norm(const fhops_system* s, const int64_t* tau,
                               int m, int64_t j, double* norm, int* argmax) {
  return guarded([&] {
    check(s && norm, "null argument");
    check(m == s->spec.params.m, "tau dimension mismatch");
    fhops::SystemNorm sn = fhops::system_norm(s->spec, make_mode(tau, m, j));
    *norm = sn.norm;
    if (argmax) *argmax = sn.argmax + 1;
  });
}

fhops_status fhops_eigenvalue(const fhops_system* s, int64_t j, double* out) {
  return guarded([&] {
    check(s && out, "null argument");
    *out = s->spec.eigen.eigenvalue(j);
  });
}

fhops_status fhops_hermite_eval(int64_t j, double x, double* out) {
  return guarded([&] {
    check(out != nullptr, "null argument");
    *out = fhops::hermite_eval(j, x);
  });
}

fhops_status fhops_zero_set(const fhops_system* s, const int64_t* tauMax,
                            int m, int64_t jMax, int threads, char** jsonOut) {
  return guarded([&] {
    check(s && jsonOut, "null argument");
    check(m == s->spec.params.m, "tauMax dimension mismatch");
    fhops::ZeroSetResult zs =
        fhops::zero_set(s->spec, make_bounds(tauMax, m, jMax), threads);
    nlohmann::json out = nlohmann::json::object();
    out["count"] = zs.modes.size();
    nlohmann::json modes = nlohmann::json::array();
    for (const fhops::ModeIndex& mode : zs.modes)
      modes.push_back(fhops::io::mode_to_json(mode));
    out["modes"] = modes;
    out["exact"] = zs.exact;
    out["caveats"] = zs.caveats;
    emit_json(jsonOut, out);
  });
}

fhops_status fhops_check(const fhops_system* s, const int64_t* tauMax, int m,
                         int64_t jMax, int shellCount, double delta0,
                         double delta1, int threads, int solvability,
                         char** jsonOut) {
  return fhops_check_profile_csv(s, tauMax, m, jMax, shellCount, delta0,
                                 delta1, threads, solvability, nullptr,
                                 jsonOut);
}

fhops_status fhops_check_profile_csv(const fhops_system* s,
                                     const int64_t* tauMax, int m,
                                     int64_t jMax, int shellCount,
                                     double delta0, double delta1, int threads,
                                     int solvability, const char* csvPath,
                                     char** jsonOut) {
  return guarded([&] {
    check(s && jsonOut, "null argument");
    check(m == s->spec.params.m, "tauMax dimension mismatch");
    fhops::DiagnosticsConfig cfg;
    if (shellCount > 0) cfg.shellCount = shellCount;
    if (delta0 > 0) cfg.delta0 = delta0;
    if (delta1 > 0) cfg.delta1 = delta1;
    fhops::Bounds bounds = make_bounds(tauMax, m, jMax);
    fhops::VerdictReport report =
        solvability ? fhops::solvability_verdict(s->spec, bounds, cfg, threads)
                    : fhops::hypoellipticity_verdict(s->spec, bounds, cfg,
                                                     threads);
    if (csvPath) fhops::io::write_profile_csv(report.profile, csvPath);
    emit_json(jsonOut, fhops::io::verdict_to_json(report));
  });
}

fhops_status fhops_apply(const fhops_system* s, const fhops_field* u,
                         int threads, fhops_data** out) {
  return guarded([&] {
    check(s && u && out, "null argument");
    *out = new fhops_data{fhops::apply_system(s->spec, u->field, threads)};
  });
}

fhops_status fhops_admissibility(const fhops_system* s, const fhops_data* F,
                                 double tol, int threads, char** jsonOut) {
  return guarded([&] {
    check(s && F && jsonOut, "null argument");
    fhops::AdmissibilityReport report =
        fhops::admissibility_check(s->spec, F->data, tol, threads);
    emit_json(jsonOut, fhops::io::admissibility_to_json(report));
  });
}

fhops_status fhops_solve(const fhops_system* s, const fhops_data* F,
                         const fhops_field* kernel, int threads,
                         fhops_field** uOut, char** reportJsonOut) {
  return guarded([&] {
    check(s && F && uOut, "null argument");
    std::optional<fhops::SpectralField> k;
    if (kernel) k = kernel->field;
    auto [u, report] = fhops::solve(s->spec, F->data, k, threads);
    nlohmann::json out = nlohmann::json::object();
    out["residual"] = report.residual;
    out["zeroedModes"] = report.zeroedModes;
    out["caveats"] = report.caveats;
    *uOut = new fhops_field{std::move(u)};
    emit_json(reportJsonOut, out);
  });
}

fhops_status fhops_symbol_division(const fhops_system* s, const fhops_data* F,
                                   int threads, fhops_field** out) {
  return guarded([&] {
    check(s && F && out, "null argument");
    *out = new fhops_field{fhops::symbol_division(s->spec, F->data, threads)};
  });
}

fhops_status fhops_counterexample(const fhops_system* s, const int64_t* tauMax,
                                  int m, int64_t jMax, const char* flavor,
                                  double eps, int threads, fhops_data** FOut,
                                  fhops_field** uOut, char** jsonOut) {
  return guarded([&] {
    check(s && flavor && FOut, "null argument");
    check(m == s->spec.params.m, "tauMax dimension mismatch");
    std::string fl = flavor;
    check(fl == "gh" || fl == "gs", "flavor must be \"gh\" or \"gs\"");
    fhops::CounterexampleFlavor kind = fl == "gh"
                                           ? fhops::CounterexampleFlavor::GH
                                           : fhops::CounterexampleFlavor::GS;
    fhops::Bounds bounds = make_bounds(tauMax, m, jMax);
    WitnessPick pick = pick_witnesses(s->spec, bounds, eps, kind, threads);
    fhops::CounterexamplePair pair = fhops::counterexample_pair(
        s->spec, bounds, pick.witnesses, pick.eps, kind);

    nlohmann::json out = nlohmann::json::object();
    out["flavor"] = fl;
    out["eps"] = pair.eps;
    nlohmann::json wit = nlohmann::json::array();
    for (const fhops::ModeIndex& mode : pair.witnesses)
      wit.push_back(fhops::io::mode_to_json(mode));
    out["witnesses"] = wit;
    out["witnessCount"] = pair.witnesses.size();
    *FOut = new fhops_data{std::move(pair.F)};
    if (uOut)
      *uOut = pair.u ? new fhops_field{std::move(*pair.u)} : nullptr;
    emit_json(jsonOut, out);
  });
}

fhops_status fhops_decay_fit(const fhops_field* f, char** jsonOut) {
  return guarded([&] {
    check(f && jsonOut, "null argument");
    fhops::DecayProfile profile = fhops::decay_classify(f->field);
    emit_json(jsonOut, fhops::io::decay_to_json(profile));
  });
}

fhops_status fhops_liouville(const char* configJson, char** jsonOut) {
  return guarded([&] {
    check(configJson && jsonOut, "null argument");
    nlohmann::json cfg = nlohmann::json::parse(configJson, nullptr, false);
    check(!cfg.is_discarded(), "invalid JSON");
    double sigma = cfg.value("sigma", 1.0);
    int depth = cfg.value("depth", 0);
    if (cfg.contains("vector")) {
      std::vector<fhops::ContinuedFraction> cfs;
      for (const nlohmann::json& c : cfg.at("vector"))
        cfs.push_back(cf_from_json(c));
      int maxDepth = std::numeric_limits<int>::max();
      for (const fhops::ContinuedFraction& cf : cfs)
        maxDepth = std::min(maxDepth, cf.max_depth());
      if (depth <= 0) depth = std::min(20, maxDepth);
      fhops::VectorVerdict verdict =
          fhops::vector_coordinate_test(cfs, sigma, depth);
      nlohmann::json out = nlohmann::json::object();
      out["certified"] = verdict.certified;
      out["coordinate"] = verdict.coordinate;
      nlohmann::json per = nlohmann::json::array();
      for (const fhops::LiouvilleVerdict& v : verdict.perCoordinate)
        per.push_back(fhops::io::liouville_to_json(v));
      out["perCoordinate"] = per;
      out["depth"] = depth;
      out["sigma"] = sigma;
      emit_json(jsonOut, out);
      return;
    }
    fhops::ContinuedFraction cf = cf_from_json(cfg);
    if (depth <= 0) depth = std::min(20, cf.max_depth());
    emit_json(jsonOut, liouville_json(cf, sigma, depth));
  });
}

fhops_status fhops_weyl(const char* eigenJson, const char* baseDir,
                        int64_t jLo, int64_t jHi, char** jsonOut) {
  return guarded([&] {
    check(eigenJson && jsonOut, "null argument");
    nlohmann::json j = nlohmann::json::parse(eigenJson, nullptr, false);
    check(!j.is_discarded(), "invalid JSON");
    fhops::EigenProvider provider =
        fhops::io::eigen_from_json(j, baseDir ? baseDir : ".");
    fhops::WeylFit fit = fhops::weyl_fit(provider, jLo, jHi);
    nlohmann::json out = nlohmann::json::object();
    out["exponentHat"] = fit.exponentHat;
    out["rhoHat"] = fit.rhoHat;
    out["residual"] = fit.residual;
    out["M"] = provider.order_M();
    out["n"] = provider.dim_n();
    out["describe"] = provider.describe();
    emit_json(jsonOut, out);
  });
}

fhops_status fhops_eigen_info(const char* eigenJson, const char* baseDir,
                              int* M, int* n) {
  return guarded([&] {
    check(eigenJson, "null argument");
    nlohmann::json j = nlohmann::json::parse(eigenJson, nullptr, false);
    check(!j.is_discarded(), "invalid JSON");
    fhops::EigenProvider provider =
        fhops::io::eigen_from_json(j, baseDir ? baseDir : ".");
    if (M) *M = provider.order_M();
    if (n) *n = provider.dim_n();
  });
}

fhops_status fhops_reduce_system(const fhops_coeffset* c, fhops_system** out,
                                 char** jsonOut) {
  return guarded([&] {
    check(c && out, "null argument");
    fhops::SystemSpec spec = fhops::reduce_system(c->set);
    emit_json(jsonOut, fhops::io::system_to_json(spec));
    *out = new fhops_system{std::move(spec)};
  });
}

fhops_status fhops_psi_apply(const fhops_coeffset* c, const fhops_field* u,
                             int inverse, int64_t Nt, int threads,
                             fhops_field** out, char** reportJsonOut) {
  return guarded([&] {
    check(c && u && out, "null argument");
    fhops::PsiOptions opts;
    opts.Nt = Nt;
    opts.inverse = inverse != 0;
    opts.threads = threads;
    auto [field, report] = fhops::psi_apply(c->set, u->field, opts);
    nlohmann::json j = nlohmann::json::object();
    j["Nt"] = report.Nt;
    j["truncatedMax"] = report.truncatedMax;
    j["quadratureError"] = report.quadratureError;
    *out = new fhops_field{std::move(field)};
    emit_json(reportJsonOut, j);
  });
}

fhops_status fhops_conjugation_residual(const fhops_coeffset* c,
                                        const fhops_field* u, int64_t Nt,
                                        int threads, double* out) {
  return guarded([&] {
    check(c && u && out, "null argument");
    *out = fhops::conjugation_residual(c->set, u->field, Nt, threads);
  });
}

fhops_status fhops_compat_integral(const fhops_coeffset* c,
                                   const fhops_field* fr, int r, int64_t j,
                                   int64_t Nt, char** jsonOut) {
  return guarded([&] {
    check(c && fr && jsonOut, "null argument");
    check(r >= 1 && r <= c->set.params.m,
          "component index out of range (1-based)");
    fhops::CompatResult result =
        fhops::compat_integral(c->set, fr->field, r - 1, j, Nt);
    nlohmann::json out = nlohmann::json::object();
    out["applicable"] = result.applicable;
    out["maxAbs"] = result.maxAbs;
    emit_json(jsonOut, out);
  });
}

fhops_status fhops_reconstruct(const fhops_field* f, const char* eigenJson,
                               const char* baseDir, int tPerAxis,
                               const double* xs, int xCount, double** reOut,
                               double** imOut, int64_t* countOut) {
  return guarded([&] {
    check(f && eigenJson && xs && reOut && imOut && countOut, "null argument");
    nlohmann::json j = nlohmann::json::parse(eigenJson, nullptr, false);
    check(!j.is_discarded(), "invalid JSON");
    fhops::EigenProvider provider =
        fhops::io::eigen_from_json(j, baseDir ? baseDir : ".");
    std::span<const double> xSpan(
        xs, static_cast<std::size_t>(xCount) *
                static_cast<std::size_t>(provider.dim_n()));
    std::vector<std::complex<double>> values =
        fhops::reconstruct(f->field, provider, tPerAxis, xSpan, xCount);
    auto* re = static_cast<double*>(std::malloc(values.size() * sizeof(double)));
    auto* im = static_cast<double*>(std::malloc(values.size() * sizeof(double)));
    if (!re || !im) {
      std::free(re);
      std::free(im);
      throw std::bad_alloc();
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      re[i] = values[i].real();
      im[i] = values[i].imag();
    }
    *reOut = re;
    *imOut = im;
    *countOut = static_cast<int64_t>(values.size());
  });
}

}  // extern "C"
