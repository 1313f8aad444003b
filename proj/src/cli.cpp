#include "heunpulse/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>

#include "heunpulse/dynamics.hpp"
#include "heunpulse/format.hpp"
#include "heunpulse/mapping.hpp"
#include "heunpulse/pulseshape.hpp"

namespace heunpulse::cli {
namespace {

std::string strip(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s.push_back(c);
  return s;
}

double parse_plain(std::string_view s, std::string_view whole) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw UsageError("not a number: '" + std::string(whole) + "'");
  return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<double> parse_reals(std::string_view text, std::size_t count, std::string_view what) {
  const auto parts = split(strip(text), ',');
  if (parts.size() != count)
    throw UsageError(std::string(what) + " expects " + std::to_string(count) + " comma-separated values, got '" +
                     std::string(text) + "'");
  std::vector<double> v;
  for (const auto& p : parts) v.push_back(parse_real(p));
  return v;
}

double real_part_only(cplx v, std::string_view what) {
  if (v.imag() != 0.0) throw std::invalid_argument(std::string(what) + " must be real here");
  return v.real();
}

ClassId parse_class_flag(std::string_view text) {
  const std::string s = strip(text);
  try {
    if (s.find(',') == std::string::npos) return parse_class(s + "," + s + "," + s);
    return parse_class(s);
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// Flags shared by params, pulse and verify.
struct ParamFlags {
  std::string cls = "0,0,-1";
  std::string a, U0star, d, d1, d2, d3, U0, a0, lambda;
  std::string Delta = "1";
  std::string Delta1 = "0", Delta2 = "0";
  std::string transform = "constant";
  CLI::Option* transform_opt = nullptr;
};

void add_class_flag(CLI::App* sub, ParamFlags& f) {
  sub->add_option("--class,-c", f.cls, "k1,k2,k3 (halves as -1/2 or -0.5); one value sets all three")
      ->capture_default_str();
}

void add_model_flags(CLI::App* sub, ParamFlags& f) {
  sub->add_option("--a", f.a, "singular point a (complex); for the periodic kinds 0 < a < 1");
  sub->add_option("--d", f.d, "d1,d2,d3 as three reals");
  sub->add_option("--d1", f.d1, "d1 (complex)");
  sub->add_option("--d2", f.d2, "d2 (complex)");
  sub->add_option("--d3", f.d3, "d3 (complex)");
  sub->add_option("--Delta", f.Delta, "detuning scale")->capture_default_str();
}

void add_param_flags(CLI::App* sub, ParamFlags& f) {
  add_class_flag(sub, f);
  add_model_flags(sub, f);
  sub->add_option("--U0star", f.U0star,
                  "U0* (complex: re,im or i, -i, 2i, 1/2+i); default realizes a real pulse");
  sub->add_option("--U0", f.U0, "real amplitude scale U0");
  f.transform_opt = sub->add_option("--transform,-t", f.transform, "constant | line | periodic | amplitude")
                        ->capture_default_str();
  sub->add_option("--a0", f.a0, "complex-line a0 (a = (1 + i a0)/2)");
  sub->add_option("--lambda", f.lambda, "complex-line lambda1,lambda2,lambda3");
  sub->add_option("--Delta1", f.Delta1, "constant-amplitude Delta1")->capture_default_str();
  sub->add_option("--Delta2", f.Delta2, "constant-amplitude Delta2")->capture_default_str();
}

struct Setup {
  ClassId id;
  ModelParams p;
  TransformSpec spec;
  bool explicit_u0star = false;
  double U0 = 1.0;
};

// d1..d3 from --d and the individual flags; defaults 1, -1, -2.
std::array<std::optional<cplx>, 3> detuning_flags(const ParamFlags& f) {
  std::array<std::optional<cplx>, 3> d;
  if (!f.d.empty()) {
    const auto v = parse_reals(f.d, 3, "--d");
    for (int j = 0; j < 3; ++j) d[j] = v[j];
  }
  const std::array<const std::string*, 3> single{&f.d1, &f.d2, &f.d3};
  for (int j = 0; j < 3; ++j)
    if (!single[j]->empty()) d[j] = parse_complex(*single[j]);
  return d;
}

Setup build_setup(const ParamFlags& f) {
  Setup s;
  s.id = parse_class_flag(f.cls);
  try {
    s.spec.kind = parse_transform_kind(f.transform);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (s.spec.kind == TransformKind::user_supplied)
    throw UsageError("user-supplied transformations are available from the library only");
  s.spec.Delta = parse_real(f.Delta);
  s.p.Delta = s.spec.Delta;
  if (!f.a.empty()) s.p.a = parse_complex(f.a);
  const auto d = detuning_flags(f);
  const std::array<cplx, 3> fallback{1.0, -1.0, -2.0};
  s.p.d1 = d[0].value_or(fallback[0]);
  s.p.d2 = d[1].value_or(fallback[1]);
  s.p.d3 = d[2].value_or(fallback[2]);
  if (!f.U0.empty()) s.U0 = parse_real(f.U0);
  s.explicit_u0star = !f.U0star.empty();
  s.p.U0star = s.explicit_u0star ? parse_complex(f.U0star)
               : s.spec.kind == TransformKind::real_constant_detuning ? realizing_u0star(s.id, s.U0)
                                                                       : cplx{s.U0};

  switch (s.spec.kind) {
    case TransformKind::complex_line: {
      auto& L = s.spec.line;
      if (!f.a0.empty()) L.a0 = parse_real(f.a0);
      if (!f.lambda.empty()) {
        const auto v = parse_reals(f.lambda, 3, "--lambda");
        L.lambda1 = v[0];
        L.lambda2 = v[1];
        L.lambda3 = v[2];
      } else if (d[0] || d[2]) {
        // d1 = Delta (lambda1 - i lambda2), d2 = conj(d1), d3 = Delta lambda3
        const cplx d1 = s.p.d1 / s.spec.Delta;
        L.lambda1 = d1.real();
        L.lambda2 = -d1.imag();
        L.lambda3 = real_part_only(s.p.d3 / s.spec.Delta, "d3 on the complex line");
        if (d[1] && std::abs(*d[1] - std::conj(s.p.d1)) > 1e-12 * std::abs(s.p.d1))
          throw std::invalid_argument("the complex line requires d2 = conj(d1)");
      }
      if (s.explicit_u0star) {
        ComplexLineSpec unit = L;
        unit.U0 = 1.0;
        const cplx ratio = s.p.U0star / complex_line_model(s.id, unit, s.spec.Delta).U0star;
        if (std::abs(ratio.imag()) > 1e-12 * std::abs(ratio))
          throw std::invalid_argument("this U0* gives a complex pulse on the complex line");
        L.U0 = ratio.real();
      } else {
        L.U0 = s.U0;
      }
      break;
    }
    case TransformKind::periodic_exponential:
    case TransformKind::periodic_constant_amplitude: {
      auto& P = s.spec.periodic;
      if (!f.a.empty()) P.a = real_part_only(s.p.a, "a");
      P.U0 = s.U0;
      P.Delta1 = parse_real(f.Delta1);
      P.Delta2 = parse_real(f.Delta2);
      break;
    }
    default: break;
  }
  return s;
}

FieldConfiguration configure(const Setup& s) { return FieldConfiguration::from_spec(s.id, s.p, s.spec); }

template <class Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(file);
  if (!file) throw std::runtime_error("write to '" + path + "' failed");
}

void write_json(const std::string& path, std::ostream& out, const nlohmann::json& j) {
  emit(path, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

std::array<int, 3> parse_branch(const std::string& text) {
  const auto v = parse_reals(text, 3, "--branch");
  std::array<int, 3> b{};
  for (int j = 0; j < 3; ++j) {
    if (v[j] != 0.0 && v[j] != 1.0) throw UsageError("--branch entries must be 0 or 1");
    b[j] = static_cast<int>(v[j]);
  }
  return b;
}

std::pair<double, double> parse_range(const std::string& text, std::string_view what) {
  const auto v = parse_reals(text, 2, what);
  return {v[0], v[1]};
}

double default_tolerance() {
  const char* env = std::getenv("HEUNPULSE_TOL");
  if (!env || !*env) return 1e-12;
  try {
    return parse_real(env);
  } catch (const UsageError&) {
    throw UsageError(std::string("HEUNPULSE_TOL is not a number: '") + env + "'");
  }
}

std::vector<ClassId> sweep_classes(TransformKind kind) {
  std::vector<ClassId> ids;
  for (const auto& id : enumerate_classes()) {
    switch (kind) {
      case TransformKind::complex_line:
        if (complex_line_admissible(id)) ids.push_back(id);
        break;
      case TransformKind::periodic_exponential:
        if (id == ClassId{-1, -1, -1} || id == ClassId{0, -2, -2}) ids.push_back(id);
        break;
      case TransformKind::periodic_constant_amplitude:
        if (id == ClassId{-2, 0, 0}) ids.push_back(id);
        break;
      default: ids.push_back(id);
    }
  }
  return ids;
}

const CLI::App* deepest(const CLI::App* app) {
  for (const auto* sub : app->get_subcommands())
    if (sub->parsed()) return deepest(sub);
  return app;
}

}  // namespace

double parse_real(std::string_view text) {
  const std::string s = strip(text);
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_plain(s, text);
  const double num = parse_plain(std::string_view(s).substr(0, slash), text);
  const double den = parse_plain(std::string_view(s).substr(slash + 1), text);
  if (den == 0.0) throw UsageError("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

cplx parse_complex(std::string_view text) {
  const std::string s = strip(text);
  if (s.find(',') != std::string::npos) {
    const auto v = parse_reals(s, 2, "complex value");
    return {v[0], v[1]};
  }
  const auto pos_i = s.find('i');
  if (pos_i == std::string::npos) return parse_real(s);
  if (s.find('i', pos_i + 1) != std::string::npos) throw UsageError("not a complex number: '" + s + "'");
  // the imaginary term starts at the last sign before 'i' that is not an exponent sign
  std::size_t start = 0;
  for (std::size_t k = pos_i; k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      start = k;
      break;
    }
  }
  const double re = start == 0 ? 0.0 : parse_real(std::string_view(s).substr(0, start));
  std::string term = s.substr(start, pos_i - start) + s.substr(pos_i + 1);
  const bool signed_term = !term.empty() && (term[0] == '+' || term[0] == '-');
  const std::size_t body = signed_term ? 1 : 0;
  if (term.size() == body || term[body] == '/') term.insert(body, "1");
  return {re, parse_real(term)};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-state models solvable by the general Heun function", "heunpulse"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  // classes list
  auto* classes = app.add_subcommand("classes", "the 35 solvable classes");
  classes->require_subcommand(1);
  auto* list = classes->add_subcommand("list", "table of class, finite-area flag, phi-trivial flag");

  // params
  ParamFlags pf;
  std::string branch, out_path;
  auto* params = app.add_subcommand("params", "Heun parameters of a class as JSON");
  add_param_flags(params, pf);
  params->add_option("--branch", branch, "exponent root index per singular point, e.g. 0,1,0");
  params->add_option("--output,-o", out_path, "output file (default stdout)");

  // pulse
  ParamFlags uf;
  double t_min = -10.0, t_max = 10.0;
  std::size_t n_points = 401;
  bool normalize = false;
  std::string pulse_out, meta_path, metrics_path;
  auto* pulse = app.add_subcommand("pulse", "sample U(t) and delta_t(t) as CSV");
  add_param_flags(pulse, uf);
  pulse->add_option("--t-min", t_min)->capture_default_str();
  pulse->add_option("--t-max", t_max)->capture_default_str();
  pulse->add_option("--n", n_points, "grid points")->capture_default_str()->check(CLI::Range(2, 10000000));
  pulse->add_flag("--normalize", normalize, "divide U by max |U|");
  pulse->add_option("--output,-o", pulse_out, "CSV file (default stdout)");
  pulse->add_option("--meta", meta_path, "JSON sidecar with class, parameters and normalization");
  pulse->add_option("--metrics", metrics_path, "JSON file with peaks, FWHM and area");

  // narrow
  ParamFlags nf;
  std::string free_name = "d3", narrow_out;
  bool all_roots = false;
  auto* narrow = app.add_subcommand("narrow", "parameter values where P(z) has a double root in (0, 1)");
  add_class_flag(narrow, nf);
  add_model_flags(narrow, nf);
  narrow->add_option("--free", free_name, "free parameter: d3 or a")
      ->capture_default_str()
      ->check(CLI::IsMember({"d3", "a"}));
  narrow->add_flag("--all", all_roots, "include rejected roots");
  narrow->add_option("--output,-o", narrow_out);

  // walls
  ParamFlags wf;
  std::string walls_out;
  auto* walls = app.add_subcommand("walls", "limiting vertical-wall positions t1, t2 and the width");
  add_class_flag(walls, wf);
  add_model_flags(walls, wf);
  walls->add_option("--output,-o", walls_out);

  // verify
  ParamFlags vf;
  double threshold = 1e-5;
  std::string rel_tol_text, z_range, t_range, anchor, vbranch, verify_out;
  int v_points = 81;
  bool sweep = false;
  auto* verify = app.add_subcommand("verify", "compare the analytic solution with direct integration");
  add_param_flags(verify, vf);
  verify->add_option("--threshold", threshold, "pass if max relative error <= threshold")->capture_default_str();
  verify->add_option("--rel-tol", rel_tol_text, "integrator rel_tol (default HEUNPULSE_TOL or 1e-12)");
  verify->add_option("--n-points", v_points)->capture_default_str()->check(CLI::Range(3, 100000));
  verify->add_option("--z-range", z_range, "z interval for the constant-detuning transform, lo,hi");
  verify->add_option("--t-range", t_range, "t interval for the other transforms, lo,hi");
  verify->add_option("--anchor", anchor, "anchor time");
  verify->add_option("--branch", vbranch, "exponent root index per singular point");
  verify->add_flag("--all", sweep, "every class admissible for the transform");
  verify->add_option("--output,-o", verify_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n\n" << deepest(&app)->help();
    return 2;
  }

  const CLI::App* active = deepest(&app);
  try {
    if (list->parsed()) {
      out << "class\tfinite_area\tphi_trivial\tU*/U0*\n";
      for (const auto& id : enumerate_classes()) {
        out << to_string(id) << '\t' << (finite_area(id) ? "yes" : "no") << '\t'
            << (phi_exponents_trivial(id) ? "yes" : "no") << '\t' << amplitude_formula(id) << '\n';
      }
      return 0;
    }

    if (params->parsed()) {
      const Setup s = build_setup(pf);
      const ModelParams p =
          s.spec.kind == TransformKind::real_constant_detuning ? s.p : configure(s).model();
      const ExponentChoice choice =
          branch.empty() ? default_exponents(s.id, p) : choose_exponents(s.id, p, parse_branch(branch));
      write_json(out_path, out, to_json(heun_params(s.id, p, choice)));
      return 0;
    }

    if (pulse->parsed()) {
      const Setup s = build_setup(uf);
      if (!(t_max > t_min)) throw UsageError("--t-max must exceed --t-min");
      const auto grid = linspace(t_min, t_max, n_points);
      const PulseTrace trace = sample(configure(s), grid);
      emit(pulse_out, out, [&](std::ostream& o) { write_trace_csv(o, trace, normalize); });
      if (!meta_path.empty()) write_json(meta_path, out, trace_metadata(trace, normalize));
      if (!metrics_path.empty()) write_json(metrics_path, out, to_json(peak_metrics(trace)));
      return 0;
    }

    if (narrow->parsed() || walls->parsed()) {
      const ParamFlags& f = narrow->parsed() ? nf : wf;
      parse_class_flag(f.cls);
      const double a = f.a.empty() ? 2.0 : real_part_only(parse_complex(f.a), "a");
      const auto d = detuning_flags(f);
      const double d1 = real_part_only(d[0].value_or(1.0), "d1");
      const double d2 = real_part_only(d[1].value_or(-1.0), "d2");
      const double d3 = real_part_only(d[2].value_or(-2.0), "d3");
      if (walls->parsed()) {
        write_json(walls_out, out, to_json(wall_positions(a, d1, d2, d3, parse_real(f.Delta))));
        return 0;
      }
      const FreeParameter free = free_name == "a" ? FreeParameter::a : FreeParameter::d3;
      nlohmann::json roots = nlohmann::json::array();
      for (const auto& r : narrow_pulse_roots(free, a, d1, d2, d3))
        if (all_roots || r.admissible) roots.push_back(to_json(r));
      write_json(narrow_out, out, {{"free", free_name}, {"roots", roots}});
      return 0;
    }

    if (verify->parsed()) {
      VerifyOptions o;
      o.rel_tol = rel_tol_text.empty() ? default_tolerance() : parse_real(rel_tol_text);
      o.n_points = v_points;
      if (!z_range.empty()) o.z_interval = parse_range(z_range, "--z-range");
      if (!t_range.empty()) o.t_interval = parse_range(t_range, "--t-range");
      if (!anchor.empty()) o.anchor_t = parse_real(anchor);
      const Setup base = build_setup(vf);

      auto run_one = [&](const Setup& s) {
        VerifyOptions opt = o;
        const FieldConfiguration field = configure(s);
        if (!vbranch.empty()) opt.exponents = choose_exponents(s.id, field.model(), parse_branch(vbranch));
        return verify_class(field, opt);
      };

      if (!sweep) {
        const VerificationReport r = run_one(base);
        nlohmann::json j = to_json(r);
        j["threshold"] = threshold;
        j["passed"] = r.passed(threshold);
        write_json(verify_out, out, j);
        return r.passed(threshold) ? 0 : 1;
      }

      const auto ids = sweep_classes(base.spec.kind);
      std::vector<std::future<VerificationReport>> jobs;
      for (const auto& id : ids) {
        Setup s = base;
        s.id = id;
        if (!s.explicit_u0star && s.spec.kind == TransformKind::real_constant_detuning)
          s.p.U0star = realizing_u0star(id, s.U0);
        jobs.push_back(std::async(std::launch::async, run_one, s));
      }
      nlohmann::json reports = nlohmann::json::array();
      nlohmann::json failed = nlohmann::json::array();
      for (std::size_t k = 0; k < jobs.size(); ++k) {
        try {
          const VerificationReport r = jobs[k].get();
          nlohmann::json j = to_json(r);
          j["passed"] = r.passed(threshold);
          if (!r.passed(threshold)) failed.push_back(to_string(ids[k]));
          reports.push_back(std::move(j));
        } catch (const std::exception& e) {
          failed.push_back(to_string(ids[k]));
          reports.push_back({{"class", to_string(ids[k])}, {"passed", false}, {"error", e.what()}});
        }
      }
      write_json(verify_out, out,
                 {{"threshold", threshold}, {"transform", to_string(base.spec.kind)}, {"reports", reports},
                  {"failed", failed}});
      return failed.empty() ? 0 : 1;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << active->help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"heunpulse"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace heunpulse::cli
