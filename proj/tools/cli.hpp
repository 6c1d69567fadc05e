#pragma once

// Command-line front end. Kept header-only so the test suite can drive
// run() in-process as well as through the built binary.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <k3pt/k3pt.hpp>

namespace k3pt::cli {

enum ExitCode : int { ok = 0, invalid = 1, mismatch = 2 };

struct WindowFlags {
  std::optional<std::int64_t> d, q_min, q_max;

  void attach(CLI::App *app) {
    app->add_option("--window-d", d, "Maximum curve-class degree");
    app->add_option("--qmin", q_min, "Lowest q-exponent (hard support bound)");
    app->add_option("--qmax", q_max, "Highest q-exponent");
  }

  [[nodiscard]] Window resolve(std::int64_t d_default, std::int64_t qmin_default,
                               std::int64_t qmax_default) const {
    return Window(d.value_or(d_default), q_min.value_or(qmin_default), q_max.value_or(qmax_default));
  }

  [[nodiscard]] Window require(const std::string &cmd) const {
    if (!d || !q_min || !q_max) throw DomainError(cmd + " needs --window-d, --qmin and --qmax");
    return Window(*d, *q_min, *q_max);
  }
};

inline MonoidPtr parse_generators(const std::string &list) {
  std::vector<std::string> names;
  std::vector<std::int64_t> weights;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    names.push_back(item.substr(0, colon));
    try {
      weights.push_back(colon == std::string::npos ? 1 : std::stoll(item.substr(colon + 1)));
    } catch (const std::exception &) {
      throw MonoidError("bad generator weight in '" + item + "'");
    }
  }
  return std::make_shared<const ClassMonoid>(std::move(names), std::move(weights));
}

inline std::vector<std::string> split_commas(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

struct LoadedFile {
  std::string text;
  json doc;
  std::string hash;
};

/// Input paths read during one invocation; an output may not overwrite any.
struct Session {
  std::vector<std::filesystem::path> inputs;
};

inline LoadedFile load(Session &session, const std::string &path) {
  session.inputs.push_back(std::filesystem::weakly_canonical(path));
  LoadedFile f;
  f.text = io::read_file(path);
  f.doc = io::parse_text(f.text, path);
  f.hash = sha256_hex(f.text);
  return f;
}

inline json manifest_json(const Manifest &m) {
  return json{{"command", m.command}, {"inputs", m.inputs}, {"parameters", m.parameters}};
}

/// Writes `doc` with an embedded manifest to `path`, or to `out` when the path
/// is empty or "-".
inline void emit(const Session &session, json doc, const Manifest &m, const std::string &path,
                 std::ostream &out) {
  if (!path.empty() && path != "-")
    for (const auto &in : session.inputs)
      if (std::filesystem::weakly_canonical(path) == in)
        throw DomainError("output path " + path + " is also an input");
  doc["manifest"] = manifest_json(m);
  const auto text = io::dump(doc);
  if (path.empty() || path == "-")
    out << text;
  else
    io::write_file(path, text);
}

inline PushforwardMap map_from_json(const json &j, std::vector<CurveClass> *exceptional) {
  if (io::get<std::string>(io::at(j, "format", "$"), "format") != "k3pt.map/1")
    throw ParseError("unsupported map format " + io::at(j, "format", "$").dump());
  PushforwardMap map;
  map.source = monoid_from_json(io::at(j, "source", "$"), "source");
  map.target = monoid_from_json(io::at(j, "target", "$"), "target");
  map.matrix = io::get<std::vector<std::vector<std::int64_t>>>(io::at(j, "matrix", "$"), "matrix");
  map.validate();
  if (exceptional) {
    exceptional->clear();
    if (auto it = j.find("exceptional"); it != j.end()) {
      for (std::size_t i = 0; i < it->size(); ++i)
        exceptional->push_back(io::curve_class((*it)[i], map.source->rank(),
                                               "exceptional[" + std::to_string(i) + "]"));
    } else {
      for (auto g : map.contracted()) {
        CurveClass unit(map.source->rank(), 0);
        unit[g] = 1;
        exceptional->push_back(std::move(unit));
      }
    }
  }
  return map;
}

inline std::string cache_dir_from(const std::string &flag) {
  if (!flag.empty()) return flag;
  if (const char *env = std::getenv("K3PT_CACHE_DIR"); env && *env) return env;
  return {};
}

inline KYTable obtain_ky(std::int64_t h_max, std::int64_t n_max, const std::string &cache_flag,
                         unsigned threads) {
  const auto dir = cache_dir_from(cache_flag);
  if (dir.empty()) return ky_expand(h_max, n_max, threads);
  return KYCache(dir).get(h_max, n_max, threads).first;
}

/// Entry point. Returns 0 on success, 1 on invalid input, 2 when an identity
/// check finds mismatching coefficients.
inline int run(int argc, const char *const *argv, std::ostream &out = std::cout,
               std::ostream &err = std::cerr) {
  CLI::App app{"Exact generating-series engine for stable pair invariants of K3 fibrations"};
  app.require_subcommand(1);
  unsigned threads = 1;
  std::string cache_flag;
  app.add_option("--threads", threads, "Worker threads for product and assembly kernels")
      ->check(CLI::Range(1u, 256u));
  app.add_option("--cache-dir", cache_flag, "KY table cache directory (else $K3PT_CACHE_DIR)");

  int status = ok;
  Session session;
  std::function<void()> action;

  // ky
  auto *ky = app.add_subcommand("ky", "Expand the Kawai-Yoshioka table");
  std::int64_t hmax = 0, nmax = 1;
  std::string out_path;
  ky->add_option("--hmax", hmax)->required();
  ky->add_option("--nmax", nmax)->required();
  ky->add_option("--out", out_path);
  ky->callback([&] {
    action = [&] {
      auto t = obtain_ky(hmax, nmax, cache_flag, threads);
      Manifest m{"ky", {}, {{"hmax", std::to_string(hmax)}, {"nmax", std::to_string(nmax)}}};
      emit(session, to_json(t), m, out_path, out);
    };
  });

  // pth
  auto *pth = app.add_subcommand("pth", "Exceptional-curve series PT^h");
  std::string classes_flag, generators_flag;
  WindowFlags pth_window;
  pth->add_option("--classes", classes_flag, "Exceptional classes, e.g. e1,e2")->required();
  pth->add_option("--generators", generators_flag, "name:weight[,...]")->required();
  pth->add_option("--out", out_path);
  pth_window.attach(pth);
  pth->callback([&] {
    action = [&] {
      auto monoid = parse_generators(generators_flag);
      std::vector<CurveClass> cls;
      for (const auto &c : split_commas(classes_flag)) cls.push_back(parse_class(*monoid, c));
      const auto w = pth_window.require("pth");
      Manifest m{"pth", {}, {{"classes", classes_flag}, {"generators", generators_flag}}};
      emit(session, to_json(pt_h_series(monoid, cls, w, threads)), m, out_path, out);
    };
  });

  // assemble
  auto *as = app.add_subcommand("assemble", "PT series of a K3 fibration from fiber and NL tables");
  std::string ky_path, nl_path, fiber_path, mode_flag = "ky", special_case;
  std::optional<std::int64_t> as_hmax, as_nmax;
  bool with_unit = false;
  WindowFlags as_window;
  as->add_option("--ky", ky_path, "KY table JSON");
  as->add_option("--hmax", as_hmax, "Expand the KY table instead of reading --ky");
  as->add_option("--nmax", as_nmax);
  as->add_option("--nl", nl_path)->required();
  as->add_option("--mode", mode_flag)->check(CLI::IsMember({"ky", "perverse", "generic"}));
  as->add_option("--fiber", fiber_path, "Fiber integral table (generic mode)");
  as->add_option("--special-case", special_case,
                 "Which hypothesis justifies generic mode (recorded in provenance)");
  as->add_flag("--unit", with_unit, "Add the constant term 1");
  as->add_option("--out", out_path);
  as_window.attach(as);
  as->callback([&] {
    action = [&] {
      auto nl_file = load(session, nl_path);
      auto nl = nl_from_json(nl_file.doc);
      std::int64_t dmax = 0;
      for (const auto &[id, c] : nl.classes) dmax = std::max(dmax, nl.monoid->degree(c));
      Manifest m{"assemble", {{"nl", nl_file.hash}}, {{"mode", mode_flag}}};
      std::optional<AssembledPT> pt;
      if (mode_flag == "generic") {
        if (fiber_path.empty()) throw DomainError("generic mode needs --fiber");
        auto f = load(session, fiber_path);
        m.inputs["fiber"] = f.hash;
        auto table = fiber_from_json(f.doc);
        auto cov = table.coverage();
        const auto w = as_window.resolve(dmax, cov ? cov->n_min : 0, cov ? cov->n_max : 0);
        if (special_case.empty()) special_case = "asserted by caller";
        m.parameters["special_case"] = special_case;
        pt = assemble_generic(table, nl, w, special_case, threads);
      } else {
        std::optional<KYTable> table;
        if (!ky_path.empty()) {
          auto f = load(session, ky_path);
          m.inputs["ky"] = f.hash;
          table = ky_from_json(f.doc);
        } else if (as_hmax && as_nmax) {
          table = obtain_ky(*as_hmax, *as_nmax, cache_flag, threads);
          m.parameters["hmax"] = std::to_string(*as_hmax);
          m.parameters["nmax"] = std::to_string(*as_nmax);
        } else {
          throw DomainError("assemble needs --ky or --hmax/--nmax");
        }
        const auto w = as_window.resolve(dmax, 1 - nl.h_max, table->n_max());
        pt = mode_flag == "perverse" ? assemble_perverse(*table, nl, w, threads)
                                     : assemble(*table, nl, w, threads);
      }
      Series s = pt->series;
      if (with_unit) s = add(s, Series::one(s.monoid(), s.window()));
      auto doc = to_json(s);
      doc["provenance"] = pt->provenance;
      emit(session, doc, m, out_path, out);
    };
  });

  // conifold-check
  auto *cc = app.add_subcommand("conifold-check", "Check the conifold-transition identity");
  std::string resolved_path, base_path, map_path, report_path;
  cc->add_option("--resolved", resolved_path)->required();
  cc->add_option("--base", base_path)->required();
  cc->add_option("--map", map_path)->required();
  cc->add_option("--report", report_path);
  cc->callback([&] {
    action = [&] {
      auto r = load(session, resolved_path), b = load(session, base_path), mp = load(session, map_path);
      std::vector<CurveClass> exceptional;
      auto map = map_from_json(mp.doc, &exceptional);
      auto report = conifold_check(series_from_json(r.doc), exceptional, map, series_from_json(b.doc), threads);
      Manifest m{"conifold-check", {{"resolved", r.hash}, {"base", b.hash}, {"map", mp.hash}}, {}};
      emit(session, to_json(report), m, report_path, out);
      if (!report.holds()) {
        err << "conifold identity fails at " << report.mismatches.size() << " certified coefficient(s)\n";
        status = mismatch;
      }
    };
  });

  // wc-forward
  auto *wf = app.add_subcommand("wc-forward", "PT series from generalized DT invariants");
  std::string j_path, sign_flag = "behrend";
  WindowFlags wf_window;
  wf->add_option("--j", j_path)->required();
  wf->add_option("--mode", sign_flag)->check(CLI::IsMember({"behrend", "euler"}));
  wf->add_option("--out", out_path);
  wf_window.attach(wf);
  wf->callback([&] {
    action = [&] {
      auto f = load(session, j_path);
      auto j = j_from_json(f.doc);
      std::int64_t dmax = 1, nabs = 0, rmax = 0;
      for (const auto &[key, v] : j.entries) {
        dmax = std::max(dmax, j.monoid->degree(std::get<1>(key)));
        rmax = std::max(rmax, std::get<0>(key));
        nabs = std::max(nabs, std::abs(std::get<2>(key) - std::get<0>(key)));
      }
      const auto w = wf_window.resolve(dmax, -nabs, nabs);
      const auto mode = parse_sign_mode(sign_flag);
      auto doc = to_json(pt_from_j(j, mode, w, threads));
      // The r-support of J is not bounded a priori; the table's own bound is recorded.
      doc["provenance"] = json{{"mode", sign_flag}, {"status", wallcross_status(mode)}, {"r_max", rmax}};
      emit(session, doc, Manifest{"wc-forward", {{"j", f.hash}}, {{"mode", sign_flag}}}, out_path, out);
    };
  });

  // wc-invert
  auto *wi = app.add_subcommand("wc-invert", "Recover J(0, beta, n) from a PT series");
  std::string pt_path, class_flag;
  std::optional<std::int64_t> r_max;
  wi->add_option("--pt", pt_path)->required();
  wi->add_option("--class", class_flag)->required();
  wi->add_option("--mode", sign_flag)->check(CLI::IsMember({"behrend", "euler"}));
  wi->add_option("--r-max", r_max, "Also solve for r <= R (non-canonical when R >= 2)");
  wi->add_option("--out", out_path);
  wi->callback([&] {
    action = [&] {
      auto f = load(session, pt_path);
      auto pt = series_from_json(f.doc);
      const auto beta = parse_class(*pt.monoid(), class_flag);
      const auto mode = parse_sign_mode(sign_flag);
      const auto &w = pt.window();
      const auto reach = std::min(w.q_max, -w.q_min);
      Manifest m{"wc-invert", {{"pt", f.hash}}, {{"class", class_flag}, {"mode", sign_flag}}};
      json doc;
      if (r_max) {
        auto inv = invert_irreducible(pt, beta, *r_max, std::max<std::int64_t>(reach, 0), mode);
        doc = to_json(inv.particular);
        doc["system"] = json{{"unknowns", inv.unknowns}, {"rank", inv.rank},
                             {"unique", inv.unique}, {"consistent", inv.consistent}};
        m.parameters["r_max"] = std::to_string(*r_max);
      } else {
        JTable j{pt.monoid(), {}};
        for (std::int64_t n = 1; n <= reach; ++n)
          if (auto v = extract_j0(pt, beta, n, mode); v != 0) j.add(0, beta, n, v);
        doc = to_json(j);
      }
      emit(session, doc, m, out_path, out);
    };
  });

  // series <op>
  auto *se = app.add_subcommand("series", "Series arithmetic on JSON files");
  se->require_subcommand(1);
  std::vector<std::string> operands;
  std::int64_t power = 1, coeff_n = 0;
  bool strict = false;
  WindowFlags se_window;
  auto unary = [&](const std::string &name, std::function<Series(const Series &)> f) {
    auto *c = se->add_subcommand(name);
    c->add_option("input", operands)->required()->expected(1);
    c->add_option("--out", out_path);
    c->callback([&, name, f] {
      action = [&, name, f] {
        auto a = load(session, operands.at(0));
        emit(session, to_json(f(series_from_json(a.doc))), Manifest{"series " + name, {{"a", a.hash}}, {}}, out_path, out);
      };
    });
    return c;
  };
  auto binary = [&](const std::string &name, std::function<Series(const Series &, const Series &)> f) {
    auto *c = se->add_subcommand(name);
    c->add_option("inputs", operands)->required()->expected(2);
    c->add_option("--out", out_path);
    c->callback([&, name, f] {
      action = [&, name, f] {
        auto a = load(session, operands.at(0)), b = load(session, operands.at(1));
        emit(session, to_json(f(series_from_json(a.doc), series_from_json(b.doc))),
             Manifest{"series " + name, {{"a", a.hash}, {"b", b.hash}}, {}}, out_path, out);
      };
    });
  };
  binary("add", [](const Series &a, const Series &b) { return add(a, b); });
  binary("mul", [](const Series &a, const Series &b) { return mul(a, b); });
  unary("inv", [](const Series &a) { return inverse(a); });
  unary("exp", [](const Series &a) { return exp(a); });
  unary("log", [](const Series &a) { return log(a); });
  unary("pow", [&](const Series &a) { return pow_int(a, power); })
      ->add_option("--power", power)->required();

  auto *pf = se->add_subcommand("pushforward");
  pf->add_option("input", operands)->required()->expected(1);
  pf->add_option("--map", map_path)->required();
  pf->add_flag("--strict", strict, "Fail if any target coefficient is uncertified");
  pf->add_option("--out", out_path);
  se_window.attach(pf);
  pf->callback([&] {
    action = [&] {
      auto a = load(session, operands.at(0)), mp = load(session, map_path);
      auto s = series_from_json(a.doc);
      auto map = map_from_json(mp.doc, nullptr);
      const auto w = se_window.resolve(s.window().degree_max, s.window().q_min, s.window().q_max);
      Manifest m{"series pushforward", {{"a", a.hash}, {"map", mp.hash}}, {}};
      if (strict) {
        emit(session, to_json(pushforward_complete(s, map, w)), m, out_path, out);
        return;
      }
      auto r = pushforward(s, map, w);
      auto doc = to_json(r.series);
      json unc = json::array();
      for (const auto &k : r.uncertified) unc.push_back(json::array({k.cls, k.q}));
      doc["uncertified"] = unc;
      emit(session, doc, m, out_path, out);
    };
  });

  auto *co = se->add_subcommand("coeff");
  co->add_option("input", operands)->required()->expected(1);
  co->add_option("--class", class_flag)->required();
  co->add_option("--n", coeff_n)->required();
  co->add_option("--out", out_path);
  co->callback([&] {
    action = [&] {
      auto a = load(session, operands.at(0));
      auto s = series_from_json(a.doc);
      const auto beta = parse_class(*s.monoid(), class_flag);
      json doc{{"class", beta}, {"n", coeff_n}, {"value", to_string(s.coefficient(beta, coeff_n))}};
      emit(session, doc, Manifest{"series coeff", {{"a", a.hash}}, {}}, out_path, out);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : invalid;
  }

  try {
    if (action) action();
  } catch (const Error &e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return invalid;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return invalid;
  }
  return status;
}

} // namespace k3pt::cli
