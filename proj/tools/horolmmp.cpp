// Command-line front end: validate inputs, run the log MMP, render polytope
// families, and query individual invariants.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "horolmmp/io.hpp"
#include "horolmmp/svg.hpp"

namespace {

using namespace horo;

int fail_domain(const std::string& message) {
  Json err{{"error", Json{{"message", message}}}};
  std::cout << err.dump(2) << "\n";
  return 1;
}

std::string sanitize(const Rat& r) {
  std::string s = rat_str(r);
  for (char& c : s) {
    if (c == '/') c = '_';
    if (c == '-') c = 'm';
  }
  return s;
}

RunVerifications verify_all(const MMPReport& rep, const HorosphericalPair& pair) {
  RunVerifications v;
  v.signs = verify_signs(rep);
  v.pair_chain = verify_pair_chain(rep);
  v.rays = ray_check(rep, pair);
  return v;
}

void write_run_svgs(const MMPReport& rep, const std::string& dir, int samples,
                    const std::string& stem) {
  const Family& f = rep.family;
  Rat top = rep.cls.eps_max ? *rep.cls.eps_max : rep.cls.scan_window;
  if (top == 0) top = 1;
  std::vector<SvgLayer> all;
  for (const auto& iv : rep.cls.intervals) {
    std::vector<Rat> eps_list;
    if (iv.singleton()) {
      eps_list.push_back(iv.lo);
    } else {
      Rat hi = iv.hi ? *iv.hi : rep.cls.scan_window;
      for (int k = 0; k < samples; ++k)
        eps_list.push_back(iv.lo + (hi - iv.lo) * Rat(2 * k + 1, 2 * samples));
    }
    for (const Rat& e : eps_list) {
      SvgLayer l = layer_at(f, e, e / top);
      atomic_write_file(dir + "/" + stem + "_eps_" + sanitize(e) + ".svg",
                        render_svg(f.space, {l}));
      all.push_back(std::move(l));
    }
  }
  if (rep.cls.eps_max) {
    SvgLayer l = layer_at(f, *rep.cls.eps_max, Rat(1));
    atomic_write_file(dir + "/" + stem + "_eps_" + sanitize(*rep.cls.eps_max) + ".svg",
                      render_svg(f.space, {l}));
    all.push_back(std::move(l));
  }
  atomic_write_file(dir + "/" + stem + "_family.svg", render_svg(f.space, all));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact log minimal model program runner for horospherical moment polytopes"};
  app.require_subcommand(1);

  std::string file, report_path, svg_dir, out_dir, eps_list_arg, divisor_spec, other_file,
      max_eps_arg;
  int samples = 3;
  bool lenient = false;

  auto* validate = app.add_subcommand("validate", "parse and validate an input file");
  validate->add_option("file", file)->required();
  validate->add_flag("--lenient", lenient, "warn on unknown fields instead of failing");

  auto* runc = app.add_subcommand("run", "run the log MMP and write a report");
  runc->add_option("file", file)->required();
  runc->add_option("--report", report_path, "write the JSON report here (default: stdout)");
  runc->add_option("--svg", svg_dir, "write per-interval SVG snapshots into this directory");
  runc->add_option("--samples", samples, "snapshots per interval (default 3)");
  runc->add_option("--max-epsilon", max_eps_arg, "bound for the stabilization scan");
  runc->add_flag("--lenient", lenient);

  auto* render = app.add_subcommand("render", "render Q^eps for chosen parameters");
  render->add_option("file", file)->required();
  render->add_option("--epsilons", eps_list_arg, "comma-separated parameter list")->required();
  render->add_option("--out", out_dir, "output directory")->required();
  render->add_flag("--lenient", lenient);

  auto* query = app.add_subcommand("query", "print one invariant as JSON");
  query->add_option("file", file)->required();
  std::string sub;
  query->add_option("subcommand", sub,
                    "curves | singularities | qcartier | qfactorial | morphism | klt-boundary")
      ->required();
  query->add_option("--divisor", divisor_spec, "divisor for qcartier / klt-boundary");
  query->add_option("--other", other_file, "target input file for morphism");
  query->add_flag("--lenient", lenient);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::vector<std::string> warnings;
    InputDocument in = parse_input(file, lenient, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    if (validate->parsed()) {
      auto violations = validate_space(in.space);
      Json out{{"valid", violations.empty()}, {"violations", violations}};
      if (violations.empty()) {
        try {
          build_quadruple(in.space, in.divisor_D);
          out["divisor_D_ample"] = true;
        } catch (const Error& e) {
          out["divisor_D_ample"] = false;
          out["divisor_D_error"] = e.what();
        }
      }
      std::cout << out.dump(2) << "\n";
      return out["valid"].get<bool>() ? 0 : 1;
    }

    auto require_valid = [&] {
      auto violations = validate_space(in.space);
      if (!violations.empty()) {
        std::string msg = "invalid space data:";
        for (const auto& v : violations) msg += " " + v + ";";
        throw DomainError(msg);
      }
    };

    if (runc->parsed()) {
      require_valid();
      MMPOptions opts;
      if (!max_eps_arg.empty()) opts.max_epsilon = parse_rat(max_eps_arg);
      HorosphericalPair pair = make_horospherical_pair(in.space, in.divisor_D, in.delta);
      if (!pair.certified_pair)
        return fail_domain("pair not certified: K+Delta is not Q-Cartier");
      MMPReport rep = run(pair, opts);
      RunVerifications ver = verify_all(rep, pair);
      Json options = Json::object();
      if (opts.max_epsilon) options["max_epsilon"] = rat_str(*opts.max_epsilon);
      options["samples"] = samples;
      std::string text = report_json(in, rep, ver, options).dump(2) + "\n";
      if (report_path.empty()) {
        std::cout << text;
      } else {
        atomic_write_file(report_path, text);
      }
      if (!svg_dir.empty()) {
        std::filesystem::create_directories(svg_dir);
        write_run_svgs(rep, svg_dir, samples,
                       std::filesystem::path(file).stem().string());
      }
      return 0;
    }

    if (render->parsed()) {
      require_valid();
      Family f = build_family(in.space, in.divisor_D, k_plus_delta(in.space, in.delta));
      std::vector<Rat> eps;
      std::string cur;
      for (char c : eps_list_arg + ",") {
        if (c == ',') {
          if (!cur.empty()) eps.push_back(parse_rat(cur));
          cur.clear();
        } else {
          cur += c;
        }
      }
      if (eps.empty()) return fail_domain("no epsilons given");
      // grayscale runs from black at eps = 0 to light gray at eps_max
      auto cls = breakpoints(f);
      Rat top;
      if (cls.eps_max) {
        top = *cls.eps_max;
      } else {
        top = eps[0];
        for (const Rat& e : eps)
          if (e > top) top = e;
      }
      if (top == 0) top = 1;
      std::filesystem::create_directories(out_dir);
      std::string stem = std::filesystem::path(file).stem().string();
      std::vector<SvgLayer> all;
      for (const Rat& e : eps) {
        SvgLayer l = layer_at(f, e, e / top);
        atomic_write_file(out_dir + "/" + stem + "_eps_" + sanitize(e) + ".svg",
                          render_svg(in.space, {l}));
        all.push_back(std::move(l));
      }
      atomic_write_file(out_dir + "/" + stem + "_family.svg", render_svg(in.space, all));
      return 0;
    }

    // query
    require_valid();
    Json out;
    if (sub == "curves") {
      MomentQuadruple q = build_quadruple(in.space, in.divisor_D);
      Json arr = Json::array();
      for (auto& [c, val] : curves(q)) {
        Json e{{"kind", c.kind == CurveClass::Kind::edge ? "edge" : "color_vertex"},
               {"value", rat_str(val)}};
        if (c.kind == CurveClass::Kind::edge) {
          e["from"] = rvec_json(c.v1.point);
          e["to"] = rvec_json(c.v2.point);
        } else {
          e["color"] = in.space.colors[c.color].name;
          e["vertex"] = rvec_json(c.v1.point);
        }
        arr.push_back(std::move(e));
      }
      out = Json{{"curves", arr}};
    } else if (sub == "singularities") {
      out = Json{{"singularities", to_string(classify_singularities(in.delta))},
                 {"pair_certified", is_q_cartier(in.space, in.divisor_D,
                                                 k_plus_delta(in.space, in.delta))}};
    } else if (sub == "qcartier") {
      if (divisor_spec.empty()) throw ParseError("qcartier needs --divisor");
      BStableDivisor dp = parse_divisor_spec(in, divisor_spec);
      out = Json{{"divisor", divisor_spec},
                 {"q_cartier", is_q_cartier(in.space, in.divisor_D, dp)}};
    } else if (sub == "qfactorial") {
      out = Json{{"q_factorial", is_q_factorial(in.space, in.divisor_D)}};
    } else if (sub == "morphism") {
      if (other_file.empty()) throw ParseError("morphism needs --other FILE");
      InputDocument other = parse_input(other_file, lenient);
      MomentQuadruple q = build_quadruple(in.space, in.divisor_D);
      MomentQuadruple qp = build_quadruple(other.space, other.divisor_D);
      auto orbit = morphism_exists(q, qp);
      out = Json{{"morphism_exists", orbit.has_value()}};
      if (orbit) {
        Json faces = Json::array();
        for (const auto& entry : *orbit) {
          Json src = Json::array(), img = Json::array();
          for (const auto& v : entry.source_face) src.push_back(rvec_json(v));
          for (const auto& v : entry.image_face) img.push_back(rvec_json(v));
          faces.push_back(Json{{"face", src}, {"image", img}});
        }
        out["orbit_map"] = faces;
      }
    } else if (sub == "klt-boundary") {
      if (divisor_spec.empty()) throw ParseError("klt-boundary needs --divisor");
      BStableDivisor dp = parse_divisor_spec(in, divisor_spec);
      auto [m, delta] = klt_boundary(in.space, dp);
      out = Json{{"m", m.str()},
                 {"delta", divisor_json(in.space, delta)},
                 {"singularities", to_string(classify_singularities(delta))}};
    } else {
      std::cerr << "unknown query subcommand '" << sub << "'\n";
      return 2;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  } catch (const ParseError& e) {
    return fail_domain(std::string("parse error: ") + e.what());
  } catch (const Error& e) {
    return fail_domain(e.what());
  }
}
