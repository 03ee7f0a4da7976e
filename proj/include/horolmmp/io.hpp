#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "horolmmp/mmp.hpp"

namespace horo {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "horolmmp";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "horolmmp/1";

struct InputDocument {
  SpaceData space;
  BStableDivisor divisor_D;
  BStableDivisor delta;
};

namespace iodetail {

inline void check_keys(const Json& obj, const std::string& path,
                       const std::vector<std::string>& allowed,
                       const std::vector<std::string>& required, bool lenient,
                       std::vector<std::string>* warnings) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const auto& k : allowed)
      if (it.key() == k) known = true;
    if (!known) {
      std::string msg = path + ": unknown field '" + it.key() + "'";
      if (lenient) {
        if (warnings) warnings->push_back(msg);
      } else {
        throw ParseError(msg);
      }
    }
  }
  for (const auto& k : required)
    if (!obj.contains(k)) throw ParseError(path + ": missing field '" + k + "'");
}

inline const Json& field(const Json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw ParseError(path + ": missing field '" + key + "'");
  return obj.at(key);
}

inline Int parse_int(const Json& v, const std::string& path) {
  if (v.is_number_integer()) return Int(v.get<long long>());
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    std::string_view sv = s;
    bool neg = !sv.empty() && sv[0] == '-';
    if (neg) sv.remove_prefix(1);
    if (!is_digits(sv)) throw ParseError(path + ": expected an integer");
    Int out{std::string(sv)};
    return neg ? Int(-out) : out;
  }
  throw ParseError(path + ": expected an integer");
}

inline Rat parse_rat_field(const Json& v, const std::string& path) {
  if (!v.is_string())
    throw ParseError(path + ": rationals must be strings of the form \"p/q\"");
  try {
    return parse_rat(v.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline IntVec parse_int_vec(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path + ": expected an array of integers");
  IntVec out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(parse_int(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline RatVec parse_rat_vec(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path + ": expected an array of rationals");
  RatVec out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(parse_rat_field(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline BStableDivisor parse_divisor(const Json& v, const std::string& path, const SpaceData& s,
                                    bool lenient, std::vector<std::string>* warnings) {
  if (!v.is_object()) throw ParseError(path + ": expected an object");
  check_keys(v, path, {"gstable", "colors"}, {"gstable", "colors"}, lenient, warnings);
  BStableDivisor d;
  d.gstable_coeffs = parse_rat_vec(field(v, path, "gstable"), path + ".gstable");
  d.color_coeffs = parse_rat_vec(field(v, path, "colors"), path + ".colors");
  if (d.gstable_coeffs.size() != s.r())
    throw ParseError(path + ".gstable: expected " + std::to_string(s.r()) + " entries");
  if (d.color_coeffs.size() != s.s())
    throw ParseError(path + ".colors: expected " + std::to_string(s.s()) + " entries");
  return d;
}

}  // namespace iodetail

inline InputDocument parse_input_json(const Json& doc, bool lenient = false,
                                      std::vector<std::string>* warnings = nullptr) {
  using namespace iodetail;
  if (!doc.is_object()) throw ParseError("top level: expected an object");
  check_keys(doc, "top level", {"space", "gstable", "divisor_D", "delta"},
             {"space", "gstable", "divisor_D"}, lenient, warnings);

  InputDocument out;
  const Json& sp = field(doc, "top level", "space");
  if (!sp.is_object()) throw ParseError("space: expected an object");
  check_keys(sp, "space", {"weight_dim", "basis_labels", "colors", "lattice_M"},
             {"weight_dim", "basis_labels", "colors", "lattice_M"}, lenient, warnings);

  SpaceData& s = out.space;
  Int wd = parse_int(field(sp, "space", "weight_dim"), "space.weight_dim");
  if (wd < 0 || wd > 64) throw ParseError("space.weight_dim: out of range");
  s.weight_dim = static_cast<std::size_t>(wd.convert_to<long long>());

  const Json& labels = field(sp, "space", "basis_labels");
  if (!labels.is_array()) throw ParseError("space.basis_labels: expected an array");
  for (const auto& l : labels) {
    if (!l.is_string()) throw ParseError("space.basis_labels: entries must be strings");
    s.basis_labels.push_back(l.get<std::string>());
  }
  if (s.basis_labels.size() != s.weight_dim)
    throw ParseError("space.basis_labels: expected " + std::to_string(s.weight_dim) +
                     " entries");

  const Json& colors = field(sp, "space", "colors");
  if (!colors.is_array()) throw ParseError("space.colors: expected an array");
  for (std::size_t i = 0; i < colors.size(); ++i) {
    std::string path = "space.colors[" + std::to_string(i) + "]";
    const Json& c = colors[i];
    if (!c.is_object()) throw ParseError(path + ": expected an object");
    check_keys(c, path, {"name", "coroot_pairings", "a"}, {"name", "coroot_pairings", "a"},
               lenient, warnings);
    Color col;
    col.name = field(c, path, "name").get<std::string>();
    col.coroot_pairings = parse_int_vec(field(c, path, "coroot_pairings"),
                                        path + ".coroot_pairings");
    col.a_coeff = parse_int(field(c, path, "a"), path + ".a");
    col.weight_index = s.weight_dim;
    for (std::size_t j = 0; j < s.basis_labels.size(); ++j)
      if (s.basis_labels[j] == col.name) col.weight_index = j;
    if (col.weight_index == s.weight_dim)
      throw ParseError(path + ": color name '" + col.name +
                       "' does not match any basis label");
    s.colors.push_back(std::move(col));
  }

  const Json& lat = field(sp, "space", "lattice_M");
  if (!lat.is_array()) throw ParseError("space.lattice_M: expected an array of rows");
  std::vector<IntVec> rows;
  for (std::size_t i = 0; i < lat.size(); ++i)
    rows.push_back(iodetail::parse_int_vec(lat[i], "space.lattice_M[" + std::to_string(i) + "]"));
  try {
    s.lattice_M = LatticeBasis(s.weight_dim, std::move(rows));
  } catch (const Error& e) {
    throw ParseError(std::string("space.lattice_M: ") + e.what());
  }

  const Json& gst = field(doc, "top level", "gstable");
  if (!gst.is_array()) throw ParseError("gstable: expected an array");
  for (std::size_t i = 0; i < gst.size(); ++i) {
    std::string path = "gstable[" + std::to_string(i) + "]";
    const Json& g = gst[i];
    if (!g.is_object()) throw ParseError(path + ": expected an object");
    check_keys(g, path, {"name", "x"}, {"name", "x"}, lenient, warnings);
    GStableDatum d;
    d.name = field(g, path, "name").get<std::string>();
    d.x = parse_int_vec(field(g, path, "x"), path + ".x");
    s.gstable.push_back(std::move(d));
  }

  out.divisor_D = iodetail::parse_divisor(field(doc, "top level", "divisor_D"), "divisor_D", s,
                                          lenient, warnings);
  if (doc.contains("delta"))
    out.delta = iodetail::parse_divisor(doc.at("delta"), "delta", s, lenient, warnings);
  else
    out.delta = BStableDivisor::zero(s);
  return out;
}

inline InputDocument parse_input_text(const std::string& text, bool lenient = false,
                                      std::vector<std::string>* warnings = nullptr) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return parse_input_json(doc, lenient, warnings);
}

inline InputDocument parse_input(const std::string& path, bool lenient = false,
                                 std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open input file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_input_text(ss.str(), lenient, warnings);
}

// ----- serialization helpers -----

inline Json rat_json(const Rat& r) { return rat_str(r); }

inline Json rvec_json(const RatVec& v) {
  Json a = Json::array();
  for (const Rat& x : v) a.push_back(rat_str(x));
  return a;
}

inline Json ivec_json(const IntVec& v) {
  Json a = Json::array();
  for (const Int& x : v) a.push_back(x.str());
  return a;
}

inline Json divisor_json(const SpaceData& s, const BStableDivisor& d) {
  Json g = Json::object(), c = Json::object();
  for (std::size_t i = 0; i < s.r(); ++i) g[s.gstable[i].name] = rat_str(d.gstable_coeffs[i]);
  for (std::size_t j = 0; j < s.s(); ++j) c[s.colors[j].name] = rat_str(d.color_coeffs[j]);
  return Json{{"gstable", g}, {"colors", c}};
}

inline Json input_echo_json(const InputDocument& in) {
  const SpaceData& s = in.space;
  Json colors = Json::array();
  for (const Color& c : s.colors)
    colors.push_back(Json{{"name", c.name},
                          {"coroot_pairings", ivec_json(c.coroot_pairings)},
                          {"a", c.a_coeff.str()}});
  Json lat = Json::array();
  for (const IntVec& row : s.lattice_M.basis_rows) lat.push_back(ivec_json(row));
  Json gst = Json::array();
  for (const GStableDatum& g : s.gstable)
    gst.push_back(Json{{"name", g.name}, {"x", ivec_json(g.x)}});
  Json dd = Json::object(), dl = Json::object();
  {
    Json ga = Json::array(), ca = Json::array();
    for (const Rat& v : in.divisor_D.gstable_coeffs) ga.push_back(rat_str(v));
    for (const Rat& v : in.divisor_D.color_coeffs) ca.push_back(rat_str(v));
    dd = Json{{"gstable", ga}, {"colors", ca}};
  }
  {
    Json ga = Json::array(), ca = Json::array();
    for (const Rat& v : in.delta.gstable_coeffs) ga.push_back(rat_str(v));
    for (const Rat& v : in.delta.color_coeffs) ca.push_back(rat_str(v));
    dl = Json{{"gstable", ga}, {"colors", ca}};
  }
  return Json{{"space", Json{{"weight_dim", s.weight_dim},
                             {"basis_labels", s.basis_labels},
                             {"colors", colors},
                             {"lattice_M", lat}}},
              {"gstable", gst},
              {"divisor_D", dd},
              {"delta", dl}};
}

inline Json interval_json(const ClassInterval& iv) {
  Json j{{"lo", rat_str(iv.lo)},
         {"lo_closed", iv.lo_closed},
         {"hi", iv.hi ? Json(rat_str(*iv.hi)) : Json("inf")},
         {"hi_closed", iv.hi_closed},
         {"rep", rat_str(iv.rep)}};
  return j;
}

inline Json signature_json(const SpaceData& s, const Signature& sig) {
  Json facets = Json::array();
  for (std::size_t r : sig.facets)
    facets.push_back(r < s.r() ? s.gstable[r].name : s.colors[r - s.r()].name);
  Json walls = Json::array();
  for (std::size_t j : sig.wall_touch) walls.push_back(s.colors[j].name);
  return Json{{"dim", sig.dim}, {"facet_rows", facets}, {"wall_touch", walls}};
}

inline Json polytope_json(const HPolytope& p) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < p.m(); ++i) rows.push_back(rvec_json(p.rows.row(i)));
  Json verts = Json::array();
  for (const auto& v : vertices(p)) verts.push_back(rvec_json(v.point));
  return Json{{"rows", rows}, {"rhs", rvec_json(p.rhs)}, {"vertices", verts}};
}

inline Json fiber_json(const SpaceData& s, const FiberData& fd) {
  Json added = Json::array();
  for (std::size_t j : fd.added_wall_colors) added.push_back(s.colors[j].name);
  Json m1 = Json::array();
  for (const IntVec& row : fd.M1_weight.basis_rows) m1.push_back(ivec_json(row));
  Json qverts = Json::array();
  for (const RatVec& v : fd.q_eps_max_vertices) qverts.push_back(rvec_json(v));
  Json zverts = Json::array();
  for (const auto& v : fd.z_quad.verts) zverts.push_back(rvec_json(v.point));
  Json zg = Json::array();
  for (const auto& g : fd.z_quad.space.gstable)
    zg.push_back(Json{{"name", g.name}, {"x", ivec_json(g.x)}});
  Json zcolors = Json::array();
  for (const auto& c : fd.z_quad.space.colors) zcolors.push_back(c.name);
  return Json{{"added_wall_colors", added},
              {"M1_rank", fd.M1_mcoords.rank()},
              {"M1_weight_rows", m1},
              {"q_eps_max_vertices", qverts},
              {"z", Json{{"colors", zcolors},
                         {"gstable", zg},
                         {"q_tilde_vertices", zverts},
                         {"translation_v", rvec_json(fd.z_quad.translation_v)},
                         {"class_rank", class_rank(fd.z_quad)}}},
              {"quotient_coords", fd.quotient_coords},
              {"fiber_polytope", polytope_json(fd.fiber_polytope)},
              {"fiber_rank", fd.fiber_rank},
              {"fiber_is_point", fd.fiber_is_point},
              {"fiber_class_rank", fd.fiber_class_rank}};
}

inline Json verification_json(const VerificationReport& v) {
  Json lines = Json::array();
  for (const auto& l : v.lines)
    lines.push_back(Json{{"check", l.what}, {"pass", l.pass}, {"where", l.detail}});
  return Json{{"pass", v.pass}, {"checks", lines}};
}

inline Json ray_check_json(const RayCheckReport& v) {
  Json j{{"applicable", v.applicable}};
  if (!v.applicable) {
    j["reason"] = v.reason;
    if (!v.violating_rows.empty()) j["violating_rows"] = v.violating_rows;
    return j;
  }
  j["pass"] = v.pass;
  Json lines = Json::array();
  for (const auto& l : v.lines)
    lines.push_back(Json{{"check", l.what}, {"pass", l.pass}, {"where", l.detail}});
  j["checks"] = lines;
  return j;
}

struct RunVerifications {
  VerificationReport signs;
  VerificationReport pair_chain;
  RayCheckReport rays;
};

inline Json report_json(const InputDocument& in, const MMPReport& rep,
                        const RunVerifications& ver, const Json& options) {
  const SpaceData& s = rep.space;
  Json steps = Json::array();
  for (const auto& st : rep.steps) {
    Json surv = Json::array();
    for (std::size_t k : st.surviving_gstable) surv.push_back(s.gstable[k].name);
    Json qverts = Json::array();
    for (std::size_t i = 0; i < st.quad.verts.size(); ++i)
      qverts.push_back(rvec_json(st.quad.q_vertex(i)));
    steps.push_back(Json{{"label", st.label},
                         {"kind", st.is_y ? "Y" : "X"},
                         {"interval", interval_json(st.interval)},
                         {"surviving_gstable", surv},
                         {"divisor_at_rep", divisor_json(st.step_space, st.step_D)},
                         {"delta_pushforward", divisor_json(st.step_space, st.delta_push)},
                         {"q_vertices", qverts},
                         {"signature", signature_json(s, st.interval.sig)}});
  }

  Json events = Json::array();
  for (const auto& ev : rep.events) {
    Json e{{"kind", to_string(ev.kind)}};
    if (ev.eps) e["epsilon"] = rat_str(*ev.eps);
    if (ev.kind == BreakpointEvent::Kind::divisorial) {
      Json c = Json::array();
      for (std::size_t k : ev.contracted_gstable) c.push_back(s.gstable[k].name);
      e["contracted"] = c;
    } else if (ev.kind == BreakpointEvent::Kind::flip) {
      auto walls = [&](const std::vector<std::size_t>& w) {
        Json a = Json::array();
        for (std::size_t j : w) a.push_back(s.colors[j].name);
        return a;
      };
      e["wall_touch_before"] = walls(ev.wall_before);
      e["wall_touch_at"] = walls(ev.wall_at);
      e["wall_touch_after"] = walls(ev.wall_after);
    } else if (ev.kind == BreakpointEvent::Kind::fiber_type) {
      e["fiber"] = fiber_json(s, *ev.fiber);
    } else if (ev.stable_sig) {
      e["stable_signature"] = signature_json(s, *ev.stable_sig);
      e["note"] = "family combinatorially stabilizes; the run does not terminate";
    }
    events.push_back(std::move(e));
  }

  Json amat = Json::array();
  for (std::size_t i = 0; i < rep.family.A.rows; ++i)
    amat.push_back(rvec_json(rep.family.A.row(i)));
  Json bps = Json::array();
  for (const Rat& b : rep.cls.breakpoints) bps.push_back(rat_str(b));
  Json cands = Json::array();
  for (const Rat& b : rep.cls.candidates) cands.push_back(rat_str(b));

  return Json{
      {"schema", kReportSchema},
      {"input", input_echo_json(in)},
      {"pair",
       Json{{"certified", true},
            {"k_plus_delta", divisor_json(s, rep.kd)},
            {"singularities", to_string(rep.input_class)}}},
      {"family", Json{{"A", amat},
                      {"B_tilde", rvec_json(rep.family.B_tilde)},
                      {"C_tilde", rvec_json(rep.family.C_tilde)},
                      {"v0", rvec_json(rep.family.v0)},
                      {"w", rvec_json(rep.family.w)}}},
      {"eps_max", rep.cls.eps_max ? Json(rat_str(*rep.cls.eps_max)) : Json("inf")},
      {"scan_window", rat_str(rep.cls.scan_window)},
      {"candidates", cands},
      {"breakpoints", bps},
      {"steps", steps},
      {"events", events},
      {"verifications", Json{{"signs", verification_json(ver.signs)},
                             {"pair_chain", verification_json(ver.pair_chain)},
                             {"ray_check", ray_check_json(ver.rays)}}},
      {"provenance",
       Json{{"tool", kToolName}, {"version", kToolVersion}, {"options", options}}}};
}

inline void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write to '" + tmp.string() + "'");
    out << content;
  }
  fs::rename(tmp, target);
}

// Divisor argument of `query`: a named divisor, @file, or inline JSON.
inline BStableDivisor parse_divisor_spec(const InputDocument& in, const std::string& spec) {
  const SpaceData& s = in.space;
  if (spec == "D") return in.divisor_D;
  if (spec == "Delta") return in.delta;
  if (spec == "K") return canonical(s);
  if (spec == "-K") return anticanonical(s);
  if (spec == "K+Delta") return k_plus_delta(s, in.delta);
  Json doc;
  std::string text;
  if (!spec.empty() && spec[0] == '@') {
    std::ifstream f(spec.substr(1), std::ios::binary);
    if (!f) throw ParseError("cannot open divisor file '" + spec.substr(1) + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  } else if (!spec.empty() && spec[0] == '{') {
    text = spec;
  } else {
    throw ParseError("unknown divisor spec '" + spec +
                     "' (expected D, Delta, K, -K, K+Delta, @file or inline JSON)");
  }
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("divisor: parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return iodetail::parse_divisor(doc, "divisor", s, false, nullptr);
}

}  // namespace horo
