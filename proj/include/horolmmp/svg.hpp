#pragma once

#include <string>
#include <vector>

#include "horolmmp/family.hpp"

namespace horo {

// 2D renderings of the moment polytopes Q^eps: wall lines, dominant-cone
// boundary rays, polytope outlines with vertices. The weight basis maps to
// plain orthogonal axes. All coordinates are computed exactly and printed
// with two decimals, so output bytes are deterministic.

namespace svgdetail {

inline std::string px(const Rat& r) {
  Int scaled = rat_floor(r * 100 + Rat(1, 2));  // round half up
  Int whole = scaled / 100, frac = scaled % 100;
  bool neg = scaled < 0;
  if (neg) {
    whole = -scaled / 100;
    frac = (-scaled) % 100;
  }
  std::string f = frac.str();
  if (f.size() < 2) f = "0" + f;
  return (neg ? "-" : "") + whole.str() + "." + f;
}

struct Frame {
  Rat minx, maxx, miny, maxy;  // weight coordinates
  Rat scale;                   // px per unit
  Rat pad = 40;

  Rat X(const Rat& x) const { return pad + (x - minx) * scale; }
  Rat Y(const Rat& y) const { return pad + (maxy - y) * scale; }
  Rat width() const { return (maxx - minx) * scale + pad * 2; }
  Rat height() const { return (maxy - miny) * scale + pad * 2; }
};

inline std::string gray(const Rat& t01) {
  Rat t = t01 < 0 ? Rat(0) : (t01 > 1 ? Rat(1) : t01);
  Int g = rat_floor(t * 200);
  std::string s = g.str();
  return "rgb(" + s + "," + s + "," + s + ")";
}

}  // namespace svgdetail

struct SvgLayer {
  Rat eps;
  std::vector<RatVec> q_vertices;  // weight coordinates, 2D
  Rat gray_t;                      // 0 = black
};

// One SVG document with the given polytope layers over the chamber sketch.
inline std::string render_svg(const SpaceData& space, const std::vector<SvgLayer>& layers) {
  if (space.weight_dim != 2)
    throw DomainError("render supports 2D weight spaces only");
  using svgdetail::px;
  svgdetail::Frame fr;
  fr.minx = fr.miny = 0;
  fr.maxx = fr.maxy = 1;
  for (const auto& l : layers)
    for (const auto& v : l.q_vertices) {
      if (v[0] < fr.minx) fr.minx = v[0];
      if (v[0] > fr.maxx) fr.maxx = v[0];
      if (v[1] < fr.miny) fr.miny = v[1];
      if (v[1] > fr.maxy) fr.maxy = v[1];
    }
  fr.minx -= 1;
  fr.miny -= 1;
  fr.maxx += 1;
  fr.maxy += 1;
  Rat w = fr.maxx - fr.minx, h = fr.maxy - fr.miny;
  Rat span = w > h ? w : h;
  fr.scale = Rat(480) / span;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(fr.width()) +
         "\" height=\"" + px(fr.height()) + "\" viewBox=\"0 0 " + px(fr.width()) + " " +
         px(fr.height()) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // wall lines (dashed) and dominant-cone boundary rays (solid) per color
  Rat reach = (w + h) * 2;
  for (std::size_t j = 0; j < space.s(); ++j) {
    const IntVec& cp = space.colors[j].coroot_pairings;
    RatVec dir{Rat(-cp[1]), Rat(cp[0])};
    auto line = [&](const RatVec& a, const RatVec& b, const char* style) {
      out += std::string("<line x1=\"") + px(fr.X(a[0])) + "\" y1=\"" + px(fr.Y(a[1])) +
             "\" x2=\"" + px(fr.X(b[0])) + "\" y2=\"" + px(fr.Y(b[1])) + "\" " + style + "/>\n";
    };
    RatVec plus{dir[0] * reach, dir[1] * reach};
    RatVec minus{-plus[0], -plus[1]};
    line(minus, plus, "stroke=\"#bbbbbb\" stroke-width=\"1\" stroke-dasharray=\"6,4\"");
    // the ray where every other pairing stays nonnegative bounds the chamber
    for (const RatVec& ray : {plus, minus}) {
      bool dominant = true;
      for (std::size_t k = 0; k < space.s() && dominant; ++k)
        if (k != j && space.pairing(ray, k) < 0) dominant = false;
      if (dominant) line(RatVec{Rat(0), Rat(0)}, ray, "stroke=\"#666666\" stroke-width=\"2\"");
    }
  }
  out += "<circle cx=\"" + px(fr.X(Rat(0))) + "\" cy=\"" + px(fr.Y(Rat(0))) +
         "\" r=\"3\" fill=\"#666666\"/>\n";

  for (const auto& l : layers) {
    std::string color = svgdetail::gray(l.gray_t);
    if (l.q_vertices.empty()) {
      out += "<text x=\"" + px(fr.pad) + "\" y=\"" + px(fr.pad) + "\" fill=\"" + color +
             "\" font-size=\"14\">empty (eps = " + rat_str(l.eps) + ")</text>\n";
      continue;
    }
    // order the outline counterclockwise around the centroid
    std::vector<RatVec> pts = l.q_vertices;
    RatVec c{Rat(0), Rat(0)};
    for (const auto& p : pts) {
      c[0] += p[0];
      c[1] += p[1];
    }
    c[0] /= int(pts.size());
    c[1] /= int(pts.size());
    std::sort(pts.begin(), pts.end(), [&](const RatVec& a, const RatVec& b) {
      auto half = [&](const RatVec& p) {
        Rat dy = p[1] - c[1], dx = p[0] - c[0];
        return dy > 0 || (dy == 0 && dx > 0) ? 0 : 1;
      };
      int ha = half(a), hb = half(b);
      if (ha != hb) return ha < hb;
      Rat cross = (a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0]);
      if (cross != 0) return cross > 0;
      return lex_less(a, b);
    });
    if (pts.size() > 1) {
      std::string path = "M";
      for (const auto& p : pts) path += " " + px(fr.X(p[0])) + " " + px(fr.Y(p[1]));
      path += " Z";
      out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"2\"/>\n";
    }
    for (const auto& p : pts)
      out += "<circle cx=\"" + px(fr.X(p[0])) + "\" cy=\"" + px(fr.Y(p[1])) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

inline SvgLayer layer_at(const Family& f, const Rat& eps, const Rat& gray_t) {
  FamilySlice sl = polytope_at(f, eps);
  SvgLayer l;
  l.eps = eps;
  l.gray_t = gray_t;
  for (std::size_t i = 0; i < sl.verts.size(); ++i)
    l.q_vertices.push_back(q_vertex_weight(f, sl, i));
  return l;
}

}  // namespace horo
