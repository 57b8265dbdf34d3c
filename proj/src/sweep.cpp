#include "ltavg/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <ostream>
#include <thread>

namespace ltavg {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("sweep: axis needs at least 2 points");
  if (!(hi > lo)) throw std::invalid_argument("sweep: empty range");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

Verdict classify_point(const OscillatorParams& p, const SweepSettings& s, unsigned long seed) {
  switch (s.method) {
    case SweepMethod::Sos:
      return classify(p, s.dv, s.ds, s.policy);
    case SweepMethod::FloquetGeneral: {
      const auto t0 = std::chrono::steady_clock::now();
      FloquetSpectrum spec = roots(general_determinant(p));
      Verdict v;
      v.method = "floquet-general";
      v.label = spec.unstable ? StabilityLabel::Unstable : StabilityLabel::Stable;
      v.detail = "max_growth=" + fmt_double(spec.max_growth);
      v.wall_time = std::chrono::duration_cast<std::chrono::duration<double>>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      return v;
    }
    case SweepMethod::FloquetSimplified: {
      FloquetSpectrum spec = roots(simplified_determinant(p));
      Verdict v;
      v.method = "floquet-simplified";
      v.label = spec.unstable ? StabilityLabel::Unstable : StabilityLabel::Stable;
      v.detail = "max_growth=" + fmt_double(spec.max_growth);
      return v;
    }
    case SweepMethod::Dns: {
      DnsSettings ds = s.dns;
      ds.seed = seed;
      return classify_dns(p, ds);
    }
  }
  throw std::logic_error("classify_point: unknown method");
}

}  // namespace

SweepMethod parse_method(const std::string& name) {
  if (name == "sos") return SweepMethod::Sos;
  if (name == "floquet-general" || name == "general") return SweepMethod::FloquetGeneral;
  if (name == "floquet-simplified" || name == "simplified") return SweepMethod::FloquetSimplified;
  if (name == "dns") return SweepMethod::Dns;
  throw std::invalid_argument("unknown method: " + name);
}

std::string to_string(SweepMethod m) {
  switch (m) {
    case SweepMethod::Sos: return "sos";
    case SweepMethod::FloquetGeneral: return "floquet-general";
    case SweepMethod::FloquetSimplified: return "floquet-simplified";
    case SweepMethod::Dns: return "dns";
  }
  return "unknown";
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LTAVG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

SweepGrid run_sweep(const OscillatorParams& base, double gamma_lo, double gamma_hi, double h_lo,
                    double h_hi, int nx, int ny, const SweepSettings& settings) {
  SweepGrid grid;
  grid.base = base;
  grid.method = to_string(settings.method);
  grid.gamma_axis = linspace(gamma_lo, gamma_hi, nx);
  grid.h_axis = linspace(h_lo, h_hi, ny);
  grid.verdicts.resize(static_cast<size_t>(nx) * ny);

  const int nthreads = std::min(resolve_thread_count(settings.threads), nx * ny);
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int idx = next.fetch_add(1);
      if (idx >= nx * ny) break;
      const int ix = idx / ny, iy = idx % ny;
      OscillatorParams p = base;
      p.gamma = grid.gamma_axis[ix];
      p.h = grid.h_axis[iy];
      Verdict v = classify_point(p, settings, settings.seed + static_cast<unsigned long>(idx));
      if (v.label == StabilityLabel::Indeterminate && settings.dns_tiebreak &&
          settings.method == SweepMethod::Sos) {
        DnsSettings ds = settings.dns;
        ds.seed = settings.seed + static_cast<unsigned long>(idx);
        Verdict dv = classify_dns(p, ds);
        if (dv.label != StabilityLabel::Indeterminate) {
          dv.detail = "tiebreak after " + v.detail;
          v = dv;
        }
      }
      grid.verdicts[idx] = std::move(v);
    }
  };
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return grid;
}

std::vector<BoundaryPolyline> extract_boundary(const SweepGrid& grid) {
  const int nx = grid.nx(), ny = grid.ny();
  for (const auto& v : grid.verdicts)
    if (v.label == StabilityLabel::Indeterminate)
      throw std::invalid_argument("extract_boundary: grid contains Indeterminate cells");

  auto bit = [&](int ix, int iy) {
    return grid.at(ix, iy).label == StabilityLabel::Unstable ? 1 : 0;
  };
  // Edge-midpoint vertices keyed for stitching.
  using Vertex = std::pair<long, long>;  // quantized coordinates
  auto quant = [](double g, double h) {
    return Vertex{static_cast<long>(std::llround(g * 1e7)), static_cast<long>(std::llround(h * 1e7))};
  };
  struct Segment {
    std::array<double, 2> a, b;
  };
  std::vector<Segment> segments;
  for (int ix = 0; ix + 1 < nx; ++ix) {
    for (int iy = 0; iy + 1 < ny; ++iy) {
      const double g0 = grid.gamma_axis[ix], g1 = grid.gamma_axis[ix + 1];
      const double h0 = grid.h_axis[iy], h1 = grid.h_axis[iy + 1];
      const int s00 = bit(ix, iy), s10 = bit(ix + 1, iy), s11 = bit(ix + 1, iy + 1),
                s01 = bit(ix, iy + 1);
      const int code = s00 | (s10 << 1) | (s11 << 2) | (s01 << 3);
      if (code == 0 || code == 15) continue;
      const std::array<double, 2> bottom{0.5 * (g0 + g1), h0};
      const std::array<double, 2> top{0.5 * (g0 + g1), h1};
      const std::array<double, 2> left{g0, 0.5 * (h0 + h1)};
      const std::array<double, 2> right{g1, 0.5 * (h0 + h1)};
      auto seg = [&](std::array<double, 2> a, std::array<double, 2> b) {
        segments.push_back({a, b});
      };
      switch (code) {
        case 1: case 14: seg(left, bottom); break;
        case 2: case 13: seg(bottom, right); break;
        case 3: case 12: seg(left, right); break;
        case 4: case 11: seg(right, top); break;
        case 6: case 9: seg(bottom, top); break;
        case 7: case 8: seg(left, top); break;
        case 5:  // saddle: keep the two corners separated
          seg(left, bottom);
          seg(right, top);
          break;
        case 10:
          seg(bottom, right);
          seg(left, top);
          break;
        default: break;
      }
    }
  }

  // Stitch segments into polylines.
  std::multimap<Vertex, int> by_vertex;
  for (size_t i = 0; i < segments.size(); ++i) {
    by_vertex.emplace(quant(segments[i].a[0], segments[i].a[1]), static_cast<int>(i));
    by_vertex.emplace(quant(segments[i].b[0], segments[i].b[1]), static_cast<int>(i));
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<BoundaryPolyline> lines;
  for (size_t start = 0; start < segments.size(); ++start) {
    if (used[start]) continue;
    used[start] = true;
    std::vector<std::array<double, 2>> chain{segments[start].a, segments[start].b};
    // extend forward from the tail, then from the head
    for (int dir = 0; dir < 2; ++dir) {
      while (true) {
        const auto& tip = dir == 0 ? chain.back() : chain.front();
        const Vertex key = quant(tip[0], tip[1]);
        int found = -1;
        auto [lo, hi] = by_vertex.equal_range(key);
        for (auto it = lo; it != hi; ++it)
          if (!used[it->second]) {
            found = it->second;
            break;
          }
        if (found < 0) break;
        used[found] = true;
        const auto& s = segments[found];
        const bool a_matches = quant(s.a[0], s.a[1]) == key;
        const auto& next = a_matches ? s.b : s.a;
        if (dir == 0)
          chain.push_back(next);
        else
          chain.insert(chain.begin(), next);
      }
    }
    lines.push_back({std::move(chain)});
  }
  return lines;
}

double refine_boundary(const OscillatorParams& base, double gamma, double h_lo, double h_hi,
                       const SweepSettings& settings, double tol_h) {
  if (!(h_lo < h_hi)) throw std::invalid_argument("refine_boundary: empty bracket");
  auto label_at = [&](double h, int salt) {
    OscillatorParams p = base;
    p.gamma = gamma;
    p.h = h;
    Verdict v = classify_point(p, settings, settings.seed + static_cast<unsigned long>(salt));
    if (v.label == StabilityLabel::Indeterminate && settings.dns_tiebreak) {
      DnsSettings ds = settings.dns;
      ds.seed = settings.seed + static_cast<unsigned long>(salt);
      v = classify_dns(p, ds);
    }
    if (v.label == StabilityLabel::Indeterminate)
      throw std::runtime_error("refine_boundary: indeterminate point inside bracket");
    return v.label;
  };
  if (label_at(h_lo, 0) != StabilityLabel::Stable ||
      label_at(h_hi, 1) != StabilityLabel::Unstable)
    throw std::invalid_argument("refine_boundary: bracket must be (stable, unstable)");
  int salt = 2;
  while (h_hi - h_lo > tol_h) {
    const double mid = 0.5 * (h_lo + h_hi);
    if (label_at(mid, salt++) == StabilityLabel::Stable)
      h_lo = mid;
    else
      h_hi = mid;
  }
  return 0.5 * (h_lo + h_hi);
}

CompareReport compare(const SweepGrid& a, const SweepGrid& b) {
  if (a.gamma_axis != b.gamma_axis || a.h_axis != b.h_axis)
    throw std::invalid_argument("compare: grids have different axes");
  CompareReport rep;
  for (int ix = 0; ix < a.nx(); ++ix)
    for (int iy = 0; iy < a.ny(); ++iy) {
      const auto la = a.at(ix, iy).label, lb = b.at(ix, iy).label;
      rep.counts[static_cast<int>(la)][static_cast<int>(lb)]++;
      if (la == StabilityLabel::Unstable) {
        ++rep.a_unstable;
        if (lb == StabilityLabel::Stable) rep.exceptions.push_back({ix, iy});
      }
    }
  rep.exception_ratio =
      rep.a_unstable > 0 ? static_cast<double>(rep.exceptions.size()) / rep.a_unstable : 0.0;
  return rep;
}

TongueReport count_tongues(const SweepGrid& grid, double gamma_lo, double gamma_hi,
                           double h_threshold) {
  TongueReport rep;
  bool in_dip = false;
  double best_h = 0, best_g = 0;
  for (int ix = 0; ix < grid.nx(); ++ix) {
    const double g = grid.gamma_axis[ix];
    if (g < gamma_lo || g > gamma_hi) continue;
    double mh = std::numeric_limits<double>::infinity();
    for (int iy = 0; iy < grid.ny(); ++iy)
      if (grid.at(ix, iy).label == StabilityLabel::Unstable) {
        mh = grid.h_axis[iy];
        break;
      }
    const bool below = mh < h_threshold;
    if (below && !in_dip) {
      in_dip = true;
      ++rep.count;
      best_h = mh;
      best_g = g;
    } else if (below && mh < best_h) {
      best_h = mh;
      best_g = g;
    } else if (!below && in_dip) {
      in_dip = false;
      rep.gamma_minima.push_back(best_g);
    }
  }
  if (in_dip) rep.gamma_minima.push_back(best_g);
  return rep;
}

void write_sweep_csv(std::ostream& os, const SweepGrid& grid, bool include_time) {
  os << "gamma,h,label,U,method,dV,dS";
  if (include_time) os << ",wall_time";
  os << "\n";
  for (int ix = 0; ix < grid.nx(); ++ix)
    for (int iy = 0; iy < grid.ny(); ++iy) {
      const Verdict& v = grid.at(ix, iy);
      os << fmt_double(grid.gamma_axis[ix]) << "," << fmt_double(grid.h_axis[iy]) << ","
         << to_string(v.label) << "," << (v.bound_value ? fmt_double(*v.bound_value) : "") << ","
         << v.method << "," << v.dv << "," << v.ds;
      if (include_time) os << "," << fmt_double(v.wall_time);
      os << "\n";
    }
}

void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPolyline>& lines) {
  os << "polyline_id,vertex_index,gamma,h\n";
  for (size_t i = 0; i < lines.size(); ++i)
    for (size_t k = 0; k < lines[i].vertices.size(); ++k)
      os << i << "," << k << "," << fmt_double(lines[i].vertices[k][0]) << ","
         << fmt_double(lines[i].vertices[k][1]) << "\n";
}

void write_boundary_svg(std::ostream& os, const SweepGrid& grid,
                        const std::vector<BoundaryPolyline>& lines,
                        const std::vector<SvgMarker>& markers) {
  const double W = 800, H = 600, ml = 70, mr = 20, mt = 20, mb = 50;
  const double glo = grid.gamma_axis.front(), ghi = grid.gamma_axis.back();
  const double hlo = grid.h_axis.front(), hhi = grid.h_axis.back();
  auto px = [&](double g) { return ml + (g - glo) / (ghi - glo) * (W - ml - mr); };
  auto py = [&](double h) { return H - mb - (h - hlo) / (hhi - hlo) * (H - mt - mb); };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (W - ml - mr) << "\" height=\""
     << (H - mt - mb) << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">gamma</text>\n";
  os << "<text x=\"18\" y=\"" << H / 2 << "\" transform=\"rotate(-90 18 " << H / 2
     << ")\" text-anchor=\"middle\">h</text>\n";
  for (const auto& line : lines) {
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (const auto& v : line.vertices) os << px(v[0]) << "," << py(v[1]) << " ";
    os << "\"/>\n";
  }
  for (const auto& mk : markers) {
    if (mk.kind == "cross") {
      const double x = px(mk.gamma), y = py(mk.h);
      os << "<path stroke=\"red\" d=\"M" << x - 5 << " " << y - 5 << " L" << x + 5 << " " << y + 5
         << " M" << x - 5 << " " << y + 5 << " L" << x + 5 << " " << y - 5 << "\"/>\n";
    } else {
      os << "<circle cx=\"" << px(mk.gamma) << "\" cy=\"" << py(mk.h)
         << "\" r=\"5\" fill=\"none\" stroke=\"blue\"/>\n";
    }
  }
  os << "</svg>\n";
}

}  // namespace ltavg
