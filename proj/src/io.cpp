#include "narycsg/io.h"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ncsg {

namespace {

// Line-oriented reader that strips '#' comments and tracks line numbers.
struct LineReader {
  std::istream& in;
  int line = 0;

  std::optional<std::string> next_content_line() {
    std::string s;
    while (std::getline(in, s)) {
      ++line;
      if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
      if (s.find_first_not_of(" \t\r\n") != std::string::npos) return s;
    }
    return std::nullopt;
  }
};

bool parse_doubles(const std::string& s, int count, double* out) {
  const char* p = s.c_str();
  for (int i = 0; i < count; ++i) {
    char* end = nullptr;
    out[i] = std::strtod(p, &end);
    if (end == p) return false;
    p = end;
  }
  return true;
}

void fmt_double(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::optional<Mesh> parse_off(std::istream& in, std::vector<ParseIssue>& issues) {
  LineReader rd{in};
  auto syntax = [&](int line, const std::string& msg) {
    issues.push_back({ParseIssue::Kind::Syntax, line, msg});
    return std::nullopt;
  };

  auto header = rd.next_content_line();
  if (!header) return syntax(rd.line, "missing OFF header");
  std::istringstream hs(*header);
  std::string magic;
  hs >> magic;
  if (magic != "OFF") return syntax(rd.line, "expected 'OFF' header, got '" + magic + "'");

  long nv = -1, nf = -1, ne = -1;
  if (!(hs >> nv >> nf >> ne)) {
    auto counts = rd.next_content_line();
    if (!counts) return syntax(rd.line, "missing vertex/facet counts");
    std::istringstream cs(*counts);
    if (!(cs >> nv >> nf >> ne)) return syntax(rd.line, "bad count line");
  }
  if (nv < 0 || nf < 0) return syntax(rd.line, "negative counts");

  Mesh m;
  m.V.reserve(size_t(nv));
  for (long i = 0; i < nv; ++i) {
    auto s = rd.next_content_line();
    if (!s) return syntax(rd.line, "unexpected end of file in vertex list");
    double xyz[3];
    if (!parse_doubles(*s, 3, xyz))
      return syntax(rd.line, "expected 3 coordinates");
    m.V.emplace_back(xyz[0], xyz[1], xyz[2]);
  }

  m.F.reserve(size_t(nf));
  for (long i = 0; i < nf; ++i) {
    auto s = rd.next_content_line();
    if (!s) return syntax(rd.line, "unexpected end of file in facet list");
    std::istringstream fs(*s);
    long k = 0;
    if (!(fs >> k) || k < 1) return syntax(rd.line, "expected facet vertex count");
    std::vector<int32_t> loop(size_t(k), 0);
    for (long j = 0; j < k; ++j) {
      long v;
      if (!(fs >> v)) return syntax(rd.line, "expected " + std::to_string(k) + " indices");
      if (v < 0 || v >= nv) {
        issues.push_back({ParseIssue::Kind::IndexOutOfRange, rd.line,
                          "vertex index " + std::to_string(v) + " out of range"});
        return std::nullopt;
      }
      loop[size_t(j)] = int32_t(v);
    }
    m.F.push_back(std::move(loop));
  }
  return m;
}

std::optional<Mesh> parse_obj(std::istream& in, std::vector<ParseIssue>& issues) {
  Mesh m;
  std::string s;
  int line = 0;
  bool ok = true;
  while (std::getline(in, s)) {
    ++line;
    if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    std::istringstream ls(s);
    std::string rec;
    if (!(ls >> rec)) continue;
    if (rec == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) {
        issues.push_back({ParseIssue::Kind::Syntax, line, "bad vertex record"});
        ok = false;
        continue;
      }
      m.V.emplace_back(x, y, z);
    } else if (rec == "f") {
      std::vector<int32_t> loop;
      std::string field;
      while (ls >> field) {
        // forms: i, i/t, i/t/n, i//n — only the vertex index matters here
        size_t slash = field.find('/');
        std::string head = field.substr(0, slash);
        long v = 0;
        try {
          v = std::stol(head);
        } catch (...) {
          issues.push_back({ParseIssue::Kind::Syntax, line, "bad face field '" + field + "'"});
          ok = false;
          break;
        }
        long resolved = v > 0 ? v - 1 : long(m.V.size()) + v;  // negative = relative
        if (v == 0 || resolved < 0 || resolved >= long(m.V.size())) {
          issues.push_back({ParseIssue::Kind::IndexOutOfRange, line,
                            "face index " + std::to_string(v) + " out of range"});
          ok = false;
          break;
        }
        loop.push_back(int32_t(resolved));
      }
      if (!ok) continue;
      if (loop.size() < 3) {
        issues.push_back({ParseIssue::Kind::Syntax, line, "face with fewer than 3 vertices"});
        ok = false;
        continue;
      }
      m.F.push_back(std::move(loop));
    }
    // every other record type is ignored
  }
  if (!ok) return std::nullopt;
  return m;
}

std::optional<Mesh> load_mesh(const std::string& path, std::vector<ParseIssue>& issues) {
  std::ifstream in(path);
  if (!in) {
    issues.push_back({ParseIssue::Kind::Io, 0, "cannot open '" + path + "'"});
    return std::nullopt;
  }
  std::string lower = path;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  std::optional<Mesh> m;
  if (lower.ends_with(".off"))
    m = parse_off(in, issues);
  else if (lower.ends_with(".obj"))
    m = parse_obj(in, issues);
  else {
    issues.push_back({ParseIssue::Kind::Io, 0, "unknown mesh extension on '" + path + "'"});
    return std::nullopt;
  }
  if (!m) return std::nullopt;
  for (const auto& e : topology_pass(*m)) {
    issues.push_back({ParseIssue::Kind::Syntax, 0,
                      "facet " + std::to_string(e.facet) + ": " + e.detail});
  }
  if (!issues.empty()) return std::nullopt;
  return m;
}

PolySoup to_soup(const Mesh& m) {
  PolySoup s;
  s.V = m.V;
  s.polys.reserve(m.F.size());
  for (size_t f = 0; f < m.F.size(); ++f)
    s.polys.push_back({m.F[f], int32_t(f), 1});
  return s;
}

void write_off(std::ostream& out, const PolySoup& soup) {
  std::string buf;
  buf += "OFF\n";
  buf += std::to_string(soup.V.size());
  buf += ' ';
  buf += std::to_string(soup.polys.size());
  buf += " 0\n";
  for (const Vec3& p : soup.V) {
    fmt_double(buf, p.x());
    buf += ' ';
    fmt_double(buf, p.y());
    buf += ' ';
    fmt_double(buf, p.z());
    buf += '\n';
  }
  int32_t last_plane = INT32_MIN;
  int8_t last_theta = 0;
  for (const Poly& f : soup.polys) {
    if (soup.plane_comments && (f.plane_id != last_plane || f.theta != last_theta)) {
      buf += "# plane ";
      buf += std::to_string(f.plane_id);
      buf += " theta ";
      buf += f.theta >= 0 ? "+1" : "-1";
      buf += '\n';
      last_plane = f.plane_id;
      last_theta = f.theta;
    }
    buf += std::to_string(f.idx.size());
    for (int32_t v : f.idx) {
      buf += ' ';
      buf += std::to_string(v);
    }
    buf += '\n';
  }
  out << buf;
}

void write_obj(std::ostream& out, const PolySoup& soup) {
  std::string buf;
  for (const Vec3& p : soup.V) {
    buf += "v ";
    fmt_double(buf, p.x());
    buf += ' ';
    fmt_double(buf, p.y());
    buf += ' ';
    fmt_double(buf, p.z());
    buf += '\n';
  }
  int32_t last_plane = INT32_MIN;
  int8_t last_theta = 0;
  for (const Poly& f : soup.polys) {
    if (soup.plane_comments && (f.plane_id != last_plane || f.theta != last_theta)) {
      buf += "# plane ";
      buf += std::to_string(f.plane_id);
      buf += " theta ";
      buf += f.theta >= 0 ? "+1" : "-1";
      buf += '\n';
      last_plane = f.plane_id;
      last_theta = f.theta;
    }
    buf += 'f';
    for (int32_t v : f.idx) {
      buf += ' ';
      buf += std::to_string(v + 1);
    }
    buf += '\n';
  }
  out << buf;
}

std::string write_stats(const StatsRecord& r) {
  std::ostringstream out;
  out << "schema=1\n";
  out << "m=" << r.m << "\n";
  out << "s=" << r.s << "\n";
  out << "h=" << r.h << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", r.t_topology_s);
  out << "t_topology_s=" << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.9f", r.t_vertices_s);
  out << "t_vertices_s=" << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.9f", r.t_facets_s);
  out << "t_facets_s=" << buf << "\n";
  out << "errors=" << r.errors << "\n";
  nlohmann::json j{{"schema", 1},
                   {"m", r.m},
                   {"s", r.s},
                   {"h", r.h},
                   {"t_topology_s", r.t_topology_s},
                   {"t_vertices_s", r.t_vertices_s},
                   {"t_facets_s", r.t_facets_s},
                   {"errors", r.errors}};
  if (r.h > 0) {
    double scaling = double(r.m + r.s) * std::log2(double(r.h));
    std::snprintf(buf, sizeof buf, "%.6f", scaling);
    out << "scaling=" << buf << "\n";
    j["scaling"] = scaling;
  }
  out << j.dump() << "\n";
  return out.str();
}

}  // namespace ncsg
