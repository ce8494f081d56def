#pragma once

#include "narycsg/mesh.h"
#include "narycsg/types.h"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ncsg {

struct ParseIssue {
  enum class Kind { Syntax, IndexOutOfRange, Io };
  Kind kind;
  int line;  // 1-based, 0 when not line-specific
  std::string message;
};

// Raw parse only: vertex/facet lists, no topology. Callers run topology_pass.
std::optional<Mesh> parse_off(std::istream& in, std::vector<ParseIssue>& issues);
// OBJ subset: 'v' and 'f' records ('f' accepts a, a/t, a/t/n, a//n and
// negative relative indices); every other record type is skipped.
std::optional<Mesh> parse_obj(std::istream& in, std::vector<ParseIssue>& issues);

// Dispatches on extension (.off / .obj, case-insensitive) and runs
// topology_pass; topology violations are reported as issues.
std::optional<Mesh> load_mesh(const std::string& path, std::vector<ParseIssue>& issues);

// Output polygons. Boundary facets of one source plane may come as several
// polygons (loops or tesselation pieces); plane_id groups them and theta
// records whether the source facet was used with flipped orientation.
struct Poly {
  std::vector<int32_t> idx;
  int32_t plane_id = -1;
  int8_t theta = 1;
};

struct PolySoup {
  std::vector<Vec3> V;
  std::vector<Poly> polys;
  // When set, every plane_id change emits a "# plane <id> theta <+/-1>"
  // comment row (used by --tesselate none so loop grouping survives OFF).
  bool plane_comments = false;
};

PolySoup to_soup(const Mesh& m);

// Coordinates are printed with 17 significant digits so parsing recovers
// bit-identical doubles.
void write_off(std::ostream& out, const PolySoup& soup);
void write_obj(std::ostream& out, const PolySoup& soup);

struct StatsRecord {
  uint64_t m = 0;  // input facets
  uint64_t s = 0;  // fragments created by splits during exploration
  uint64_t h = 0;  // order-2 + order-3 output vertices
  double t_topology_s = 0;
  double t_vertices_s = 0;
  double t_facets_s = 0;
  uint64_t errors = 0;
};

// key=value lines plus one machine-readable JSON line. The derived
// (m+s)*log2(h) field is omitted when h = 0.
std::string write_stats(const StatsRecord& r);

}  // namespace ncsg
