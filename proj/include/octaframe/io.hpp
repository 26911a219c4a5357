#pragma once

// File formats: trajectory CSV, field spec / result JSON, OBJ glyphs.
// Numbers are written in shortest round-trip form; coefficients always in
// m = -3..3 order.

#include "errors.hpp"
#include "field.hpp"
#include "projection.hpp"
#include "random.hpp"
#include "sh3.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

namespace octaframe
{

using Json = nlohmann::ordered_json;

/// Schema violation, reported with a JSONPath-like location ("$.nodes[2].coeffs").
class SchemaError : public ArgumentError
{
public:
  SchemaError(const std::string &path, const std::string &msg) : ArgumentError(path + ": " + msg), path_(path) {}
  const std::string &path() const { return path_; }

private:
  std::string path_;
};

inline std::string format_double(double x)
{
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

/// Writes content to path through a sibling temporary file and a rename.
inline void write_file_atomic(const std::filesystem::path &path, const std::string &content)
{
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out)
      throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
  {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place at " + path.string());
  }
}

// ---------------------------------------------------------------------------
// Trajectory CSV

inline constexpr const char *kTrajectoryHeader = "iter,a_m3,a_m2,a_m1,a_0,a_1,a_2,a_3,penalty,sqrt_penalty,distance";

inline void write_trajectory_csv(std::ostream &out, const Trajectory &t)
{
  out << kTrajectoryHeader << '\n';
  for (const auto &p : t.points)
  {
    out << p.iter;
    for (int i = 0; i < 7; ++i)
      out << ',' << format_double(p.value.coeffs[i]);
    out << ',' << format_double(p.penalty) << ',' << format_double(p.sqrt_penalty) << ','
        << format_double(p.distance) << '\n';
  }
}

/// Parses "x,x,x,x,x,x,x" (whitespace around entries allowed).
inline Octupole parse_octupole_list(const std::string &text)
{
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos)
      throw ArgumentError("empty entry in coefficient list");
    const std::string tok = item.substr(b, e - b + 1);
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw ArgumentError("malformed number '" + tok + "' in coefficient list");
    vals.push_back(v);
  }
  if (vals.size() != 7)
    throw ArgumentError("expected 7 coefficients, got " + std::to_string(vals.size()));
  Octupole a;
  for (int i = 0; i < 7; ++i)
    a.coeffs[i] = vals[i];
  if (!a.finite())
    throw ArgumentError("coefficients must be finite");
  return a;
}

// ---------------------------------------------------------------------------
// Field spec JSON

struct FieldSpec
{
  FrameField field;
  FieldOptConfig config;
  std::uint64_t seed = 0;
};

namespace detail
{

inline double json_number(const Json &j, const std::string &path)
{
  if (!j.is_number())
    throw SchemaError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v))
    throw SchemaError(path, "number must be finite");
  return v;
}

inline std::int64_t json_integer(const Json &j, const std::string &path)
{
  if (!j.is_number_integer())
    throw SchemaError(path, "expected an integer");
  return j.get<std::int64_t>();
}

template <int N>
std::array<double, N> json_numbers(const Json &j, const std::string &path)
{
  if (!j.is_array() || j.size() != N)
    throw SchemaError(path, "expected an array of " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (int i = 0; i < N; ++i)
    out[i] = json_number(j[i], path + "[" + std::to_string(i) + "]");
  return out;
}

inline void check_keys(const Json &j, const std::string &path, std::initializer_list<const char *> allowed)
{
  if (!j.is_object())
    throw SchemaError(path, "expected an object");
  for (const auto &item : j.items())
  {
    bool ok = false;
    for (const char *k : allowed)
      ok = ok || item.key() == k;
    if (!ok)
      throw SchemaError(path + "." + item.key(), "unknown key");
  }
}

/// Reads {"coeffs": [7]} or {"euler": [3]}; nullopt when neither is present.
inline std::optional<Octupole> json_value(const Json &j, const std::string &path)
{
  const bool has_c = j.contains("coeffs"), has_e = j.contains("euler");
  if (has_c && has_e)
    throw SchemaError(path, "give either coeffs or euler, not both");
  if (has_c)
  {
    const auto c = json_numbers<7>(j["coeffs"], path + ".coeffs");
    Octupole a;
    for (int i = 0; i < 7; ++i)
      a.coeffs[i] = c[i];
    return a;
  }
  if (has_e)
  {
    const auto e = json_numbers<3>(j["euler"], path + ".euler");
    return semisymmetric_from_angles({e[0], e[1], e[2]});
  }
  return std::nullopt;
}

inline double json_positive(const Json &j, const std::string &path)
{
  const double v = json_number(j, path);
  if (!(v > 0.0))
    throw SchemaError(path, "must be positive");
  return v;
}

} // namespace detail

/// Validates and loads a field spec.
///
///   { "grid": [nx, ny, nz] | "nodes": [{coeffs|euler, pinned}], "edges": [[i, j]],
///     "boundary": {coeffs|euler},            (grid only: pins every boundary node)
///     "pins": [{"node": i | [i, j, k], coeffs|euler}],
///     "seed": n, "weights": {"w1", "w2"},
///     "optimizer": {"step", "max_iters", "tol", "backtrack", "armijo", "grad_tol", "levels"} }
///
/// A node given a value is pinned unless it says "pinned": false, in which
/// case the value is only the starting point.  Free nodes without a value are
/// initialized with random unit octupoles drawn in node order from the seed.
/// "energy_history" and "status" are accepted and ignored, so optimizer output
/// can be fed back in.
inline FieldSpec parse_field_spec(const Json &j)
{
  using namespace detail;
  check_keys(j, "$", {"grid", "nodes", "edges", "boundary", "pins", "seed", "weights", "optimizer",
                      "energy_history", "status"});
  const bool has_grid = j.contains("grid"), has_nodes = j.contains("nodes");
  if (has_grid == has_nodes)
    throw SchemaError("$", "exactly one of 'grid' or 'nodes' is required");

  FieldSpec spec;
  if (j.contains("seed"))
  {
    const auto s = json_integer(j["seed"], "$.seed");
    if (s < 0)
      throw SchemaError("$.seed", "must be nonnegative");
    spec.seed = static_cast<std::uint64_t>(s);
  }
  Rng rng(spec.seed);

  FrameField &f = spec.field;
  std::vector<bool> has_value;
  if (has_grid)
  {
    if (j.contains("edges"))
      throw SchemaError("$.edges", "edges are implied by 'grid'");
    const Json &g = j["grid"];
    if (!g.is_array() || g.size() != 3)
      throw SchemaError("$.grid", "expected [nx, ny, nz]");
    GridDims dims;
    int *d[3] = {&dims.nx, &dims.ny, &dims.nz};
    for (int i = 0; i < 3; ++i)
    {
      const auto v = json_integer(g[i], "$.grid[" + std::to_string(i) + "]");
      if (v < 1 || v > 1024)
        throw SchemaError("$.grid[" + std::to_string(i) + "]", "must lie in [1, 1024]");
      *d[i] = static_cast<int>(v);
    }
    f = FrameField::make_grid(dims);
    has_value.assign(f.nodes.size(), false);
    if (j.contains("boundary"))
    {
      check_keys(j["boundary"], "$.boundary", {"coeffs", "euler"});
      const auto v = json_value(j["boundary"], "$.boundary");
      if (!v)
        throw SchemaError("$.boundary", "needs coeffs or euler");
      for (int k = 0; k < dims.nz; ++k)
        for (int jj = 0; jj < dims.ny; ++jj)
          for (int i = 0; i < dims.nx; ++i)
            if (dims.on_boundary(i, jj, k))
            {
              const std::size_t n = dims.index(i, jj, k);
              f.nodes[n] = {*v, true};
              has_value[n] = true;
            }
    }
  }
  else
  {
    if (j.contains("boundary"))
      throw SchemaError("$.boundary", "only valid with 'grid'");
    const Json &nodes = j["nodes"];
    if (!nodes.is_array() || nodes.empty())
      throw SchemaError("$.nodes", "expected a non-empty array");
    f.nodes.resize(nodes.size());
    has_value.assign(nodes.size(), false);
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
      const std::string path = "$.nodes[" + std::to_string(i) + "]";
      check_keys(nodes[i], path, {"coeffs", "euler", "pinned"});
      const auto v = json_value(nodes[i], path);
      bool pinned = v.has_value();
      if (nodes[i].contains("pinned"))
      {
        if (!nodes[i]["pinned"].is_boolean())
          throw SchemaError(path + ".pinned", "expected a boolean");
        pinned = nodes[i]["pinned"].get<bool>();
        if (pinned && !v)
          throw SchemaError(path, "a pinned node needs coeffs or euler");
      }
      if (v)
        f.nodes[i].value = *v;
      f.nodes[i].pinned = pinned;
      has_value[i] = v.has_value();
    }
    if (j.contains("edges"))
    {
      const Json &edges = j["edges"];
      if (!edges.is_array())
        throw SchemaError("$.edges", "expected an array");
      std::set<std::pair<std::size_t, std::size_t>> seen;
      for (std::size_t e = 0; e < edges.size(); ++e)
      {
        const std::string path = "$.edges[" + std::to_string(e) + "]";
        if (!edges[e].is_array() || edges[e].size() != 2)
          throw SchemaError(path, "expected [i, j]");
        std::array<std::size_t, 2> ends{};
        for (int k = 0; k < 2; ++k)
        {
          const auto v = json_integer(edges[e][k], path + "[" + std::to_string(k) + "]");
          if (v < 0 || static_cast<std::size_t>(v) >= f.nodes.size())
            throw SchemaError(path + "[" + std::to_string(k) + "]", "node index out of range");
          ends[k] = static_cast<std::size_t>(v);
        }
        if (ends[0] == ends[1])
          throw SchemaError(path, "self-loop");
        if (!seen.insert(std::minmax(ends[0], ends[1])).second)
          throw SchemaError(path, "duplicate edge");
        f.edges.push_back(ends);
      }
    }
  }

  if (j.contains("pins"))
  {
    const Json &pins = j["pins"];
    if (!pins.is_array())
      throw SchemaError("$.pins", "expected an array");
    for (std::size_t p = 0; p < pins.size(); ++p)
    {
      const std::string path = "$.pins[" + std::to_string(p) + "]";
      check_keys(pins[p], path, {"node", "coeffs", "euler"});
      if (!pins[p].contains("node"))
        throw SchemaError(path + ".node", "missing");
      const Json &node = pins[p]["node"];
      std::size_t n = 0;
      if (node.is_array())
      {
        if (!f.grid || node.size() != 3)
          throw SchemaError(path + ".node", "[i, j, k] addressing needs a grid");
        std::array<int, 3> ijk{};
        const int lim[3] = {f.grid->nx, f.grid->ny, f.grid->nz};
        for (int k = 0; k < 3; ++k)
        {
          const auto v = json_integer(node[k], path + ".node[" + std::to_string(k) + "]");
          if (v < 0 || v >= lim[k])
            throw SchemaError(path + ".node[" + std::to_string(k) + "]", "out of range");
          ijk[k] = static_cast<int>(v);
        }
        n = f.grid->index(ijk[0], ijk[1], ijk[2]);
      }
      else
      {
        const auto v = json_integer(node, path + ".node");
        if (v < 0 || static_cast<std::size_t>(v) >= f.nodes.size())
          throw SchemaError(path + ".node", "out of range");
        n = static_cast<std::size_t>(v);
      }
      const auto v = json_value(pins[p], path);
      if (!v)
        throw SchemaError(path, "needs coeffs or euler");
      f.nodes[n] = {*v, true};
      has_value[n] = true;
    }
  }

  for (std::size_t i = 0; i < f.nodes.size(); ++i)
    if (!has_value[i])
      f.nodes[i].value = random_unit_octupole(rng);

  if (j.contains("weights"))
  {
    const Json &w = j["weights"];
    check_keys(w, "$.weights", {"w1", "w2"});
    if (w.contains("w1"))
      spec.config.weights.w1 = json_positive(w["w1"], "$.weights.w1");
    if (w.contains("w2"))
      spec.config.weights.w2 = json_positive(w["w2"], "$.weights.w2");
  }
  if (j.contains("optimizer"))
  {
    const Json &o = j["optimizer"];
    check_keys(o, "$.optimizer", {"step", "max_iters", "tol", "backtrack", "armijo", "grad_tol", "levels"});
    DescentConfig &d = spec.config.descent;
    if (o.contains("step"))
      d.step = json_positive(o["step"], "$.optimizer.step");
    if (o.contains("max_iters"))
    {
      const auto v = json_integer(o["max_iters"], "$.optimizer.max_iters");
      if (v < 1 || v > 100000000)
        throw SchemaError("$.optimizer.max_iters", "must lie in [1, 1e8]");
      d.max_iters = static_cast<int>(v);
    }
    if (o.contains("tol"))
      d.tol = json_positive(o["tol"], "$.optimizer.tol");
    if (o.contains("backtrack"))
    {
      d.backtrack = json_number(o["backtrack"], "$.optimizer.backtrack");
      if (!(d.backtrack > 0.0 && d.backtrack < 1.0))
        throw SchemaError("$.optimizer.backtrack", "must lie in (0, 1)");
    }
    if (o.contains("armijo"))
    {
      d.armijo = json_number(o["armijo"], "$.optimizer.armijo");
      if (!(d.armijo > 0.0 && d.armijo < 1.0))
        throw SchemaError("$.optimizer.armijo", "must lie in (0, 1)");
    }
    if (o.contains("grad_tol"))
    {
      d.grad_tol = json_number(o["grad_tol"], "$.optimizer.grad_tol");
      if (d.grad_tol < 0.0)
        throw SchemaError("$.optimizer.grad_tol", "must be nonnegative");
    }
    if (o.contains("levels"))
    {
      const auto v = json_integer(o["levels"], "$.optimizer.levels");
      if (v < 1 || v > 32)
        throw SchemaError("$.optimizer.levels", "must lie in [1, 32]");
      spec.config.levels = static_cast<int>(v);
    }
  }
  return spec;
}

inline FieldSpec parse_field_spec(const std::string &text)
{
  Json j;
  try
  {
    j = Json::parse(text);
  }
  catch (const Json::parse_error &e)
  {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_field_spec(j);
}

inline FieldSpec parse_field_spec(const char *text) { return parse_field_spec(std::string(text)); }

// ---------------------------------------------------------------------------
// Field result JSON

inline Json field_result_to_json(const FieldOptResult &r)
{
  Json j;
  const FrameField &f = r.field;
  if (f.grid)
    j["grid"] = {f.grid->nx, f.grid->ny, f.grid->nz};
  Json nodes = Json::array();
  for (const auto &n : f.nodes)
  {
    Json c = Json::array();
    for (int i = 0; i < 7; ++i)
      c.push_back(n.value.coeffs[i]);
    nodes.push_back({{"coeffs", c}, {"pinned", n.pinned}});
  }
  j["nodes"] = std::move(nodes);
  if (!f.grid)
  {
    Json edges = Json::array();
    for (const auto &e : f.edges)
      edges.push_back({e[0], e[1]});
    j["edges"] = std::move(edges);
  }
  j["energy_history"] = r.energy_history;
  j["status"] = std::string(to_string(r.status));
  return j;
}

inline std::string dump_json(const Json &j) { return j.dump(2) + "\n"; }

/// Inverse of field_result_to_json.
inline FieldOptResult read_field_result(const Json &j)
{
  using namespace detail;
  check_keys(j, "$", {"grid", "nodes", "edges", "energy_history", "status"});
  FieldOptResult r;
  if (!j.contains("nodes") || !j["nodes"].is_array())
    throw SchemaError("$.nodes", "expected an array");
  if (j.contains("grid"))
  {
    const auto g = json_numbers<3>(j["grid"], "$.grid");
    r.field = FrameField::make_grid({static_cast<int>(g[0]), static_cast<int>(g[1]), static_cast<int>(g[2])});
    if (r.field.nodes.size() != j["nodes"].size())
      throw SchemaError("$.nodes", "node count does not match grid");
  }
  else
  {
    r.field.nodes.resize(j["nodes"].size());
    if (j.contains("edges"))
      for (std::size_t e = 0; e < j["edges"].size(); ++e)
      {
        const std::string path = "$.edges[" + std::to_string(e) + "]";
        const auto a = json_integer(j["edges"][e].at(0), path + "[0]");
        const auto b = json_integer(j["edges"][e].at(1), path + "[1]");
        r.field.edges.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
      }
  }
  for (std::size_t i = 0; i < j["nodes"].size(); ++i)
  {
    const std::string path = "$.nodes[" + std::to_string(i) + "]";
    const Json &n = j["nodes"][i];
    check_keys(n, path, {"coeffs", "pinned"});
    const auto c = json_numbers<7>(n.at("coeffs"), path + ".coeffs");
    for (int k = 0; k < 7; ++k)
      r.field.nodes[i].value.coeffs[k] = c[k];
    r.field.nodes[i].pinned = n.at("pinned").get<bool>();
  }
  r.field.validate();
  if (j.contains("energy_history"))
    r.energy_history = j["energy_history"].get<std::vector<std::vector<double>>>();
  if (j.contains("status"))
  {
    const std::string s = j["status"].get<std::string>();
    bool found = false;
    for (auto st : {DescentStatus::Converged, DescentStatus::Stationary, DescentStatus::MaxIterations,
                    DescentStatus::Stalled})
      if (to_string(st) == s)
      {
        r.status = st;
        found = true;
      }
    if (!found)
      throw SchemaError("$.status", "unknown status '" + s + "'");
  }
  return r;
}

// ---------------------------------------------------------------------------
// OBJ glyphs

struct TriangleMesh
{
  std::vector<Vector3> vertices;
  std::vector<std::array<std::size_t, 3>> faces;
};

/// Unit icosphere: 10 * 4^subdiv + 2 vertices, 20 * 4^subdiv faces.
inline TriangleMesh icosphere(int subdiv)
{
  if (subdiv < 0 || subdiv > 8)
    throw ArgumentError("subdivision level must lie in [0, 8]");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh m;
  const double raw[12][3] = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                             {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (const auto &v : raw)
    m.vertices.push_back(Vector3(v[0], v[1], v[2]).normalized());
  m.faces = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
             {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};

  for (int level = 0; level < subdiv; ++level)
  {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> midpoint;
    auto mid = [&](std::size_t a, std::size_t b) {
      const auto key = std::minmax(a, b);
      const auto it = midpoint.find(key);
      if (it != midpoint.end())
        return it->second;
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      midpoint.emplace(key, m.vertices.size() - 1);
      return m.vertices.size() - 1;
    };
    std::vector<std::array<std::size_t, 3>> next;
    next.reserve(m.faces.size() * 4);
    for (const auto &f : m.faces)
    {
      const std::size_t ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.faces = std::move(next);
  }
  return m;
}

/// Radial plot r(v) = |sum a_m Y(3,m)(v)| over an icosphere.
inline TriangleMesh glyph_mesh(const Octupole &a, int subdiv)
{
  if (!a.finite())
    throw ArgumentError("octupole must be finite");
  if (a.coeffs.cwiseAbs().maxCoeff() == 0.0)
    throw ArgumentError("zero octupole has no glyph");
  TriangleMesh m = icosphere(subdiv);
  for (auto &v : m.vertices)
    v *= std::abs(evaluate(a, Direction(v)));
  return m;
}

inline void write_obj(std::ostream &out, const TriangleMesh &m)
{
  for (const auto &v : m.vertices)
    out << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z()) << '\n';
  for (const auto &f : m.faces)
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

} // namespace octaframe
