#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>

namespace decolab::cli {

namespace {

enum class Kind { number, integer, string, boolean, time, object, numbers, integers, points, coefficients };

struct Field {
  std::string key;
  Kind kind;
  bool required = false;
  json def = nullptr;  // null: absent unless given
  double min = -std::numeric_limits<double>::infinity();
  std::vector<std::string> choices{};
  std::vector<Field> sub{};
};

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::number: return "number";
    case Kind::integer: return "integer";
    case Kind::string: return "string";
    case Kind::boolean: return "boolean";
    case Kind::time: return "time node {unit, start, stop, count} or {unit, values}";
    case Kind::object: return "object";
    case Kind::numbers: return "array of numbers";
    case Kind::integers: return "array of integers";
    case Kind::points: return "array of [x, p] pairs";
    case Kind::coefficients: return "array of numbers or [re, im] pairs";
  }
  return "?";
}

bool is_int(const json& v) { return v.is_number_integer() || (v.is_number() && std::floor(v.get<double>()) == v.get<double>()); }

void check_time(const json& v, const std::string& path, const std::set<std::string>& units) {
  if (!v.is_object()) throw SchemaError(path + ": expected " + std::string(kind_name(Kind::time)));
  for (auto it = v.begin(); it != v.end(); ++it)
    if (it.key() != "unit" && it.key() != "start" && it.key() != "stop" && it.key() != "count" && it.key() != "values")
      throw SchemaError(path + ": unknown key '" + it.key() + "'");
  if (!v.contains("unit") || !v["unit"].is_string()) throw SchemaError(path + ": missing unit tag");
  std::string u = v["unit"];
  if (!units.count(u)) {
    std::string allowed;
    for (const auto& a : units) allowed += (allowed.empty() ? "" : ", ") + a;
    throw SchemaError(path + ": unit '" + u + "' not allowed here (expected " + allowed + ")");
  }
  if (v.contains("values")) {
    if (v.contains("start") || v.contains("stop") || v.contains("count"))
      throw SchemaError(path + ": give either values or start/stop/count");
    if (!v["values"].is_array()) throw SchemaError(path + ".values: expected array of numbers");
    double prev = -INFINITY;
    for (const auto& x : v["values"]) {
      if (!x.is_number()) throw SchemaError(path + ".values: expected array of numbers");
      if (!(x.get<double>() > prev)) throw SchemaError(path + ".values: must be strictly ascending");
      if (x.get<double>() < 0) throw SchemaError(path + ".values: times must be non-negative");
      prev = x.get<double>();
    }
    return;
  }
  for (const char* k : {"start", "stop", "count"})
    if (!v.contains(k) || !v[k].is_number()) throw SchemaError(path + ": missing numeric '" + k + "'");
  if (!is_int(v["count"]) || v["count"].get<double>() < 2) throw SchemaError(path + ".count: integer >= 2 required");
  if (v["start"].get<double>() < 0 || !(v["stop"].get<double>() > v["start"].get<double>()))
    throw SchemaError(path + ": need 0 <= start < stop");
}

json validate(const json& in, const std::vector<Field>& schema, const std::string& path,
              const std::set<std::string>& units) {
  if (!in.is_object()) throw SchemaError(path + ": expected object");
  std::set<std::string> known;
  for (const auto& f : schema) known.insert(f.key);
  for (auto it = in.begin(); it != in.end(); ++it)
    if (!known.count(it.key())) throw SchemaError(path + ": unknown key '" + it.key() + "'");
  json out = json::object();
  for (const auto& f : schema) {
    const std::string p = path + "." + f.key;
    if (!in.contains(f.key)) {
      if (f.required) throw SchemaError(p + ": required");
      if (f.kind == Kind::object && f.def.is_null() && !f.sub.empty() && !f.required) {
        // nested object with defaults
        bool has_default = false;
        for (const auto& s : f.sub) has_default |= !s.def.is_null();
        if (has_default) out[f.key] = validate(json::object(), f.sub, p, units);
      } else if (!f.def.is_null()) {
        out[f.key] = f.def;
      }
      continue;
    }
    const json& v = in[f.key];
    auto fail = [&]() { throw SchemaError(p + ": expected " + std::string(kind_name(f.kind))); };
    switch (f.kind) {
      case Kind::number:
        if (!v.is_number()) fail();
        if (v.get<double>() < f.min) throw SchemaError(p + ": must be >= " + std::to_string(f.min));
        out[f.key] = v;
        break;
      case Kind::integer:
        if (!v.is_number() || !is_int(v)) fail();
        if (v.get<double>() < f.min) throw SchemaError(p + ": must be >= " + std::to_string(static_cast<long>(f.min)));
        out[f.key] = v.get<long>();
        break;
      case Kind::string:
        if (!v.is_string()) fail();
        if (!f.choices.empty() && std::find(f.choices.begin(), f.choices.end(), v.get<std::string>()) == f.choices.end()) {
          std::string c;
          for (const auto& s : f.choices) c += (c.empty() ? "" : ", ") + s;
          throw SchemaError(p + ": must be one of " + c);
        }
        out[f.key] = v;
        break;
      case Kind::boolean:
        if (!v.is_boolean()) fail();
        out[f.key] = v;
        break;
      case Kind::time:
        check_time(v, p, units);
        out[f.key] = v;
        break;
      case Kind::object:
        out[f.key] = validate(v, f.sub, p, units);
        break;
      case Kind::numbers:
        if (!v.is_array() || v.empty()) fail();
        for (const auto& x : v)
          if (!x.is_number() || x.get<double>() < f.min) fail();
        out[f.key] = v;
        break;
      case Kind::integers:
        if (!v.is_array() || v.empty()) fail();
        for (const auto& x : v)
          if (!x.is_number() || !is_int(x) || x.get<double>() < f.min) throw SchemaError(p + ": integers >= " + std::to_string(static_cast<long>(f.min)) + " required");
        out[f.key] = v;
        break;
      case Kind::points:
        if (!v.is_array() || v.empty()) fail();
        for (const auto& x : v)
          if (!x.is_array() || x.size() != 2 || !x[0].is_number() || !x[1].is_number()) fail();
        out[f.key] = v;
        break;
      case Kind::coefficients:
        if (!v.is_array() || v.empty()) fail();
        for (const auto& x : v)
          if (!x.is_number() && !(x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number())) fail();
        out[f.key] = v;
        break;
    }
  }
  return out;
}

Field num(std::string k, json def, double min = -INFINITY) { return {std::move(k), Kind::number, def.is_null(), def, min}; }
Field req_num(std::string k, double min = -INFINITY) { return {std::move(k), Kind::number, true, nullptr, min}; }
Field integer(std::string k, json def, double min = -INFINITY) { return {std::move(k), Kind::integer, def.is_null(), def, min}; }
Field flag(std::string k, bool def) { return {std::move(k), Kind::boolean, false, def}; }
Field choice(std::string k, std::string def, std::vector<std::string> c) {
  return {std::move(k), Kind::string, false, def, -INFINITY, std::move(c)};
}
Field time(std::string k, bool required) { return {std::move(k), Kind::time, required}; }
Field object(std::string k, std::vector<Field> sub, bool required = false) {
  return {std::move(k), Kind::object, required, nullptr, -INFINITY, {}, std::move(sub)};
}

std::vector<Field> morse_grid() { return {num("x_min", -2.0), num("x_max", 30.0), integer("points", 2048, 16)}; }
std::vector<Field> planar_grid() {
  return {num("x_min", -1.5), num("x_max", 2.5), integer("nx", 256, 2), num("p_min", -40.0), num("p_max", 40.0),
          integer("np", 256, 2)};
}
std::vector<Field> sphere_grid(int nt, int np) { return {integer("n_theta", nt, 0), integer("n_phi", np, 0)}; }

struct Schema {
  std::vector<Field> params, numerics;
};

Schema schema_for(const std::string& e) {
  if (e == "morse-free")
    return {{num("s", 54.54, 1.0),
             {"points", Kind::points, true},
             time("times", true),
             flag("bohr_spectrum", false),
             num("bin_width", 0.01, 1e-6),
             flag("nonclassicality", false),
             time("wigner_times", false),
             {"revival_window", Kind::numbers, false, nullptr, 0}},
            {object("grid", morse_grid()), integer("n_basis", 150, 2), object("wigner", planar_grid())}};
  if (e == "morse-decoherence")
    return {{num("s", 54.54, 1.0),
             object("initial",
                    {choice("kind", "coherent", {"coherent", "eigenstate"}), num("x0", 0.0), num("p0", 0.0),
                     integer("n", 0, 0)},
                    true),
             req_num("temperature", 0),
             req_num("omega_over_gamma", 1e-12),
             choice("generator", "full", {"full", "secular"}),
             time("times", true),
             time("wigner_times", false),
             choice("knee_field", "entropy", {"entropy", "linear_entropy"}),
             flag("phase_portrait", false),
             flag("snapshots", false)},
            {object("grid", morse_grid()), integer("n_basis", 150, 2), object("wigner", planar_grid()),
             num("tol", 1e-9, 1e-14), num("eig_floor", -1e-7)}};
  if (e == "dicke-cat")
    return {{integer("N", nullptr, 1),
             req_num("n_bar", 0),
             num("gamma", 1.0, 1e-300),
             object("cat", {req_num("beta1"), num("phi1", 0.0), req_num("beta2"), num("phi2", 0.0)}, true),
             time("times", true),
             flag("entropy", true),
             flag("classical_distance", false),
             flag("evolved_reference", false),
             choice("knee_field", "linear_entropy", {"entropy", "linear_entropy"}),
             object("sweep", {{"beta1", Kind::numbers, true}, {"beta2", Kind::numbers, true}}),
             time("wigner_times", false),
             time("dissipation_times", false)},
            {num("tol", 1e-10, 1e-14), num("eig_floor", -1e-7), object("sphere", sphere_grid(0, 0))}};
  if (e == "cat4-wigner")
    return {{integer("N", nullptr, 2), req_num("n_bar", 0), num("gamma", 1.0, 1e-300), time("times", true),
             num("cap_radius", 0.3, 1e-3)},
            {num("tol", 1e-10, 1e-14), object("sphere", sphere_grid(180, 360))}};
  if (e == "subradiant-prep")
    return {{req_num("delta_over_g"),
             {"atoms", Kind::integers, true, nullptr, 2},
             integer("photons", 0, 0),
             integer("n_max", 0, 0),
             {"field_distribution", Kind::coefficients, false},
             time("subradiance_horizon", false),
             num("g_over_2pi_hz", 0.0, 0)},
            {integer("scan_points", 2000, 3)}};
  if (e == "toy-dephasing")
    return {{{"coefficients", Kind::coefficients, true},
             object("schedule", {choice("kind", "exponential", {"exponential", "gaussian"}), req_num("rate", 0)}, true),
             time("times", true)},
            {}};
  throw SchemaError("experiment: unknown experiment '" + e + "'");
}

}  // namespace

const std::vector<std::string>& experiments() {
  static const std::vector<std::string> e{"morse-free",      "morse-decoherence", "dicke-cat",
                                          "cat4-wigner",     "subradiant-prep",   "toy-dephasing"};
  return e;
}

std::string time_unit(const std::string& e) {
  if (e == "morse-free" || e == "morse-decoherence") return "t0";
  if (e == "dicke-cat" || e == "cat4-wigner") return "1/gamma";
  if (e == "subradiant-prep") return "1/g";
  if (e == "toy-dephasing") return "1/rate";
  throw SchemaError("experiment: unknown experiment '" + e + "'");
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw SchemaError("config: top level must be an object");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "schema_version" && it.key() != "experiment" && it.key() != "name" && it.key() != "output_dir" &&
        it.key() != "params" && it.key() != "numerics")
      throw SchemaError("config: unknown key '" + it.key() + "'");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
    throw SchemaError("config.schema_version: required integer");
  if (doc["schema_version"].get<int>() != kSchemaVersion)
    throw SchemaError("config.schema_version: unsupported version " + doc["schema_version"].dump());
  if (!doc.contains("experiment") || !doc["experiment"].is_string()) throw SchemaError("config.experiment: required string");

  ExperimentConfig c;
  c.experiment = doc["experiment"];
  Schema s = schema_for(c.experiment);
  std::set<std::string> units{time_unit(c.experiment)};
  if (c.experiment == "dicke-cat") units.insert("tau_dec");
  for (const char* k : {"name", "output_dir"})
    if (doc.contains(k) && !doc[k].is_string()) throw SchemaError(std::string("config.") + k + ": expected string");
  c.name = doc.value("name", c.experiment);
  c.output_dir = doc.value("output_dir", c.name);
  if (c.output_dir.empty()) throw SchemaError("config.output_dir: empty");
  c.params = validate(doc.value("params", json::object()), s.params, "params", units);
  c.numerics = validate(doc.value("numerics", json::object()), s.numerics, "numerics", units);
  if (c.experiment == "dicke-cat" && c.params.contains("wigner_times") && c.params["wigner_times"]["unit"] == "tau_dec")
    throw SchemaError("params.wigner_times: unit must be 1/gamma");

  c.source = json::object();
  c.source["schema_version"] = kSchemaVersion;
  c.source["experiment"] = c.experiment;
  c.source["name"] = c.name;
  c.source["output_dir"] = c.output_dir;
  c.source["params"] = c.params;
  c.source["numerics"] = c.numerics;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return parse_config(doc);
}

TimeSpec time_spec(const json& node) {
  TimeSpec t;
  t.unit = node["unit"];
  if (node.contains("values")) {
    for (const auto& v : node["values"]) t.values.push_back(v.get<double>());
    return t;
  }
  const double a = node["start"], b = node["stop"];
  const int n = node["count"].get<int>();
  for (int i = 0; i < n; ++i) t.values.push_back(a + (b - a) * i / (n - 1));
  return t;
}

namespace {

json grid_times(const char* unit, double start, double stop, int count) {
  return {{"unit", unit}, {"start", start}, {"stop", stop}, {"count", count}};
}
json list_times(const char* unit, std::vector<double> v) { return {{"unit", unit}, {"values", v}}; }

json doc(const char* experiment, const char* name, json params, json numerics = json::object()) {
  return {{"schema_version", kSchemaVersion}, {"experiment", experiment}, {"name", name}, {"output_dir", name},
          {"params", params}, {"numerics", numerics}};
}

}  // namespace

const std::vector<Preset>& presets() {
  const double pi = std::numbers::pi;
  static const std::vector<Preset> p{
      {"fig-xexp", "xexp", "Morse <X>(t), NO molecule, x0 = 1.0, 0.5, 0.06", 60,
       doc("morse-free", "fig-xexp",
           {{"points", {{1.0, 0.0}, {0.5, 0.0}, {0.06, 0.0}}}, {"times", grid_times("t0", 0, 150, 3001)}})},
      {"fig-freqs", "freqs", "Bohr-frequency weights of <X> for (0.5, 0)", 30,
       doc("morse-free", "fig-freqs",
           {{"points", {{0.5, 0.0}}},
            {"times", grid_times("t0", 0, 150, 3001)},
            {"bohr_spectrum", true},
            {"revival_window", {100, 120}}})},
      {"fig-wigs", "wigs", "Morse cat formation: Wigner function of (0.5, 0) at t/t0 = 0 and 30", 30,
       doc("morse-free", "fig-wigs",
           {{"points", {{0.5, 0.0}}},
            {"times", grid_times("t0", 0, 40, 401)},
            {"wigner_times", list_times("t0", {0, 30})}})},
      {"fig-noncl", "noncl", "Nonclassicality M_nc(t) for x0 = 1.0, 0.5, 0.06", 300,
       doc("morse-free", "fig-noncl",
           {{"points", {{1.0, 0.0}, {0.5, 0.0}, {0.06, 0.0}}},
            {"times", grid_times("t0", 0, 100, 401)},
            {"nonclassicality", true}},
           {{"wigner", {{"x_min", -1.5}, {"x_max", 3.5}, {"nx", 256}, {"p_min", -45}, {"p_max", 45}, {"np", 256}}}})},
      {"fig-portrait", "portrait", "Phase portrait of (0.5, 0) under decoherence, lambda1, T = 5", 900,
       doc("morse-decoherence", "fig-portrait",
           {{"initial", {{"kind", "coherent"}, {"x0", 0.5}, {"p0", 0.0}}},
            {"temperature", 5.0},
            {"omega_over_gamma", 1e5},
            {"times", grid_times("t0", 0, 300, 6001)},
            {"phase_portrait", true}},
           {{"eig_floor", -1e-3}})},
      {"fig-dtdef", "dtdef", "Entropy and purity of (2.0, 0), lambda1, T = 10; knee gives t_d", 600,
       doc("morse-decoherence", "fig-dtdef",
           {{"initial", {{"kind", "coherent"}, {"x0", 2.0}, {"p0", 0.0}}},
            {"temperature", 10.0},
            {"omega_over_gamma", 1e5},
            {"times", grid_times("t0", 0, 400, 401)}},
           {{"eig_floor", -1e-3}})},
      {"fig-wig1", "wig1", "Decoherence of (0.5, 0), lambda2, T = 0.3; Wigner at t/t0 = 0, 27.5, 137.5", 600,
       doc("morse-decoherence", "fig-wig1",
           {{"initial", {{"kind", "coherent"}, {"x0", 0.5}, {"p0", 0.0}}},
            {"temperature", 0.3},
            {"omega_over_gamma", 4e3},
            {"times", grid_times("t0", 0, 200, 401)},
            {"wigner_times", list_times("t0", {0, 27.5, 137.5})}},
           {{"eig_floor", -1e-3}})},
      {"fig-wig2", "wig2", "Decoherence of the n = 5 eigenstate, lambda1, T = 10; t/t0 = 0, 27.5, 330, 1000", 1800,
       doc("morse-decoherence", "fig-wig2",
           {{"initial", {{"kind", "eigenstate"}, {"n", 5}}},
            {"temperature", 10.0},
            {"omega_over_gamma", 1e5},
            {"times", grid_times("t0", 0, 1000, 401)},
            {"wigner_times", list_times("t0", {0, 27.5, 330, 1000})}},
           {{"eig_floor", -1e-3}})},
      {"fig-scales", "scales", "Dicke cat N = 500, n_bar = 1, tau1 = tan(pi/4), tau2 = 0: S_lin, energy, knee", 1800,
       doc("dicke-cat", "fig-scales",
           {{"N", 500},
            {"n_bar", 1.0},
            {"cat", {{"beta1", pi / 2}, {"beta2", 0.0}}},
            {"times", grid_times("tau_dec", 0, 40, 201)},
            {"dissipation_times", grid_times("1/gamma", 0, 0.008, 81)},
            {"entropy", false}},
           {{"tol", 1e-11}})},
      {"fig-fastdec", "fastdec", "Same cat as fig-scales with the distance to the classical mixture", 1800,
       doc("dicke-cat", "fig-fastdec",
           {{"N", 500},
            {"n_bar", 1.0},
            {"cat", {{"beta1", pi / 2}, {"beta2", 0.0}}},
            {"times", grid_times("tau_dec", 0, 40, 201)},
            {"entropy", false},
            {"classical_distance", true}},
           {{"tol", 1e-11}})},
      {"fig-dectimes", "dectimes", "t_d over (beta1, beta2) for N = 50, n_bar = 3", 1200,
       doc("dicke-cat", "fig-dectimes",
           {{"N", 50},
            {"n_bar", 3.0},
            {"cat", {{"beta1", pi / 3}, {"beta2", 0.0}}},
            {"times", grid_times("tau_dec", 0, 40, 201)},
            {"entropy", false},
            {"sweep",
             {{"beta1", {pi / 6, pi / 3, pi / 2, 2 * pi / 3, 5 * pi / 6}},
              {"beta2", {0.0, pi / 6, pi / 3, pi / 2, 2 * pi / 3, 5 * pi / 6}}}}})},
      {"fig-wigfig", "wigfig", "Tetrahedron four-component cat, N = 50, n_bar = 0; t = 0, 0.015, 0.04 /gamma", 120,
       doc("cat4-wigner", "fig-wigfig",
           {{"N", 50}, {"n_bar", 0.0}, {"times", list_times("1/gamma", {0, 0.015, 0.04})}})},
      {"fig-tmodfig", "tmodfig", "Subradiant preparation: t_m and distance vs N at Delta/g = 30", 120,
       doc("subradiant-prep", "fig-tmodfig",
           {{"delta_over_g", 30.0},
            {"atoms", {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20}},
            {"g_over_2pi_hz", 24e3}})},
      {"toy-dephasing", "pointer", "Pointer-basis dephasing of a random superposition", 5,
       doc("toy-dephasing", "toy-dephasing",
           {{"coefficients", {0.6, {0.0, 0.48}, -0.64}},
            {"schedule", {{"kind", "exponential"}, {"rate", 1.0}}},
            {"times", grid_times("1/rate", 0, 10, 101)}})},
  };
  return p;
}

const Preset* find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace decolab::cli
