#include "nltracer/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nltracer/csv.hpp"
#include "nltracer/error.hpp"

namespace nltracer {

using nlohmann::json;

std::string_view to_string(Backend b) noexcept {
  switch (b) {
    case Backend::Direct: return "direct";
    case Backend::Memory: return "memory";
    case Backend::Both: return "both";
  }
  return "direct";
}

std::string_view to_string(Theorem t) noexcept {
  switch (t) {
    case Theorem::None: return "none";
    case Theorem::Theorem1: return "theorem1";
    case Theorem::Theorem2: return "theorem2";
  }
  return "none";
}

namespace {

std::string escape_pointer(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "at " + (where.empty() ? std::string("/") : where) + ": " + msg);
}

/// Cursor over one JSON object that rejects keys it was not told about.
class Node {
 public:
  Node(const json& j, std::string ptr, const std::filesystem::path& base)
      : j_(j), ptr_(std::move(ptr)), base_(base) {
    if (!j_.is_object()) fail(ptr_, "expected an object");
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, _] : j_.items())
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail(at(k), "unknown key '" + k + "'");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  std::string at(const std::string& key) const { return ptr_ + "/" + escape_pointer(key); }
  const std::string& ptr() const noexcept { return ptr_; }
  const std::filesystem::path& base() const noexcept { return base_; }

  Node child(const std::string& key) const {
    if (!has(key)) fail(at(key), "missing section");
    return Node(j_.at(key), at(key), base_);
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return number_at(j_.at(key), at(key));
  }

  std::optional<double> opt_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number_at(j_.at(key), at(key));
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    return count_at(j_.at(key), at(key));
  }

  std::optional<std::size_t> opt_count(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return count_at(j_.at(key), at(key));
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    return v.get<std::string>();
  }

  std::string required_str(const std::string& key) const {
    if (!has(key)) fail(at(key), "missing required string");
    return str(key, {});
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) fail(at(key), "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) const {
    if (!has(key)) return {};
    const auto& v = j_.at(key);
    if (!v.is_array()) fail(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number_at(v[i], at(key) + "/" + std::to_string(i)));
    return out;
  }

  const json& raw(const std::string& key) const { return j_.at(key); }

  static double number_at(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(where, "expected a finite number");
    return d;
  }

  static std::size_t count_at(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::size_t>(v.get<long long>());
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 9e15) return static_cast<std::size_t>(d);
    }
    fail(where, "expected a nonnegative integer");
  }

 private:
  const json& j_;
  std::string ptr_;
  std::filesystem::path base_;
};

template <class F>
auto construct(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::IoError) throw;
    fail(where, e.message());
  }
}

CsvTable read_table(const Node& n, const std::string& key) {
  const auto rel = n.str(key, {});
  const auto path = n.base().empty() ? std::filesystem::path(rel) : n.base() / rel;
  try {
    return read_csv(path);
  } catch (const Error& e) {
    fail(n.at(key), e.message());
  }
}

// --- problem pieces --------------------------------------------------------

VelocityField parse_velocity(const Node& n) {
  const auto family = n.required_str("family");
  if (family == "constant") {
    n.allow({"family", "u0"});
    return construct(n.ptr(), [&] { return VelocityField(ConstantVelocity{n.number("u0", 0.0)}); });
  }
  if (family == "tanh_shear") {
    n.allow({"family", "u_max", "ell", "offset"});
    TanhShear f;
    f.u_max = n.number("u_max", f.u_max);
    f.ell = n.number("ell", f.ell);
    f.offset = n.number("offset", f.offset);
    return construct(n.ptr(), [&] { return VelocityField(f); });
  }
  if (family == "linear_clip") {
    n.allow({"family", "slope", "x_cap", "offset"});
    LinearClip f;
    f.slope = n.number("slope", f.slope);
    f.x_cap = n.number("x_cap", f.x_cap);
    f.offset = n.number("offset", f.offset);
    return construct(n.ptr(), [&] { return VelocityField(f); });
  }
  fail(n.at("family"), "unknown velocity family '" + family + "' (constant, tanh_shear, linear_clip)");
}

Kernel parse_kernel(const Node& n) {
  const auto family = n.required_str("family");
  if (family == "saturating_exponential") {
    n.allow({"family", "a", "b", "gamma_k"});
    SaturatingExponential f;
    f.a = n.number("a", f.a);
    f.b = n.number("b", f.b);
    f.gamma_k = n.number("gamma_k", f.gamma_k);
    return construct(n.ptr(), [&] { return Kernel(f); });
  }
  if (family == "exponential_decay") {
    n.allow({"family", "beta", "gamma_k"});
    ExponentialDecay f;
    f.beta = n.number("beta", f.beta);
    f.gamma_k = n.number("gamma_k", f.gamma_k);
    return construct(n.ptr(), [&] { return Kernel(f); });
  }
  if (family == "tabulated") {
    n.allow({"family", "t", "k", "csv", "h_fd", "source"});
    TabulatedKernel f;
    f.h_fd = n.number("h_fd", f.h_fd);
    if (n.has("csv")) {
      if (n.has("t") || n.has("k")) fail(n.at("csv"), "give either csv or inline t/k, not both");
      const auto table = read_table(n, "csv");
      f.t = construct(n.at("csv"), [&] { return table.values("t"); });
      f.k = construct(n.at("csv"), [&] { return table.values("k"); });
      f.source = n.str("csv", {});
    } else {
      f.t = n.numbers("t");
      f.k = n.numbers("k");
      f.source = n.str("source", {});
    }
    return construct(n.ptr(), [&] { return Kernel(f); });
  }
  fail(n.at("family"), "unknown kernel family '" + family + "' (saturating_exponential, exponential_decay, tabulated)");
}

Profile parse_profile(const Node& n) {
  const auto family = n.required_str("family");
  if (family == "gaussian") {
    n.allow({"family", "amplitude", "center", "sigma"});
    GaussianPulse f;
    f.amplitude = n.number("amplitude", f.amplitude);
    f.center = n.number("center", f.center);
    f.sigma = n.number("sigma", f.sigma);
    return construct(n.ptr(), [&] { return Profile(f); });
  }
  if (family == "box") {
    n.allow({"family", "amplitude", "center", "width"});
    BoxPulse f;
    f.amplitude = n.number("amplitude", f.amplitude);
    f.center = n.number("center", f.center);
    f.width = n.number("width", f.width);
    return construct(n.ptr(), [&] { return Profile(f); });
  }
  if (family == "tabulated") {
    n.allow({"family", "x", "c", "csv", "source"});
    TabulatedProfile f;
    if (n.has("csv")) {
      const auto table = read_table(n, "csv");
      f.x = construct(n.at("csv"), [&] { return table.values("x"); });
      f.c = construct(n.at("csv"), [&] { return table.values("c"); });
      f.source = n.str("csv", {});
    } else {
      f.x = n.numbers("x");
      f.c = n.numbers("c");
      f.source = n.str("source", {});
    }
    return construct(n.ptr(), [&] { return Profile(f); });
  }
  fail(n.at("family"), "unknown profile family '" + family + "' (gaussian, box, tabulated)");
}

// Long-format table (tau, x, c) on a complete tensor grid.
TabulatedInTime prehistory_from_table(const CsvTable& table, const std::string& where) {
  const auto tau = construct(where, [&] { return table.values("tau"); });
  const auto x = construct(where, [&] { return table.values("x"); });
  const auto c = construct(where, [&] { return table.values("c"); });
  std::set<double> taus(tau.begin(), tau.end());
  std::set<double> xs(x.begin(), x.end());
  TabulatedInTime p;
  p.tau.assign(taus.begin(), taus.end());
  p.x.assign(xs.begin(), xs.end());
  if (p.tau.size() * p.x.size() != tau.size()) fail(where, "prehistory CSV is not a complete (tau, x) grid");
  std::map<std::pair<double, double>, double> cell;
  for (std::size_t r = 0; r < tau.size(); ++r)
    if (!cell.emplace(std::make_pair(tau[r], x[r]), c[r]).second) fail(where, "duplicate (tau, x) row");
  p.values.reserve(tau.size());
  for (double tq : p.tau)
    for (double xq : p.x) p.values.push_back(cell.at({tq, xq}));
  return p;
}

Prehistory parse_prehistory(const Node& n) {
  const auto family = n.required_str("family");
  if (family == "zero") {
    n.allow({"family"});
    return ZeroPrehistory{};
  }
  if (family == "constant_in_time") {
    n.allow({"family", "profile", "depth"});
    ConstantInTime p;
    p.profile = parse_profile(n.child("profile"));
    p.depth = n.number("depth", p.depth);
    if (p.depth < 0.0) fail(n.at("depth"), "depth must be nonnegative");
    return p;
  }
  if (family == "tabulated") {
    n.allow({"family", "tau", "x", "values", "csv", "source"});
    TabulatedInTime p;
    if (n.has("csv")) {
      p = prehistory_from_table(read_table(n, "csv"), n.at("csv"));
      p.source = n.str("csv", {});
      return p;
    }
    p.tau = n.numbers("tau");
    p.x = n.numbers("x");
    p.source = n.str("source", {});
    if (!n.has("values") || !n.raw("values").is_array()) fail(n.at("values"), "expected an array of rows");
    const auto& rows = n.raw("values");
    if (rows.size() != p.tau.size()) fail(n.at("values"), "need one row per tau value");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto where = n.at("values") + "/" + std::to_string(r);
      if (!rows[r].is_array() || rows[r].size() != p.x.size()) fail(where, "row length must equal x length");
      for (std::size_t i = 0; i < rows[r].size(); ++i)
        p.values.push_back(Node::number_at(rows[r][i], where + "/" + std::to_string(i)));
    }
    return p;
  }
  fail(n.at("family"), "unknown prehistory family '" + family + "' (zero, constant_in_time, tabulated)");
}

ProblemSpec parse_problem(const Node& n) {
  n.allow({"diffusivity", "velocity", "kernel", "half_width", "initial_condition", "prehistory", "t_final"});
  ProblemSpec p;
  p.diffusivity = n.number("diffusivity", p.diffusivity);
  if (n.has("velocity")) p.velocity = parse_velocity(n.child("velocity"));
  if (n.has("kernel")) p.kernel = parse_kernel(n.child("kernel"));
  p.half_width = n.number("half_width", p.half_width);
  if (n.has("initial_condition")) p.initial_condition = parse_profile(n.child("initial_condition"));
  if (n.has("prehistory")) p.prehistory = parse_prehistory(n.child("prehistory"));
  p.t_final = n.number("t_final", p.t_final);
  return p;
}

NumericsConfig parse_numerics(const Node& n) {
  n.allow({"n_x", "dt", "n_s", "s_max", "trace_stride", "tail_tol", "boundary_tol", "inequality_tol",
           "condition_tol", "delta"});
  NumericsConfig c;
  c.n_x = n.count("n_x", c.n_x);
  c.dt = n.number("dt", c.dt);
  c.n_s = n.opt_count("n_s");
  c.s_max = n.opt_number("s_max");
  c.trace_stride = n.count("trace_stride", c.trace_stride);
  c.tail_tol = n.number("tail_tol", c.tail_tol);
  c.boundary_tol = n.number("boundary_tol", c.boundary_tol);
  c.inequality_tol = n.number("inequality_tol", c.inequality_tol);
  c.condition_tol = n.number("condition_tol", c.condition_tol);
  c.delta = n.opt_number("delta");
  if (c.n_x == 0) fail(n.at("n_x"), "n_x must be positive");
  if (!(c.dt > 0.0)) fail(n.at("dt"), "dt must be positive");
  if (c.n_s && *c.n_s == 0) fail(n.at("n_s"), "n_s must be positive");
  if (c.s_max && !(*c.s_max > 0.0)) fail(n.at("s_max"), "s_max must be positive");
  if (c.trace_stride == 0) fail(n.at("trace_stride"), "trace_stride must be positive");
  for (const char* key : {"tail_tol", "boundary_tol", "inequality_tol", "condition_tol"})
    if (n.has(key) && !(n.number(key, 0.0) >= 0.0)) fail(n.at(key), "tolerance must be nonnegative");
  if (c.delta && !(*c.delta > 0.0)) fail(n.at("delta"), "delta must be positive");
  return c;
}

OutputConfig parse_output(const Node& n) {
  n.allow({"directory", "snapshot_times", "eta_slices"});
  OutputConfig o;
  o.directory = n.str("directory", o.directory);
  o.snapshot_times = n.numbers("snapshot_times");
  o.eta_slices = n.boolean("eta_slices", o.eta_slices);
  return o;
}

SweepConfig parse_sweep(const Node& n) {
  n.allow({"parameter", "values", "jobs"});
  SweepConfig s;
  s.parameter = n.required_str("parameter");
  s.values = n.numbers("values");
  s.jobs = n.count("jobs", s.jobs);
  if (s.values.empty()) fail(n.at("values"), "sweep needs at least one value");
  if (s.jobs == 0) fail(n.at("jobs"), "jobs must be positive");
  return s;
}

LemmaConfig parse_lemma(const Node& n) {
  n.allow({"beta0", "gamma", "quad_n", "intervals"});
  LemmaConfig l;
  l.beta0 = n.opt_number("beta0");
  l.gamma = n.opt_number("gamma");
  if (l.beta0.has_value() != l.gamma.has_value()) fail(n.ptr(), "give both beta0 and gamma or neither");
  l.quad_n = n.count("quad_n", l.quad_n);
  if (l.quad_n < 4) fail(n.at("quad_n"), "quad_n must be at least 4");
  if (n.has("intervals")) {
    const auto& arr = n.raw("intervals");
    if (!arr.is_array()) fail(n.at("intervals"), "expected an array of [t0, t1] pairs");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto where = n.at("intervals") + "/" + std::to_string(i);
      if (!arr[i].is_array() || arr[i].size() != 2) fail(where, "expected [t0, t1]");
      const double t0 = Node::number_at(arr[i][0], where + "/0");
      const double t1 = Node::number_at(arr[i][1], where + "/1");
      if (!(t0 >= 0.0 && t1 > t0)) fail(where, "need 0 <= t0 < t1");
      l.intervals.emplace_back(t0, t1);
    }
  }
  return l;
}

// --- serialization -----------------------------------------------------------

json velocity_json(const VelocityField& v) {
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ConstantVelocity>) return {{"family", "constant"}, {"u0", f.u0}};
        else if constexpr (std::is_same_v<T, TanhShear>)
          return {{"family", "tanh_shear"}, {"u_max", f.u_max}, {"ell", f.ell}, {"offset", f.offset}};
        else
          return {{"family", "linear_clip"}, {"slope", f.slope}, {"x_cap", f.x_cap}, {"offset", f.offset}};
      },
      v.family());
}

json kernel_json(const Kernel& k) {
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SaturatingExponential>)
          return {{"family", "saturating_exponential"}, {"a", f.a}, {"b", f.b}, {"gamma_k", f.gamma_k}};
        else if constexpr (std::is_same_v<T, ExponentialDecay>)
          return {{"family", "exponential_decay"}, {"beta", f.beta}, {"gamma_k", f.gamma_k}};
        else {
          json j = {{"family", "tabulated"}, {"t", f.t}, {"k", f.k}, {"h_fd", f.h_fd}};
          if (!f.source.empty()) j["source"] = f.source;
          return j;
        }
      },
      k.family());
}

json profile_json(const Profile& p) {
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, GaussianPulse>)
          return {{"family", "gaussian"}, {"amplitude", f.amplitude}, {"center", f.center}, {"sigma", f.sigma}};
        else if constexpr (std::is_same_v<T, BoxPulse>)
          return {{"family", "box"}, {"amplitude", f.amplitude}, {"center", f.center}, {"width", f.width}};
        else {
          json j = {{"family", "tabulated"}, {"x", f.x}, {"c", f.c}};
          if (!f.source.empty()) j["source"] = f.source;
          return j;
        }
      },
      p.family());
}

json prehistory_json(const Prehistory& p) {
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ZeroPrehistory>) return {{"family", "zero"}};
        else if constexpr (std::is_same_v<T, ConstantInTime>)
          return {{"family", "constant_in_time"}, {"profile", profile_json(f.profile)}, {"depth", f.depth}};
        else {
          json rows = json::array();
          for (std::size_t r = 0; r < f.tau.size(); ++r)
            rows.push_back(std::vector<double>(f.values.begin() + static_cast<std::ptrdiff_t>(r * f.x.size()),
                                               f.values.begin() + static_cast<std::ptrdiff_t>((r + 1) * f.x.size())));
          json j = {{"family", "tabulated"}, {"tau", f.tau}, {"x", f.x}, {"values", rows}};
          if (!f.source.empty()) j["source"] = f.source;
          return j;
        }
      },
      p);
}

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

Backend parse_backend(const Node& n) {
  const auto s = n.str("backend", "direct");
  if (s == "direct") return Backend::Direct;
  if (s == "memory") return Backend::Memory;
  if (s == "both") return Backend::Both;
  fail(n.at("backend"), "backend must be direct, memory or both");
}

Theorem parse_checks(const Node& n) {
  n.allow({"theorem"});
  const auto s = n.str("theorem", "none");
  if (s == "none") return Theorem::None;
  if (s == "theorem1") return Theorem::Theorem1;
  if (s == "theorem2") return Theorem::Theorem2;
  fail(n.at("theorem"), "theorem must be none, theorem1 or theorem2");
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte > 0 ? byte - 1 : 0, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

RunConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  const Node root(j, "", base_dir);
  root.allow({"schema_version", "problem", "numerics", "backend", "checks", "output", "sweep", "lemma"});
  RunConfig cfg;
  if (root.has("schema_version")) {
    const auto v = Node::count_at(root.raw("schema_version"), root.at("schema_version"));
    if (v != static_cast<std::size_t>(kConfigSchemaVersion))
      fail(root.at("schema_version"), "unsupported schema_version " + std::to_string(v));
  }
  if (root.has("problem")) cfg.problem = parse_problem(root.child("problem"));
  if (root.has("numerics")) cfg.numerics = parse_numerics(root.child("numerics"));
  cfg.backend = parse_backend(root);
  if (root.has("checks")) cfg.theorem = parse_checks(root.child("checks"));
  if (root.has("output")) cfg.output = parse_output(root.child("output"));
  if (root.has("sweep")) cfg.sweep = parse_sweep(root.child("sweep"));
  if (root.has("lemma")) cfg.lemma = parse_lemma(root.child("lemma"));
  return cfg;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::ostringstream os;
    os << "line " << line << ", column " << col << ": " << e.what();
    throw Error(ErrorCode::ParseError, os.str());
  }
  return config_from_json(j, base_dir);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), path.parent_path());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.message());
  }
}

json config_to_json(const RunConfig& cfg) {
  const auto& p = cfg.problem;
  json problem = {
      {"diffusivity", p.diffusivity},
      {"velocity", velocity_json(p.velocity)},
      {"kernel", kernel_json(p.kernel)},
      {"half_width", p.half_width},
      {"initial_condition", profile_json(p.initial_condition)},
      {"prehistory", prehistory_json(p.prehistory)},
      {"t_final", p.t_final},
  };
  const auto& n = cfg.numerics;
  json numerics = {
      {"n_x", n.n_x},
      {"dt", n.dt},
      {"trace_stride", n.trace_stride},
      {"tail_tol", n.tail_tol},
      {"boundary_tol", n.boundary_tol},
      {"inequality_tol", n.inequality_tol},
      {"condition_tol", n.condition_tol},
  };
  put_optional(numerics, "n_s", n.n_s);
  put_optional(numerics, "s_max", n.s_max);
  put_optional(numerics, "delta", n.delta);

  json j = {
      {"schema_version", cfg.schema_version},
      {"problem", problem},
      {"numerics", numerics},
      {"backend", std::string(to_string(cfg.backend))},
      {"checks", {{"theorem", std::string(to_string(cfg.theorem))}}},
      {"output",
       {{"directory", cfg.output.directory},
        {"snapshot_times", cfg.output.snapshot_times},
        {"eta_slices", cfg.output.eta_slices}}},
  };
  if (cfg.sweep)
    j["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}, {"jobs", cfg.sweep->jobs}};
  if (cfg.lemma) {
    json l = {{"quad_n", cfg.lemma->quad_n}};
    put_optional(l, "beta0", cfg.lemma->beta0);
    put_optional(l, "gamma", cfg.lemma->gamma);
    json iv = json::array();
    for (const auto& [a, b] : cfg.lemma->intervals) iv.push_back({a, b});
    l["intervals"] = iv;
    j["lemma"] = l;
  }
  return j;
}

std::string serialize_config(const RunConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

RunConfig with_parameter(const RunConfig& cfg, const std::string& dotted_path, double value) {
  json j = config_to_json(cfg);
  std::string ptr;
  std::istringstream in(dotted_path);
  std::string part;
  while (std::getline(in, part, '.')) {
    if (part.empty()) throw Error(ErrorCode::ParseError, "empty component in parameter path '" + dotted_path + "'");
    ptr += "/" + escape_pointer(part);
  }
  if (ptr.empty()) throw Error(ErrorCode::ParseError, "empty parameter path");
  const json::json_pointer p(ptr);
  if (!j.contains(p.parent_pointer()) || !j.at(p.parent_pointer()).is_object())
    throw Error(ErrorCode::ParseError, "parameter path '" + dotted_path + "' does not name a config field");
  const bool integral = j.contains(p) && j.at(p).is_number_integer();
  if (j.contains(p) && !j.at(p).is_number())
    throw Error(ErrorCode::ParseError, "parameter '" + dotted_path + "' is not numeric");
  if (integral) {
    if (value < 0.0 || value != std::floor(value))
      throw Error(ErrorCode::ParseError, "parameter '" + dotted_path + "' needs a nonnegative integer");
    j[p] = static_cast<std::size_t>(value);
  } else {
    j[p] = value;
  }
  return config_from_json(j);
}

}  // namespace nltracer
