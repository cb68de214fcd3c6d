#include "logem/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

#include "logem/errors.hpp"
#include "logem/format.hpp"
#include "logem/scheme.hpp"

namespace logem {
namespace {

using json = nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// A JSON value plus its key path, for diagnostics.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const json& value() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void error(const std::string& message) const {
    fail(ErrorKind::Configuration, path_ + ": " + message);
  }

  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!value_.is_object()) error("expected an object");
    std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : value_.items()) {
      if (!keys.contains(k)) child_path(k, "unknown key");
    }
  }

  bool has(const char* key) const { return value_.contains(key); }

  Node at(const char* key) const {
    if (!value_.contains(key)) child_path(key, "missing required key");
    return {value_.at(key), join(key)};
  }

  Node at(std::size_t i) const { return {value_.at(i), path_ + "[" + std::to_string(i) + "]"}; }

  std::size_t array_size(std::optional<std::size_t> expected = std::nullopt) const {
    if (!value_.is_array()) error("expected an array");
    if (expected && value_.size() != *expected) {
      error("expected " + std::to_string(*expected) + " entries, got " +
            std::to_string(value_.size()));
    }
    return value_.size();
  }

  /// Number in [lo, hi] (bounds open when the flag is set).
  double number(double lo = -kInf, double hi = kInf, bool lo_open = false,
                bool hi_open = false) const {
    if (!value_.is_number()) error("expected a number");
    const double v = value_.get<double>();
    const bool ok = std::isfinite(v) && (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
    if (!ok) {
      error("expected a number in " + std::string(lo_open ? "(" : "[") + format_double(lo) + ", " +
            format_double(hi) + (hi_open ? ")" : "]") + ", got " + value_.dump());
    }
    return v;
  }

  std::int64_t integer(std::int64_t lo, std::int64_t hi) const {
    if (!value_.is_number_integer()) error("expected an integer");
    const auto v = value_.get<std::int64_t>();
    if (v < lo || v > hi) {
      error("expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
            "], got " + std::to_string(v));
    }
    return v;
  }

  std::uint64_t unsigned_integer() const {
    if (!value_.is_number_unsigned() && !(value_.is_number_integer() && value_.get<std::int64_t>() >= 0)) {
      error("expected a non-negative integer");
    }
    return value_.get<std::uint64_t>();
  }

  bool boolean() const {
    if (!value_.is_boolean()) error("expected true or false");
    return value_.get<bool>();
  }

  std::string string() const {
    if (!value_.is_string()) error("expected a string");
    return value_.get<std::string>();
  }

  Vector vector(Eigen::Index d) const {
    array_size(static_cast<std::size_t>(d));
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = at(static_cast<std::size_t>(i)).number();
    return v;
  }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[noreturn]] void child_path(const std::string& key, const std::string& message) const {
    fail(ErrorKind::Configuration, join(key) + ": " + message);
  }

  const json& value_;
  std::string path_;
};

// Library validation errors carry field names; prefix them with the key path.
template <class Fn>
auto with_path(const Node& node, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Configuration) throw;
    node.error(e.what());
  }
}

ScalarField parse_scalar_field(const Node& n, Eigen::Index d) {
  if (n.value().is_number()) return ScalarField(ConstantField{n.number()}, d);
  const auto family = n.has("family") ? n.at("family").string() : std::string();
  ScalarField::Family fam;
  if (family == "constant") {
    n.expect_object({"family", "c"});
    fam = ConstantField{n.at("c").number()};
  } else if (family == "bounded_affine") {
    n.expect_object({"family", "c0", "c1", "clip_lo", "clip_hi", "w"});
    fam = BoundedAffineField{n.at("c0").number(), n.at("c1").number(), n.at("clip_lo").number(),
                             n.at("clip_hi").number(), n.at("w").vector(d)};
  } else if (family == "sigmoid") {
    n.expect_object({"family", "c0", "amplitude", "w"});
    fam = SigmoidField{n.at("c0").number(), n.at("amplitude").number(), n.at("w").vector(d)};
  } else {
    n.error("expected a number or an object with family constant|bounded_affine|sigmoid");
  }
  return with_path(n, [&] { return ScalarField(fam, d); });
}

std::vector<ScalarField> parse_matrix(const Node& n, Eigen::Index d) {
  std::vector<ScalarField> out;
  n.array_size(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    const Node row = n.at(static_cast<std::size_t>(i));
    row.array_size(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) {
      out.push_back(parse_scalar_field(row.at(static_cast<std::size_t>(j)), d));
    }
  }
  return out;
}

InitialPath parse_phi(const Node& n) {
  if (n.value().is_number()) return InitialPath(ConstantPhi{n.number()});
  const auto family = n.has("family") ? n.at("family").string() : std::string();
  if (family == "constant") {
    n.expect_object({"family", "c"});
    return InitialPath(ConstantPhi{n.at("c").number()});
  }
  if (family == "holder_poly") {
    n.expect_object({"family", "c0", "c1", "exponent"});
    const double c0 = n.at("c0").number();
    const double c1 = n.at("c1").number();
    const double exponent = n.at("exponent").number(0.5, 1.0, false, true);
    return InitialPath(HolderPolyPhi{c0, c1, exponent});
  }
  n.error("expected a number or an object with family constant|holder_poly");
}

JumpLaw parse_law(const Node& n) {
  const auto family = n.at("family").string();
  std::optional<double> r_neg;
  if (n.has("R_neg")) r_neg = n.at("R_neg").number(-kInf, 0.0);
  JumpLaw::Family fam;
  if (family == "uniform") {
    n.expect_object({"family", "lo", "hi", "R_neg"});
    fam = UniformLaw{n.at("lo").number(), n.at("hi").number()};
  } else if (family == "shifted_exponential") {
    n.expect_object({"family", "scale", "shift", "R_neg"});
    fam = ShiftedExponentialLaw{n.at("scale").number(0.0, kInf, true), n.at("shift").number()};
  } else if (family == "two_point") {
    n.expect_object({"family", "z1", "prob1", "z2", "R_neg"});
    fam = TwoPointLaw{n.at("z1").number(), n.at("prob1").number(0.0, 1.0), n.at("z2").number()};
  } else {
    n.at("family").error("expected uniform|shifted_exponential|two_point");
  }
  return with_path(n, [&] { return JumpLaw(fam, r_neg); });
}

Scenario parse_scenario(const Node& n) {
  n.expect_object({"d", "b", "T", "positivity_mode", "f", "g", "phi", "levy"});
  Scenario s;
  const Node f = n.at("f");
  const auto d = static_cast<Eigen::Index>(
      n.has("d") ? n.at("d").integer(1, 64) : static_cast<std::int64_t>(f.array_size()));
  if (d < 1) f.error("expected a non-empty d×d array");
  s.b = n.at("b").number(0.0, kInf, true);
  s.T = n.at("T").number(0.0, kInf, true);
  if (n.has("positivity_mode")) s.positivity_mode = n.at("positivity_mode").boolean();
  auto fs = parse_matrix(f, d);
  auto gs = parse_matrix(n.at("g"), d);
  s.field = CoefficientField(d, std::move(fs), std::move(gs));

  const Node phi = n.at("phi");
  phi.array_size(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) s.phi.push_back(parse_phi(phi.at(i)));

  const Node levy = n.at("levy");
  levy.array_size(static_cast<std::size_t>(d));
  for (std::size_t j = 0; j < static_cast<std::size_t>(d); ++j) {
    const Node c = levy.at(j);
    c.expect_object({"rate", "law"});
    s.levy.push_back({c.at("rate").number(0.0, kInf), parse_law(c.at("law"))});
  }
  with_path(n, [&] {
    s.validate();
    return 0;
  });
  return s;
}

std::vector<int> parse_m_list(const Node& n) {
  std::vector<int> out;
  const auto size = n.array_size();
  if (size == 0) n.error("expected a non-empty array");
  for (std::size_t i = 0; i < size; ++i) out.push_back(static_cast<int>(n.at(i).integer(1, 1 << 24)));
  return out;
}

void check_grid(const Node& n, const Scenario& s, int m) {
  with_path(n, [&] { return build_grid(s.b, s.T, m); });
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json vector_json(const Vector& v) { return std::vector<double>(v.begin(), v.end()); }

json field_json(const ScalarField& s) {
  return std::visit(
      overloaded{
          [](const ConstantField& c) -> json { return {{"family", "constant"}, {"c", c.c}}; },
          [](const BoundedAffineField& a) -> json {
            return {{"family", "bounded_affine"}, {"c0", a.c0},           {"c1", a.c1},
                    {"clip_lo", a.clip_lo},       {"clip_hi", a.clip_hi}, {"w", vector_json(a.w)}};
          },
          [](const SigmoidField& g) -> json {
            return {{"family", "sigmoid"},
                    {"c0", g.c0},
                    {"amplitude", g.amplitude},
                    {"w", vector_json(g.w)}};
          },
      },
      s.family());
}

json law_json(const JumpLaw& law) {
  json out = std::visit(
      overloaded{
          [](const UniformLaw& u) -> json { return {{"family", "uniform"}, {"lo", u.lo}, {"hi", u.hi}}; },
          [](const ShiftedExponentialLaw& e) -> json {
            return {{"family", "shifted_exponential"}, {"scale", e.scale}, {"shift", e.shift}};
          },
          [](const TwoPointLaw& t) -> json {
            return {{"family", "two_point"}, {"z1", t.z1}, {"prob1", t.prob1}, {"z2", t.z2}};
          },
      },
      law.family());
  out["R_neg"] = law.r_neg();
  return out;
}

}  // namespace

OutputFormat parse_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  fail(ErrorKind::Configuration, "format: expected csv or json, got '" + std::string(text) + "'");
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Configuration, std::string("malformed JSON: ") + e.what());
  }
  const Node root(doc, "");
  root.expect_object({"scenario", "run"});
  RunConfig cfg;
  cfg.scenario = parse_scenario(root.at("scenario"));

  if (root.has("run")) {
    const Node run = root.at("run");
    run.expect_object({"m", "fine_m", "coarse_m", "n_paths", "p", "q", "seed", "stream", "out",
                       "format"});
    if (run.has("m")) cfg.m = static_cast<int>(run.at("m").integer(2, 1 << 24));
    if (run.has("fine_m")) cfg.fine_m = static_cast<int>(run.at("fine_m").integer(2, 1 << 24));
    if (run.has("coarse_m")) cfg.coarse_m = parse_m_list(run.at("coarse_m"));
    if (run.has("n_paths")) {
      cfg.n_paths = static_cast<std::size_t>(run.at("n_paths").integer(1, 100'000'000));
    }
    if (run.has("p")) cfg.p = run.at("p").number(2.0);
    if (run.has("q")) {
      const Node q = run.at("q");
      cfg.q.clear();
      for (std::size_t i = 0; i < q.array_size(); ++i) cfg.q.push_back(q.at(i).number(1.0));
    }
    if (run.has("seed")) cfg.seed = run.at("seed").unsigned_integer();
    if (run.has("stream")) cfg.stream = run.at("stream").unsigned_integer();
    if (run.has("out")) cfg.out = run.at("out").string();
    if (run.has("format")) {
      const Node fmt = run.at("format");
      with_path(fmt, [&] { return cfg.format = parse_format(fmt.string()); });
    }
  }

  // Every grid the commands may build must satisfy Δ < b and Δ < 1.
  const json empty = json::object();
  const Node run = root.has("run") ? root.at("run") : Node(empty, "run");
  auto sub = [&](const char* key) {
    return run.has(key) ? run.at(key) : Node(empty, "run." + std::string(key));
  };
  check_grid(sub("m"), cfg.scenario, cfg.m);
  check_grid(sub("fine_m"), cfg.scenario, cfg.fine_m);
  for (int m : cfg.coarse_m) check_grid(sub("coarse_m"), cfg.scenario, m);

  cfg.scenario_hash = scenario_hash(cfg.scenario);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Configuration, "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

json scenario_to_json(const Scenario& s) {
  const Eigen::Index d = s.dim();
  json f = json::array(), g = json::array();
  for (Eigen::Index i = 0; i < d; ++i) {
    json frow = json::array(), grow = json::array();
    for (Eigen::Index j = 0; j < d; ++j) {
      frow.push_back(field_json(s.field.f(i, j)));
      grow.push_back(field_json(s.field.g(i, j)));
    }
    f.push_back(frow);
    g.push_back(grow);
  }
  json phi = json::array();
  for (const auto& p : s.phi) {
    phi.push_back(std::visit(
        overloaded{
            [](const ConstantPhi& c) -> json { return {{"family", "constant"}, {"c", c.c}}; },
            [](const HolderPolyPhi& h) -> json {
              return {{"family", "holder_poly"}, {"c0", h.c0}, {"c1", h.c1},
                      {"exponent", h.exponent}};
            },
        },
        p.family()));
  }
  json levy = json::array();
  for (const auto& c : s.levy) levy.push_back({{"rate", c.rate}, {"law", law_json(c.law)}});
  return {{"d", d},   {"b", s.b},     {"T", s.T},       {"positivity_mode", s.positivity_mode},
          {"f", f},   {"g", g},       {"phi", phi},     {"levy", levy}};
}

Scenario scenario_from_json(const json& j) { return parse_scenario(Node(j, "scenario")); }

std::string scenario_hash(const Scenario& scenario) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(scenario_to_json(scenario).dump())));
  return buf;
}

}  // namespace logem
