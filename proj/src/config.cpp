#include "psidyn/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>

#include "psidyn/field_io.hpp"
#include "psidyn/transforms.hpp"

namespace psidyn {

namespace {

namespace fs = std::filesystem;

const char* rule_name(QuadRule r) {
  switch (r) {
    case QuadRule::Trapezoid: return "trapezoid";
    case QuadRule::Simpson: return "simpson";
    case QuadRule::GaussLegendre: return "gauss_legendre";
  }
  return "unknown";
}

struct Parser {
  std::string path;

  [[noreturn]] void fail(const YAML::Mark& mark, const std::string& msg) const {
    std::string where = path;
    if (mark.line >= 0) {
      where += ':' + std::to_string(mark.line + 1) + ':' +
               std::to_string(mark.column + 1);
    }
    throw ConfigParse(where + ": " + msg);
  }
  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    fail(node.Mark(), msg);
  }

  void expect_map(const YAML::Node& n, const char* section) const {
    if (!n.IsMap()) fail(n, std::string(section) + " must be a mapping");
  }
  void expect_seq(const YAML::Node& n, const char* what) const {
    if (!n.IsSequence()) fail(n, std::string(what) + " must be a list");
  }

  void check_keys(const YAML::Node& n, std::initializer_list<const char*> allowed,
                  const char* section) const {
    for (const auto& kv : n) {
      std::string key;
      try {
        key = kv.first.as<std::string>();
      } catch (const YAML::Exception&) {
        fail(kv.first, std::string("non-scalar key in ") + section);
      }
      bool ok = false;
      for (const char* a : allowed) {
        if (key == a) {
          ok = true;
          break;
        }
      }
      if (!ok) fail(kv.first, "unknown key \"" + key + "\" in " + section);
    }
  }

  template <typename T>
  T as(const YAML::Node& n, const char* what) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, std::string("expected ") + what);
    }
  }

  double number(const YAML::Node& n, const char* what) const {
    if (n.IsScalar()) {
      const std::string& s = n.Scalar();
      if (s == "inf" || s == ".inf" || s == "Inf" || s == ".Inf") {
        return std::numeric_limits<double>::infinity();
      }
    }
    return as<double>(n, what);
  }

  YAML::Node require(const YAML::Node& parent, const char* key,
                     const char* section) const {
    YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) {
      fail(parent, std::string(section) + " needs key \"" + key + '"');
    }
    return n;
  }

  Complex complex_value(const YAML::Node& n) const {
    if (n.IsSequence()) {
      if (n.size() != 2) fail(n, "complex value must be [re, im]");
      return {number(n[0], "number"), number(n[1], "number")};
    }
    return {number(n, "number or [re, im]"), 0.0};
  }

  Coefficient coefficient(const YAML::Node& n) const {
    if (n.IsMap()) {
      check_keys(n, {"breaks", "values"}, "coefficient");
      const YAML::Node bn = require(n, "breaks", "coefficient table");
      const YAML::Node vn = require(n, "values", "coefficient table");
      expect_seq(bn, "breaks");
      expect_seq(vn, "values");
      std::vector<double> breaks;
      for (const auto& b : bn) breaks.push_back(number(b, "number"));
      std::vector<Complex> values;
      for (const auto& v : vn) values.push_back(complex_value(v));
      try {
        return Coefficient::table(std::move(breaks), std::move(values));
      } catch (const Error& e) {
        fail(n, e.what());
      }
    }
    return Coefficient::constant(complex_value(n));
  }

  QuadRule rule(const YAML::Node& n) const {
    const std::string s = as<std::string>(n, "a rule name");
    if (s == "trapezoid") return QuadRule::Trapezoid;
    if (s == "simpson") return QuadRule::Simpson;
    if (s == "gauss_legendre") return QuadRule::GaussLegendre;
    fail(n, "unknown rule \"" + s + "\" (trapezoid | simpson | gauss_legendre)");
  }

  void existing_file(const YAML::Node& n, const std::string& file) const {
    if (!fs::exists(file)) fail(n, "referenced file does not exist: " + file);
  }
};

GridPtr parse_grid(const Parser& P, const YAML::Node& n) {
  P.expect_map(n, "grid");
  P.check_keys(n, {"dim", "n", "extent"}, "grid");
  const int dim = P.as<int>(P.require(n, "dim", "grid"), "an integer");
  const int size = P.as<int>(P.require(n, "n", "grid"), "an integer");
  const double extent = P.number(P.require(n, "extent", "grid"), "a number");
  try {
    return make_grid(dim, size, extent);
  } catch (const Error& e) {
    P.fail(n, e.what());
  }
}

InnerSymbol parse_inner(const Parser& P, const YAML::Node& n, int dim) {
  if (n.IsScalar() && n.Scalar() == "abs2") return InnerSymbol::abs2();
  if (n.IsMap()) {
    P.check_keys(n, {"alpha"}, "symbol.inner");
    const YAML::Node an = P.require(n, "alpha", "symbol.inner");
    P.expect_seq(an, "alpha");
    if (static_cast<int>(an.size()) != dim) {
      P.fail(an, "alpha needs one row per dimension");
    }
    std::vector<Coefficient> alpha;
    for (const auto& row : an) {
      P.expect_seq(row, "alpha row");
      if (static_cast<int>(row.size()) != dim) {
        P.fail(row, "alpha rows need one entry per dimension");
      }
      for (const auto& c : row) alpha.push_back(P.coefficient(c));
    }
    return InnerSymbol::quadratic_form(dim, std::move(alpha));
  }
  P.fail(n, "inner must be \"abs2\" or {alpha: rows}");
}

SymbolPtr parse_symbol(const Parser& P, const YAML::Node& n, GridPtr grid,
                       std::string& family, ZeroModePolicy& policy) {
  P.expect_map(n, "symbol");
  family = P.as<std::string>(P.require(n, "family", "symbol"), "a family name");

  const YAML::Node zm = n["zero_mode"];
  if (zm.IsDefined()) {
    const std::string z = P.as<std::string>(zm, "drop | error");
    if (z == "drop") {
      policy = ZeroModePolicy::Drop;
    } else if (z == "error") {
      policy = ZeroModePolicy::Error;
    } else {
      P.fail(zm, "zero_mode must be drop or error");
    }
  }

  const int dim = grid->dim();
  try {
    if (family == "second_order") {
      P.check_keys(n, {"family", "zero_mode", "a", "b", "c"}, "symbol");
      const YAML::Node an = P.require(n, "a", "second_order symbol");
      P.expect_seq(an, "a");
      if (static_cast<int>(an.size()) != dim) P.fail(an, "a needs one row per dimension");
      std::vector<Coefficient> a;
      for (const auto& row : an) {
        P.expect_seq(row, "a row");
        if (static_cast<int>(row.size()) != dim) {
          P.fail(row, "a rows need one entry per dimension");
        }
        for (const auto& c : row) a.push_back(P.coefficient(c));
      }
      std::vector<Coefficient> b;
      const YAML::Node bn = n["b"];
      if (bn.IsDefined()) {
        P.expect_seq(bn, "b");
        if (static_cast<int>(bn.size()) != dim) {
          P.fail(bn, "b needs one entry per dimension");
        }
        for (const auto& c : bn) b.push_back(P.coefficient(c));
      } else {
        b.assign(static_cast<std::size_t>(dim), Coefficient::constant({0.0, 0.0}));
      }
      Coefficient c = n["c"].IsDefined() ? P.coefficient(n["c"])
                                         : Coefficient::constant({0.0, 0.0});
      return std::make_shared<SecondOrderSymbol>(dim, std::move(a), std::move(b),
                                                 std::move(c));
    }
    if (family == "log") {
      P.check_keys(n, {"family", "zero_mode", "beta", "inner"}, "symbol");
      Coefficient beta = P.coefficient(P.require(n, "beta", "log symbol"));
      InnerSymbol inner = n["inner"].IsDefined() ? parse_inner(P, n["inner"], dim)
                                                 : InnerSymbol::abs2();
      return std::make_shared<LogSymbol>(std::move(beta), std::move(inner));
    }
    if (family == "log_laplacian") {
      P.check_keys(n, {"family", "zero_mode"}, "symbol");
      return log_laplacian();
    }
    if (family == "tabulated") {
      P.check_keys(n, {"family", "zero_mode", "breaks", "tables"}, "symbol");
      const YAML::Node bn = P.require(n, "breaks", "tabulated symbol");
      const YAML::Node tn = P.require(n, "tables", "tabulated symbol");
      P.expect_seq(bn, "breaks");
      P.expect_seq(tn, "tables");
      std::vector<double> breaks;
      for (const auto& b : bn) breaks.push_back(P.number(b, "number"));
      std::vector<std::vector<Complex>> tables;
      for (const auto& t : tn) {
        const std::string file = P.as<std::string>(t, "a field file path");
        P.existing_file(t, file);
        Field f = load_field(file);
        if (f.side != Side::Frequency) {
          P.fail(t, "symbol tables must be frequency-side fields: " + file);
        }
        if (*f.grid != *grid) {
          P.fail(t, "symbol table grid does not match the run grid: " + file);
        }
        tables.push_back(std::move(f.values));
      }
      return std::make_shared<TabulatedSymbol>(grid, std::move(breaks),
                                               std::move(tables));
    }
  } catch (const Error& e) {
    P.fail(n, e.what());
  }
  P.fail(P.require(n, "family", "symbol"),
         "unknown symbol family \"" + family +
             "\" (second_order | log | log_laplacian | tabulated)");
}

// Builders for the built-in data profiles; everything returns a plain
// frequency-side field when invoked.
std::function<Field()> builtin_builder(const Parser& P, const YAML::Node& n,
                                       GridPtr grid, const std::string& name) {
  const int d = grid->dim();
  if (name == "gaussian") {
    return [grid]() {
      Field u = sample(grid, Side::Physical, [](const std::array<double, 3>& x) {
        const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        return Complex(std::exp(-0.5 * r2), 0.0);
      });
      return forward_transform(u);
    };
  }
  if (name == "delta") {
    const double v = std::pow(2.0 * M_PI, -0.5 * d);
    return [grid, v]() {
      Field f = Field::zeros(grid, Side::Frequency);
      std::fill(f.values.begin(), f.values.end(), Complex(v, 0.0));
      return f;
    };
  }
  if (name == "mode_k") {
    const YAML::Node kn = P.require(n, "k", "mode_k data");
    P.expect_seq(kn, "k");
    if (static_cast<int>(kn.size()) != d) {
      P.fail(kn, "k needs one integer per dimension");
    }
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      const int k = P.as<int>(kn[static_cast<std::size_t>(a)], "an integer");
      if (k < -grid->n() / 2 || k >= grid->n() / 2) {
        P.fail(kn, "mode index " + std::to_string(k) + " outside the lattice");
      }
      idx[static_cast<std::size_t>(a)] = k + grid->n() / 2;
    }
    const double per_dim = std::sqrt(2.0 * M_PI) / grid->dxi();
    const double value = std::pow(per_dim, d);
    return [grid, idx, value]() {
      Field f = Field::zeros(grid, Side::Frequency);
      f.values[grid->ravel(idx)] = Complex(value, 0.0);
      return f;
    };
  }
  P.fail(n, "unknown builtin \"" + name + "\" (gaussian | delta | mode_k)");
}

std::function<Field()> parse_data(const Parser& P, const YAML::Node& n, GridPtr grid,
                                  std::string& desc, const char* section) {
  P.expect_map(n, section);
  P.check_keys(n, {"builtin", "file", "k"}, section);
  const YAML::Node bn = n["builtin"];
  const YAML::Node fn = n["file"];
  if (bn.IsDefined() == fn.IsDefined()) {
    P.fail(n, std::string(section) + " needs exactly one of builtin | file");
  }
  if (bn.IsDefined()) {
    desc = P.as<std::string>(bn, "a builtin name");
    return builtin_builder(P, n, grid, desc);
  }
  const std::string file = P.as<std::string>(fn, "a field file path");
  P.existing_file(fn, file);
  Field loaded = load_field(file);
  if (*loaded.grid != *grid) {
    P.fail(fn, "data grid does not match the run grid: " + file);
  }
  desc = "file:" + file;
  return [loaded = std::move(loaded)]() {
    return loaded.side == Side::Frequency ? loaded : forward_transform(loaded);
  };
}

std::function<Field(double)> parse_forcing(const Parser& P, const YAML::Node& n,
                                           GridPtr grid, std::string& kind) {
  P.expect_map(n, "forcing");
  kind = P.as<std::string>(P.require(n, "kind", "forcing"), "a forcing kind");
  if (kind == "none") {
    P.check_keys(n, {"kind"}, "forcing");
    return {};
  }
  if (kind == "separable") {
    P.check_keys(n, {"kind", "spatial", "envelope"}, "forcing");
    std::string spatial_desc;
    auto build = parse_data(P, P.require(n, "spatial", "forcing"), grid,
                            spatial_desc, "forcing.spatial");
    double scale = 1.0, rate = 0.0;
    const YAML::Node en = n["envelope"];
    if (en.IsDefined()) {
      P.expect_map(en, "forcing.envelope");
      P.check_keys(en, {"kind", "scale", "rate"}, "forcing.envelope");
      const std::string ek =
          P.as<std::string>(P.require(en, "kind", "forcing.envelope"), "a kind");
      if (en["scale"].IsDefined()) scale = P.number(en["scale"], "a number");
      if (ek == "exp_decay") {
        rate = P.number(P.require(en, "rate", "exp_decay envelope"), "a number");
      } else if (ek != "constant") {
        P.fail(en, "envelope kind must be constant or exp_decay");
      }
    }
    auto cache = std::make_shared<std::optional<Field>>();
    return [build = std::move(build), cache, scale, rate](double s) {
      if (!cache->has_value()) *cache = build();
      Field f = **cache;
      const double env = scale * std::exp(-rate * s);
      for (Complex& v : f.values) v *= env;
      return f;
    };
  }
  if (kind == "tabulated") {
    P.check_keys(n, {"kind", "times", "files"}, "forcing");
    const YAML::Node tn = P.require(n, "times", "tabulated forcing");
    const YAML::Node fnodes = P.require(n, "files", "tabulated forcing");
    P.expect_seq(tn, "forcing times");
    P.expect_seq(fnodes, "forcing files");
    if (tn.size() != fnodes.size() || tn.size() == 0) {
      P.fail(n, "tabulated forcing needs matching nonempty times and files");
    }
    std::vector<double> times;
    for (const auto& t : tn) times.push_back(P.number(t, "number"));
    std::vector<Field> fields;
    for (const auto& f : fnodes) {
      const std::string file = P.as<std::string>(f, "a field file path");
      P.existing_file(f, file);
      Field loaded = load_field(file);
      if (loaded.side != Side::Frequency) {
        P.fail(f, "forcing snapshots must be frequency-side fields: " + file);
      }
      if (*loaded.grid != *grid) {
        P.fail(f, "forcing grid does not match the run grid: " + file);
      }
      fields.push_back(std::move(loaded));
    }
    try {
      return tabulated_forcing(std::move(times), std::move(fields));
    } catch (const Error& e) {
      P.fail(n, e.what());
    }
  }
  P.fail(n, "forcing kind must be none, separable, or tabulated");
}

std::function<double(const std::array<double, 3>&)> parse_weight(
    const Parser& P, const YAML::Node& n, Json& desc) {
  if (!n.IsDefined() || (n.IsScalar() && n.Scalar() == "unit")) {
    desc = "unit";
    return [](const std::array<double, 3>&) { return 1.0; };
  }
  P.expect_map(n, "weight");
  P.check_keys(n, {"kind", "gamma"}, "weight");
  const std::string kind = P.as<std::string>(P.require(n, "kind", "weight"), "a kind");
  if (kind == "unit") {
    desc = "unit";
    return [](const std::array<double, 3>&) { return 1.0; };
  }
  if (kind == "bessel") {
    const double gamma = P.number(P.require(n, "gamma", "bessel weight"), "a number");
    desc = Json{{"kind", "bessel"}, {"gamma", gamma}};
    return [gamma](const std::array<double, 3>& xi) {
      const double r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
      return std::pow(1.0 + r2, 0.5 * gamma);
    };
  }
  P.fail(n, "weight kind must be unit or bessel");
}

PropId prop_from_name(const Parser& P, const YAML::Node& n) {
  const std::string s = P.as<std::string>(n, "a proposition name");
  for (PropId id : {PropId::RieszThorin, PropId::L2Isometry, PropId::InnerEmbedding,
                    PropId::OuterEmbedding, PropId::InOutBridge,
                    PropId::LargeExponentEmbedding, PropId::TransformPairSymmetry,
                    PropId::OuterWeightWindow}) {
    if (prop_name(id) == s) return id;
  }
  P.fail(n, "unknown proposition \"" + s + '"');
}

Json quad_json(const QuadratureSpec& q) {
  return Json{{"rule", rule_name(q.rule)},
              {"order", q.order},
              {"panels", q.panels},
              {"abs_tol", q.abs_tol}};
}

Json duhamel_json(const DuhamelSpec& d) {
  return Json{{"rule", rule_name(d.rule)},
              {"order", d.order},
              {"panels", d.panels},
              {"mesh", d.mesh}};
}

} // namespace

RunConfig load_config(const std::string& path) {
  Parser P{path};
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigParse("cannot read config: " + path);
  } catch (const YAML::ParserException& e) {
    P.fail(e.mark, e.msg);
  }
  if (!root.IsMap()) throw ConfigParse(path + ": top level must be a mapping");
  P.check_keys(root,
               {"spec_version", "grid", "symbol", "initial", "forcing", "times",
                "horizon", "quadrature", "duhamel", "tasks", "weights",
                "conditions", "spaces", "residuals", "kernel", "output_dir",
                "seed"},
               "config");

  RunConfig cfg;
  const YAML::Node ver = P.require(root, "spec_version", "config");
  cfg.spec_version = P.as<int>(ver, "an integer");
  if (cfg.spec_version != 1) {
    P.fail(ver, "unsupported spec_version " + std::to_string(cfg.spec_version));
  }

  cfg.grid = parse_grid(P, P.require(root, "grid", "config"));
  cfg.symbol = parse_symbol(P, P.require(root, "symbol", "config"), cfg.grid,
                            cfg.symbol_family, cfg.zero_mode);

  if (root["initial"].IsDefined()) {
    cfg.make_initial =
        parse_data(P, root["initial"], cfg.grid, cfg.initial_desc, "initial");
  }
  if (root["forcing"].IsDefined()) {
    cfg.forcing = parse_forcing(P, root["forcing"], cfg.grid, cfg.forcing_kind);
  }

  if (root["times"].IsDefined()) {
    const YAML::Node tn = root["times"];
    P.expect_seq(tn, "times");
    for (const auto& t : tn) cfg.times.push_back(P.number(t, "number"));
    for (std::size_t i = 0; i < cfg.times.size(); ++i) {
      if (cfg.times[i] <= 0.0 || (i > 0 && cfg.times[i] <= cfg.times[i - 1])) {
        P.fail(tn, "times must be strictly increasing and positive");
      }
    }
  }
  if (root["horizon"].IsDefined()) {
    cfg.horizon = P.number(root["horizon"], "a number");
    if (!(cfg.horizon > 0.0)) P.fail(root["horizon"], "horizon must be positive");
  } else if (!cfg.times.empty()) {
    cfg.horizon = cfg.times.back();
  }
  if (!cfg.times.empty() && cfg.horizon < cfg.times.back() * (1.0 - 1e-12)) {
    P.fail(root["horizon"], "horizon lies before the last output time");
  }

  if (root["quadrature"].IsDefined()) {
    const YAML::Node qn = root["quadrature"];
    P.expect_map(qn, "quadrature");
    P.check_keys(qn, {"rule", "order", "panels", "abs_tol"}, "quadrature");
    if (qn["rule"].IsDefined()) cfg.quad.rule = P.rule(qn["rule"]);
    if (qn["order"].IsDefined()) cfg.quad.order = P.as<int>(qn["order"], "an integer");
    if (qn["panels"].IsDefined())
      cfg.quad.panels = P.as<int>(qn["panels"], "an integer");
    if (qn["abs_tol"].IsDefined())
      cfg.quad.abs_tol = P.number(qn["abs_tol"], "a number");
    try {
      cfg.quad.validate();
    } catch (const Error& e) {
      P.fail(qn, e.what());
    }
  }
  if (root["duhamel"].IsDefined()) {
    const YAML::Node dn = root["duhamel"];
    P.expect_map(dn, "duhamel");
    P.check_keys(dn, {"rule", "order", "panels", "mesh"}, "duhamel");
    if (dn["rule"].IsDefined()) cfg.duhamel.rule = P.rule(dn["rule"]);
    if (dn["order"].IsDefined())
      cfg.duhamel.order = P.as<int>(dn["order"], "an integer");
    if (dn["panels"].IsDefined())
      cfg.duhamel.panels = P.as<int>(dn["panels"], "an integer");
    if (dn["mesh"].IsDefined()) {
      P.expect_seq(dn["mesh"], "duhamel mesh");
      for (const auto& m : dn["mesh"]) cfg.duhamel.mesh.push_back(P.number(m, "number"));
    }
  }

  const YAML::Node tn = P.require(root, "tasks", "config");
  P.expect_seq(tn, "tasks");
  for (const auto& t : tn) {
    const std::string task = P.as<std::string>(t, "a task name");
    static const char* known[] = {"solve",          "kernel",      "cond_a",
                                  "cond_b",         "weighted",    "log_conditions",
                                  "second_order",   "spaces_props", "residuals"};
    bool ok = false;
    for (const char* k : known) {
      if (task == k) {
        ok = true;
        break;
      }
    }
    if (!ok) P.fail(t, "unknown task \"" + task + '"');
    if (task == "log_conditions" && cfg.symbol_family != "log" &&
        cfg.symbol_family != "log_laplacian") {
      P.fail(t, "task requires log-family symbol");
    }
    if (task == "second_order" && cfg.symbol_family != "second_order") {
      P.fail(t, "task requires a second-order symbol");
    }
    cfg.tasks.push_back(task);
  }

  // weights
  cfg.weights = WeightSpec::unit();
  cfg.weights_desc = Json{{"W0", "unit"}, {"W1", "unit"}, {"W2", "unit"}};
  if (root["weights"].IsDefined()) {
    const YAML::Node wn = root["weights"];
    P.expect_map(wn, "weights");
    P.check_keys(wn, {"W0", "W1", "W2"}, "weights");
    Json d0, d1, d2;
    cfg.weights.W0 = parse_weight(P, wn["W0"], d0);
    cfg.weights.W1 = parse_weight(P, wn["W1"], d1);
    auto w2 = parse_weight(P, wn["W2"], d2);
    cfg.weights.W2 = [w2 = std::move(w2)](double, const std::array<double, 3>& xi) {
      return w2(xi);
    };
    cfg.weights_desc = Json{{"W0", d0}, {"W1", d1}, {"W2", d2}};
  }

  // condition parameters
  cfg.cond_R = 0.5 * cfg.grid->grid_radius();
  if (!cfg.times.empty()) cfg.cond_t = cfg.times.back();
  if (root["conditions"].IsDefined()) {
    const YAML::Node cn = root["conditions"];
    P.expect_map(cn, "conditions");
    P.check_keys(cn,
                 {"t", "R", "p", "q", "time_steps", "refinements",
                  "finite_threshold", "stability_rel"},
                 "conditions");
    if (cn["t"].IsDefined()) cfg.cond_t = P.number(cn["t"], "a number");
    if (cn["R"].IsDefined()) cfg.cond_R = P.number(cn["R"], "a number");
    if (cn["p"].IsDefined()) cfg.cond_p = P.number(cn["p"], "a number");
    if (cn["q"].IsDefined()) cfg.cond_q = P.number(cn["q"], "a number");
    if (cn["time_steps"].IsDefined())
      cfg.check.time_steps = P.as<int>(cn["time_steps"], "an integer");
    if (cn["refinements"].IsDefined())
      cfg.check.refinements = P.as<int>(cn["refinements"], "an integer");
    if (cn["finite_threshold"].IsDefined())
      cfg.check.finite_threshold = P.number(cn["finite_threshold"], "a number");
    if (cn["stability_rel"].IsDefined())
      cfg.check.stability_rel = P.number(cn["stability_rel"], "a number");
  }
  cfg.check.quad = cfg.quad;
  cfg.check.zero_mode = cfg.zero_mode;

  // seed before spaces so spaces.seed can default to it
  if (root["seed"].IsDefined()) {
    cfg.seed = P.as<std::uint64_t>(root["seed"], "an unsigned integer");
  }

  cfg.spaces.seed = cfg.seed;
  cfg.spaces_props = {PropId::RieszThorin,         PropId::L2Isometry,
                      PropId::InnerEmbedding,      PropId::OuterEmbedding,
                      PropId::InOutBridge,         PropId::LargeExponentEmbedding,
                      PropId::TransformPairSymmetry, PropId::OuterWeightWindow};
  if (root["spaces"].IsDefined()) {
    const YAML::Node sn = root["spaces"];
    P.expect_map(sn, "spaces");
    P.check_keys(sn,
                 {"props", "dim", "n", "extent", "samples", "seed", "decay",
                  "band_fraction", "slack", "equality_tol", "refine", "p", "q",
                  "gamma1", "gamma2", "gamma1_tilde", "gamma2_tilde", "delta"},
                 "spaces");
    if (sn["props"].IsDefined()) {
      P.expect_seq(sn["props"], "spaces props");
      cfg.spaces_props.clear();
      for (const auto& pn : sn["props"]) cfg.spaces_props.push_back(prop_from_name(P, pn));
    }
    if (sn["dim"].IsDefined()) cfg.spaces.dim = P.as<int>(sn["dim"], "an integer");
    if (sn["n"].IsDefined()) cfg.spaces.n = P.as<int>(sn["n"], "an integer");
    if (sn["extent"].IsDefined()) cfg.spaces.extent = P.number(sn["extent"], "a number");
    if (sn["samples"].IsDefined())
      cfg.spaces.samples = P.as<int>(sn["samples"], "an integer");
    if (sn["seed"].IsDefined())
      cfg.spaces.seed = P.as<std::uint64_t>(sn["seed"], "an unsigned integer");
    if (sn["decay"].IsDefined()) cfg.spaces.decay = P.number(sn["decay"], "a number");
    if (sn["band_fraction"].IsDefined())
      cfg.spaces.band_fraction = P.number(sn["band_fraction"], "a number");
    if (sn["slack"].IsDefined()) cfg.spaces.slack = P.number(sn["slack"], "a number");
    if (sn["equality_tol"].IsDefined())
      cfg.spaces.equality_tol = P.number(sn["equality_tol"], "a number");
    if (sn["refine"].IsDefined())
      cfg.spaces.refine = P.as<bool>(sn["refine"], "a boolean");
    if (sn["p"].IsDefined()) cfg.spaces.p = P.number(sn["p"], "a number");
    if (sn["q"].IsDefined()) cfg.spaces.q = P.number(sn["q"], "a number");
    if (sn["gamma1"].IsDefined())
      cfg.spaces.gamma1 = P.number(sn["gamma1"], "a number");
    if (sn["gamma2"].IsDefined())
      cfg.spaces.gamma2 = P.number(sn["gamma2"], "a number");
    if (sn["gamma1_tilde"].IsDefined())
      cfg.spaces.gamma1_tilde = P.number(sn["gamma1_tilde"], "a number");
    if (sn["gamma2_tilde"].IsDefined())
      cfg.spaces.gamma2_tilde = P.number(sn["gamma2_tilde"], "a number");
    if (sn["delta"].IsDefined()) cfg.spaces.delta = P.number(sn["delta"], "a number");
  }

  if (root["residuals"].IsDefined()) {
    const YAML::Node rn = root["residuals"];
    P.expect_map(rn, "residuals");
    P.check_keys(rn, {"meshes", "rule"}, "residuals");
    if (rn["meshes"].IsDefined()) {
      P.expect_seq(rn["meshes"], "residual meshes");
      cfg.residual_meshes.clear();
      for (const auto& m : rn["meshes"]) {
        cfg.residual_meshes.push_back(P.as<int>(m, "an integer"));
      }
    }
    if (rn["rule"].IsDefined()) {
      cfg.residual_rule = P.rule(rn["rule"]);
      if (cfg.residual_rule == QuadRule::GaussLegendre) {
        P.fail(rn["rule"], "residual quadrature must be trapezoid or simpson");
      }
    }
  }

  cfg.kernel_t = !cfg.times.empty() ? cfg.times.back() : cfg.horizon;
  if (root["kernel"].IsDefined()) {
    const YAML::Node kn = root["kernel"];
    P.expect_map(kn, "kernel");
    P.check_keys(kn, {"s", "t"}, "kernel");
    if (kn["s"].IsDefined()) cfg.kernel_s = P.number(kn["s"], "a number");
    if (kn["t"].IsDefined()) cfg.kernel_t = P.number(kn["t"], "a number");
  }

  if (root["output_dir"].IsDefined()) {
    cfg.output_dir = P.as<std::string>(root["output_dir"], "a path");
  }

  // task/data consistency
  for (const std::string& task : cfg.tasks) {
    const bool needs_initial = task == "solve" || task == "cond_a" ||
                               task == "cond_b" || task == "weighted" ||
                               task == "residuals";
    if (needs_initial && !cfg.make_initial) {
      P.fail(tn, "task \"" + task + "\" needs initial data");
    }
    if (task == "solve" && cfg.times.empty()) {
      P.fail(tn, "task \"solve\" needs output times");
    }
    if (task == "residuals" && !(cfg.horizon > 0.0)) {
      P.fail(tn, "task \"residuals\" needs a positive horizon");
    }
    if (task == "kernel" && !(cfg.kernel_t > cfg.kernel_s)) {
      P.fail(tn, "task \"kernel\" needs kernel times with t > s");
    }
  }

  cfg.echo = Json{
      {"spec_version", cfg.spec_version},
      {"grid", Json{{"dim", cfg.grid->dim()},
                    {"n", cfg.grid->n()},
                    {"extent", cfg.grid->extent()}}},
      {"symbol", cfg.symbol->descriptor()},
      {"zero_mode", cfg.zero_mode == ZeroModePolicy::Drop ? "drop" : "error"},
      {"initial", cfg.initial_desc},
      {"forcing", cfg.forcing_kind},
      {"times", cfg.times},
      {"horizon", cfg.horizon},
      {"quadrature", quad_json(cfg.quad)},
      {"duhamel", duhamel_json(cfg.duhamel)},
      {"tasks", cfg.tasks},
      {"weights", cfg.weights_desc},
      {"conditions", Json{{"t", cfg.cond_t},
                          {"R", cfg.cond_R},
                          {"p", cfg.cond_p},
                          {"q", cfg.cond_q},
                          {"time_steps", cfg.check.time_steps},
                          {"refinements", cfg.check.refinements},
                          {"finite_threshold", cfg.check.finite_threshold},
                          {"stability_rel", cfg.check.stability_rel}}},
      {"residuals", Json{{"meshes", cfg.residual_meshes},
                         {"rule", rule_name(cfg.residual_rule)}}},
      {"kernel", Json{{"s", cfg.kernel_s}, {"t", cfg.kernel_t}}},
      {"output_dir", cfg.output_dir},
      {"seed", cfg.seed}};
  return cfg;
}

void describe_config(const RunConfig& cfg, std::ostream& out) {
  const SpectralGrid& g = *cfg.grid;
  out << "execution plan (spec_version " << cfg.spec_version << ")\n";
  out << "  grid: dim=" << g.dim() << " n=" << g.n() << " extent=" << g.extent()
      << " -> " << g.size() << " modes\n";
  out << "  symbol: " << cfg.symbol_family << " (zero mode: "
      << (cfg.zero_mode == ZeroModePolicy::Drop ? "drop" : "error") << ")\n";
  out << "  initial: " << cfg.initial_desc << "\n";
  out << "  forcing: " << cfg.forcing_kind << "\n";
  if (!cfg.times.empty()) {
    out << "  times: " << cfg.times.size() << " outputs in (0, " << cfg.times.back()
        << "]\n";
  }
  std::size_t duhamel_nodes;
  if (cfg.duhamel.rule == QuadRule::GaussLegendre) {
    duhamel_nodes = static_cast<std::size_t>(cfg.duhamel.order) *
                    static_cast<std::size_t>(cfg.duhamel.panels);
    out << "  duhamel: gauss_legendre, " << duhamel_nodes << " nodes per output\n";
  } else {
    duhamel_nodes =
        cfg.duhamel.mesh.empty() ? cfg.times.size() + 1 : cfg.duhamel.mesh.size();
    out << "  duhamel: " << rule_name(cfg.duhamel.rule) << ", " << duhamel_nodes
        << " mesh nodes\n";
  }
  if (cfg.tasks.empty()) {
    out << "  tasks: none (warning: no tasks)\n";
    return;
  }
  out << "  tasks (" << cfg.tasks.size() << "):\n";
  std::size_t i = 1;
  for (const std::string& task : cfg.tasks) {
    out << "    " << i++ << ". " << task;
    if (task == "solve") {
      out << " [" << g.size() << " modes x " << cfg.times.size() << " times]";
    } else if (task == "residuals") {
      out << " [steps";
      for (int m : cfg.residual_meshes) out << ' ' << m;
      out << "]";
    } else if (task == "spaces_props") {
      out << " [" << cfg.spaces_props.size() << " propositions, "
          << cfg.spaces.samples << " samples]";
    } else if (task == "kernel") {
      out << " [s=" << cfg.kernel_s << " t=" << cfg.kernel_t << "]";
    } else if (task == "cond_a" || task == "cond_b" || task == "weighted" ||
               task == "log_conditions") {
      out << " [t=" << cfg.cond_t << " R=" << cfg.cond_R << "]";
    }
    out << "\n";
  }
}

} // namespace psidyn
