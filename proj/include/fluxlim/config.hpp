#pragma once

// Experiment configuration: a TOML subset (sections, key = value, numbers,
// booleans, strings, numeric arrays, # comments) and the typed experiment
// description built from it. Validation collects every problem at once.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fluxlim/controls.hpp"
#include "fluxlim/flux_models.hpp"
#include "fluxlim/functionals.hpp"
#include "fluxlim/hj_junction.hpp"

namespace fluxlim::config {

using Value = std::variant<bool, double, std::string, std::vector<double>>;

struct Table {
  std::vector<std::pair<std::string, Value>> entries;

  const Value* find(std::string_view key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return &v;
    return nullptr;
  }
  void set(std::string key, Value v) {
    for (auto& [k, old] : entries)
      if (k == key) {
        old = std::move(v);
        return;
      }
    entries.emplace_back(std::move(key), std::move(v));
  }
  bool operator==(const Table&) const = default;
};

struct Document {
  std::vector<std::pair<std::string, Table>> sections;

  const Table* find(std::string_view name) const {
    for (const auto& [n, t] : sections)
      if (n == name) return &t;
    return nullptr;
  }
  Table& section(const std::string& name) {
    for (auto& [n, t] : sections)
      if (n == name) return t;
    sections.emplace_back(name, Table{});
    return sections.back().second;
  }
  bool operator==(const Document&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> messages)
      : std::runtime_error(join(messages)), messages_(std::move(messages)) {}
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  static std::string join(const std::vector<std::string>& m) {
    std::string s;
    for (const auto& x : m) s += (s.empty() ? "" : "\n") + x;
    return s;
  }
  std::vector<std::string> messages_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string strip_comment(std::string_view line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
    if (line[i] == '#' && !in_str) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

inline std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s == "inf" || s == "+inf") return kInf;
  if (s == "-inf") return -kInf;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<Value> parse_value(std::string_view s, std::string& err) {
  s = trim(s);
  if (s.empty()) {
    err = "missing value";
    return std::nullopt;
  }
  if (s == "true") return Value{true};
  if (s == "false") return Value{false};
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') {
      err = "unterminated string";
      return std::nullopt;
    }
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i] == '\\' && i + 2 < s.size()) {
        const char c = s[++i];
        out += c == 'n' ? '\n' : c == 't' ? '\t' : c;
      } else {
        out += s[i];
      }
    }
    return Value{out};
  }
  if (s.front() == '[') {
    if (s.back() != ']') {
      err = "unterminated array";
      return std::nullopt;
    }
    std::vector<double> arr;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      const auto item = trim(body.substr(0, comma));
      if (!item.empty()) {
        auto v = parse_number(item);
        if (!v) {
          err = "array item '" + std::string(item) + "' is not a number";
          return std::nullopt;
        }
        arr.push_back(*v);
      }
      if (comma == std::string_view::npos) break;
      body = body.substr(comma + 1);
    }
    return Value{arr};
  }
  if (auto v = parse_number(s)) return Value{*v};
  err = "cannot parse value '" + std::string(s) + "'";
  return std::nullopt;
}

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos &&
      s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

}  // namespace detail

inline Document parse(std::string_view text) {
  Document doc;
  std::vector<std::string> errors;
  Table* current = nullptr;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = detail::strip_comment(raw);
    // arrays may span lines
    if (line.find('[') != std::string::npos && line.find('=') != std::string::npos) {
      auto count = [](const std::string& s) {
        return std::count(s.begin(), s.end(), '[') - std::count(s.begin(), s.end(), ']');
      };
      while (count(line) > 0 && std::getline(in, raw)) {
        ++lineno;
        line += " " + detail::strip_comment(raw);
      }
    }
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
        continue;
      }
      const std::string name(detail::trim(t.substr(1, t.size() - 2)));
      if (doc.find(name)) errors.push_back("line " + std::to_string(lineno) + ": duplicate section [" + name + "]");
      current = &doc.section(name);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    if (!current) {
      errors.push_back("line " + std::to_string(lineno) + ": key outside of any section");
      continue;
    }
    const std::string key(detail::trim(t.substr(0, eq)));
    std::string err;
    auto v = detail::parse_value(t.substr(eq + 1), err);
    if (!v) {
      errors.push_back("line " + std::to_string(lineno) + ": " + key + ": " + err);
      continue;
    }
    if (current->find(key))
      errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    current->set(key, std::move(*v));
  }
  if (!errors.empty()) throw ConfigError(errors);
  return doc;
}

inline std::string print(const Document& doc) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, table] : doc.sections) {
    if (!first) os << '\n';
    first = false;
    os << '[' << name << "]\n";
    for (const auto& [key, v] : table.entries) {
      os << key << " = ";
      std::visit(
          [&](const auto& x) {
            using X = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<X, bool>) {
              os << (x ? "true" : "false");
            } else if constexpr (std::is_same_v<X, double>) {
              os << detail::format_number(x);
            } else if constexpr (std::is_same_v<X, std::string>) {
              os << '"';
              for (char c : x) {
                if (c == '"' || c == '\\') os << '\\' << c;
                else if (c == '\n') os << "\\n";
                else os << c;
              }
              os << '"';
            } else {
              os << '[';
              for (std::size_t i = 0; i < x.size(); ++i)
                os << (i ? ", " : "") << detail::format_number(x[i]);
              os << ']';
            }
          },
          v);
      os << '\n';
    }
  }
  return os.str();
}

// ---- typed experiment ---------------------------------------------------------

struct ModelBlock {
  std::string type = "quadratic";  // quadratic | tabulated
  double kappa_left = 1.0, capacity_left = 1.0;
  double kappa_right = 1.0, capacity_right = 1.0;
  std::vector<double> p_left, H_left, p_right, H_right;
  bool operator==(const ModelBlock&) const = default;
};

struct InitialBlock {
  std::vector<double> breakpoints;
  std::vector<double> slopes{-0.8};
  bool operator==(const InitialBlock&) const = default;
};

struct ControlBlock {
  std::string type = "constant";  // constant | piecewise | bangbang | square_wave
  double value = 0.0;
  std::vector<double> times, values;
  double start_value = 0.0;
  std::vector<double> switch_times;
  int n = 1;
  bool operator==(const ControlBlock&) const = default;
};

struct OptimizerBlock {
  std::string method = "bangbang";  // bangbang | relaxed
  int k_max = 4;
  int budget = 3000;
  int m_cells = 8;
  int max_sweeps = 4;
  bool operator==(const OptimizerBlock&) const = default;
};

struct FunctionalBlock {
  std::string type = "box";  // box | none
  double x1 = 0.1, x2 = 0.18, t1 = 1.0, t2 = 1.5, t3 = 4.5, t4 = 5.0, delta = 0.01;
  double linear_coeff = 0.0;
  bool operator==(const FunctionalBlock&) const = default;
};

struct MeshBlock {
  double xmin = -0.4, xmax = 0.4;
  int Nx = 400;
  double T = 6.0;
  int Nt = 600;
  bool operator==(const MeshBlock&) const = default;
  Mesh mesh() const { return {xmin, xmax, Nx, T, Nt}; }
};

struct CrosscheckBlock {
  int cells = 400;
  int Nt = 120;
  double cfl = 0.9;
  double max_error = 0.05;
  bool refine = true;  // also run at twice the cells and require a smaller error
  bool operator==(const CrosscheckBlock&) const = default;
};

struct RunBlock {
  std::string command;
  std::string out_dir;
  int workers = 0;                 // 0: environment default
  double gradient_tol = -1.0;      // < 0: 3 * max(dx, dt) * Lipschitz bound
  double theta = -1.0;             // < 0: 1e-6 (1 + sup |u^{A0}(0, .)|)
  double tol_opt = -1.0;           // < 0: 5 x quadrature error estimate
  double margin = 1e-4;            // relative margin for strict cost inequalities
  bool operator==(const RunBlock&) const = default;
};

struct ExperimentConfig {
  std::optional<ModelBlock> model;
  std::optional<InitialBlock> initial;
  std::optional<ControlBlock> control;
  std::optional<OptimizerBlock> optimizer;
  std::optional<FunctionalBlock> functional;
  std::optional<MeshBlock> mesh;
  std::optional<CrosscheckBlock> crosscheck;
  RunBlock run;
  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

class Reader {
 public:
  Reader(const Table& t, std::string section, std::vector<std::string>& errors)
      : t_(t), section_(std::move(section)), errors_(errors) {}

  void num(const char* key, double& out) {
    if (const Value* v = take(key)) {
      if (auto* d = std::get_if<double>(v)) out = *d;
      else fail(key, "expected a number");
    }
  }
  void integer(const char* key, int& out) {
    if (const Value* v = take(key)) {
      auto* d = std::get_if<double>(v);
      if (d && std::floor(*d) == *d && std::abs(*d) < 2e9) out = static_cast<int>(*d);
      else fail(key, "expected an integer");
    }
  }
  void boolean(const char* key, bool& out) {
    if (const Value* v = take(key)) {
      if (auto* b = std::get_if<bool>(v)) out = *b;
      else fail(key, "expected true or false");
    }
  }
  void str(const char* key, std::string& out) {
    if (const Value* v = take(key)) {
      if (auto* s = std::get_if<std::string>(v)) out = *s;
      else fail(key, "expected a string");
    }
  }
  void array(const char* key, std::vector<double>& out) {
    if (const Value* v = take(key)) {
      if (auto* a = std::get_if<std::vector<double>>(v)) out = *a;
      else fail(key, "expected an array of numbers");
    }
  }
  void finish() {
    for (const auto& [k, v] : t_.entries)
      if (std::find(seen_.begin(), seen_.end(), k) == seen_.end())
        errors_.push_back("[" + section_ + "] unknown key '" + k + "'");
  }

 private:
  const Value* take(const char* key) {
    seen_.emplace_back(key);
    return t_.find(key);
  }
  void fail(const char* key, const char* what) {
    errors_.push_back("[" + section_ + "] " + key + ": " + what);
  }
  const Table& t_;
  std::string section_;
  std::vector<std::string>& errors_;
  std::vector<std::string> seen_;
};

}  // namespace detail

/// Typed view of a document; unknown sections/keys and type errors are all
/// reported together.
inline ExperimentConfig from_document(const Document& doc) {
  std::vector<std::string> errors;
  ExperimentConfig c;
  static const char* known[] = {"model", "initial", "control", "optimizer",
                                "functional", "mesh", "crosscheck", "run"};
  for (const auto& [name, _] : doc.sections)
    if (std::find(std::begin(known), std::end(known), name) == std::end(known))
      errors.push_back("unknown section [" + name + "]");

  if (const Table* t = doc.find("model")) {
    ModelBlock m;
    detail::Reader r(*t, "model", errors);
    r.str("type", m.type);
    r.num("kappa", m.kappa_left);
    r.num("capacity", m.capacity_left);
    m.kappa_right = m.kappa_left;
    m.capacity_right = m.capacity_left;
    r.num("kappa_left", m.kappa_left);
    r.num("capacity_left", m.capacity_left);
    r.num("kappa_right", m.kappa_right);
    r.num("capacity_right", m.capacity_right);
    r.array("p_left", m.p_left);
    r.array("H_left", m.H_left);
    r.array("p_right", m.p_right);
    r.array("H_right", m.H_right);
    r.finish();
    c.model = m;
  }
  if (const Table* t = doc.find("initial")) {
    InitialBlock b;
    detail::Reader r(*t, "initial", errors);
    double slope = kInf;
    r.num("slope", slope);
    if (std::isfinite(slope)) b.slopes = {slope};
    r.array("breakpoints", b.breakpoints);
    r.array("slopes", b.slopes);
    r.finish();
    c.initial = b;
  }
  if (const Table* t = doc.find("control")) {
    ControlBlock b;
    detail::Reader r(*t, "control", errors);
    r.str("type", b.type);
    r.num("value", b.value);
    r.array("times", b.times);
    r.array("values", b.values);
    r.num("start_value", b.start_value);
    r.array("switch_times", b.switch_times);
    r.integer("n", b.n);
    r.finish();
    c.control = b;
  }
  if (const Table* t = doc.find("optimizer")) {
    OptimizerBlock b;
    detail::Reader r(*t, "optimizer", errors);
    r.str("method", b.method);
    r.integer("k_max", b.k_max);
    r.integer("budget", b.budget);
    r.integer("m_cells", b.m_cells);
    r.integer("max_sweeps", b.max_sweeps);
    r.finish();
    c.optimizer = b;
  }
  if (const Table* t = doc.find("functional")) {
    FunctionalBlock b;
    detail::Reader r(*t, "functional", errors);
    r.str("type", b.type);
    r.num("x1", b.x1);
    r.num("x2", b.x2);
    r.num("t1", b.t1);
    r.num("t2", b.t2);
    r.num("t3", b.t3);
    r.num("t4", b.t4);
    r.num("delta", b.delta);
    r.num("linear_coeff", b.linear_coeff);
    r.finish();
    c.functional = b;
  }
  if (const Table* t = doc.find("mesh")) {
    MeshBlock b;
    detail::Reader r(*t, "mesh", errors);
    r.num("xmin", b.xmin);
    r.num("xmax", b.xmax);
    r.integer("Nx", b.Nx);
    r.num("T", b.T);
    r.integer("Nt", b.Nt);
    r.finish();
    c.mesh = b;
  }
  if (const Table* t = doc.find("crosscheck")) {
    CrosscheckBlock b;
    detail::Reader r(*t, "crosscheck", errors);
    r.integer("cells", b.cells);
    r.integer("Nt", b.Nt);
    r.num("cfl", b.cfl);
    r.num("max_error", b.max_error);
    r.boolean("refine", b.refine);
    r.finish();
    c.crosscheck = b;
  }
  if (const Table* t = doc.find("run")) {
    detail::Reader r(*t, "run", errors);
    r.str("command", c.run.command);
    r.str("out_dir", c.run.out_dir);
    r.integer("parallel_workers", c.run.workers);
    r.num("gradient_tol", c.run.gradient_tol);
    r.num("theta", c.run.theta);
    r.num("tol_opt", c.run.tol_opt);
    r.num("margin", c.run.margin);
    r.finish();
  }
  if (!errors.empty()) throw ConfigError(errors);
  return c;
}

inline Document to_document(const ExperimentConfig& c) {
  Document d;
  if (c.model) {
    Table& t = d.section("model");
    t.set("type", c.model->type);
    t.set("kappa_left", c.model->kappa_left);
    t.set("capacity_left", c.model->capacity_left);
    t.set("kappa_right", c.model->kappa_right);
    t.set("capacity_right", c.model->capacity_right);
    if (c.model->type == "tabulated") {
      t.set("p_left", c.model->p_left);
      t.set("H_left", c.model->H_left);
      t.set("p_right", c.model->p_right);
      t.set("H_right", c.model->H_right);
    }
  }
  if (c.initial) {
    Table& t = d.section("initial");
    t.set("breakpoints", c.initial->breakpoints);
    t.set("slopes", c.initial->slopes);
  }
  if (c.control) {
    Table& t = d.section("control");
    const auto& b = *c.control;
    t.set("type", b.type);
    if (b.type == "constant") t.set("value", b.value);
    if (b.type == "piecewise") {
      t.set("times", b.times);
      t.set("values", b.values);
    }
    if (b.type == "bangbang") {
      t.set("start_value", b.start_value);
      t.set("switch_times", b.switch_times);
    }
    if (b.type == "square_wave") t.set("n", static_cast<double>(b.n));
  }
  if (c.optimizer) {
    Table& t = d.section("optimizer");
    t.set("method", c.optimizer->method);
    t.set("k_max", static_cast<double>(c.optimizer->k_max));
    t.set("budget", static_cast<double>(c.optimizer->budget));
    t.set("m_cells", static_cast<double>(c.optimizer->m_cells));
    t.set("max_sweeps", static_cast<double>(c.optimizer->max_sweeps));
  }
  if (c.functional) {
    Table& t = d.section("functional");
    const auto& b = *c.functional;
    t.set("type", b.type);
    for (auto [k, v] : {std::pair{"x1", b.x1}, {"x2", b.x2}, {"t1", b.t1}, {"t2", b.t2},
                        {"t3", b.t3}, {"t4", b.t4}, {"delta", b.delta},
                        {"linear_coeff", b.linear_coeff}})
      t.set(k, v);
  }
  if (c.mesh) {
    Table& t = d.section("mesh");
    t.set("xmin", c.mesh->xmin);
    t.set("xmax", c.mesh->xmax);
    t.set("Nx", static_cast<double>(c.mesh->Nx));
    t.set("T", c.mesh->T);
    t.set("Nt", static_cast<double>(c.mesh->Nt));
  }
  if (c.crosscheck) {
    Table& t = d.section("crosscheck");
    t.set("cells", static_cast<double>(c.crosscheck->cells));
    t.set("Nt", static_cast<double>(c.crosscheck->Nt));
    t.set("cfl", c.crosscheck->cfl);
    t.set("max_error", c.crosscheck->max_error);
    t.set("refine", c.crosscheck->refine);
  }
  Table& r = d.section("run");
  r.set("command", c.run.command);
  r.set("out_dir", c.run.out_dir);
  r.set("parallel_workers", static_cast<double>(c.run.workers));
  r.set("gradient_tol", c.run.gradient_tol);
  r.set("theta", c.run.theta);
  r.set("tol_opt", c.run.tol_opt);
  r.set("margin", c.run.margin);
  return d;
}

inline ExperimentConfig parse_config(std::string_view text) { return from_document(parse(text)); }
inline std::string print_config(const ExperimentConfig& c) { return print(to_document(c)); }

// ---- building and validation ---------------------------------------------------

inline JunctionModel build_model(const ModelBlock& m) {
  if (m.type == "quadratic")
    return JunctionModel(Hamiltonian::quadratic(m.kappa_left, m.capacity_left),
                         Hamiltonian::quadratic(m.kappa_right, m.capacity_right));
  return JunctionModel(Hamiltonian::tabulated(m.p_left, m.H_left),
                       Hamiltonian::tabulated(m.p_right, m.H_right));
}

inline InitialData build_initial(const InitialBlock& b) { return InitialData(b.breakpoints, b.slopes); }

inline Control build_control(const ControlBlock& b, double T, double A0) {
  if (b.type == "constant") return Control::constant(b.value, T, A0);
  if (b.type == "piecewise") return Control(b.times, b.values, A0);
  if (b.type == "bangbang") return bangbang_control(b.start_value, b.switch_times, T, A0);
  return weak_star_square_wave(b.n, T, A0);
}

inline CostSpec build_spec(const FunctionalBlock& b) {
  return {make_box_weight(b.x1, b.x2, b.t1, b.t2, b.t3, b.t4, b.delta), b.linear_coeff};
}

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"solve", "cost", "optimize", "audit", "crosscheck",
                                          "reproduce-prop511"};
  return c;
}

/// Every problem for the given command, in a stable order.
inline std::vector<std::string> validate(const ExperimentConfig& c, const std::string& command) {
  std::vector<std::string> e;
  if (std::find(commands().begin(), commands().end(), command) == commands().end()) {
    e.push_back("unknown command '" + command + "'");
    return e;
  }
  const bool prop = command == "reproduce-prop511";
  auto need = [&](bool present, const char* block) {
    if (!present) e.push_back("missing [" + std::string(block) + "] block required by '" + command + "'");
  };
  if (!prop) {
    need(c.model.has_value(), "model");
    need(c.initial.has_value(), "initial");
    need(c.mesh.has_value(), "mesh");
    if (command == "solve" || command == "crosscheck" || command == "audit" || command == "cost")
      need(c.control.has_value(), "control");
    if (command == "cost" || command == "optimize" || command == "audit")
      need(c.functional.has_value(), "functional");
    if (command == "optimize") need(c.optimizer.has_value(), "optimizer");
  }

  std::optional<JunctionModel> model;
  if (c.model) {
    try {
      if (c.model->type != "quadratic" && c.model->type != "tabulated")
        e.push_back("[model] type must be \"quadratic\" or \"tabulated\"");
      else
        model = build_model(*c.model);
    } catch (const std::exception& ex) {
      e.push_back(std::string("[model] ") + ex.what());
    }
  }
  if (c.initial) {
    try {
      const InitialData u0 = build_initial(*c.initial);
      if (model) u0.check_admissible(*model, true);
    } catch (const std::exception& ex) {
      e.push_back(std::string("[initial] ") + ex.what());
    }
  }
  std::optional<Mesh> mesh;
  if (c.mesh) {
    const Mesh m = c.mesh->mesh();
    if (!(m.xmax > m.xmin)) e.push_back("[mesh] need xmin < xmax");
    if (m.nx < 1 || m.nt < 1) e.push_back("[mesh] Nx and Nt must be >= 1");
    if (!(m.T > 0.0)) e.push_back("[mesh] T must be positive");
    if (m.xmax > m.xmin && m.nx >= 1 && m.nt >= 1 && m.T > 0.0) mesh = m;
  }
  if (c.control && model && mesh) {
    try {
      build_control(*c.control, mesh->T, model->A0);
      const auto& ty = c.control->type;
      if (ty != "constant" && ty != "piecewise" && ty != "bangbang" && ty != "square_wave")
        e.push_back("[control] unknown type '" + ty + "'");
      if (ty == "piecewise" && !c.control->times.empty() &&
          std::abs(c.control->times.back() - mesh->T) > 1e-12)
        e.push_back("[control] last time must equal the mesh horizon T");
    } catch (const std::exception& ex) {
      e.push_back(std::string("[control] ") + ex.what());
    }
  }
  if (c.functional) {
    const auto& f = *c.functional;
    if (f.type != "box") {
      e.push_back("[functional] type must be \"box\"");
    } else {
      try {
        build_spec(f);
        if (mesh && !(f.x1 > mesh->xmin && f.x2 < mesh->xmax && f.t4 < mesh->T))
          e.push_back("[functional] box support must lie inside the mesh");
      } catch (const std::exception& ex) {
        e.push_back(std::string("[functional] ") + ex.what());
      }
    }
  }
  if (c.optimizer) {
    const auto& o = *c.optimizer;
    if (o.method != "bangbang" && o.method != "relaxed")
      e.push_back("[optimizer] method must be \"bangbang\" or \"relaxed\"");
    if (o.k_max < 1) e.push_back("[optimizer] k_max must be >= 1");
    if (o.budget < 50) e.push_back("[optimizer] budget must be >= 50");
    if (o.m_cells < 1) e.push_back("[optimizer] m_cells must be >= 1");
    if (o.max_sweeps < 1) e.push_back("[optimizer] max_sweeps must be >= 1");
  }
  if (c.crosscheck) {
    const auto& x = *c.crosscheck;
    if (x.cells < 4) e.push_back("[crosscheck] cells must be >= 4");
    if (x.Nt < 1) e.push_back("[crosscheck] Nt must be >= 1");
    if (!(x.cfl > 0.0 && x.cfl <= 1.0)) e.push_back("[crosscheck] cfl must lie in (0, 1]");
  }
  if (command == "crosscheck" && mesh) {
    const int cells = c.crosscheck ? c.crosscheck->cells : mesh->nx;
    Mesh m = *mesh;
    m.nx = cells;
    if (m.zero_index() < 1 || m.zero_index() > m.nx - 1)
      e.push_back("[mesh] x = 0 must be an interior node at the cross-check resolution");
  }
  if (command == "solve" && mesh) {
    if (mesh->zero_index() < 2 || mesh->zero_index() > mesh->nx - 2)
      e.push_back("[mesh] x = 0 must be a node with two columns on each side (junction trace)");
  }
  if (c.run.workers < 0) e.push_back("[run] parallel_workers must be >= 0");
  return e;
}

}  // namespace fluxlim::config
