#include "sfol/scenario.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sfol/errors.hpp"

namespace sfol {

namespace {

const std::map<std::string, std::string>& builtins() {
  static const std::map<std::string, std::string> table = {
#include "builtin_scenarios.inc"
  };
  return table;
}

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
  std::size_t column;
};

struct Section {
  std::string kind;
  std::string label;
  std::size_t line;
  std::vector<Entry> entries;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

class Parser {
 public:
  Parser(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& msg, std::size_t line, std::size_t column = 1) const {
    throw ParseError(origin_ + ":" + std::to_string(line) + ": " + msg, line, column);
  }

  std::vector<Section> sections(std::string_view text) {
    std::vector<Section> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view raw = text.substr(pos, nl - pos);
      pos = nl + 1;
      ++line_no;
      const auto hash = raw.find('#');
      if (hash != std::string_view::npos) raw = raw.substr(0, hash);
      const std::string line = trim(raw);
      last_line_ = line_no;
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail("unterminated section header", line_no);
        std::istringstream in(line.substr(1, line.size() - 2));
        Section s;
        s.line = line_no;
        in >> s.kind >> s.label;
        std::string extra;
        if (in >> extra) fail("unexpected text in section header", line_no);
        if (s.kind.empty()) fail("empty section header", line_no);
        out.push_back(std::move(s));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail("expected 'key = value'", line_no);
      if (out.empty()) fail("key outside of any section", line_no);
      const std::size_t column = raw.find_first_not_of(" \t") + 1;
      out.back().entries.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no, column});
    }
    return out;
  }

  std::size_t last_line() const { return last_line_; }

  template <class F>
  auto guarded(const Entry& e, F&& f) const -> decltype(f()) {
    try {
      return f();
    } catch (const ParseError& err) {
      fail(err.what(), e.line, e.column);
    } catch (const Error& err) {
      fail(err.what(), e.line, e.column);
    }
  }

  double constant(const Entry& e, const std::string& text, const Params& params) const {
    return guarded(e, [&] {
      const Expr x = sfol::bind(parse_expr(text), params);
      if (!free_symbols(x).empty()) throw UnknownSymbol("'" + *free_symbols(x).begin() + "' is not a parameter");
      return Program(x, {})(std::span<const double>{});
    });
  }

  std::vector<double> constants(const Entry& e, const Params& params) const {
    std::vector<double> out;
    for (const auto& item : split_top(e.value, ',')) out.push_back(constant(e, item, params));
    return out;
  }

  std::vector<Expr> exprs(const Entry& e, const Params& params) const {
    return guarded(e, [&] {
      auto list = parse_expr_list(e.value);
      for (auto& x : list) x = sfol::bind(x, params);
      return list;
    });
  }

  std::vector<Coordinate> coords(const Entry& e, const Params& params) const {
    std::vector<Coordinate> out;
    for (const auto& item : split_top(e.value, ',')) {
      Coordinate c;
      const auto colon = item.find(':');
      c.name = trim(item.substr(0, colon));
      if (c.name.empty()) fail("empty coordinate name", e.line, e.column);
      if (colon != std::string::npos) {
        const std::string kind = trim(item.substr(colon + 1));
        if (kind == "line") {
        } else if (kind.rfind("circle(", 0) == 0 && kind.back() == ')') {
          c.kind = CoordKind::Circle;
          c.period = constant(e, kind.substr(7, kind.size() - 8), params);
        } else {
          fail("unknown coordinate kind '" + kind + "' (line or circle(period))", e.line, e.column);
        }
      }
      out.push_back(std::move(c));
    }
    return out;
  }

 private:
  std::string origin_;
  std::size_t last_line_ = 0;
};

struct Keys {
  std::set<std::string> single;
  std::set<std::string> repeated;
};

const std::map<std::string, Keys>& section_keys() {
  static const std::map<std::string, Keys> keys = {
      {"scenario", {{"name", "description", "seed", "budget", "tol", "checks"}, {}}},
      {"params", {{}, {}}},
      {"manifold", {{"name", "coords"}, {"domain"}}},
      {"foliation", {{"name"}, {"generator"}}},
      {"group", {{"name", "kind", "coords", "mul", "inv", "unit", "exp"}, {"domain"}}},
      {"action", {{"name", "map"}, {}}},
      {"submersion", {{"name", "map", "section"}, {"vertical"}}},
      {"witness", {{"source", "point"}, {"step"}}},
  };
  return keys;
}

// Checks keys and returns single-valued entries by key.
std::map<std::string, const Entry*> index_section(const Parser& ps, const Section& s) {
  const auto& keys = section_keys().at(s.kind);
  std::map<std::string, const Entry*> out;
  for (const auto& e : s.entries) {
    if (s.kind == "params") continue;
    if (keys.repeated.count(e.key)) continue;
    if (!keys.single.count(e.key)) ps.fail("unknown key '" + e.key + "' in [" + s.kind + "]", e.line, e.column);
    if (out.count(e.key)) ps.fail("duplicate key '" + e.key + "'", e.line, e.column);
    out[e.key] = &e;
  }
  return out;
}

const Entry& require(const Parser& ps, const Section& s, const std::map<std::string, const Entry*>& idx,
                     const std::string& key) {
  auto it = idx.find(key);
  if (it == idx.end()) ps.fail("[" + s.kind + "] needs '" + key + "'", s.line);
  return *it->second;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string& origin) {
  Parser ps(origin);
  const auto sections = ps.sections(text);
  Scenario sc;
  const Section* manifold_p = nullptr;
  const Section* manifold_m = nullptr;
  std::map<std::string, const Section*> unique;
  std::vector<const Section*> witness_sections;

  for (const auto& s : sections) {
    if (!section_keys().count(s.kind)) ps.fail("unknown section [" + s.kind + "]", s.line);
    if (s.kind == "manifold") {
      if (s.label != "P" && s.label != "M") ps.fail("manifold sections are [manifold P] or [manifold M]", s.line);
      auto& slot = s.label == "P" ? manifold_p : manifold_m;
      if (slot) ps.fail("duplicate [manifold " + s.label + "]", s.line);
      slot = &s;
    } else if (s.kind == "witness") {
      witness_sections.push_back(&s);
    } else {
      if (!s.label.empty()) ps.fail("section [" + s.kind + "] takes no label", s.line);
      if (unique.count(s.kind)) ps.fail("duplicate section [" + s.kind + "]", s.line);
      unique[s.kind] = &s;
    }
  }
  if (!unique.count("scenario")) ps.fail("missing [scenario] section", ps.last_line());
  if (!manifold_p) ps.fail("missing [manifold P] section", ps.last_line());
  if (!unique.count("foliation")) ps.fail("missing [foliation] section", ps.last_line());

  {
    const auto& s = *unique["scenario"];
    auto idx = index_section(ps, s);
    sc.name = require(ps, s, idx, "name").value;
    if (idx.count("description")) sc.description = idx["description"]->value;
    if (idx.count("seed")) sc.seed = static_cast<std::uint64_t>(ps.constant(*idx["seed"], idx["seed"]->value, {}));
    if (idx.count("budget")) sc.budget = static_cast<int>(ps.constant(*idx["budget"], idx["budget"]->value, {}));
    if (idx.count("tol")) sc.tol = ps.constant(*idx["tol"], idx["tol"]->value, {});
    if (idx.count("checks")) {
      for (const auto& c : split_top(idx["checks"]->value, ',')) {
        if (!c.empty()) sc.checks.push_back(c);
      }
    }
  }
  if (unique.count("params")) {
    for (const auto& e : unique["params"]->entries) {
      if (sc.params.count(e.key)) ps.fail("duplicate parameter '" + e.key + "'", e.line, e.column);
      sc.params[e.key] = ps.constant(e, e.value, sc.params);
    }
  }

  auto manifold = [&](const Section& s, const std::string& fallback) {
    auto idx = index_section(ps, s);
    const auto& ce = require(ps, s, idx, "coords");
    auto coords = ps.coords(ce, sc.params);
    std::vector<ChartManifold::Clause> clauses;
    for (const auto& e : s.entries) {
      if (e.key != "domain") continue;
      ChartManifold::Clause clause;
      for (const auto& lit : split_top(e.value, '|')) {
        clause.push_back(ps.guarded(e, [&] { return sfol::bind(parse_expr(lit), sc.params); }));
      }
      clauses.push_back(std::move(clause));
    }
    const std::string name = idx.count("name") ? idx["name"]->value : fallback;
    return ps.guarded(ce, [&] { return ChartManifold(name, coords, clauses, sc.params); });
  };
  sc.P = manifold(*manifold_p, "P");
  if (manifold_m) sc.M = manifold(*manifold_m, "M");

  {
    const auto& s = *unique["foliation"];
    auto idx = index_section(ps, s);
    std::vector<VectorField> gens;
    for (const auto& e : s.entries) {
      if (e.key != "generator") continue;
      gens.push_back(ps.guarded(e, [&] { return VectorField(sc.P, ps.exprs(e, sc.params)); }));
    }
    if (gens.empty()) ps.fail("[foliation] needs at least one 'generator'", s.line);
    sc.F = FoliationModule(idx.count("name") ? idx["name"]->value : "F", std::move(gens));
  }

  if (unique.count("group")) {
    const auto& s = *unique["group"];
    auto idx = index_section(ps, s);
    const auto& ke = require(ps, s, idx, "kind");
    const auto& ce = require(ps, s, idx, "coords");
    auto coords = ps.coords(ce, sc.params);
    const std::string name = idx.count("name") ? idx["name"]->value : "G";
    if (ke.value == "vector") {
      std::vector<std::string> names;
      for (const auto& c : coords) {
        if (c.kind != CoordKind::Line) ps.fail("vector groups have line coordinates", ce.line, ce.column);
        names.push_back(c.name);
      }
      sc.group = LieGroupModel::vector(names, name);
    } else if (ke.value == "circle") {
      if (coords.size() != 1 || coords[0].kind != CoordKind::Circle)
        ps.fail("circle groups have one circle coordinate", ce.line, ce.column);
      sc.group = LieGroupModel::circle(coords[0].name, coords[0].period, name);
    } else if (ke.value == "generic") {
      std::vector<ChartManifold::Clause> clauses;
      for (const auto& e : s.entries) {
        if (e.key != "domain") continue;
        ChartManifold::Clause clause;
        for (const auto& lit : split_top(e.value, '|')) {
          clause.push_back(ps.guarded(e, [&] { return sfol::bind(parse_expr(lit), sc.params); }));
        }
        clauses.push_back(std::move(clause));
      }
      ChartManifold chart(name, coords, clauses, sc.params);
      const auto& me = require(ps, s, idx, "mul");
      const auto& ie = require(ps, s, idx, "inv");
      const auto& ue = require(ps, s, idx, "unit");
      std::optional<std::vector<Expr>> exp;
      if (idx.count("exp")) exp = ps.exprs(*idx["exp"], sc.params);
      sc.group = ps.guarded(ke, [&] {
        return LieGroupModel::generic(name, chart, ps.exprs(me, sc.params), ps.exprs(ie, sc.params),
                                      ps.constants(ue, sc.params), exp);
      });
    } else {
      ps.fail("unknown group kind '" + ke.value + "' (vector, circle or generic)", ke.line, ke.column);
    }
  }

  if (unique.count("action")) {
    const auto& s = *unique["action"];
    if (!sc.group) ps.fail("[action] needs a [group] section", s.line);
    auto idx = index_section(ps, s);
    const auto& me = require(ps, s, idx, "map");
    const std::string name = idx.count("name") ? idx["name"]->value : "action";
    sc.action = ps.guarded(me, [&] {
      return std::make_shared<const GroupAction>(name, *sc.group, sc.P, ps.exprs(me, sc.params), sc.params);
    });
  }

  if (unique.count("submersion")) {
    const auto& s = *unique["submersion"];
    if (!sc.M) ps.fail("[submersion] needs a [manifold M] section", s.line);
    auto idx = index_section(ps, s);
    const auto& me = require(ps, s, idx, "map");
    SmoothMap pi{sc.P, *sc.M, ps.exprs(me, sc.params)};
    std::optional<std::vector<Expr>> section;
    if (idx.count("section")) section = ps.exprs(*idx["section"], sc.params);
    std::vector<VectorField> verticals;
    for (const auto& e : s.entries) {
      if (e.key != "vertical") continue;
      verticals.push_back(ps.guarded(e, [&] { return VectorField(sc.P, ps.exprs(e, sc.params)); }));
    }
    const std::string name = idx.count("name") ? idx["name"]->value : "pi";
    sc.quotient = ps.guarded(me, [&] { return SubmersionQuotient(name, pi, section, verticals, sc.action); });
  }

  for (const Section* s : witness_sections) {
    if (!sc.quotient) ps.fail("[witness] needs a [submersion] section", s->line);
    auto idx = index_section(ps, *s);
    WitnessSpec w;
    w.line = s->line;
    w.source = ps.constants(require(ps, *s, idx, "source"), sc.params);
    w.point = ps.constants(require(ps, *s, idx, "point"), sc.params);
    if (w.source.size() != sc.M->dim()) ps.fail("witness source has the wrong dimension", s->line);
    if (w.point.size() != sc.P.dim()) ps.fail("witness point has the wrong dimension", s->line);
    for (const auto& e : s->entries) {
      if (e.key == "step") w.steps.push_back(ps.constants(e, sc.params));
    }
    if (w.steps.empty()) ps.fail("[witness] needs at least one 'step'", s->line);
    sc.witnesses.push_back(std::move(w));
  }
  return sc;
}

Scenario load_scenario(const std::string& name_or_path) {
  if (auto text = builtin_scenario_text(name_or_path)) return parse_scenario(*text, name_or_path);
  std::ifstream in(name_or_path);
  if (!in) throw PreconditionFailed("no built-in scenario or readable file named '" + name_or_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), name_or_path);
}

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : builtins()) out.push_back(name);
  return out;
}

std::optional<std::string> builtin_scenario_text(const std::string& name) {
  auto it = builtins().find(name);
  if (it == builtins().end()) return std::nullopt;
  return it->second;
}

std::vector<FibrationWitness> fibration_witnesses(const Scenario& s, const PushforwardFoliation& push) {
  std::vector<FibrationWitness> out;
  for (const auto& w : s.witnesses) {
    std::vector<Step> steps;
    for (const auto& c : w.steps) {
      if (c.size() != push.module.size())
        throw PreconditionFailed("witness at line " + std::to_string(w.line) + ": step has " +
                                 std::to_string(c.size()) + " coefficients, the induced foliation has " +
                                 std::to_string(push.module.size()) + " generators");
      steps.emplace_back(PathStep{push.module.generator_set(), c});
    }
    out.push_back({HolonomyWord(push.module.manifold(), w.source, std::move(steps)), w.point});
  }
  return out;
}

}  // namespace sfol
