#include "vdlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "vdlab/errors.hpp"

namespace vdlab {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- kinds

const std::vector<std::string>& kind_names() {
  static const std::vector<std::string> names{"fmt",          "jensen",         "thm24",          "thm25",
                                              "smt-identity", "smt-inequality", "ramification",   "first-integral",
                                              "autoparallel", "siu-residual",   "diagnostic"};
  return names;
}

std::optional<Kind> kind_from_name(const std::string& name) {
  const auto& names = kind_names();
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<Kind>(it - names.begin());
}

std::string kind_name(Kind k) { return kind_names()[static_cast<std::size_t>(k)]; }

std::string status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
  }
  return "fail";
}

std::string ConfigDiagnostic::to_string() const {
  if (line == 0) return message;
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
}

namespace {
std::string join_diagnostics(const std::string& source, const std::vector<ConfigDiagnostic>& d) {
  std::string s = source + ": " + std::to_string(d.size()) + " configuration error(s)";
  for (const auto& x : d) s += "\n  " + x.to_string();
  return s;
}
}  // namespace

ConfigErrorList::ConfigErrorList(std::string source, std::vector<ConfigDiagnostic> diagnostics)
    : ConfigError(join_diagnostics(source, diagnostics)), source_(std::move(source)), diagnostics_(std::move(diagnostics)) {}

std::vector<std::string> split_tuple(const std::string& text) {
  std::string s = text;
  auto trim = [](std::string x) {
    const auto b = x.find_first_not_of(" \t");
    if (b == std::string::npos) return std::string();
    const auto e = x.find_last_not_of(" \t");
    return x.substr(b, e - b + 1);
  };
  s = trim(s);
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
    // Only strip when the outer parentheses enclose the whole text.
    int depth = 0;
    bool encloses = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')') --depth;
      if (depth == 0 && i + 1 < s.size()) encloses = false;
    }
    if (encloses) s = s.substr(1, s.size() - 2);
  }
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !parts.empty()) parts.push_back(trim(cur));
  return parts;
}

// ---------------------------------------------------------------- parsing

namespace {

struct Entry {
  std::string value;
  int line = 0;
  int column = 0;  // column of the first character of the value text
  bool used = false;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k{
      {"", {"name", "kind", "seed"}},
      {"curve", {"components", "affine", "constant", "lift"}},
      {"divisor", {"q"}},
      {"fields", {"chart", "t", "probe"}},
      {"connection", {"chart", "t"}},
      {"grid", {"min", "max", "points", "spacing", "values"}},
      {"tolerance",
       {"quadrature", "flatness", "jensen", "g_slack", "zero_match", "wronskian", "exceptional_fraction", "delta"}},
      {"jensen", {"g", "s"}},
      {"first-integral", {"phi", "samples"}},
      {"diagnostic", {"kappa"}},
      {"sampling", {"count", "radius", "samples"}},
      {"expect",
       {"residual", "zeros", "autoparallel", "contained", "wronskian", "max_deviation", "min_deviation", "max_ratio",
        "effective", "lambda"}},
  };
  return k;
}

bool pattern_key(const std::string& section, const std::string& key) {
  static const std::regex field_key("field[1-9][0-9]*");
  static const std::regex gamma_key("gamma_[1-9][1-9][1-9]");
  if (section == "fields") return std::regex_match(key, field_key);
  if (section == "connection") return std::regex_match(key, gamma_key);
  return false;
}

std::set<std::string> required_sections(Kind k) {
  switch (k) {
    case Kind::Fmt: return {"curve", "divisor"};
    case Kind::Jensen: return {"jensen"};
    case Kind::Thm24:
    case Kind::Thm25:
    case Kind::SmtIdentity:
    case Kind::SmtInequality:
    case Kind::Ramification: return {"curve", "fields"};
    case Kind::FirstIntegral: return {"curve", "first-integral"};
    case Kind::Autoparallel:
    case Kind::SiuResidual: return {"curve", "connection"};
    case Kind::Diagnostic: return {"diagnostic"};
  }
  return {};
}

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  void error(int line, int column, std::string message) { diags_.push_back({line, column, std::move(message)}); }
  void error(const Entry& e, std::string message) { error(e.line, e.column, std::move(message)); }

  void read(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::string section;
    sections_[""];
    while (std::getline(in, raw)) {
      ++line_no;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      // strip comments outside quotes
      bool quoted = false;
      std::size_t cut = raw.size();
      for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '"') quoted = !quoted;
        if (raw[i] == '#' && !quoted) {
          cut = i;
          break;
        }
      }
      const std::string line = raw.substr(0, cut);
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos) continue;
      const int col = static_cast<int>(first) + 1;
      if (line[first] == '[') {
        const auto close = line.find(']', first);
        if (close == std::string::npos) {
          error(line_no, col, "unterminated section header");
          continue;
        }
        if (line.find_first_not_of(" \t", close + 1) != std::string::npos)
          error(line_no, static_cast<int>(close) + 2, "unexpected text after section header");
        section = line.substr(first + 1, close - first - 1);
        if (!known_keys().contains(section) || section.empty()) {
          error(line_no, col + 1, "unknown section [" + section + "]");
        } else if (sections_.contains(section)) {
          error(line_no, col + 1, "duplicate section [" + section + "]");
        }
        sections_[section];
        section_lines_[section] = line_no;
        continue;
      }
      const auto eq = line.find('=', first);
      if (eq == std::string::npos) {
        error(line_no, col, "expected 'key = value'");
        continue;
      }
      std::string key = line.substr(first, eq - first);
      key.erase(key.find_last_not_of(" \t") + 1);
      static const std::regex key_re("[A-Za-z_][A-Za-z0-9_.-]*");
      if (!std::regex_match(key, key_re)) {
        error(line_no, col, "invalid key '" + key + "'");
        continue;
      }
      const auto vstart = line.find_first_not_of(" \t", eq + 1);
      if (vstart == std::string::npos) {
        error(line_no, static_cast<int>(eq) + 2, "missing value for '" + key + "'");
        continue;
      }
      Entry e;
      e.line = line_no;
      if (line[vstart] == '"') {
        const auto end = line.find('"', vstart + 1);
        if (end == std::string::npos) {
          error(line_no, static_cast<int>(vstart) + 1, "unterminated string");
          continue;
        }
        if (line.find_first_not_of(" \t", end + 1) != std::string::npos)
          error(line_no, static_cast<int>(end) + 2, "unexpected text after quoted value");
        e.value = line.substr(vstart + 1, end - vstart - 1);
        e.column = static_cast<int>(vstart) + 2;
      } else {
        std::string v = line.substr(vstart);
        v.erase(v.find_last_not_of(" \t") + 1);
        e.value = v;
        e.column = static_cast<int>(vstart) + 1;
      }
      if (known_keys().contains(section)) {
        const auto& keys = known_keys().at(section);
        if (!keys.contains(key) && !pattern_key(section, key)) {
          error(line_no, col, "unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"));
          continue;
        }
      }
      auto& sec = sections_[section];
      if (sec.contains(key)) {
        error(line_no, col, "duplicate key '" + key + "'");
        continue;
      }
      sec[key] = e;
    }
  }

  bool has(const std::string& section) const { return sections_.contains(section); }
  int section_line(const std::string& section) const {
    auto it = section_lines_.find(section);
    return it == section_lines_.end() ? 0 : it->second;
  }

  const Entry* find(const std::string& section, const std::string& key) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto e = s->second.find(key);
    if (e == s->second.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  const Section* section(const std::string& name) const {
    auto s = sections_.find(name);
    return s == sections_.end() ? nullptr : &s->second;
  }

  std::optional<double> number(const std::string& sec, const std::string& key) {
    const Entry* e = find(sec, key);
    if (!e) return std::nullopt;
    try {
      std::size_t pos = 0;
      const double v = std::stod(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      error(*e, "'" + key + "' must be a number, got '" + e->value + "'");
      return std::nullopt;
    }
  }

  std::optional<long long> integer(const std::string& sec, const std::string& key) {
    const Entry* e = find(sec, key);
    if (!e) return std::nullopt;
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      error(*e, "'" + key + "' must be an integer, got '" + e->value + "'");
      return std::nullopt;
    }
  }

  std::optional<bool> boolean(const std::string& sec, const std::string& key) {
    const Entry* e = find(sec, key);
    if (!e) return std::nullopt;
    if (e->value == "true" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "no") return false;
    error(*e, "'" + key + "' must be true or false, got '" + e->value + "'");
    return std::nullopt;
  }

  // Parses `text` found at `column` of `line`, reporting errors at the token.
  std::optional<Expression> expression(const std::string& text, int line, int column) {
    try {
      return Expression::parse(text);
    } catch (const ParseError& p) {
      std::string msg = p.what();
      if (const auto colon = msg.find("': "); colon != std::string::npos) msg = msg.substr(colon + 3);
      error(line, column + static_cast<int>(p.column()) - 1,
            "in \"" + text + "\": " + msg + (p.token().empty() ? "" : " '" + p.token() + "'"));
    } catch (const DomainError& d) {
      error(line, column, d.what());
    }
    return std::nullopt;
  }

  std::optional<Expression> expression(const std::string& sec, const std::string& key) {
    const Entry* e = find(sec, key);
    if (!e) return std::nullopt;
    return expression(e->value, e->line, e->column);
  }

  // Tuple elements with their columns.
  std::optional<std::vector<Expression>> tuple(const Entry& e) {
    const auto parts = split_tuple(e.value);
    if (parts.empty()) {
      error(e, "empty tuple");
      return std::nullopt;
    }
    std::vector<Expression> out;
    bool ok = true;
    std::size_t search = 0;
    for (const auto& p : parts) {
      const auto at = p.empty() ? std::string::npos : e.value.find(p, search);
      const int col = e.column + static_cast<int>(at == std::string::npos ? 0 : at);
      if (at != std::string::npos) search = at + p.size();
      if (p.empty()) {
        error(e.line, col, "empty tuple element");
        ok = false;
        continue;
      }
      auto x = expression(p, e.line, col);
      if (!x) ok = false;
      else out.push_back(*x);
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<cplx> complex_constant(const std::string& text, int line, int column) {
    auto x = expression(text, line, column);
    if (!x) return std::nullopt;
    if (!x->is_constant()) {
      error(line, column, "expected a constant, got '" + text + "'");
      return std::nullopt;
    }
    return x->value(0.0);
  }

  std::optional<std::vector<cplx>> complex_list(const Entry& e) {
    auto parts = split_tuple(e.value);
    std::vector<cplx> out;
    bool ok = true;
    for (const auto& p : parts) {
      auto v = complex_constant(p, e.line, e.column + static_cast<int>(e.value.find(p)));
      if (!v) ok = false;
      else out.push_back(*v);
    }
    if (!ok) return std::nullopt;
    if (out.empty()) {
      error(e, "empty list");
      return std::nullopt;
    }
    return out;
  }

  std::vector<ConfigDiagnostic>& diagnostics() { return diags_; }

 private:
  std::string source_;
  std::map<std::string, Section> sections_;
  std::map<std::string, int> section_lines_;
  std::vector<ConfigDiagnostic> diags_;
};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
  Parser P(source);
  P.read(text);
  ExperimentConfig c;
  c.source = source;

  // top level
  if (const Entry* e = P.find("", "name")) c.name = e->value;
  static const std::regex name_re("[A-Za-z0-9_.-]+");
  if (!P.find("", "name")) {
    c.name = fs::path(source).stem().string();
    if (!std::regex_match(c.name, name_re)) c.name = "experiment";
  }
  if (!std::regex_match(c.name, name_re)) P.error(0, 0, "experiment name '" + c.name + "' must match [A-Za-z0-9_.-]+");
  bool kind_ok = false;
  if (const Entry* e = P.find("", "kind")) {
    if (auto k = kind_from_name(e->value)) {
      c.kind = *k;
      kind_ok = true;
    } else {
      P.error(*e, "unknown kind '" + e->value + "'");
    }
  } else {
    P.error(0, 0, "missing 'kind'");
  }
  if (auto s = P.integer("", "seed")) {
    if (*s < 0) P.error(*P.find("", "seed"), "seed must be non-negative");
    else c.seed = static_cast<unsigned long long>(*s);
  }
  if (kind_ok)
    for (const auto& sec : required_sections(c.kind))
      if (!P.has(sec)) P.error(0, 0, "kind '" + kind_name(c.kind) + "' requires section [" + sec + "]");

  // tolerances
  if (auto v = P.number("tolerance", "quadrature")) c.tol.quadrature = *v;
  if (auto v = P.number("tolerance", "flatness")) c.tol.flatness = *v;
  if (auto v = P.number("tolerance", "jensen")) c.tol.jensen = *v;
  if (auto v = P.number("tolerance", "g_slack")) c.tol.g_slack = *v;
  if (auto v = P.number("tolerance", "zero_match")) c.tol.zero_match = *v;
  if (auto v = P.number("tolerance", "wronskian")) c.tol.wronskian = *v;
  if (auto v = P.number("tolerance", "exceptional_fraction")) c.tol.exceptional_fraction = *v;
  if (auto v = P.number("tolerance", "delta")) {
    if (*v <= 0) P.error(*P.find("tolerance", "delta"), "delta must be positive");
    c.tol.delta = *v;
  }

  // grid
  try {
    if (const Entry* e = P.find("grid", "values")) {
      if (P.find("grid", "min") || P.find("grid", "max") || P.find("grid", "points"))
        P.error(*e, "give either 'values' or min/max/points, not both");
      std::vector<double> g;
      for (const auto& p : split_tuple(e->value)) {
        try {
          g.push_back(std::stod(p));
        } catch (const std::exception&) {
          P.error(*e, "grid value '" + p + "' is not a number");
        }
      }
      c.grid = checked_grid(g);
    } else if (P.has("grid")) {
      const double lo = P.number("grid", "min").value_or(2.0);
      const double hi = P.number("grid", "max").value_or(128.0);
      const auto pts = P.integer("grid", "points").value_or(13);
      std::string spacing = "geometric";
      if (const Entry* e = P.find("grid", "spacing")) {
        spacing = e->value;
        if (spacing != "geometric" && spacing != "linear") P.error(*e, "spacing must be geometric or linear");
      }
      c.grid = spacing == "linear" ? linear_grid(lo, hi, static_cast<int>(pts))
                                   : geometric_grid(lo, hi, static_cast<int>(pts));
    } else {
      c.grid = default_grid();
    }
  } catch (const DomainError& d) {
    P.error(P.section_line("grid"), 1, std::string("invalid grid: ") + d.what());
  }

  // curve
  int n = -1;
  if (P.has("curve")) {
    const Entry* comp = P.find("curve", "components");
    const Entry* aff = P.find("curve", "affine");
    const bool constant = P.boolean("curve", "constant").value_or(false);
    if (comp && aff) P.error(*aff, "give either 'components' or 'affine', not both");
    else if (!comp && !aff) P.error(P.section_line("curve"), 1, "[curve] needs 'components' or 'affine'");
    else {
      const Entry& e = comp ? *comp : *aff;
      if (auto parts = P.tuple(e)) {
        if (aff) parts->insert(parts->begin(), Expression::constant(1.0));
        try {
          ProjectiveCurve f(std::move(*parts), constant);
          if (const Entry* l = P.find("curve", "lift")) {
            if (l->value == "exp") f = f.exponential_lift();
            else if (l->value != "none") P.error(*l, "lift must be 'exp' or 'none'");
          }
          n = f.dimension();
          c.curve = std::move(f);
        } catch (const DomainError& d) {
          P.error(e, d.what());
        }
      }
    }
  }

  if (P.has("divisor")) {
    if (auto q = P.expression("divisor", "q")) {
      if (n > 0) {
        try {
          c.divisor = Divisor(*q, n);
        } catch (const DomainError& d) {
          P.error(*P.find("divisor", "q"), d.what());
        }
      }
    } else if (!P.find("divisor", "q")) {
      P.error(P.section_line("divisor"), 1, "[divisor] needs 'q'");
    }
  }

  if (P.has("fields")) {
    const int chart = static_cast<int>(P.integer("fields", "chart").value_or(0));
    std::map<int, const Entry*> numbered;
    if (const Section* s = P.section("fields"))
      for (const auto& [key, e] : *s)
        if (key.rfind("field", 0) == 0) numbered[std::stoi(key.substr(5))] = &e;
    if (numbered.empty()) P.error(P.section_line("fields"), 1, "[fields] needs at least one 'fieldK'");
    int expect_index = 1;
    for (const auto& [k, e] : numbered) {
      if (k != expect_index) P.error(*e, "field numbering must run 1, 2, ... without gaps");
      expect_index = k + 1;
      if (auto comps = P.tuple(*e)) {
        if (n > 0 && static_cast<int>(comps->size()) != n) {
          P.error(*e, "field has " + std::to_string(comps->size()) + " components but the curve lives in P^" +
                          std::to_string(n));
          continue;
        }
        try {
          c.fields.emplace_back(std::move(*comps), chart);
        } catch (const DomainError& d) {
          P.error(*e, d.what());
        }
      }
    }
    const Entry* te = P.find("fields", "t");
    auto t = te ? P.expression(te->value, te->line, te->column) : std::optional<Expression>(Expression::constant(1.0));
    if (t && n > 0) {
      try {
        c.pole = PoleSection(*t, n);
      } catch (const DomainError& d) {
        P.error(te ? *te : Entry{}, d.what());
      }
    }
    if (const Entry* pe = P.find("fields", "probe")) c.probe = P.complex_constant(pe->value, pe->line, pe->column);
    if (n > 0 && !c.fields.empty() && c.pole) {
      const int q = static_cast<int>(c.fields.size());
      if (c.probe && q != n) P.error(*P.find("fields", "probe"), "'probe' selects n - 1 of n fields; give exactly n fields");
      if (!c.probe && q != n - 1 && kind_ok && c.kind != Kind::Thm25)
        P.error(P.section_line("fields"), 1, "need n - 1 = " + std::to_string(n - 1) + " fields (or n fields and a probe)");
      try {
        verify_pole_clearing(FieldSpec(c.fields, *c.pole));
      } catch (const DomainError& d) {
        P.error(P.section_line("fields"), 1, d.what());
      }
    }
  }

  if (P.has("connection")) {
    const int chart = static_cast<int>(P.integer("connection", "chart").value_or(0));
    const Entry* te = P.find("connection", "t");
    auto t = te ? P.expression(te->value, te->line, te->column) : std::optional<Expression>(Expression::constant(1.0));
    if (t && n > 0) {
      try {
        MeromorphicConnection D(n, PoleSection(*t, n), chart);
        if (const Section* s = P.section("connection"))
          for (const auto& [key, e] : *s) {
            if (key.rfind("gamma_", 0) != 0) continue;
            const int a = key[6] - '0', b = key[7] - '0', g = key[8] - '0';
            if (std::max({a, b, g}) > n) {
              P.error(e, "Christoffel index beyond the dimension " + std::to_string(n));
              continue;
            }
            if (auto x = P.expression(e.value, e.line, e.column)) {
              try {
                D.set(a, b, g, *x);
              } catch (const DomainError& d) {
                P.error(e, d.what());
              }
            }
          }
        verify_pole_clearing(D);
        c.connection = std::move(D);
      } catch (const DomainError& d) {
        P.error(te ? te->line : P.section_line("connection"), te ? te->column : 1, d.what());
      }
    }
  }

  if (P.has("jensen")) {
    c.jensen_g = P.expression("jensen", "g");
    if (!P.find("jensen", "g")) P.error(P.section_line("jensen"), 1, "[jensen] needs 'g'");
    if (auto s = P.number("jensen", "s")) c.jensen_s = *s;
    if (!(c.jensen_s > 0)) P.error(P.section_line("jensen"), 1, "s must be positive");
    if (!c.grid.empty() && c.grid.front() <= c.jensen_s)
      P.error(P.section_line("jensen"), 1, "every grid radius must exceed s");
  }

  if (P.has("first-integral")) {
    c.first_integral = P.expression("first-integral", "phi");
    if (!P.find("first-integral", "phi")) P.error(P.section_line("first-integral"), 1, "[first-integral] needs 'phi'");
    if (const Entry* e = P.find("first-integral", "samples"))
      if (auto v = P.complex_list(*e)) c.samples = *v;
  }

  if (P.has("sampling")) {
    if (auto v = P.integer("sampling", "count")) {
      if (*v < 1) P.error(*P.find("sampling", "count"), "count must be positive");
      c.sample_count = static_cast<int>(*v);
    }
    if (auto v = P.number("sampling", "radius")) {
      if (!(*v > 0)) P.error(*P.find("sampling", "radius"), "radius must be positive");
      c.sample_radius = *v;
    }
    if (const Entry* e = P.find("sampling", "samples"))
      if (auto v = P.complex_list(*e)) c.samples = *v;
  }

  if (P.has("diagnostic")) {
    if (const Entry* e = P.find("diagnostic", "kappa")) {
      if (e->value == "fs") {
        c.kappa_from_curve = true;
        if (!c.curve) P.error(*e, "kappa = fs needs a [curve] section");
      } else {
        c.kappa = P.expression(e->value, e->line, e->column);
        if (c.kappa && c.kappa->max_w_index() >= 0) P.error(*e, "kappa may only depend on z");
      }
    } else {
      P.error(P.section_line("diagnostic"), 1, "[diagnostic] needs 'kappa'");
    }
  }

  // expectations
  if (auto v = P.number("expect", "residual")) c.expect.residual = *v;
  if (auto v = P.boolean("expect", "autoparallel")) c.expect.autoparallel = *v;
  if (auto v = P.boolean("expect", "contained")) c.expect.contained = *v;
  if (auto v = P.boolean("expect", "effective")) c.expect.effective = *v;
  if (auto v = P.number("expect", "max_deviation")) c.expect.max_deviation = *v;
  if (auto v = P.number("expect", "min_deviation")) c.expect.min_deviation = *v;
  if (auto v = P.number("expect", "max_ratio")) c.expect.max_ratio = *v;
  if (const Entry* e = P.find("expect", "wronskian")) c.expect.wronskian = P.complex_constant(e->value, e->line, e->column);
  if (const Entry* e = P.find("expect", "zeros")) {
    ZeroList z;
    bool ok = true;
    if (e->value != "none") {
      for (const auto& part : split_tuple(e->value)) {
        const auto colon = part.rfind(':');
        if (colon == std::string::npos) {
          P.error(*e, "zero '" + part + "' must be written location:multiplicity");
          ok = false;
          continue;
        }
        auto loc = P.complex_constant(part.substr(0, colon), e->line, e->column);
        int mult = 0;
        try {
          mult = std::stoi(part.substr(colon + 1));
        } catch (const std::exception&) {
        }
        if (!loc || mult < 1) {
          if (loc) P.error(*e, "multiplicity in '" + part + "' must be a positive integer");
          ok = false;
          continue;
        }
        z.push_back({*loc, mult});
      }
    }
    if (ok) c.expect.zeros = z;
  }
  if (const Entry* e = P.find("expect", "lambda")) {
    std::vector<int> idx;
    for (const auto& p : split_tuple(e->value)) {
      try {
        idx.push_back(std::stoi(p));
      } catch (const std::exception&) {
        P.error(*e, "lambda entries must be integers");
      }
    }
    try {
      if (n > 0) c.expect.lambda = MultiIndex(n, idx);
    } catch (const DomainError& d) {
      P.error(*e, d.what());
    }
  }

  if (!P.diagnostics().empty()) {
    auto d = P.diagnostics();
    std::stable_sort(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.line < b.line; });
    throw ConfigErrorList(source, std::move(d));
  }
  return c;
}

ExperimentConfig parse_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigErrorList(path.string(), {{0, 0, "cannot read file"}});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

// ---------------------------------------------------------------- reports

std::string ExperimentReport::summary() const {
  std::ostringstream s;
  s << "name: " << name << '\n' << "kind: " << kind_name(kind) << '\n' << "status: " << status_name(status) << '\n';
  s << "seed: " << seed << '\n';
  if (max) s << "max: " << format_double(*max) << '\n';
  if (min) s << "min: " << format_double(*min) << '\n';
  if (spread) s << "spread: " << format_double(*spread) << '\n';
  for (const auto& f : files) s << "file: " << f.filename().string() << '\n';
  for (const auto& d : details) s << "detail: " << d << '\n';
  for (const auto& l : log) s << "log: " << l << '\n';
  if (!log.empty()) s << "perturbed radii / skipped nodes: " << log.size() << '\n';
  else s << "perturbed radii / skipped nodes: none\n";
  if (!error.empty()) s << "error: " << error << '\n';
  return s.str();
}

namespace {

std::string fmt_cplx(cplx z) {
  return format_double(z.real()) + (std::signbit(z.imag()) ? "-" : "+") + format_double(std::abs(z.imag())) + "i";
}

std::string fmt_zeros(const ZeroList& z) {
  if (z.empty()) return "none";
  std::string s;
  for (const auto& x : z) s += (s.empty() ? "" : ", ") + fmt_cplx(x.location) + ":" + std::to_string(x.multiplicity);
  return s;
}

class Run {
 public:
  Run(const ExperimentConfig& c, fs::path dir, const RunOptions& o) : c_(c), dir_(std::move(dir)), o_(o) {
    rep_.name = c.name;
    rep_.kind = c.kind;
    rep_.seed = o.seed.value_or(c.seed);
    q_.circle.tolerance = c.tol.quadrature;
    q_.exec = o.exec;
  }

  ExperimentReport execute() {
    try {
      fs::create_directories(dir_);
      dispatch();
    } catch (const std::exception& e) {
      rep_.status = Status::Fail;
      rep_.error = e.what();
    }
    rep_.log = log_.entries;
    try {
      std::ofstream out(dir_ / "summary.txt", std::ios::binary);
      out << rep_.summary();
    } catch (const std::exception&) {
    }
    return rep_;
  }

 private:
  void dispatch() {
    switch (c_.kind) {
      case Kind::Fmt: return fmt();
      case Kind::Jensen: return jensen();
      case Kind::Thm24: return thm24();
      case Kind::Thm25: return thm25();
      case Kind::SmtIdentity: return smt_identity();
      case Kind::SmtInequality: return smt_inequality_run();
      case Kind::Ramification: return ramification_run();
      case Kind::FirstIntegral: return first_integral();
      case Kind::Autoparallel: return autoparallel();
      case Kind::SiuResidual: return siu();
      case Kind::Diagnostic: return diagnostic();
    }
  }

  void write_tables(const std::string& file, const std::vector<GrowthTable>& tables) {
    const fs::path p = dir_ / file;
    std::ofstream out(p, std::ios::binary);
    write_csv(out, tables);
    rep_.files.push_back(p);
  }

  void write_rows(const std::string& file, const std::string& header, const std::vector<std::vector<double>>& rows) {
    const fs::path p = dir_ / file;
    std::ofstream out(p, std::ios::binary);
    out << header << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
      out << '\n';
    }
    rep_.files.push_back(p);
  }

  void stats(const GrowthTable& t) {
    if (t.size() == 0) return;
    rep_.max = t.max();
    rep_.min = t.min();
    rep_.spread = t.spread();
  }

  void set(bool ok) { rep_.status = ok ? Status::Pass : Status::Fail; }
  void detail(std::string s) { rep_.details.push_back(std::move(s)); }

  FieldSpec field_spec() {
    if (c_.probe && static_cast<int>(c_.fields.size()) == c_.curve->dimension()) {
      const MultiIndex lambda = find_effective_multiindex(*c_.curve, c_.fields, *c_.pole, *c_.probe);
      detail("selected multi-index " + lambda.to_string() + " at probe " + fmt_cplx(*c_.probe));
      if (c_.expect.lambda && !(*c_.expect.lambda == lambda)) {
        expectation_failed_ = true;
        detail("expected multi-index " + c_.expect.lambda->to_string());
      }
      return select_fields(c_.fields, *c_.pole, lambda);
    }
    return FieldSpec(c_.fields, *c_.pole);
  }

  ZeroList zeros_in_disk(const AnalyticFn& g, double R, const char* what) {
    double t = R;
    for (int attempt = 0;; ++attempt) {
      try {
        auto z = count_zeros(g, t);
        if (t != R) log_.add(radius_note(what, R, t));
        return z;
      } catch (const BoundaryZeroError&) {
        if (attempt == 4) throw;
        t += 1e-6 * R;
      }
    }
  }

  bool zeros_match(const ZeroList& a, const ZeroList& b) const {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].multiplicity != b[i].multiplicity) return false;
      if (std::abs(a[i].location - b[i].location) > c_.tol.zero_match * std::max(1.0, std::abs(a[i].location)))
        return false;
    }
    return true;
  }

  // Expected zeros within the largest grid radius, matched irrespective of order.
  bool expected_zeros_ok(const ZeroList& found) {
    if (!c_.expect.zeros) return true;
    ZeroList want;
    for (const auto& z : *c_.expect.zeros)
      if (std::abs(z.location) < c_.grid.back()) want.push_back(z);
    std::vector<bool> used(found.size(), false);
    bool ok = want.size() == found.size();
    for (const auto& w : want) {
      bool hit = false;
      for (std::size_t i = 0; i < found.size() && !hit; ++i)
        if (!used[i] && found[i].multiplicity == w.multiplicity &&
            std::abs(found[i].location - w.location) <= 1e-6 * std::max(1.0, std::abs(w.location)))
          used[i] = hit = true;
      ok = ok && hit;
    }
    if (!ok) detail("expected zeros " + fmt_zeros(want));
    return ok;
  }

  std::vector<cplx> samples() const { return c_.samples.empty() ? membership_samples() : c_.samples; }

  void fmt() {
    const auto R = fmt_residual(*c_.curve, *c_.divisor, c_.grid, q_, &log_);
    write_tables("fmt.csv", {R.T, R.m, R.N, R.residual});
    stats(R.residual);
    const double flat = c_.tol.flatness.value_or(1e-3);
    bool ok = R.residual.spread() <= flat;
    detail("residual spread " + format_double(R.residual.spread()) + " (tolerance " + format_double(flat) + ")");
    if (c_.expect.residual) {
      double dev = 0.0;
      for (double v : R.residual.values()) dev = std::max(dev, std::abs(v - *c_.expect.residual));
      detail("max |residual - " + format_double(*c_.expect.residual) + "| = " + format_double(dev));
      ok = ok && dev <= flat;
    }
    set(ok);
  }

  void jensen() {
    std::vector<double> v;
    for (double r : c_.grid) v.push_back(jensen_check(*c_.jensen_g, r, c_.jensen_s, q_.circle));
    GrowthTable t("residual", c_.grid, v);
    write_tables("jensen.csv", {t});
    stats(t);
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, std::abs(x));
    detail("zeros in |z| < " + format_double(c_.grid.back()) + ": " + fmt_zeros(count_zeros(*c_.jensen_g, c_.grid.back())));
    detail("max |residual| " + format_double(worst) + " (tolerance " + format_double(c_.tol.jensen) + ")");
    set(worst <= c_.tol.jensen);
  }

  void thm24() {
    const FieldSpec spec = field_spec();
    const auto eff = effectivity_test(*c_.curve, spec, samples());
    if (eff.witness) detail("effective: witness z = " + fmt_cplx(*eff.witness));
    if (!eff.effective) {
      detail("not effective on the samples (max |W| = " + format_double(eff.max_abs) + ")");
      if (c_.expect.effective && !*c_.expect.effective) set(!expectation_failed_);
      else rep_.status = Status::Inconclusive;
      return;
    }
    const double R = c_.grid.back();
    const ZeroList a = zeros_in_disk(jacobian_function(*c_.curve, spec), R, "thm24 formula");
    const ZeroList b = zeros_in_disk(jacobian_wedge_function(*c_.curve, spec), R, "thm24 wedge");
    detail("zeros of the Jacobian scalar: " + fmt_zeros(a));
    detail("zeros of the wedge: " + fmt_zeros(b));
    std::vector<double> na, nb;
    for (double r : c_.grid) {
      na.push_back(integrated_count(a, r));
      nb.push_back(integrated_count(b, r));
    }
    GrowthTable ta("N_formula", c_.grid, na), tb("N_wedge", c_.grid, nb);
    write_tables("thm24.csv", {ta, tb});
    stats(ta - tb);
    const bool match = zeros_match(a, b);
    detail(match ? "zero lists agree" : "zero lists differ");
    const bool expected_ok = expected_zeros_ok(a);
    const bool eff_ok = !c_.expect.effective || *c_.expect.effective;
    set(match && expected_ok && eff_ok && !expectation_failed_);
  }

  void thm25() {
    FieldSpec spec = field_spec();
    if (spec.degree() != c_.curve->dimension() - 1) throw DomainError("thm25 needs n - 1 fields or n fields and a probe");
    std::mt19937_64 rng(rep_.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> rows;
    int violations = 0, skipped = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < c_.sample_count; ++i) {
      const double rad = c_.sample_radius * std::sqrt(u(rng));
      const double th = 2.0 * std::numbers::pi * u(rng);
      const cplx z = std::polar(rad, th);
      try {
        const GRatio g = g_ratio(*c_.curve, spec, z);
        rows.push_back({static_cast<double>(i), z.real(), z.imag(), g.g, g.phi_norm});
        worst = std::max(worst, g.g - g.phi_norm);
        if (g.g > g.phi_norm + c_.tol.g_slack) ++violations;
      } catch (const DegenerateError& e) {
        ++skipped;
        log_.add("thm25: skipped sample " + fmt_cplx(z) + ": " + e.what());
      } catch (const ChartError& e) {
        ++skipped;
        log_.add("thm25: skipped sample " + fmt_cplx(z) + ": " + e.what());
      }
    }
    write_rows("thm25.csv", "index,z_re,z_im,g,phi_norm", rows);
    detail("samples " + std::to_string(c_.sample_count) + ", evaluated " + std::to_string(rows.size()) + ", skipped " +
           std::to_string(skipped) + ", violations " + std::to_string(violations));
    if (!rows.empty()) detail("max (g - |phi|) = " + format_double(worst));
    rep_.max = worst;
    set(violations == 0 && !rows.empty() && !expectation_failed_);
  }

  void smt_identity() {
    const auto S = smt_identity_residual(*c_.curve, field_spec(), c_.grid, q_, &log_);
    write_tables("smt_identity.csv", {S.T, S.N_ram, S.lhs, S.rhs, S.residual});
    stats(S.residual);
    const double flat = c_.tol.flatness.value_or(0.1);
    detail("residual spread " + format_double(S.residual.spread()) + " (tolerance " + format_double(flat) + ")");
    set(S.residual.spread() <= flat && !expectation_failed_);
  }

  void smt_inequality_run() {
    const auto I = smt_inequality(*c_.curve, field_spec(), c_.grid, c_.tol.delta, q_, &log_);
    std::vector<double> exc, below;
    for (std::size_t i = 0; i < I.exceptional.size(); ++i) {
      exc.push_back(I.exceptional[i] ? 1.0 : 0.0);
      below.push_back(I.below_threshold[i] ? 1.0 : 0.0);
    }
    write_tables("smt_inequality.csv", {I.T, I.N_ram, I.lhs, I.ratio_log, I.ratio_log_plus,
                                        GrowthTable("below_threshold", c_.grid, below),
                                        GrowthTable("exceptional", c_.grid, exc)});
    rep_.max = I.bound;
    detail("bound on ratio_log off the exceptional set: " + format_double(I.bound));
    detail("exceptional log-measure " + format_double(I.exceptional_log_measure) + " of " +
           format_double(I.grid_log_measure) + " (fraction " + format_double(I.exceptional_fraction()) +
           ", tolerance " + format_double(c_.tol.exceptional_fraction) + ")");
    detail("of which T <= 1: " + format_double(I.below_threshold_log_measure) +
           ", Borel violations: " + format_double(I.borel_log_measure) + ", delta " + format_double(c_.tol.delta));
    bool ok = std::isfinite(I.bound) && I.exceptional_fraction() <= c_.tol.exceptional_fraction;
    if (c_.expect.max_ratio) ok = ok && I.bound <= *c_.expect.max_ratio;
    set(ok && !expectation_failed_);
  }

  void ramification_run() {
    const FieldSpec spec = field_spec();
    ZeroList zeros;
    GrowthTable N("N_ram", {}, {});
    try {
      N = ramification(*c_.curve, spec, c_.grid, &log_, &zeros);
    } catch (const DegenerateError& e) {
      detail(e.what());
      if (c_.expect.effective && !*c_.expect.effective) set(true);
      else throw;
      return;
    }
    write_tables("ramification.csv", {N});
    stats(N);
    detail("zeros: " + fmt_zeros(zeros));
    bool monotone = true;
    for (std::size_t i = 1; i < N.size(); ++i) monotone = monotone && N[i] >= N[i - 1];
    if (!monotone) detail("N_ram is not nondecreasing");
    const bool eff_ok = !c_.expect.effective || *c_.expect.effective;
    set(monotone && expected_zeros_ok(zeros) && eff_ok && !expectation_failed_);
  }

  void first_integral() {
    const auto pts = samples();
    const double dev = first_integral_check(*c_.curve, *c_.first_integral, pts);
    std::vector<std::vector<double>> rows;
    for (cplx z : pts) {
      const auto w = c_.curve->chart_jet(z, 0, 0);
      std::vector<cplx> wv;
      for (const auto& j : w) wv.push_back(j.value());
      const cplx v = c_.first_integral->value(z, wv);
      rows.push_back({z.real(), z.imag(), v.real(), v.imag()});
    }
    write_rows("first_integral.csv", "z_re,z_im,phi_re,phi_im", rows);
    rep_.max = dev;
    detail("max deviation " + format_double(dev));
    bool ok = true;
    if (c_.expect.max_deviation) ok = ok && dev <= *c_.expect.max_deviation;
    if (c_.expect.min_deviation) ok = ok && dev > *c_.expect.min_deviation;
    if (!c_.expect.max_deviation && !c_.expect.min_deviation) ok = dev <= 1e-12;
    set(ok);
  }

  void autoparallel() {
    const auto pts = samples();
    std::vector<std::vector<double>> rows;
    double worst = 0.0, off = 0.0;
    for (cplx z : pts) {
      const cplx w = autoparallel_wronskian(*c_.curve, *c_.connection, z);
      rows.push_back({z.real(), z.imag(), w.real(), w.imag()});
      worst = std::max(worst, std::abs(w));
      if (c_.expect.wronskian) off = std::max(off, std::abs(w - *c_.expect.wronskian));
    }
    write_rows("autoparallel.csv", "z_re,z_im,W_re,W_im", rows);
    rep_.max = worst;
    detail("max |det| " + format_double(worst));
    const bool want_autoparallel = c_.expect.autoparallel.value_or(!c_.expect.wronskian.has_value());
    bool ok = want_autoparallel ? worst <= c_.tol.wronskian : worst > c_.tol.wronskian;
    if (c_.expect.wronskian) {
      detail("max |det - " + fmt_cplx(*c_.expect.wronskian) + "| " + format_double(off));
      ok = ok && off <= c_.tol.wronskian * std::max(1.0, std::abs(*c_.expect.wronskian));
    }
    set(ok);
  }

  void siu() {
    const auto mem = pole_membership(*c_.curve, c_.connection->pole_section(), membership_samples(),
                                     c_.connection->chart());
    {
      const fs::path p = dir_ / "membership.txt";
      std::ofstream out(p, std::ios::binary);
      out << mem.text();
      rep_.files.push_back(p);
    }
    detail(std::string("curve ") + (mem.contained ? "lies" : "does not lie") + " in the pole divisor {t = 0} on the samples");
    const bool contained_ok = !c_.expect.contained || *c_.expect.contained == mem.contained;
    try {
      const auto S = siu_smt_residual(*c_.curve, *c_.connection, c_.grid, q_, &log_);
      write_tables("siu_residual.csv", {S.T, S.N_ram, S.lhs, S.ratio_log});
      rep_.max = S.bound;
      detail("bound on ratio_log where T > 1: " + format_double(S.bound));
      bool ok = std::isfinite(S.bound) && contained_ok && !c_.expect.autoparallel.value_or(false);
      if (c_.expect.max_ratio) ok = ok && S.bound <= *c_.expect.max_ratio;
      set(ok);
    } catch (const DegenerateError& e) {
      detail(e.what());
      if (c_.expect.autoparallel.value_or(false)) set(contained_ok);
      else throw;
    }
  }

  void diagnostic() {
    std::function<double(cplx)> kappa;
    if (c_.kappa_from_curve) {
      const ProjectiveCurve f = *c_.curve;
      kappa = [f](cplx z) { return std::numbers::pi * fs_pullback_density(f, z); };
    } else {
      const Expression e = *c_.kappa;
      kappa = [e](cplx z) {
        const cplx v = e.value(z);
        if (v.real() < 0.0 || std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v)))
          throw DomainError("kappa must be real and non-negative");
        return v.real();
      };
    }
    const auto rep = calculus_lemma_diagnostic(kappa, c_.grid, c_.tol.delta, q_);
    std::vector<double> cm, T, dT, ratio, viol;
    for (const auto& r : rep.rows) {
      cm.push_back(r.circle_mean);
      T.push_back(r.T);
      dT.push_back(r.dT);
      ratio.push_back(r.ratio);
      viol.push_back(r.borel_violation ? 1.0 : 0.0);
    }
    GrowthTable tr("ratio", c_.grid, ratio);
    write_tables("diagnostic.csv", {GrowthTable("circle_mean", c_.grid, cm), GrowthTable("T", c_.grid, T),
                                    GrowthTable("dT", c_.grid, dT), tr, GrowthTable("borel_violation", c_.grid, viol)});
    stats(tr);
    detail("max ratio " + format_double(rep.max_ratio));
    detail("Borel-violating log-measure " + format_double(rep.exceptional_log_measure) + " of " +
           format_double(rep.grid_log_measure) + " (linear measure " + format_double(rep.exceptional_measure) + ")");
    set(!c_.expect.max_ratio || rep.max_ratio <= *c_.expect.max_ratio);
  }

  const ExperimentConfig& c_;
  fs::path dir_;
  RunOptions o_;
  QuadratureOptions q_;
  ExperimentReport rep_;
  RunLog log_;
  bool expectation_failed_ = false;
};

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, const fs::path& out_dir, const RunOptions& options) {
  return Run(config, out_dir, options).execute();
}

std::vector<ExperimentReport> run_batch(const std::vector<ExperimentConfig>& configs, const RunOptions& options) {
  std::set<std::string> names;
  for (const auto& c : configs)
    if (!names.insert(c.name).second) throw ConfigErrorList(c.source, {{0, 0, "duplicate experiment name '" + c.name + "'"}});
  std::vector<ExperimentReport> reports(configs.size());
  const long count = static_cast<long>(configs.size());
  const int jobs = std::max(1, options.jobs);
  // Each experiment owns its subdirectory; inner kernels run serially when
  // experiments already run side by side.
  RunOptions inner = options;
  if (jobs > 1) inner.exec = Exec::Serial;
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs) if (jobs > 1)
  for (long i = 0; i < count; ++i) {
    const auto& c = configs[static_cast<std::size_t>(i)];
    reports[static_cast<std::size_t>(i)] = run_experiment(c, options.out_dir / c.name, inner);
  }
  std::ofstream out(options.out_dir / "summary.txt", std::ios::binary);
  for (const auto& r : reports) out << status_name(r.status) << ' ' << r.name << " (" << kind_name(r.kind) << ")\n";
  return reports;
}

}  // namespace vdlab
