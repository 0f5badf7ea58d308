// CPLEX LP dialect writer/reader and the external-solver bridge.
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lngopt/milp.hpp"

namespace lngopt {

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' || c == ']' ||
         c == '!' || c == '#' || c == '$' || c == '%' || c == '&' || c == '(' || c == ')' || c == '/' ||
         c == ',' || c == ';' || c == '?' || c == '@' || c == '\'' || c == '{' || c == '}' || c == '|' ||
         c == '~' || c == '"' || c == '`';
}

std::vector<std::string> lp_names(const std::vector<std::string>& ids, const char* fallback) {
  std::vector<std::string> out;
  std::set<std::string> used;
  for (const auto& id : ids) {
    std::string s;
    for (char c : id) s.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ? c : '_');
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) s = fallback + s;
    std::string base = s;
    for (int k = 1; !used.insert(s).second; ++k) s = base + "_" + std::to_string(k);
    out.push_back(std::move(s));
  }
  return out;
}

void write_terms(std::ostringstream& out, const std::vector<std::pair<double, std::string>>& terms) {
  int on_line = 0;
  bool first = true;
  for (const auto& [c, name] : terms) {
    if (on_line == 8) {
      out << "\n   ";
      on_line = 0;
    }
    if (first) out << (c < 0 ? "- " : "") << num(std::abs(c)) << ' ' << name;
    else out << (c < 0 ? " - " : " + ") << num(std::abs(c)) << ' ' << name;
    first = false;
    ++on_line;
  }
}

}  // namespace

std::string export_lp(const MilpModel& model) {
  const auto& vars = model.variables();
  std::vector<std::string> ids;
  for (const auto& v : vars) ids.push_back(v.id);
  auto names = lp_names(ids, "v_");
  std::vector<std::string> row_ids;
  for (const auto& r : model.constraints()) row_ids.push_back(r.name);
  auto row_names = lp_names(row_ids, "c_");

  std::ostringstream out;
  out << "\\ lngopt model: " << vars.size() << " variables, " << model.num_constraints() << " constraints\n";
  out << "Maximize\n obj:";
  std::vector<std::pair<double, std::string>> obj;
  for (std::size_t j = 0; j < vars.size(); ++j)
    if (vars[j].objective != 0.0) obj.emplace_back(vars[j].objective, names[j]);
  if (!obj.empty()) {
    out << ' ';
    write_terms(out, obj);
  }
  if (model.objective_constant() != 0.0)
    out << (model.objective_constant() < 0 ? " - " : " + ") << num(std::abs(model.objective_constant()));
  else if (obj.empty() && !vars.empty())
    out << " 0 " << names[0];
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < model.num_constraints(); ++i) {
    const auto& row = model.constraints()[i];
    std::vector<std::pair<double, std::string>> terms;
    for (const auto& t : row.terms) terms.emplace_back(t.coef, names[t.var]);
    if (terms.empty()) {
      if (vars.empty()) continue;
      terms.emplace_back(0.0, names[0]);
    }
    out << ' ' << row_names[i] << ": ";
    write_terms(out, terms);
    out << (row.cmp == Comparator::le ? " <= " : row.cmp == Comparator::ge ? " >= " : " = ") << num(row.rhs) << '\n';
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& v = vars[j];
    if (v.kind == VarKind::binary) continue;
    if (v.lower == 0.0 && std::isinf(v.upper)) continue;
    if (std::isinf(v.lower) && std::isinf(v.upper)) out << ' ' << names[j] << " free\n";
    else if (v.lower == v.upper) out << ' ' << names[j] << " = " << num(v.lower) << '\n';
    else out << ' ' << num(v.lower) << " <= " << names[j] << " <= " << num(v.upper) << '\n';
  }
  bool any_binary = false;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (vars[j].kind != VarKind::binary) continue;
    if (!any_binary) out << "Binaries\n";
    any_binary = true;
    out << ' ' << names[j] << '\n';
  }
  out << "End\n";
  return out.str();
}

namespace {

struct Token {
  enum Kind { name, number, op, colon } kind;
  std::string text;
  double value = 0.0;
  int line = 0;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> toks;
  int line = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '\\') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (c == ':') {
      toks.push_back({Token::colon, ":", 0.0, line});
      ++i;
      continue;
    }
    if (c == '<' || c == '>' || c == '=') {
      std::string o(1, c);
      ++i;
      if (i < n && (text[i] == '=' || text[i] == '<' || text[i] == '>')) o.push_back(text[i++]);
      if (o == "=<" || o == "<") o = "<=";
      if (o == "=>" || o == ">") o = ">=";
      if (o == "==") o = "=";
      toks.push_back({Token::op, o, 0.0, line});
      continue;
    }
    if (c == '+' || c == '-') {
      toks.push_back({Token::op, std::string(1, c), 0.0, line});
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t j = i;
      while (j < n && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.')) ++j;
      if (j < n && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < n && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < n && std::isdigit(static_cast<unsigned char>(text[k]))) {
          j = k;
          while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        }
      }
      Token t{Token::number, text.substr(i, j - i), 0.0, line};
      auto res = std::from_chars(text.data() + i, text.data() + j, t.value);
      if (res.ec != std::errc()) throw ModelError("LP line " + std::to_string(line) + ": bad number");
      toks.push_back(std::move(t));
      i = j;
      continue;
    }
    if (name_char(c)) {
      std::size_t j = i;
      while (j < n && name_char(text[j])) ++j;
      toks.push_back({Token::name, text.substr(i, j - i), 0.0, line});
      i = j;
      continue;
    }
    throw ModelError("LP line " + std::to_string(line) + ": unexpected character '" + std::string(1, c) + "'");
  }
  return toks;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

enum class Section { none, objective, constraints, bounds, binaries, generals, end };

struct LpReader {
  std::vector<Token> toks;
  std::size_t pos = 0;
  bool minimize = false;

  std::vector<std::string> var_order;
  std::map<std::string, std::size_t> var_ids;
  struct Bnd {
    double lo = 0.0, hi = kInfinity;
    bool binary = false;
  };
  std::vector<Bnd> bounds;
  std::vector<double> objective;
  double constant = 0.0;
  struct Row {
    std::string name;
    std::vector<std::pair<std::size_t, double>> terms;
    Comparator cmp;
    double rhs;
  };
  std::vector<Row> rows;

  [[noreturn]] void fail(const std::string& what) const {
    int line = pos < toks.size() ? toks[pos].line : (toks.empty() ? 0 : toks.back().line);
    throw ModelError("LP line " + std::to_string(line) + ": " + what);
  }

  std::size_t var(const std::string& name) {
    auto it = var_ids.find(name);
    if (it != var_ids.end()) return it->second;
    var_ids.emplace(name, var_order.size());
    var_order.push_back(name);
    bounds.emplace_back();
    objective.push_back(0.0);
    return var_order.size() - 1;
  }

  // Returns the section a keyword at pos starts, consuming it.
  std::optional<Section> section_at() {
    if (pos >= toks.size() || toks[pos].kind != Token::name) return std::nullopt;
    std::string w = lower(toks[pos].text);
    auto next_is = [&](const char* word) {
      return pos + 1 < toks.size() && toks[pos + 1].kind == Token::name && lower(toks[pos + 1].text) == word;
    };
    if (w == "maximize" || w == "maximise" || w == "maximum" || w == "max") {
      ++pos;
      minimize = false;
      return Section::objective;
    }
    if (w == "minimize" || w == "minimise" || w == "minimum" || w == "min") {
      ++pos;
      minimize = true;
      return Section::objective;
    }
    if ((w == "subject" && next_is("to")) || (w == "such" && next_is("that"))) {
      pos += 2;
      return Section::constraints;
    }
    if (w == "st" || w == "s.t.") {
      ++pos;
      return Section::constraints;
    }
    if (w == "bounds" || w == "bound") {
      ++pos;
      return Section::bounds;
    }
    if (w == "binaries" || w == "binary" || w == "bin") {
      ++pos;
      return Section::binaries;
    }
    if (w == "generals" || w == "general" || w == "gen" || w == "integers") {
      ++pos;
      return Section::generals;
    }
    if (w == "end") {
      ++pos;
      return Section::end;
    }
    return std::nullopt;
  }

  bool at_section() {
    std::size_t save = pos;
    bool mn = minimize;
    bool is = section_at().has_value();
    pos = save;
    minimize = mn;
    return is;
  }

  static bool is_inf_word(const std::string& s) {
    std::string w = lower(s);
    return w == "inf" || w == "infinity";
  }

  // Linear expression; stops before a comparator, a section keyword, or a label.
  void expression(std::vector<std::pair<std::size_t, double>>& terms, double* constant_out) {
    while (pos < toks.size()) {
      if (toks[pos].kind == Token::op && (toks[pos].text == "<=" || toks[pos].text == ">=" || toks[pos].text == "="))
        return;
      if (at_section()) return;
      if (toks[pos].kind == Token::name && pos + 1 < toks.size() && toks[pos + 1].kind == Token::colon) return;
      double sign = 1.0;
      while (pos < toks.size() && toks[pos].kind == Token::op && (toks[pos].text == "+" || toks[pos].text == "-")) {
        if (toks[pos].text == "-") sign = -sign;
        ++pos;
      }
      if (pos >= toks.size()) fail("unexpected end of expression");
      double coef = 1.0;
      bool have_num = false;
      if (toks[pos].kind == Token::number) {
        coef = toks[pos].value;
        have_num = true;
        ++pos;
      }
      if (pos < toks.size() && toks[pos].kind == Token::name && !at_section() &&
          !(pos + 1 < toks.size() && toks[pos + 1].kind == Token::colon)) {
        terms.emplace_back(var(toks[pos].text), sign * coef);
        ++pos;
      } else if (have_num) {
        if (!constant_out) fail("constant term not allowed here");
        *constant_out += sign * coef;
      } else {
        fail("expected a term");
      }
    }
  }

  double signed_number() {
    double sign = 1.0;
    while (pos < toks.size() && toks[pos].kind == Token::op && (toks[pos].text == "+" || toks[pos].text == "-")) {
      if (toks[pos].text == "-") sign = -sign;
      ++pos;
    }
    if (pos < toks.size() && toks[pos].kind == Token::number) return sign * toks[pos++].value;
    if (pos < toks.size() && toks[pos].kind == Token::name && is_inf_word(toks[pos].text)) {
      ++pos;
      return sign * kInfinity;
    }
    fail("expected a number");
  }

  void parse_objective() {
    if (pos + 1 < toks.size() && toks[pos].kind == Token::name && toks[pos + 1].kind == Token::colon) pos += 2;
    std::vector<std::pair<std::size_t, double>> terms;
    expression(terms, &constant);
    for (auto [j, c] : terms) objective[j] += c;
  }

  void parse_constraints() {
    while (pos < toks.size() && !at_section()) {
      Row row;
      if (toks[pos].kind == Token::name && pos + 1 < toks.size() && toks[pos + 1].kind == Token::colon) {
        row.name = toks[pos].text;
        pos += 2;
      }
      double lhs_const = 0.0;
      expression(row.terms, &lhs_const);
      if (pos >= toks.size() || toks[pos].kind != Token::op) fail("expected a comparator");
      std::string op = toks[pos++].text;
      row.cmp = op == "<=" ? Comparator::le : op == ">=" ? Comparator::ge : Comparator::eq;
      row.rhs = signed_number() - lhs_const;
      rows.push_back(std::move(row));
    }
  }

  void parse_bounds() {
    while (pos < toks.size() && !at_section()) {
      int line = toks[pos].line;
      std::vector<Token> stmt;
      while (pos < toks.size() && toks[pos].line == line && !at_section()) stmt.push_back(toks[pos++]);
      apply_bound(stmt);
    }
  }

  void apply_bound(const std::vector<Token>& s) {
    // Collapse sign tokens into the following number/inf.
    struct Item {
      enum { value, name, cmp, word } kind;
      double v = 0.0;
      std::string text;
    };
    std::vector<Item> items;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Token& t = s[i];
      if (t.kind == Token::op && (t.text == "+" || t.text == "-")) {
        double sign = t.text == "-" ? -1.0 : 1.0;
        if (i + 1 >= s.size()) fail("dangling sign in bound");
        const Token& u = s[++i];
        if (u.kind == Token::number) items.push_back({Item::value, sign * u.value, ""});
        else if (u.kind == Token::name && is_inf_word(u.text)) items.push_back({Item::value, sign * kInfinity, ""});
        else fail("bad bound");
      } else if (t.kind == Token::number) {
        items.push_back({Item::value, t.value, ""});
      } else if (t.kind == Token::op) {
        items.push_back({Item::cmp, 0.0, t.text});
      } else if (t.kind == Token::name && is_inf_word(t.text)) {
        items.push_back({Item::value, kInfinity, ""});
      } else if (t.kind == Token::name && lower(t.text) == "free") {
        items.push_back({Item::word, 0.0, "free"});
      } else if (t.kind == Token::name) {
        items.push_back({Item::name, 0.0, t.text});
      } else {
        fail("bad bound");
      }
    }
    auto set = [&](std::size_t j, const std::string& op, double v, bool var_on_left) {
      auto& b = bounds[j];
      if (op == "=") {
        b.lo = b.hi = v;
      } else if ((op == "<=") == var_on_left) {
        b.hi = v;
      } else {
        b.lo = v;
      }
    };
    if (items.size() == 2 && items[0].kind == Item::name && items[1].kind == Item::word) {
      auto j = var(items[0].text);
      bounds[j].lo = -kInfinity;
      bounds[j].hi = kInfinity;
    } else if (items.size() == 3 && items[0].kind == Item::name && items[1].kind == Item::cmp &&
               items[2].kind == Item::value) {
      set(var(items[0].text), items[1].text, items[2].v, true);
    } else if (items.size() == 3 && items[0].kind == Item::value && items[1].kind == Item::cmp &&
               items[2].kind == Item::name) {
      set(var(items[2].text), items[1].text, items[0].v, false);
    } else if (items.size() == 5 && items[0].kind == Item::value && items[1].kind == Item::cmp &&
               items[2].kind == Item::name && items[3].kind == Item::cmp && items[4].kind == Item::value) {
      auto j = var(items[2].text);
      set(j, items[1].text, items[0].v, false);
      set(j, items[3].text, items[4].v, true);
    } else {
      fail("unrecognized bound statement");
    }
  }

  void parse_names(bool binary) {
    while (pos < toks.size() && !at_section()) {
      if (toks[pos].kind != Token::name) fail("expected a variable name");
      auto j = var(toks[pos++].text);
      if (!binary) fail("general integer variables are not supported");
      bounds[j].binary = true;
    }
  }

  void run() {
    Section sec = Section::none;
    while (pos < toks.size()) {
      auto s = section_at();
      if (s) sec = *s;
      switch (sec) {
        case Section::none: fail("expected Maximize or Minimize");
        case Section::objective: parse_objective(); break;
        case Section::constraints: parse_constraints(); break;
        case Section::bounds: parse_bounds(); break;
        case Section::binaries: parse_names(true); break;
        case Section::generals: parse_names(false); break;
        case Section::end:
          if (pos < toks.size()) fail("text after End");
          return;
      }
    }
  }
};

}  // namespace

MilpModel parse_lp(const std::string& text) {
  LpReader r;
  r.toks = tokenize(text);
  r.run();
  MilpModel model;
  for (std::size_t j = 0; j < r.var_order.size(); ++j) {
    const auto& b = r.bounds[j];
    double c = r.minimize ? -r.objective[j] : r.objective[j];
    if (b.binary) model.add_binary(r.var_order[j], c);
    else model.add_continuous(r.var_order[j], b.lo, b.hi, c);
  }
  for (auto& row : r.rows) {
    std::vector<LinearTerm> terms;
    for (auto [j, c] : row.terms) terms.push_back({j, c});
    model.add_constraint(row.name, std::move(terms), row.cmp, row.rhs);
  }
  model.set_objective_constant(r.minimize ? -r.constant : r.constant);
  return model;
}

std::string format_solution_file(const MilpModel& model, const MilpSolution& sol) {
  std::ostringstream out;
  out << "# status " << to_string(sol.status) << "\n";
  if (sol.has_solution()) {
    out << "# objective " << num(sol.objective) << "\n";
    for (std::size_t j = 0; j < model.num_variables(); ++j)
      out << model.variables()[j].id << ' ' << num(sol.values[j]) << '\n';
  }
  return out.str();
}

std::vector<double> parse_solution_file(const MilpModel& model, const std::string& text, bool* declared_optimal) {
  std::vector<double> x(model.num_variables(), 0.0);
  if (declared_optimal) *declared_optimal = false;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string content = line;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      std::istringstream c(line.substr(hash + 1));
      std::string key, val;
      c >> key >> val;
      if (key == "status" && val == "optimal" && declared_optimal) *declared_optimal = true;
      content = line.substr(0, hash);
    }
    std::istringstream ls(content);
    std::string name, value;
    if (!(ls >> name)) continue;
    if (!(ls >> value)) throw ModelError("solution line " + std::to_string(line_no) + ": missing value");
    auto j = model.find_variable(name);
    if (!j) throw ModelError("solution line " + std::to_string(line_no) + ": unknown variable '" + name + "'");
    double v = 0.0;
    auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc()) throw ModelError("solution line " + std::to_string(line_no) + ": bad value");
    x[*j] = v;
  }
  return x;
}

MilpSolution solve_external(const MilpModel& model, const std::string& command, const std::string& work_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(work_dir);
  // The LP text uses sanitized names; solve the re-parsed model so names match.
  std::string text = export_lp(model);
  MilpModel exported = parse_lp(text);
  const fs::path lp_path = fs::path(work_dir) / "model.lp";
  const fs::path sol_path = fs::path(work_dir) / "model.sol";
  {
    std::ofstream out(lp_path);
    out << text;
  }
  fs::remove(sol_path);
  std::string cmd = command;
  for (auto [key, val] : {std::pair<std::string, std::string>{"{lp}", lp_path.string()}, {"{sol}", sol_path.string()}})
    for (std::size_t at = cmd.find(key); at != std::string::npos; at = cmd.find(key, at + val.size()))
      cmd.replace(at, key.size(), val);
  int rc = std::system(cmd.c_str());
  if (rc != 0) throw std::runtime_error("external solver command failed with code " + std::to_string(rc));
  std::ifstream in(sol_path);
  if (!in) throw std::runtime_error("external solver wrote no solution file");
  std::stringstream ss;
  ss << in.rdbuf();
  bool optimal = false;
  std::vector<double> xe = parse_solution_file(exported, ss.str(), &optimal);

  // Map back by position: parse_lp preserves first-appearance order, which
  // may differ from the model order, so go through names.
  std::vector<std::string> ids;
  for (const auto& v : model.variables()) ids.push_back(v.id);
  auto names = lp_names(ids, "v_");
  MilpSolution sol;
  sol.values.assign(model.num_variables(), 0.0);
  for (std::size_t j = 0; j < names.size(); ++j) {
    auto k = exported.find_variable(names[j]);
    if (k) sol.values[j] = xe[*k];
  }
  if (model.max_violation(sol.values) > 1e-6) {
    sol.status = SolveStatus::infeasible;
    sol.values.clear();
    sol.gap = kInfinity;
    return sol;
  }
  sol.objective = model.objective_value(sol.values);
  sol.status = optimal ? SolveStatus::optimal : SolveStatus::feasible;
  sol.bound = optimal ? sol.objective : kInfinity;
  sol.gap = optimal ? 0.0 : kInfinity;
  return sol;
}

}  // namespace lngopt
