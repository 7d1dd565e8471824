#include "dstab/problem_file.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dstab/error.hpp"

namespace dstab {

namespace {

struct Item {
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;  // 1-based column of text[0]
};

Item trimmed(const std::string& s, std::size_t line, std::size_t column) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return {s.substr(b, e - b), line, column + b};
}

Item sub_item(const Item& it, std::size_t pos, std::size_t len = std::string::npos) {
  return trimmed(it.text.substr(pos, len), it.line, it.column + pos);
}

[[noreturn]] void fail(const Item& at, const std::string& what) {
  throw ParseError(what, at.line, at.column);
}

std::vector<Item> split(const Item& it, const std::string& separators) {
  std::vector<Item> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= it.text.size(); ++i) {
    if (i == it.text.size() || separators.find(it.text[i]) != std::string::npos) {
      Item part = sub_item(it, start, i - start);
      if (!part.text.empty()) out.push_back(std::move(part));
      start = i + 1;
    }
  }
  return out;
}

Polynomial parse_expr(const Item& it, const std::vector<std::string>& vars) {
  if (it.text.empty()) fail(it, "expected an expression");
  try {
    return parse_polynomial(it.text, vars);
  } catch (const ParseError& e) {
    throw ParseError(e.message(), it.line, it.column + e.column() - 1);
  }
}

double parse_number(const Item& it) {
  const Polynomial p = parse_expr(it, {});
  return p.evaluate(std::span<const double>{});
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

bool parse_bool(const Item& it) {
  if (it.text == "true" || it.text == "yes" || it.text == "1") return true;
  if (it.text == "false" || it.text == "no" || it.text == "0") return false;
  fail(it, "expected true or false");
}

int parse_int(const Item& it) {
  const double v = parse_number(it);
  if (v != std::floor(v) || std::abs(v) > 1e9) fail(it, "expected an integer");
  return static_cast<int>(v);
}

struct Relational {
  Item lhs;
  Item rhs;
  std::string op;
};

std::optional<Relational> split_relation(const Item& it) {
  for (const std::string op : {">=", "<=", "="}) {
    const auto pos = it.text.find(op);
    if (pos != std::string::npos) {
      return Relational{sub_item(it, 0, pos), sub_item(it, pos + op.size()), op};
    }
  }
  return std::nullopt;
}

Constraint relation_constraint(const Item& it, const std::vector<std::string>& vars) {
  const auto rel = split_relation(it);
  if (!rel) fail(it, "expected a relation (>=, <= or =)");
  const Polynomial lhs = parse_expr(rel->lhs, vars);
  const Polynomial rhs = parse_expr(rel->rhs, vars);
  if (rel->op == ">=") return {lhs - rhs, Relation::GreaterEqualZero};
  if (rel->op == "<=") return {rhs - lhs, Relation::GreaterEqualZero};
  return {lhs - rhs, Relation::EqualZero};
}

const std::set<std::string> kSections = {"variables", "matrix", "delta",
                                         "region",    "moments", "options"};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Shortest representation that reads back identically.
  for (int prec = 1; prec <= 17; ++prec) {
    char probe[64];
    std::snprintf(probe, sizeof probe, "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == v) return probe;
  }
  return buf;
}

}  // namespace

std::string substitute_parameters(const std::string& text, const Parameters& params) {
  std::string out;
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '$' && i + 1 < text.size() && text[i + 1] == '{') {
      const auto close = text.find('}', i + 2);
      if (close == std::string::npos) throw ParseError("unterminated ${", line, column);
      const std::string name = text.substr(i + 2, close - i - 2);
      auto it = params.find(name);
      if (it == params.end()) throw ParseError("unbound parameter '" + name + "'", line, column);
      out += "(" + format_double(it->second) + ")";
      column += close - i + 1;
      i = close;
      continue;
    }
    out += text[i];
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return out;
}

ProblemFile parse_problem(const std::string& raw, const Parameters& params) {
  const std::string text = substitute_parameters(raw, params);
  std::map<std::string, std::vector<Item>> sections;
  std::map<std::string, Item> headers;
  std::string current;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    Item it = trimmed(line, number, 1);
    if (it.text.empty()) continue;
    if (it.text.front() == '[' && it.text.back() == ']') {
      const std::string name = trimmed(it.text.substr(1, it.text.size() - 2), 0, 0).text;
      if (!kSections.count(name)) fail(it, "unknown section [" + name + "]");
      if (headers.count(name)) fail(it, "duplicate section [" + name + "]");
      headers.emplace(name, it);
      sections[name];
      current = name;
      continue;
    }
    if (current.empty()) fail(it, "content before the first section");
    sections[current].push_back(std::move(it));
  }

  for (const char* required : {"variables", "matrix", "delta"}) {
    if (!headers.count(required)) {
      throw ParseError(std::string("missing section [") + required + "]", number + 1, 1);
    }
  }

  // [variables]
  std::vector<std::string> vars;
  for (const auto& it : sections["variables"]) {
    for (const auto& v : split(it, ", \t")) {
      if (!is_identifier(v.text)) fail(v, "invalid variable name '" + v.text + "'");
      if (std::find(vars.begin(), vars.end(), v.text) != vars.end()) {
        fail(v, "duplicate variable '" + v.text + "'");
      }
      vars.push_back(v.text);
    }
  }
  if (vars.empty()) fail(headers["variables"], "[variables] declares no variables");

  // [matrix]
  std::vector<Item> cells;
  for (const auto& it : sections["matrix"]) {
    for (auto& c : split(it, ",")) cells.push_back(std::move(c));
  }
  if (cells.empty()) fail(headers["matrix"], "[matrix] is empty");
  const int n = parse_int(cells.front());
  if (n < 1) fail(cells.front(), "matrix size must be positive");
  const std::size_t want = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (cells.size() - 1 != want) {
    fail(headers["matrix"], "[matrix] expects " + std::to_string(want) + " entries, found " +
                                std::to_string(cells.size() - 1));
  }
  std::vector<Polynomial> entries;
  for (std::size_t i = 1; i < cells.size(); ++i) entries.push_back(parse_expr(cells[i], vars));

  // [delta]
  std::vector<Constraint> delta;
  for (const auto& it : sections["delta"]) {
    const auto in_pos = it.text.find(" in ");
    if (in_pos != std::string::npos && !split_relation(it)) {
      const Item name = sub_item(it, 0, in_pos);
      auto v = std::find(vars.begin(), vars.end(), name.text);
      if (v == vars.end()) fail(name, "unknown variable '" + name.text + "'");
      const Item range = sub_item(it, in_pos + 4);
      if (range.text.size() < 2 || range.text.front() != '[' || range.text.back() != ']') {
        fail(range, "expected [lo, hi]");
      }
      const auto parts = split(sub_item(range, 1, range.text.size() - 2), ",");
      if (parts.size() != 2) fail(range, "expected [lo, hi]");
      const double lo = parse_number(parts[0]);
      const double hi = parse_number(parts[1]);
      if (!(lo <= hi)) fail(range, "lower bound exceeds upper bound");
      const Polynomial x = Polynomial::variable(vars.size(), static_cast<std::size_t>(v - vars.begin()));
      delta.push_back({x - lo, Relation::GreaterEqualZero});
      delta.push_back({-x + hi, Relation::GreaterEqualZero});
    } else {
      delta.push_back(relation_constraint(it, vars));
    }
  }
  if (delta.empty()) fail(headers["delta"], "[delta] is empty");

  // [region]
  StabilityRegionComplement region = region_preset(RegionPreset::LeftHalfPlaneClosure);
  if (headers.count("region")) {
    const auto& lines = sections["region"];
    if (lines.empty()) fail(headers["region"], "[region] is empty");
    std::optional<RegionPreset> preset;
    if (lines.size() == 1) preset = parse_region_preset(lines.front().text);
    if (preset) {
      region = region_preset(*preset);
    } else {
      const std::vector<std::string> lambda_vars = {kLambdaRe, kLambdaIm};
      std::vector<Constraint> cs;
      for (const auto& it : lines) {
        if (is_identifier(it.text)) fail(it, "unknown region preset '" + it.text + "'");
        cs.push_back(relation_constraint(it, lambda_vars));
      }
      region = custom_region(std::move(cs));
    }
  }

  // [moments]
  std::vector<MomentConstraint> moments;
  for (const auto& it : sections["moments"]) {
    if (it.text.rfind("E[", 0) != 0) fail(it, "expected E[expression] relation value");
    const auto close = it.text.find(']');
    if (close == std::string::npos) fail(it, "missing ] after E[");
    const Item expr = sub_item(it, 2, close - 2);
    const Item rest = sub_item(it, close + 1);
    MomentConstraint mc;
    mc.f = parse_expr(expr, vars);
    std::size_t skip = 0;
    if (rest.text.rfind(">=", 0) == 0) {
      mc.relation = MomentRelation::GreaterEqual;
      skip = 2;
    } else if (rest.text.rfind("<=", 0) == 0) {
      mc.relation = MomentRelation::LessEqual;
      skip = 2;
    } else if (rest.text.rfind("=", 0) == 0) {
      mc.relation = MomentRelation::Equal;
      skip = 1;
    } else {
      fail(rest, "expected =, <= or >= after E[...]");
    }
    mc.target = parse_number(sub_item(rest, skip));
    moments.push_back(std::move(mc));
  }

  // [options]
  ProblemFile file;
  std::optional<EigenSpace> space;
  bool force_real = false;
  auto& opt = file.options;
  for (const auto& it : sections["options"]) {
    const auto eq = it.text.find('=');
    if (eq == std::string::npos) fail(it, "expected key = value");
    const Item key = sub_item(it, 0, eq);
    const Item value = sub_item(it, eq + 1);
    const std::string& k = key.text;
    if (k == "eigen_space") {
      if (value.text == "real") {
        space = EigenSpace::Real;
      } else if (value.text == "complex") {
        space = EigenSpace::Complex;
      } else if (value.text != "auto") {
        fail(value, "eigen_space must be real, complex or auto");
      }
    } else if (k == "force_real") {
      force_real = parse_bool(value);
    } else if (k == "tau") {
      opt.tau = parse_int(value);
    } else if (k == "tau_max") {
      opt.tau_max = parse_int(value);
    } else if (k == "margin") {
      opt.margin = parse_number(value);
    } else if (k == "tolerance") {
      opt.feasibility_tolerance = opt.gap_tolerance = parse_number(value);
    } else if (k == "feasibility_tolerance") {
      opt.feasibility_tolerance = parse_number(value);
    } else if (k == "gap_tolerance") {
      opt.gap_tolerance = parse_number(value);
    } else if (k == "max_iterations") {
      opt.max_iterations = parse_int(value);
    } else if (k == "equality_encoding") {
      if (value.text == "pair") {
        opt.equality_encoding = EqualityEncoding::InequalityPair;
      } else if (value.text == "zero") {
        opt.equality_encoding = EqualityEncoding::ZeroLocalizing;
      } else {
        fail(value, "equality_encoding must be pair or zero");
      }
    } else if (k == "lambda_radius") {
      opt.lambda_radius = parse_number(value);
    } else if (k == "scale") {
      opt.scale_variables = parse_bool(value);
    } else {
      fail(key, "unknown option '" + k + "'");
    }
  }
  if (force_real && !space) space = EigenSpace::Real;

  try {
    UncertainMatrix matrix(vars, static_cast<std::size_t>(n), std::move(entries));
    file.problem = DStabilityProblem(std::move(matrix), SemialgebraicSet(vars, std::move(delta)),
                                     std::move(region), std::move(moments), space, force_real);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw Error(std::string("invalid problem: ") + e.what());
  }
  file.explicit_eigen_space = space.has_value();
  return file;
}

ProblemFile load_problem(const std::string& path, const Parameters& params) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open problem file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_problem(ss.str(), params);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.message(), e.line(), e.column());
  }
}

std::string format_problem(const ProblemFile& file) {
  const auto& p = file.problem;
  const auto& vars = p.matrix().variables();
  std::ostringstream out;
  out << "[variables]\n";
  for (std::size_t i = 0; i < vars.size(); ++i) out << (i ? ", " : "") << vars[i];
  out << "\n\n[matrix]\n" << p.matrix().size() << "\n";
  const std::size_t n = p.matrix().size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out << (j ? ", " : "") << p.matrix().entry(i, j).to_string(vars);
    }
    out << "\n";
  }
  auto write_constraint = [&](const Constraint& c, const std::vector<std::string>& names) {
    out << c.poly.to_string(names) << (c.relation == Relation::EqualZero ? " = 0" : " >= 0")
        << "\n";
  };
  out << "\n[delta]\n";
  for (const auto& c : p.delta().constraints()) write_constraint(c, vars);

  out << "\n[region]\n";
  bool preset = false;
  for (auto r : {RegionPreset::LeftHalfPlaneClosure, RegionPreset::UnitDiskExteriorClosure,
                 RegionPreset::ImaginaryAxis, RegionPreset::Origin}) {
    if (p.region_complement() == region_preset(r)) {
      out << to_string(r) << "\n";
      preset = true;
      break;
    }
  }
  if (!preset) {
    for (const auto& c : p.region_complement().set.constraints()) {
      write_constraint(c, p.region_complement().set.variables());
    }
  }

  if (!p.user_moment_constraints().empty()) {
    out << "\n[moments]\n";
    for (const auto& mc : p.user_moment_constraints()) {
      const char* op = mc.relation == MomentRelation::Equal       ? "="
                       : mc.relation == MomentRelation::LessEqual ? "<="
                                                                  : ">=";
      out << "E[" << mc.f.to_string(vars) << "] " << op << " " << format_double(mc.target)
          << "\n";
    }
  }

  std::ostringstream opts;
  const auto& o = file.options;
  if (file.explicit_eigen_space) {
    opts << "eigen_space = " << (p.eigen_space() == EigenSpace::Real ? "real" : "complex") << "\n";
  }
  if (p.allow_real_nonsymmetric()) opts << "force_real = true\n";
  if (o.tau) opts << "tau = " << *o.tau << "\n";
  if (o.tau_max) opts << "tau_max = " << *o.tau_max << "\n";
  if (o.margin) opts << "margin = " << format_double(*o.margin) << "\n";
  if (o.feasibility_tolerance) {
    opts << "feasibility_tolerance = " << format_double(*o.feasibility_tolerance) << "\n";
  }
  if (o.gap_tolerance) opts << "gap_tolerance = " << format_double(*o.gap_tolerance) << "\n";
  if (o.max_iterations) opts << "max_iterations = " << *o.max_iterations << "\n";
  if (o.equality_encoding) {
    opts << "equality_encoding = "
         << (*o.equality_encoding == EqualityEncoding::InequalityPair ? "pair" : "zero") << "\n";
  }
  if (o.lambda_radius) opts << "lambda_radius = " << format_double(*o.lambda_radius) << "\n";
  if (o.scale_variables) opts << "scale = " << (*o.scale_variables ? "true" : "false") << "\n";
  if (!opts.str().empty()) out << "\n[options]\n" << opts.str();
  return out.str();
}

void save_problem(const std::string& path, const ProblemFile& file) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write problem file '" + path + "'");
  out << format_problem(file);
}

AnalysisSettings apply_options(const ProblemOptions& o, AnalysisSettings s) {
  if (o.margin) s.margin = *o.margin;
  if (o.feasibility_tolerance) s.solver.feasibility_tolerance = *o.feasibility_tolerance;
  if (o.gap_tolerance) s.solver.gap_tolerance = *o.gap_tolerance;
  if (o.max_iterations) s.solver.max_iterations = *o.max_iterations;
  if (o.equality_encoding) s.relaxation.equality_encoding = *o.equality_encoding;
  if (o.lambda_radius) s.lift.lambda_radius = *o.lambda_radius;
  if (o.scale_variables) s.relaxation.scale_variables = *o.scale_variables;
  return s;
}

}  // namespace dstab
