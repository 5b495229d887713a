#include "nestasp/ast.hpp"

#include <algorithm>
#include <set>

namespace nestasp {

bool Atom::is_ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::eq: return "=";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
  }
  return "?";
}

std::string escape_string(std::string_view payload) {
  std::string out;
  out.reserve(payload.size() + 2);
  out.push_back('"');
  for (char c : payload) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string to_string(const Term& term) {
  switch (term.kind()) {
    case Term::Kind::constant:
    case Term::Kind::variable: return term.text();
    case Term::Kind::string: return escape_string(term.text());
    case Term::Kind::integer: return std::to_string(term.value());
  }
  return {};
}

namespace {

void append_terms(std::string& out, const Tuple& terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += to_string(terms[i]);
  }
}

}  // namespace

std::string to_string(const Atom& atom) {
  std::string out = atom.predicate;
  if (!atom.args.empty()) {
    out.push_back('(');
    append_terms(out, atom.args);
    out.push_back(')');
  }
  return out;
}

std::string to_string(const ClassicalLiteral& literal) {
  return literal.negated ? "-" + to_string(literal.atom) : to_string(literal.atom);
}

std::string to_string(const ExternalAtom& atom) {
  std::string out = "&" + atom.name;
  if (!atom.inputs.empty()) {
    out.push_back('[');
    append_terms(out, atom.inputs);
    out.push_back(']');
  }
  out.push_back('(');
  append_terms(out, atom.outputs);
  out.push_back(')');
  return out;
}

std::string to_string(const BuiltinAtom& atom) {
  std::string out = to_string(atom.lhs);
  out += ' ';
  out += to_string(atom.op);
  out += ' ';
  out += to_string(atom.rhs);
  if (atom.addend) {
    out += " + ";
    out += to_string(*atom.addend);
  }
  return out;
}

std::string to_string(const BodyElement& element) {
  std::string out = element.naf ? "not " : "";
  std::visit([&](const auto& payload) { out += to_string(payload); }, element.payload);
  return out;
}

std::string to_string(const Rule& rule) {
  std::string out;
  for (std::size_t i = 0; i < rule.head.size(); ++i) {
    if (i > 0) out += " | ";
    out += to_string(rule.head[i]);
  }
  if (rule.body.empty()) {
    // An empty constraint still needs its ":-" to be readable.
    return rule.head.empty() ? ":- ." : out + ".";
  }
  out += rule.head.empty() ? ":- " : " :- ";
  for (std::size_t i = 0; i < rule.body.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(rule.body[i]);
  }
  out.push_back('.');
  return out;
}

std::string canonical_text(const Program& program) {
  std::vector<std::string> lines;
  lines.reserve(program.rules.size());
  for (const Rule& rule : program.rules) lines.push_back(to_string(rule));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const std::string& line : lines) {
    out += line;
    out.push_back('\n');
  }
  return out;
}

bool canonical_less(const ClassicalLiteral& a, const ClassicalLiteral& b) {
  return to_string(a) < to_string(b);
}

void collect_variables(const Tuple& terms, std::vector<std::string>& out) {
  for (const Term& t : terms) {
    if (t.is_variable() && std::find(out.begin(), out.end(), t.text()) == out.end()) {
      out.push_back(t.text());
    }
  }
}

namespace {

Tuple builtin_terms(const BuiltinAtom& b) {
  Tuple terms{b.lhs, b.rhs};
  if (b.addend) terms.push_back(*b.addend);
  return terms;
}

Tuple builtin_rhs(const BuiltinAtom& b) {
  Tuple terms{b.rhs};
  if (b.addend) terms.push_back(*b.addend);
  return terms;
}

bool all_bound(const Tuple& terms, const std::set<std::string>& bound) {
  return std::all_of(terms.begin(), terms.end(),
                     [&](const Term& t) { return !t.is_variable() || bound.contains(t.text()); });
}

}  // namespace

std::vector<std::string> variables_of(const Rule& rule) {
  std::vector<std::string> vars;
  for (const ClassicalLiteral& h : rule.head) collect_variables(h.atom.args, vars);
  for (const BodyElement& e : rule.body) {
    if (const auto* lit = e.literal()) {
      collect_variables(lit->atom.args, vars);
    } else if (const auto* ext = e.external()) {
      collect_variables(ext->inputs, vars);
      collect_variables(ext->outputs, vars);
    } else {
      collect_variables(builtin_terms(*e.builtin()), vars);
    }
  }
  return vars;
}

std::optional<std::string> check_safety(const Rule& rule) {
  std::set<std::string> bound;
  for (const BodyElement& e : rule.body) {
    if (const auto* lit = e.literal(); lit && !e.naf) {
      for (const Term& t : lit->atom.args)
        if (t.is_variable()) bound.insert(t.text());
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const BodyElement& e : rule.body) {
      if (e.naf) continue;
      Tuple produced;
      if (const auto* ext = e.external()) {
        if (all_bound(ext->inputs, bound)) produced = ext->outputs;
      } else if (const auto* b = e.builtin()) {
        if (b->op == CompareOp::eq && all_bound(builtin_rhs(*b), bound)) produced = {b->lhs};
      }
      for (const Term& t : produced) {
        if (t.is_variable() && bound.insert(t.text()).second) changed = true;
      }
    }
  }
  for (const std::string& v : variables_of(rule)) {
    if (!bound.contains(v)) return v;
  }
  return std::nullopt;
}

}  // namespace nestasp
