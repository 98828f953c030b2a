#include "lp_reader.hpp"

#include <cctype>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

namespace {

using parkmesh::ilp::LinearModel;
using parkmesh::ilp::Sense;
using parkmesh::ilp::Term;
using parkmesh::ilp::VarKind;

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_number(const std::string& t) {
  if (t.empty()) return false;
  char* end = nullptr;
  std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

double number(const std::string& t) {
  if (t == "+inf" || t == "inf" || t == "+infinity") return kInf;
  if (t == "-inf" || t == "-infinity") return -kInf;
  if (!is_number(t)) throw std::runtime_error("lp: expected a number, got '" + t + "'");
  return std::strtod(t.c_str(), nullptr);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct Var {
  VarKind kind = VarKind::continuous;
  double lo = 0.0;
  double hi = kInf;
};

struct Row {
  std::map<std::string, double> terms;
  double constant = 0.0;
  Sense sense = Sense::less_equal;
  double rhs = 0.0;
};

class Reader {
 public:
  explicit Reader(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      if (const auto bs = line.find('\\'); bs != std::string::npos) line.erase(bs);
      std::istringstream words(line);
      std::string w;
      while (words >> w) tokens_.push_back(w);
    }
  }

  LinearModel read() {
    expect_section("minimize");
    Row obj = expression();
    std::vector<Row> rows;
    if (peek_lower() == "subject") {
      next();
      if (lower(next()) != "to") throw std::runtime_error("lp: expected 'Subject To'");
      while (!at_section()) rows.push_back(constraint());
    }
    if (peek_lower() == "bounds") {
      next();
      while (!at_section()) bound();
    }
    if (peek_lower() == "general") {
      next();
      while (!at_section()) declare(next()).kind = VarKind::integer;
    }
    if (peek_lower() == "binary") {
      next();
      while (!at_section()) {
        const std::string name = next();
        Var& v = declare(name);
        v.kind = VarKind::binary;
        if (!bounded_.count(name)) v.hi = 1.0;
      }
    }
    expect_section("end");

    LinearModel m;
    std::map<std::string, int> index;
    for (const std::string& name : order_) {
      const Var& v = vars_.at(name);
      double lo = v.lo, hi = v.hi;
      if (v.kind == VarKind::binary) hi = std::min(hi, 1.0);
      index[name] = m.add_variable(name, v.kind, lo, hi);
    }
    auto terms_of = [&](const Row& r) {
      std::vector<Term> t;
      for (const auto& [name, c] : r.terms) t.push_back({index.at(name), c});
      return t;
    };
    m.set_objective(terms_of(obj), obj.constant);
    for (const Row& r : rows) m.add_constraint(terms_of(r), r.sense, r.rhs - r.constant);
    return m;
  }

 private:
  const std::string& peek() const {
    static const std::string empty;
    return pos_ < tokens_.size() ? tokens_[pos_] : empty;
  }
  std::string peek_lower() const { return lower(peek()); }
  std::string next() {
    if (pos_ >= tokens_.size()) throw std::runtime_error("lp: unexpected end of text");
    return tokens_[pos_++];
  }
  bool at_section() const {
    const std::string t = peek_lower();
    return t.empty() || t == "bounds" || t == "general" || t == "binary" || t == "end" || t == "subject";
  }
  void expect_section(const char* name) {
    if (lower(next()) != name) throw std::runtime_error(std::string("lp: expected section ") + name);
  }

  Var& declare(const std::string& name) {
    if (is_number(name) || name.empty()) throw std::runtime_error("lp: bad variable name '" + name + "'");
    if (!vars_.count(name)) {
      vars_[name] = Var{};
      order_.push_back(name);
    }
    return vars_[name];
  }

  // Terms up to a comparator or a section keyword; an optional "label:" first.
  Row expression() {
    Row r;
    if (!peek().empty() && peek().back() == ':') next();
    double sign = 1.0;
    std::optional<double> coef;
    while (!at_section()) {
      const std::string t = peek();
      if (t == "<=" || t == ">=" || t == "=" || t == "=<" || t == "=>") break;
      next();
      if (t == "+") continue;
      if (t == "-") {
        sign = -sign;
        continue;
      }
      if (is_number(t)) {
        if (coef) throw std::runtime_error("lp: two numbers in a row");
        coef = number(t);
        // A number followed by an operator, comparator or section is a constant.
        const std::string n = peek();
        if (n == "+" || n == "-" || n == "<=" || n == ">=" || n == "=" || at_section()) {
          r.constant += sign * *coef;
          coef.reset();
          sign = 1.0;
        }
        continue;
      }
      declare(t);
      r.terms[t] += sign * coef.value_or(1.0);
      coef.reset();
      sign = 1.0;
    }
    return r;
  }

  Row constraint() {
    Row r = expression();
    const std::string op = next();
    if (op == "<=" || op == "=<") {
      r.sense = Sense::less_equal;
    } else if (op == ">=" || op == "=>") {
      r.sense = Sense::greater_equal;
    } else if (op == "=") {
      r.sense = Sense::equal;
    } else {
      throw std::runtime_error("lp: expected a comparator, got '" + op + "'");
    }
    std::string rhs = next();
    if (rhs == "-") rhs = "-" + next();
    r.rhs = number(rhs);
    return r;
  }

  // "x free", "x = v", "lo <= x <= hi", "x <= hi", "x >= lo".
  void bound() {
    const std::string a = next();
    if (!is_number(a) && a != "-inf" && a != "+inf") {
      Var& v = declare(a);
      bounded_.insert(a);
      const std::string op = next();
      if (lower(op) == "free") {
        v.lo = -kInf;
        v.hi = kInf;
      } else if (op == "=") {
        v.lo = v.hi = number(next());
      } else if (op == "<=") {
        v.hi = number(next());
      } else if (op == ">=") {
        v.lo = number(next());
      } else {
        throw std::runtime_error("lp: bad bound for " + a);
      }
      return;
    }
    const double lo = number(a);
    if (next() != "<=") throw std::runtime_error("lp: bad bound");
    const std::string name = next();
    Var& v = declare(name);
    bounded_.insert(name);
    v.lo = lo;
    if (peek() == "<=") {
      next();
      v.hi = number(next());
    }
  }

  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
  std::map<std::string, Var> vars_;
  std::vector<std::string> order_;
  std::set<std::string> bounded_;
};

}  // namespace

LinearModel read_lp(std::string_view text) { return Reader(text).read(); }

}  // namespace oracle
