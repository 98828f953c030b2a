#include <cctype>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "parkmesh/ilp.hpp"

namespace parkmesh::ilp {

namespace {

constexpr std::size_t kMaxLine = 200;

bool allowed_lp_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  static constexpr std::string_view extra = "!\"#$%&()/,.;?@_`'{}|~";
  return extra.find(c) != std::string_view::npos;
}

std::string format_number(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

// Assigns unique sanitized names, appending a counter on collision.
class NameTable {
 public:
  std::string add(std::string_view raw) {
    std::string base = sanitize_lp_name(raw);
    std::string name = base;
    for (int k = 1; !used_.insert(name).second; ++k) name = base + "_" + std::to_string(k);
    return name;
  }

 private:
  std::unordered_set<std::string> used_;
};

void write_expression(std::ostringstream& out, std::string_view label, const std::vector<Term>& terms,
                      const std::vector<std::string>& names, double constant) {
  std::string line = " " + std::string(label) + ":";
  auto emit = [&](const std::string& piece) {
    if (line.size() + piece.size() > kMaxLine) {
      out << line << "\n";
      line = "  ";
    }
    line += piece;
  };
  bool first = true;
  for (const Term& t : terms) {
    std::string piece = t.coef < 0 ? " - " : (first ? " " : " + ");
    const double mag = std::abs(t.coef);
    if (mag != 1.0) piece += format_number(mag) + " ";
    piece += names[t.var];
    emit(piece);
    first = false;
  }
  if (constant != 0.0) {
    emit((constant < 0 ? " - " : (first ? " " : " + ")) + format_number(std::abs(constant)));
    first = false;
  }
  if (first) emit(" 0 " + names.front());
  out << line;
}

}  // namespace

std::string sanitize_lp_name(std::string_view name) {
  std::string out;
  out.reserve(name.size() + 1);
  for (char c : name) out += allowed_lp_char(c) ? c : '_';
  if (out.empty()) out = "_";
  const char head = out.front();
  const bool numeric_head = std::isdigit(static_cast<unsigned char>(head)) || head == '.';
  const bool exponent_like = (head == 'e' || head == 'E') && out.size() > 1 &&
                             (std::isdigit(static_cast<unsigned char>(out[1])) || out[1] == 'e' ||
                              out[1] == 'E');
  if (numeric_head || exponent_like) out.insert(out.begin(), '_');
  if (out.size() > 255) out.resize(255);
  return out;
}

std::string export_lp(const LinearModel& m) {
  NameTable table;
  std::vector<std::string> names;
  names.reserve(m.variables().size());
  for (const Variable& v : m.variables()) names.push_back(table.add(v.name));
  if (names.empty()) names.push_back(table.add("_dummy"));

  std::ostringstream out;
  out << "\\ Problem: " << sanitize_lp_name(m.name()) << "\n";
  out << "Minimize\n";
  write_expression(out, "obj", m.objective().terms, names, m.objective().constant);
  out << "\n";

  if (!m.constraints().empty()) {
    NameTable row_names;
    out << "Subject To\n";
    for (int r = 0; r < m.constraint_count(); ++r) {
      const Constraint& c = m.constraints()[r];
      const std::string label = row_names.add("c" + std::to_string(r) + "_" + c.tag);
      if (c.terms.empty()) {
        // A row without variables still has to be stated; pin it on a
        // zero-coefficient variable.
        std::ostringstream tmp;
        write_expression(tmp, label, {}, names, 0.0);
        out << tmp.str();
      } else {
        write_expression(out, label, c.terms, names, 0.0);
      }
      const char* op = c.sense == Sense::less_equal ? " <= " : c.sense == Sense::equal ? " = " : " >= ";
      out << op << format_number(c.rhs) << "\n";
    }
  }

  out << "Bounds\n";
  for (int v = 0; v < m.variable_count(); ++v) {
    const Variable& var = m.variable(v);
    if (var.kind == VarKind::binary && var.lower == 0.0 && var.upper == 1.0) continue;
    const bool lo_inf = var.lower == -kInfinity;
    const bool hi_inf = var.upper == kInfinity;
    if (lo_inf && hi_inf) {
      out << " " << names[v] << " free\n";
    } else if (var.lower == var.upper) {
      out << " " << names[v] << " = " << format_number(var.lower) << "\n";
    } else {
      out << " " << (lo_inf ? std::string("-inf") : format_number(var.lower)) << " <= " << names[v]
          << " <= " << (hi_inf ? std::string("+inf") : format_number(var.upper)) << "\n";
    }
  }
  if (m.variables().empty()) out << " " << names.front() << " = 0\n";

  auto write_section = [&](const char* title, VarKind kind) {
    std::string line;
    bool any = false;
    for (int v = 0; v < m.variable_count(); ++v) {
      if (m.variable(v).kind != kind) continue;
      if (!any) out << title << "\n";
      any = true;
      if (line.size() + names[v].size() + 1 > kMaxLine) {
        out << line << "\n";
        line.clear();
      }
      line += " " + names[v];
    }
    if (!line.empty()) out << line << "\n";
  };
  write_section("General", VarKind::integer);
  write_section("Binary", VarKind::binary);
  out << "End\n";
  return out.str();
}

}  // namespace parkmesh::ilp
