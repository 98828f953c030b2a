#include <cmath>
#include <sstream>
#include <stdexcept>

#include "parkmesh/ilp.hpp"

namespace parkmesh::ilp {

std::vector<Violation> check(const LinearModel& m, const Assignment& a, double tol) {
  if (tol < 0.0) throw std::invalid_argument("check: tolerance must be nonnegative");
  if (a.size() != m.variables().size()) {
    throw std::invalid_argument("check: assignment has " + std::to_string(a.size()) +
                                " values for " + std::to_string(m.variables().size()) +
                                " variables");
  }
  std::vector<Violation> out;
  for (int v = 0; v < m.variable_count(); ++v) {
    const Variable& var = m.variable(v);
    const double x = a[v];
    if (std::isnan(x)) throw std::invalid_argument("missing value for variable '" + var.name + "'");
    const double below = var.lower - x;
    const double above = x - var.upper;
    if (below > tol || above > tol) {
      std::ostringstream msg;
      msg << var.name << " = " << x << " outside [" << var.lower << ", " << var.upper << "]";
      out.push_back({-1, v, "bounds", std::max(below, above), msg.str()});
    }
    if (var.kind != VarKind::continuous) {
      const double frac = std::abs(x - std::round(x));
      if (frac > tol) {
        std::ostringstream msg;
        msg << var.name << " = " << x << " is not integral";
        out.push_back({-1, v, "integrality", frac, msg.str()});
      }
    }
  }
  for (int r = 0; r < m.constraint_count(); ++r) {
    const Constraint& row = m.constraints()[r];
    const double act = evaluate(row.terms, a);
    double amount = 0.0;
    switch (row.sense) {
      case Sense::less_equal: amount = act - row.rhs; break;
      case Sense::greater_equal: amount = row.rhs - act; break;
      case Sense::equal: amount = std::abs(act - row.rhs); break;
    }
    if (amount > tol) {
      std::ostringstream msg;
      const char* op = row.sense == Sense::less_equal ? "<=" : row.sense == Sense::equal ? "=" : ">=";
      msg << "row " << r << " (" << row.tag << "): activity " << act << " violates " << op << " "
          << row.rhs;
      out.push_back({r, -1, row.tag, amount, msg.str()});
    }
  }
  return out;
}

}  // namespace parkmesh::ilp
