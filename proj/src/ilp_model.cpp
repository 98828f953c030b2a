#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parkmesh/ilp.hpp"

namespace parkmesh::ilp {

int LinearModel::add_variable(std::string name, VarKind kind, double lower, double upper) {
  if (kind == VarKind::binary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
  }
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw std::invalid_argument("variable '" + name + "' has invalid bounds");
  }
  if (name.empty()) name = "v" + std::to_string(vars_.size());
  if (!index_.emplace(name, static_cast<int>(vars_.size())).second) {
    throw std::invalid_argument("duplicate variable name '" + name + "'");
  }
  vars_.push_back({std::move(name), kind, lower, upper});
  return static_cast<int>(vars_.size()) - 1;
}

std::vector<Term> LinearModel::normalize(std::vector<Term> terms) const {
  for (const Term& t : terms) {
    if (t.var < 0 || t.var >= variable_count()) {
      throw std::out_of_range("dangling variable reference " + std::to_string(t.var));
    }
    if (!std::isfinite(t.coef)) throw std::invalid_argument("non-finite coefficient");
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  for (const Term& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  return merged;
}

int LinearModel::add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string tag,
                                bool lazy) {
  if (!std::isfinite(rhs)) throw std::invalid_argument("constraint right-hand side must be finite");
  rows_.push_back({normalize(std::move(terms)), sense, rhs, std::move(tag), lazy});
  return static_cast<int>(rows_.size()) - 1;
}

void LinearModel::set_objective(std::vector<Term> terms, double constant) {
  objective_.terms = normalize(std::move(terms));
  objective_.constant = constant;
}

void LinearModel::set_bounds(int var, double lower, double upper) {
  Variable& v = vars_.at(static_cast<std::size_t>(var));
  if (lower > upper) throw std::invalid_argument("variable '" + v.name + "': lower > upper");
  if (v.kind == VarKind::binary && (lower < 0.0 || upper > 1.0)) {
    throw std::invalid_argument("binary variable '" + v.name + "' bounds outside [0,1]");
  }
  v.lower = lower;
  v.upper = upper;
}

std::optional<int> LinearModel::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Assignment Assignment::missing(std::size_t n) {
  return Assignment(std::vector<double>(n, std::numeric_limits<double>::quiet_NaN()));
}

Assignment Assignment::from_names(const LinearModel& m, const std::map<std::string, double>& values) {
  std::vector<double> out(m.variables().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto it = values.find(m.variables()[i].name);
    if (it == values.end()) {
      throw std::invalid_argument("missing value for variable '" + m.variables()[i].name + "'");
    }
    out[i] = it->second;
  }
  return Assignment(std::move(out));
}

double Assignment::value(const LinearModel& m, std::string_view name) const {
  auto v = m.find(name);
  if (!v) throw std::out_of_range("unknown variable '" + std::string(name) + "'");
  return (*this)[*v];
}

double evaluate(std::span<const Term> terms, const Assignment& a) {
  double sum = 0.0;
  for (const Term& t : terms) sum += t.coef * a[t.var];
  return sum;
}

double objective_value(const LinearModel& m, const Assignment& a) {
  return m.objective().constant + evaluate(m.objective().terms, a);
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::node_limit: return "node_limit";
    case SolveStatus::time_limit: return "time_limit";
  }
  return "unknown";
}

}  // namespace parkmesh::ilp
