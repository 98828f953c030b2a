#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace parkmesh::ilp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultTolerance = 1e-6;

enum class VarKind { binary, integer, continuous };
enum class Sense { less_equal, equal, greater_equal };

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::binary;
  double lower = 0.0;
  double upper = 1.0;
};

struct Constraint {
  std::vector<Term> terms;  // merged by variable, ascending
  Sense sense = Sense::less_equal;
  double rhs = 0.0;
  // Constraint family, e.g. "eq:sum-bij"; reported by check().
  std::string tag;
  // Lazy rows are part of the model but the solver only enforces them once
  // an integer candidate violates them.
  bool lazy = false;
};

struct Objective {
  std::vector<Term> terms;
  double constant = 0.0;
};

// Minimization model over binary, bounded integer and continuous variables.
class LinearModel {
 public:
  int add_variable(std::string name, VarKind kind, double lower, double upper);
  int add_binary(std::string name) { return add_variable(std::move(name), VarKind::binary, 0, 1); }
  int add_integer(std::string name, double lower, double upper) {
    return add_variable(std::move(name), VarKind::integer, lower, upper);
  }
  int add_continuous(std::string name, double lower, double upper) {
    return add_variable(std::move(name), VarKind::continuous, lower, upper);
  }

  // Duplicate variables in `terms` are summed; zero coefficients dropped.
  int add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string tag = {},
                     bool lazy = false);
  void set_objective(std::vector<Term> terms, double constant = 0.0);
  void set_bounds(int var, double lower, double upper);
  void fix(int var, double value) { set_bounds(var, value, value); }
  void set_name(std::string name) { name_ = std::move(name); }

  const std::string& name() const { return name_; }
  const std::vector<Variable>& variables() const { return vars_; }
  const Variable& variable(int v) const { return vars_.at(static_cast<std::size_t>(v)); }
  const std::vector<Constraint>& constraints() const { return rows_; }
  const Objective& objective() const { return objective_; }
  int variable_count() const { return static_cast<int>(vars_.size()); }
  int constraint_count() const { return static_cast<int>(rows_.size()); }
  std::optional<int> find(std::string_view name) const;

 private:
  std::vector<Term> normalize(std::vector<Term> terms) const;

  std::string name_ = "model";
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  Objective objective_;
  std::unordered_map<std::string, int> index_;
};

// One value per model variable, indexed like LinearModel::variables().
// NaN marks a missing value.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::vector<double> values) : values_(std::move(values)) {}
  static Assignment missing(std::size_t n);
  // Throws std::invalid_argument when any model variable lacks a value.
  static Assignment from_names(const LinearModel& m, const std::map<std::string, double>& values);

  double operator[](int v) const { return values_.at(static_cast<std::size_t>(v)); }
  void set(int v, double value) { values_.at(static_cast<std::size_t>(v)) = value; }
  double value(const LinearModel& m, std::string_view name) const;
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

double evaluate(std::span<const Term> terms, const Assignment& a);
double objective_value(const LinearModel& m, const Assignment& a);

struct Violation {
  int constraint = -1;  // row index, or -1 for bound/integrality violations
  int variable = -1;    // set for bound/integrality violations
  std::string tag;
  double amount = 0.0;
  std::string message;
};

// Every row, bound and integrality requirement violated by more than `tol`.
// Lazy rows are checked like any other.
std::vector<Violation> check(const LinearModel& m, const Assignment& a,
                             double tol = kDefaultTolerance);

enum class SolveStatus { optimal, infeasible, node_limit, time_limit };
std::string_view to_string(SolveStatus s);

struct SolveLimits {
  std::int64_t max_nodes = 50'000'000;
  double max_seconds = 600.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::infeasible;
  std::optional<Assignment> assignment;  // present iff status == optimal
  std::optional<Assignment> incumbent;   // best solution seen when a limit was hit
  double objective = kInfinity;
  std::int64_t nodes = 0;
  double seconds = 0.0;
  int lazy_rows_activated = 0;
  // False when the limit expired while certifying the lexicographic tie-break.
  bool tie_break_certified = true;
};

// Exact branch-and-bound over binary and integer variables with bound
// propagation on the rows.  Among optimal solutions the lexicographically
// smallest assignment (by variable index) is returned.  Continuous variables
// and unbounded integer variables are rejected with std::invalid_argument.
SolveReport solve(const LinearModel& m, const SolveLimits& limits = {});

// CPLEX-style LP text.  Names are sanitized deterministically.
std::string export_lp(const LinearModel& m);
std::string sanitize_lp_name(std::string_view name);

}  // namespace parkmesh::ilp
