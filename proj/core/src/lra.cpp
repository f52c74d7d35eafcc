#include "lmt/lra.hpp"

#include <algorithm>
#include <stdexcept>

namespace lmt {

std::string to_string(const DeltaRational& value) {
  if (value.delta() == 0) return to_string(value.real());
  return to_string(value.real()) + (value.delta() > 0 ? "+" : "") + to_string(value.delta()) + "d";
}

// ----- LinSystem -----

void LinSystem::add_variable(const std::string& name, const Rational& lo, const Rational& hi) {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    names_.push_back(name);
    boxes_.push_back({lo, hi});
    return;
  }
  Box& b = boxes_[static_cast<std::size_t>(it - names_.begin())];
  b.lo = std::max(b.lo, lo);
  b.hi = std::min(b.hi, hi);
}

bool LinSystem::has_variable(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const Box& LinSystem::box(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::invalid_argument("undeclared variable '" + std::string(name) + "'");
  return boxes_[static_cast<std::size_t>(it - names_.begin())];
}

void LinSystem::add(LinExpr expr, BoundKind kind, DeltaRational bound) {
  for (const auto& [name, c] : expr.terms()) {
    if (!has_variable(name)) {
      throw std::invalid_argument("constraint mentions undeclared variable '" + name + "'");
    }
  }
  bound -= DeltaRational(expr.constant());
  expr.set_constant(0);
  constraints_.push_back({std::move(expr), kind, std::move(bound)});
}

void LinSystem::add_atom(const LinAtom& atom) {
  switch (atom.op) {
    case Relop::kLt: add(atom.expr, BoundKind::kLe, DeltaRational(atom.rhs, -1)); break;
    case Relop::kLe: add(atom.expr, BoundKind::kLe, DeltaRational(atom.rhs)); break;
    case Relop::kEq: add(atom.expr, BoundKind::kEq, DeltaRational(atom.rhs)); break;
    case Relop::kGe: add(atom.expr, BoundKind::kGe, DeltaRational(atom.rhs)); break;
    case Relop::kGt: add(atom.expr, BoundKind::kGe, DeltaRational(atom.rhs, 1)); break;
    case Relop::kNe: throw std::invalid_argument("'distinct' must be case-split before the LP");
  }
}

// ----- simplex -----

namespace {

// Bounded-variable general simplex over delta-rationals. Columns 0..n-1 are
// the user variables, columns n.. are one slack per multi-variable row.
// Entering and leaving choices use the smallest column index (Bland).
class Simplex {
 public:
  explicit Simplex(const LinSystem& system) : system_(system) {
    const auto& names = system.variables();
    num_original_ = names.size();
    for (std::size_t i = 0; i < names.size(); ++i) {
      const Box& b = system.box(names[i]);
      lower_.emplace_back(DeltaRational(b.lo));
      upper_.emplace_back(DeltaRational(b.hi));
    }
    std::vector<const LinConstraint*> rows;
    for (const LinConstraint& c : system.constraints()) {
      if (c.expr.is_constant()) {
        if (!holds(DeltaRational(0), c.kind, c.bound)) trivially_unsat_ = true;
        continue;
      }
      if (c.expr.terms().size() == 1) {
        const auto& [name, coeff] = *c.expr.terms().begin();
        tighten(index_of(name), coeff, c.kind, c.bound);
        continue;
      }
      rows.push_back(&c);
    }
    const std::size_t total = num_original_ + rows.size();
    value_.assign(total, DeltaRational());
    row_of_.assign(total, kNonBasic);
    for (std::size_t i = 0; i < num_original_; ++i) value_[i] = *lower_[i];
    for (const LinConstraint* c : rows) {
      const std::size_t slack = lower_.size();
      lower_.emplace_back();
      upper_.emplace_back();
      if (c->kind != BoundKind::kLe) lower_[slack] = c->bound;
      if (c->kind != BoundKind::kGe) upper_[slack] = c->bound;
      std::vector<Rational> row(total, Rational(0));
      DeltaRational v;
      for (const auto& [name, coeff] : c->expr.terms()) {
        std::size_t j = index_of(name);
        row[j] = coeff;
        v += value_[j] * coeff;
      }
      value_[slack] = v;
      row_of_[slack] = tableau_.size();
      basic_.push_back(slack);
      tableau_.push_back(std::move(row));
    }
  }

  bool check() {
    if (trivially_unsat_) return false;
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (lower_[i] && upper_[i] && *lower_[i] > *upper_[i]) return false;
    }
    for (;;) {
      if (++iterations_ > kMaxIterations) throw std::logic_error("simplex iteration limit exceeded");
      std::size_t violated = kNonBasic;
      for (std::size_t r = 0; r < basic_.size(); ++r) {
        std::size_t b = basic_[r];
        if (below_lower(b) || above_upper(b)) {
          if (violated == kNonBasic || b < violated) violated = b;
        }
      }
      if (violated == kNonBasic) return true;
      const std::size_t r = row_of_[violated];
      const bool raise = below_lower(violated);
      std::size_t entering = kNonBasic;
      for (std::size_t j = 0; j < value_.size(); ++j) {
        if (row_of_[j] != kNonBasic) continue;
        const Rational& a = tableau_[r][j];
        if (a == 0) continue;
        bool can = raise ? ((a > 0 && can_increase(j)) || (a < 0 && can_decrease(j)))
                         : ((a < 0 && can_increase(j)) || (a > 0 && can_decrease(j)));
        if (can) {
          entering = j;
          break;
        }
      }
      if (entering == kNonBasic) return false;
      const DeltaRational target = raise ? *lower_[violated] : *upper_[violated];
      const DeltaRational theta = (target - value_[violated]) / tableau_[r][entering];
      shift(entering, theta);
      pivot(r, entering);
    }
  }

  // Primal simplex on sum c_j x_j; assumes check() succeeded.
  void optimize(const LinExpr& objective) {
    std::vector<Rational> cost(value_.size(), Rational(0));
    for (const auto& [name, c] : objective.terms()) cost[index_of(name)] = c;
    for (;;) {
      if (++iterations_ > kMaxIterations) throw std::logic_error("simplex iteration limit exceeded");
      std::size_t entering = kNonBasic;
      int direction = 0;
      for (std::size_t j = 0; j < value_.size() && entering == kNonBasic; ++j) {
        if (row_of_[j] != kNonBasic) continue;
        Rational d = cost[j];
        for (std::size_t r = 0; r < basic_.size(); ++r) {
          if (cost[basic_[r]] != 0 && tableau_[r][j] != 0) d += cost[basic_[r]] * tableau_[r][j];
        }
        if (d < 0 && can_increase(j)) {
          entering = j;
          direction = 1;
        } else if (d > 0 && can_decrease(j)) {
          entering = j;
          direction = -1;
        }
      }
      if (entering == kNonBasic) return;

      // Ratio test; the entering variable's own bound wins ties.
      std::optional<DeltaRational> step;
      std::size_t leaving_row = kNonBasic;
      std::size_t leaving_var = kNonBasic;
      if (direction > 0 && upper_[entering]) step = *upper_[entering] - value_[entering];
      if (direction < 0 && lower_[entering]) step = value_[entering] - *lower_[entering];
      for (std::size_t r = 0; r < basic_.size(); ++r) {
        const Rational& a = tableau_[r][entering];
        if (a == 0) continue;
        const std::size_t b = basic_[r];
        const Rational rate = direction > 0 ? Rational(a) : Rational(-a);
        std::optional<DeltaRational> limit;
        if (rate > 0 && upper_[b]) limit = (*upper_[b] - value_[b]) / rate;
        if (rate < 0 && lower_[b]) limit = (value_[b] - *lower_[b]) / Rational(-rate);
        if (!limit) continue;
        bool better = !step || *limit < *step ||
                      (*limit == *step && leaving_var != kNonBasic && b < leaving_var);
        if (better) {
          step = *limit;
          leaving_row = r;
          leaving_var = b;
        }
      }
      if (!step) throw std::logic_error("unbounded objective over a boxed system");
      shift(entering, direction > 0 ? *step : *step * Rational(-1));
      if (leaving_row != kNonBasic) pivot(leaving_row, entering);
    }
  }

  DeltaRational objective_value(const LinExpr& objective) const {
    DeltaRational v(objective.constant());
    for (const auto& [name, c] : objective.terms()) v += value_[index_of(name)] * c;
    return v;
  }

  // Half of the largest delta for which every bound still holds, capped at 1.
  Rational delta_value() const {
    Rational best = 1;
    auto consider = [&](const DeltaRational& low, const DeltaRational& high) {
      // Need low.real + low.delta*d <= high.real + high.delta*d.
      if (low.real() < high.real() && low.delta() > high.delta()) {
        Rational limit = (high.real() - low.real()) / (low.delta() - high.delta());
        if (limit < best) best = limit;
      }
    };
    for (std::size_t i = 0; i < value_.size(); ++i) {
      if (lower_[i]) consider(*lower_[i], value_[i]);
      if (upper_[i]) consider(value_[i], *upper_[i]);
    }
    // Folding single-variable constraints keeps only the tightest bound,
    // which may hold for infinitesimal delta only; recheck every original.
    for (const LinConstraint& c : system_.constraints()) {
      DeltaRational v;
      for (const auto& [name, coeff] : c.expr.terms()) v += value_[index_of(name)] * coeff;
      if (c.kind != BoundKind::kGe) consider(v, c.bound);
      if (c.kind != BoundKind::kLe) consider(c.bound, v);
    }
    return best / 2;
  }

  Assignment witness() const {
    const Rational d = delta_value();
    Assignment out;
    const auto& names = system_.variables();
    for (std::size_t i = 0; i < num_original_; ++i) out.set_rational(names[i], value_[i].instantiate(d));
    return out;
  }

 private:
  static constexpr std::size_t kNonBasic = static_cast<std::size_t>(-1);
  static constexpr long kMaxIterations = 1000000;

  static bool holds(const DeltaRational& v, BoundKind kind, const DeltaRational& bound) {
    switch (kind) {
      case BoundKind::kLe: return v <= bound;
      case BoundKind::kEq: return v == bound;
      case BoundKind::kGe: return v >= bound;
    }
    return false;
  }

  std::size_t index_of(std::string_view name) const {
    const auto& names = system_.variables();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::invalid_argument("undeclared variable '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names.begin());
  }

  // coeff * x kind bound, folded into the box of x.
  void tighten(std::size_t j, const Rational& coeff, BoundKind kind, const DeltaRational& bound) {
    DeltaRational scaled = bound / coeff;
    if (coeff < 0 && kind != BoundKind::kEq) kind = kind == BoundKind::kLe ? BoundKind::kGe : BoundKind::kLe;
    if (kind != BoundKind::kGe && (!upper_[j] || scaled < *upper_[j])) upper_[j] = scaled;
    if (kind != BoundKind::kLe && (!lower_[j] || scaled > *lower_[j])) lower_[j] = scaled;
  }

  bool below_lower(std::size_t v) const { return lower_[v] && value_[v] < *lower_[v]; }
  bool above_upper(std::size_t v) const { return upper_[v] && value_[v] > *upper_[v]; }
  bool can_increase(std::size_t v) const { return !upper_[v] || value_[v] < *upper_[v]; }
  bool can_decrease(std::size_t v) const { return !lower_[v] || value_[v] > *lower_[v]; }

  // Moves nonbasic x_j by theta and updates every basic variable.
  void shift(std::size_t j, const DeltaRational& theta) {
    value_[j] += theta;
    for (std::size_t r = 0; r < basic_.size(); ++r) {
      const Rational& a = tableau_[r][j];
      if (a != 0) value_[basic_[r]] += theta * a;
    }
  }

  // Basic variable of row r leaves, nonbasic j enters.
  void pivot(std::size_t r, std::size_t j) {
    const std::size_t leaving = basic_[r];
    std::vector<Rational>& row = tableau_[r];
    const Rational a = row[j];
    // x_leaving = a x_j + rest  =>  x_j = (x_leaving - rest) / a
    for (Rational& c : row) {
      if (c != 0) c = -c / a;
    }
    row[j] = 0;
    row[leaving] = 1 / a;
    for (std::size_t k = 0; k < tableau_.size(); ++k) {
      if (k == r) continue;
      std::vector<Rational>& other = tableau_[k];
      if (other[j] == 0) continue;
      const Rational factor = other[j];
      other[j] = 0;
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (row[c] != 0) other[c] += factor * row[c];
      }
    }
    basic_[r] = j;
    row_of_[j] = r;
    row_of_[leaving] = kNonBasic;
  }

  const LinSystem& system_;
  std::size_t num_original_ = 0;
  bool trivially_unsat_ = false;
  long iterations_ = 0;
  std::vector<std::optional<DeltaRational>> lower_;
  std::vector<std::optional<DeltaRational>> upper_;
  std::vector<DeltaRational> value_;
  std::vector<std::size_t> row_of_;
  std::vector<std::size_t> basic_;
  std::vector<std::vector<Rational>> tableau_;
};

}  // namespace

std::optional<Assignment> feasible(const LinSystem& system) {
  Simplex simplex(system);
  if (!simplex.check()) return std::nullopt;
  return simplex.witness();
}

std::optional<LpOptimum> minimize(const LinExpr& objective, const LinSystem& system) {
  Simplex simplex(system);
  if (!simplex.check()) return std::nullopt;
  simplex.optimize(objective);
  return LpOptimum{simplex.objective_value(objective), simplex.witness()};
}

std::optional<LpOptimum> minimize_lexicographic(const std::vector<LinExpr>& objectives,
                                                LinSystem system) {
  std::optional<LpOptimum> first;
  std::optional<LpOptimum> last;
  for (const LinExpr& objective : objectives) {
    last = minimize(objective, system);
    if (!last) return std::nullopt;
    if (!first) first = last;
    if (!objective.is_constant()) system.add(objective, BoundKind::kEq, last->value);
  }
  if (!last) {
    auto point = feasible(system);
    if (!point) return std::nullopt;
    return LpOptimum{DeltaRational(0), *point};
  }
  return LpOptimum{first->value, last->witness};
}

}  // namespace lmt
