#include "drlref/kernel.hpp"

#include <sstream>

#include "drlref/printer.hpp"

namespace drlref {

bool equal(const Sequent& a, const Sequent& b) {
  if (a.ante.size() != b.ante.size() || a.succ.size() != b.succ.size())
    return false;
  for (size_t i = 0; i < a.ante.size(); ++i)
    if (!equal(a.ante[i], b.ante[i])) return false;
  for (size_t i = 0; i < a.succ.size(); ++i)
    if (!equal(a.succ[i], b.succ[i])) return false;
  return true;
}

std::string pretty(const Sequent& s) {
  std::ostringstream os;
  for (size_t i = 0; i < s.ante.size(); ++i) {
    if (i) os << ", ";
    os << pretty(s.ante[i]);
  }
  os << (s.ante.empty() ? "|- " : " |- ");
  for (size_t i = 0; i < s.succ.size(); ++i) {
    if (i) os << ", ";
    os << pretty(s.succ[i]);
  }
  return os.str();
}

BindingValue BindingValue::of(Variable v) {
  BindingValue b;
  b.kind = Kind::Var;
  b.var = std::move(v);
  return b;
}
BindingValue BindingValue::of(TermPtr t) {
  BindingValue b;
  b.kind = Kind::Term;
  b.term = std::move(t);
  return b;
}
BindingValue BindingValue::of(FormulaPtr f) {
  BindingValue b;
  b.kind = Kind::Fml;
  b.fml = std::move(f);
  return b;
}
BindingValue BindingValue::of(ProgramPtr p) {
  BindingValue b;
  b.kind = Kind::Prog;
  b.prog = std::move(p);
  return b;
}
BindingValue BindingValue::of(size_t i) {
  BindingValue b;
  b.kind = Kind::Index;
  b.index = i;
  return b;
}

Provable new_goal(const Sequent& s) {
  Provable p;
  p.conclusion = s;
  p.goals.push_back(s);
  return p;
}

namespace {

size_t get_index(const Bindings& b, const char* k) {
  auto it = b.find(k);
  if (it == b.end())
    throw UnboundPlaceholder(std::string("rule index '") + k + "' not bound");
  if (it->second.kind != BindingValue::Kind::Index)
    throw KindMismatch(std::string("'") + k + "' must be an index");
  return it->second.index;
}

const FormulaPtr& get_fml(const Bindings& b, const char* k) {
  auto it = b.find(k);
  if (it == b.end())
    throw UnboundPlaceholder(std::string("rule formula '") + k +
                             "' not bound");
  if (it->second.kind != BindingValue::Kind::Fml)
    throw KindMismatch(std::string("'") + k + "' must be a formula");
  return it->second.fml;
}

const TermPtr& get_term(const Bindings& b, const char* k) {
  auto it = b.find(k);
  if (it == b.end())
    throw UnboundPlaceholder(std::string("rule term '") + k + "' not bound");
  if (it->second.kind != BindingValue::Kind::Term)
    throw KindMismatch(std::string("'") + k + "' must be a term");
  return it->second.term;
}

const ProgramPtr& get_prog(const Bindings& b, const char* k) {
  auto it = b.find(k);
  if (it == b.end())
    throw UnboundPlaceholder(std::string("rule program '") + k +
                             "' not bound");
  if (it->second.kind != BindingValue::Kind::Prog)
    throw KindMismatch(std::string("'") + k + "' must be a program");
  return it->second.prog;
}

const Variable& get_var(const Bindings& b, const char* k) {
  auto it = b.find(k);
  if (it == b.end())
    throw UnboundPlaceholder(std::string("rule variable '") + k +
                             "' not bound");
  if (it->second.kind != BindingValue::Kind::Var)
    throw KindMismatch(std::string("'") + k + "' must be a variable");
  return it->second.var;
}

const FormulaPtr& ante_at(const Sequent& s, size_t i) {
  if (i >= s.ante.size())
    throw RuleMismatch("antecedent index out of range");
  return s.ante[i];
}

const FormulaPtr& succ_at(const Sequent& s, size_t j) {
  if (j >= s.succ.size())
    throw RuleMismatch("succedent index out of range");
  return s.succ[j];
}

Sequent with_succ(Sequent s, size_t j, FormulaPtr f) {
  s.succ[j] = std::move(f);
  return s;
}
Sequent with_ante(Sequent s, size_t i, FormulaPtr f) {
  s.ante[i] = std::move(f);
  return s;
}

FormulaPtr subst_checked(const FormulaPtr& f, const Variable& x,
                         const TermPtr& r, const char* rule) {
  try {
    return subst(f, x, r);
  } catch (const SubstClash& e) {
    throw SideConditionViolation(rule, "admissible substitution", e.what());
  }
}

bool swap_ok_f(const FormulaPtr& l, const FormulaPtr& r, const ProgramPtr& a,
               const ProgramPtr& b);

bool swap_ok_p(const ProgramPtr& l, const ProgramPtr& r, const ProgramPtr& a,
               const ProgramPtr& b) {
  if (equal(l, r)) return true;
  if (equal(l, a) && equal(r, b)) return true;
  if (l->kind != r->kind) return false;
  using K = Program::Kind;
  switch (l->kind) {
    case K::Test: return swap_ok_f(l->fml, r->fml, a, b);
    case K::Assign:
    case K::Random: return false;  // not equal and not the swapped pair
    case K::ODE: {
      if (l->odes.size() != r->odes.size()) return false;
      for (size_t i = 0; i < l->odes.size(); ++i) {
        if (l->odes[i].var != r->odes[i].var) return false;
        if (!equal(l->odes[i].rhs, r->odes[i].rhs)) return false;
      }
      return swap_ok_f(l->fml, r->fml, a, b);
    }
    case K::Choice:
    case K::Seq:
      return swap_ok_p(l->p1, r->p1, a, b) && swap_ok_p(l->p2, r->p2, a, b);
    case K::Star: return swap_ok_p(l->p1, r->p1, a, b);
  }
  return false;
}

bool swap_ok_f(const FormulaPtr& l, const FormulaPtr& r, const ProgramPtr& a,
               const ProgramPtr& b) {
  if (equal(l, r)) return true;
  if (l->kind != r->kind) return false;
  using K = Formula::Kind;
  switch (l->kind) {
    case K::True:
    case K::False:
    case K::Cmp: return false;
    case K::Not: return swap_ok_f(l->f1, r->f1, a, b);
    case K::And:
    case K::Or:
    case K::Imply:
    case K::Equiv:
      return swap_ok_f(l->f1, r->f1, a, b) && swap_ok_f(l->f2, r->f2, a, b);
    case K::Forall:
    case K::Exists:
      return l->var == r->var && swap_ok_f(l->f1, r->f1, a, b);
    case K::Box:
    case K::Diamond:
      return swap_ok_p(l->p1, r->p1, a, b) && swap_ok_f(l->f1, r->f1, a, b);
    case K::Refines:
    case K::ProgEq:
      return swap_ok_p(l->p1, r->p1, a, b) && swap_ok_p(l->p2, r->p2, a, b);
  }
  return false;
}

VarSet sequent_free_vars_except(const Sequent& s, size_t skip_succ) {
  VarSet out;
  for (const auto& f : s.ante) {
    VarSet fv = free_vars(f);
    out.insert(fv.begin(), fv.end());
  }
  for (size_t j = 0; j < s.succ.size(); ++j) {
    if (j == skip_succ) continue;
    VarSet fv = free_vars(s.succ[j]);
    out.insert(fv.begin(), fv.end());
  }
  return out;
}

VarSet sequent_free_vars_except_ante(const Sequent& s, size_t skip_ante) {
  VarSet out;
  for (size_t i = 0; i < s.ante.size(); ++i) {
    if (i == skip_ante) continue;
    VarSet fv = free_vars(s.ante[i]);
    out.insert(fv.begin(), fv.end());
  }
  for (const auto& f : s.succ) {
    VarSet fv = free_vars(f);
    out.insert(fv.begin(), fv.end());
  }
  return out;
}

std::vector<Sequent> rule_premises(const Sequent& goal,
                                   const std::string& rule,
                                   const Bindings& b) {
  using FK = Formula::Kind;

  if (rule.rfind("ax:", 0) == 0) {
    std::string id = rule.substr(3);
    size_t j = get_index(b, "j");
    FormulaPtr inst = build_axiom_instance(id, b);
    if (!equal(normalize_derived(succ_at(goal, j)), normalize_derived(inst)))
      throw RuleMismatch("goal formula does not match instance of " + id);
    return {};
  }

  if (rule == "id") {
    size_t i = get_index(b, "i"), j = get_index(b, "j");
    if (!equal(ante_at(goal, i), succ_at(goal, j)))
      throw RuleMismatch("id: formulas differ");
    return {};
  }
  if (rule == "closeTrue") {
    size_t j = get_index(b, "j");
    if (succ_at(goal, j)->kind != FK::True)
      throw RuleMismatch("closeTrue: succedent formula is not 'true'");
    return {};
  }
  if (rule == "closeFalse") {
    size_t i = get_index(b, "i");
    if (ante_at(goal, i)->kind != FK::False)
      throw RuleMismatch("closeFalse: antecedent formula is not 'false'");
    return {};
  }
  if (rule == "cut") {
    FormulaPtr c = get_fml(b, "C");
    Sequent left = goal;
    left.succ.push_back(c);
    Sequent right = goal;
    right.ante.push_back(c);
    return {left, right};
  }
  if (rule == "weakenl") {
    size_t i = get_index(b, "i");
    ante_at(goal, i);
    Sequent s = goal;
    s.ante.erase(s.ante.begin() + static_cast<long>(i));
    return {s};
  }
  if (rule == "weakenr") {
    size_t j = get_index(b, "j");
    succ_at(goal, j);
    Sequent s = goal;
    s.succ.erase(s.succ.begin() + static_cast<long>(j));
    return {s};
  }
  if (rule == "exchangel") {
    size_t i = get_index(b, "i"), i2 = get_index(b, "i2");
    ante_at(goal, i);
    ante_at(goal, i2);
    Sequent s = goal;
    std::swap(s.ante[i], s.ante[i2]);
    return {s};
  }
  if (rule == "exchanger") {
    size_t j = get_index(b, "j"), j2 = get_index(b, "j2");
    succ_at(goal, j);
    succ_at(goal, j2);
    Sequent s = goal;
    std::swap(s.succ[j], s.succ[j2]);
    return {s};
  }
  if (rule == "andr") {
    size_t j = get_index(b, "j");
    const FormulaPtr& f = succ_at(goal, j);
    if (f->kind != FK::And) throw RuleMismatch("andr: not a conjunction");
    return {with_succ(goal, j, f->f1), with_succ(goal, j, f->f2)};
  }
  if (rule == "andl") {
    size_t i = get_index(b, "i");
    const FormulaPtr& f = ante_at(goal, i);
    if (f->kind != FK::And) throw RuleMismatch("andl: not a conjunction");
    Sequent s = with_ante(goal, i, f->f1);
    s.ante.insert(s.ante.begin() + static_cast<long>(i) + 1, f->f2);
    return {s};
  }
  if (rule == "orr") {
    size_t j = get_index(b, "j");
    const FormulaPtr& f = succ_at(goal, j);
    if (f->kind != FK::Or) throw RuleMismatch("orr: not a disjunction");
    Sequent s = with_succ(goal, j, f->f1);
    s.succ.insert(s.succ.begin() + static_cast<long>(j) + 1, f->f2);
    return {s};
  }
  if (rule == "orl") {
    size_t i = get_index(b, "i");
    const FormulaPtr& f = ante_at(goal, i);
    if (f->kind != FK::Or) throw RuleMismatch("orl: not a disjunction");
    return {with_ante(goal, i, f->f1), with_ante(goal, i, f->f2)};
  }
  if (rule == "implyr") {
    size_t j = get_index(b, "j");
    const FormulaPtr& f = succ_at(goal, j);
    if (f->kind != FK::Imply) throw RuleMismatch("implyr: not an implication");
    Sequent s = with_succ(goal, j, f->f2);
    s.ante.push_back(f->f1);
    return {s};
  }
  if (rule == "implyl") {
    size_t i = get_index(b, "i");
    const FormulaPtr& f = ante_at(goal, i);
    if (f->kind != FK::Imply) throw RuleMismatch("implyl: not an implication");
    Sequent left = goal;
    left.ante.erase(left.ante.begin() + static_cast<long>(i));
    left.succ.push_back(f->f1);
    Sequent right = with_ante(goal, i, f->f2);
    return {left, right};
  }
  if (rule == "notr") {
    size_t j = get_index(b, "j");
    const FormulaPtr& f = succ_at(goal, j);
    if (f->kind != FK::Not) throw RuleMismatch("notr: not a negation");
    Sequent s = goal;
    s.succ.erase(s.succ.begin() + static_cast<long>(j));
    s.ante.push_back(f->f1);
    return {s};
  }
  if (rule == "notl") {
    size_t i = get_index(b, "i");
    const FormulaPtr& f = ante_at(goal, i);
    if (f->kind != FK::Not) throw RuleMismatch("notl: not a negation");
    Sequent s = goal;
    s.ante.erase(s.ante.begin() + static_cast<long>(i));
    s.succ.push_back(f->f1);
    return {s};
  }
  if (rule == "equivr") {
    size_t j = get_index(b, "j");
    const FormulaPtr& f = succ_at(goal, j);
    if (f->kind != FK::Equiv) throw RuleMismatch("equivr: not an equivalence");
    Sequent left = with_succ(goal, j, f->f2);
    left.ante.push_back(f->f1);
    Sequent right = with_succ(goal, j, f->f1);
    right.ante.push_back(f->f2);
    return {left, right};
  }
  if (rule == "equivl") {
    size_t i = get_index(b, "i");
    const FormulaPtr& f = ante_at(goal, i);
    if (f->kind != FK::Equiv) throw RuleMismatch("equivl: not an equivalence");
    Sequent s = with_ante(goal, i, Formula::mk_imply(f->f1, f->f2));
    s.ante.insert(s.ante.begin() + static_cast<long>(i) + 1,
                  Formula::mk_imply(f->f2, f->f1));
    return {s};
  }
  if (rule == "allr") {
    size_t j = get_index(b, "j");
    const Variable& y = get_var(b, "y");
    const FormulaPtr& f = succ_at(goal, j);
    if (f->kind != FK::Forall) throw RuleMismatch("allr: not universal");
    VarSet others = sequent_free_vars_except(goal, j);
    VarSet self = free_vars(f);
    if (others.count(y) || self.count(y))
      throw SideConditionViolation("allr", "fresh instance variable",
                                   y.str());
    return {with_succ(goal, j,
                      subst_checked(f->f1, f->var, Term::mk_var(y), "allr"))};
  }
  if (rule == "existsl") {
    size_t i = get_index(b, "i");
    const Variable& y = get_var(b, "y");
    const FormulaPtr& f = ante_at(goal, i);
    if (f->kind != FK::Exists) throw RuleMismatch("existsl: not existential");
    VarSet others = sequent_free_vars_except_ante(goal, i);
    VarSet self = free_vars(f);
    if (others.count(y) || self.count(y))
      throw SideConditionViolation("existsl", "fresh instance variable",
                                   y.str());
    return {with_ante(
        goal, i, subst_checked(f->f1, f->var, Term::mk_var(y), "existsl"))};
  }
  if (rule == "alll") {
    size_t i = get_index(b, "i");
    const TermPtr& t = get_term(b, "t");
    const FormulaPtr& f = ante_at(goal, i);
    if (f->kind != FK::Forall) throw RuleMismatch("alll: not universal");
    return {with_ante(goal, i, subst_checked(f->f1, f->var, t, "alll"))};
  }
  if (rule == "existsr") {
    size_t j = get_index(b, "j");
    const TermPtr& t = get_term(b, "t");
    const FormulaPtr& f = succ_at(goal, j);
    if (f->kind != FK::Exists) throw RuleMismatch("existsr: not existential");
    return {with_succ(goal, j, subst_checked(f->f1, f->var, t, "existsr"))};
  }
  if (rule == "MP") {
    size_t j = get_index(b, "j");
    FormulaPtr a = succ_at(goal, j);
    FormulaPtr c = get_fml(b, "B");
    Sequent valid_impl;
    valid_impl.succ.push_back(Formula::mk_imply(c, a));
    return {valid_impl, with_succ(goal, j, c)};
  }
  if (rule == "equivifyr") {
    size_t j = get_index(b, "j");
    const FormulaPtr& f = succ_at(goal, j);
    if (f->kind != FK::Imply)
      throw RuleMismatch("equivifyr: not an implication");
    return {with_succ(goal, j, Formula::mk_equiv(f->f1, f->f2))};
  }
  if (rule == "G") {
    size_t j = get_index(b, "j");
    const FormulaPtr& f = succ_at(goal, j);
    if (f->kind != FK::Box) throw RuleMismatch("G: not a box");
    Sequent s;
    s.succ.push_back(f->f1);
    return {s};
  }
  if (rule == "dW") {
    size_t j = get_index(b, "j");
    const FormulaPtr& f = succ_at(goal, j);
    if (f->kind != FK::Box || f->p1->kind != Program::Kind::ODE)
      throw RuleMismatch("dW: not a box over a differential equation");
    Sequent s;
    s.ante.push_back(f->p1->fml);
    s.succ.push_back(f->f1);
    return {s};
  }
  if (rule == "CPE") {
    size_t j = get_index(b, "j");
    const ProgramPtr& pa = get_prog(b, "a");
    const ProgramPtr& pb = get_prog(b, "b");
    const FormulaPtr& f = succ_at(goal, j);
    if (f->kind != FK::Equiv) throw RuleMismatch("CPE: not an equivalence");
    if (!swap_ok_f(f->f1, f->f2, pa, pb))
      throw RuleMismatch(
          "CPE: sides do not match up to replacing the program");
    Sequent s;
    s.succ.push_back(Formula::mk_progeq(pa, pb));
    return {s};
  }

  throw RuleMismatch("unknown rule '" + rule + "'");
}

}  // namespace

Provable instantiate_axiom(const AxiomInstance& inst) {
  FormulaPtr f = build_axiom_instance(inst.axiom_id, inst.bindings);
  Sequent s;
  s.succ.push_back(f);
  Provable p = new_goal(s);
  Bindings b = inst.bindings;
  b["j"] = BindingValue::of(static_cast<size_t>(0));
  return apply_rule(p, 0, "ax:" + inst.axiom_id, b);
}

void apply_rule_inplace(Provable& p, size_t goal, const std::string& rule,
                        const Bindings& bindings) {
  if (goal >= p.goals.size())
    throw NoSuchGoal("goal index " + std::to_string(goal) + " of " +
                     std::to_string(p.goals.size()));
  std::vector<Sequent> premises = rule_premises(p.goals[goal], rule, bindings);
  p.goals.erase(p.goals.begin() + static_cast<long>(goal));
  p.goals.insert(p.goals.begin() + static_cast<long>(goal), premises.begin(),
                 premises.end());
  p.trace.push_back(Step{rule, goal, bindings});
}

Provable apply_rule(const Provable& p, size_t goal, const std::string& rule,
                    const Bindings& bindings) {
  Provable out = p;
  apply_rule_inplace(out, goal, rule, bindings);
  return out;
}

bool first_order(const FormulaPtr& f) {
  using K = Formula::Kind;
  switch (f->kind) {
    case K::True:
    case K::False:
    case K::Cmp: return true;
    case K::Not: return first_order(f->f1);
    case K::And:
    case K::Or:
    case K::Imply:
    case K::Equiv: return first_order(f->f1) && first_order(f->f2);
    case K::Forall:
    case K::Exists: return first_order(f->f1);
    case K::Box:
    case K::Diamond:
    case K::Refines:
    case K::ProgEq: return false;
  }
  return false;
}

FormulaPtr fold_sequent(const Sequent& s) {
  FormulaPtr succ;
  if (s.succ.empty()) {
    succ = Formula::mk_false();
  } else {
    succ = s.succ.back();
    for (size_t j = s.succ.size() - 1; j-- > 0;)
      succ = Formula::mk_or(s.succ[j], succ);
  }
  if (s.ante.empty()) return succ;
  FormulaPtr ante = s.ante.back();
  for (size_t i = s.ante.size() - 1; i-- > 0;)
    ante = Formula::mk_and(s.ante[i], ante);
  return Formula::mk_imply(ante, succ);
}

void admit_arith_inplace(Provable& p, size_t goal) {
  if (goal >= p.goals.size())
    throw NoSuchGoal("goal index " + std::to_string(goal) + " of " +
                     std::to_string(p.goals.size()));
  const Sequent& g = p.goals[goal];
  for (const auto& f : g.ante)
    if (!first_order(f))
      throw NotFirstOrder("antecedent contains a modality or refinement: " +
                          pretty(f));
  for (const auto& f : g.succ)
    if (!first_order(f))
      throw NotFirstOrder("succedent contains a modality or refinement: " +
                          pretty(f));
  p.assumptions.push_back(fold_sequent(g));
  p.goals.erase(p.goals.begin() + static_cast<long>(goal));
  p.trace.push_back(Step{"admit", goal, {}});
}

Provable admit_arith(const Provable& p, size_t goal) {
  Provable out = p;
  admit_arith_inplace(out, goal);
  return out;
}

CheckResult check_certificate(const Provable& p) {
  CheckResult res;
  Provable r = new_goal(p.conclusion);
  for (size_t i = 0; i < p.trace.size(); ++i) {
    const Step& st = p.trace[i];
    try {
      if (st.rule == "admit") {
        r = admit_arith(r, st.goal);
      } else {
        r = apply_rule(r, st.goal, st.rule, st.bindings);
      }
    } catch (const Error& e) {
      res.failed_step = i;
      res.reason = e.what();
      return res;
    }
  }
  if (!r.goals.empty()) {
    res.failed_step = p.trace.size();
    res.reason = "replay leaves " + std::to_string(r.goals.size()) +
                 " open goal(s)";
    return res;
  }
  if (r.assumptions.size() != p.assumptions.size()) {
    res.failed_step = p.trace.size();
    res.reason = "assumption list does not match replay";
    return res;
  }
  for (size_t i = 0; i < r.assumptions.size(); ++i) {
    if (!equal(r.assumptions[i], p.assumptions[i])) {
      res.failed_step = p.trace.size();
      res.reason = "assumption " + std::to_string(i) +
                   " does not match replay";
      return res;
    }
  }
  res.valid = true;
  res.assumptions = r.assumptions;
  return res;
}

}  // namespace drlref
