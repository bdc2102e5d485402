#include "drlref/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "drlref/printer.hpp"

namespace drlref {

namespace {

using PK = Program::Kind;
using FK = Formula::Kind;

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Fixed variable universe for one evaluation; states are flat vectors.
struct Universe {
  std::vector<Variable> vars;  // sorted

  static Universe of(VarSet set) {
    VarSet primes;
    for (const auto& v : set)
      if (!v.primed) primes.insert(v.prime());
    set.insert(primes.begin(), primes.end());
    Universe u;
    u.vars.assign(set.begin(), set.end());
    return u;
  }

  size_t index(const Variable& v) const {
    auto it = std::lower_bound(vars.begin(), vars.end(), v);
    return static_cast<size_t>(it - vars.begin());
  }
  bool contains(const Variable& v) const {
    auto it = std::lower_bound(vars.begin(), vars.end(), v);
    return it != vars.end() && *it == v;
  }
};

using Vec = std::vector<double>;

// A set of states, kept sorted for dedup and inclusion checks.  Traces are
// carried only when requested (counterexample reporting).
struct StateSet {
  std::vector<Vec> states;
  std::vector<std::vector<std::string>> traces;  // parallel when tracing
  bool complete = true;
  std::string note;

  void merge_flags(const StateSet& o) {
    complete = complete && o.complete;
    if (note.empty()) note = o.note;
  }
};

bool vec_close(const Vec& a, const Vec& b, double tol) {
  for (size_t i = 0; i < a.size(); ++i)
    if (std::fabs(a[i] - b[i]) > tol) return false;
  return true;
}

struct Evaluator {
  const OracleConfig& cfg;
  double tol;
  Universe uni;
  bool tracing = false;
  std::vector<double> extra;  // enrichment values for random draws

  std::vector<double> grid() const {
    std::vector<double> g;
    size_t n = cfg.random_grid < 2 ? 2 : cfg.random_grid;
    for (size_t i = 0; i < n; ++i)
      g.push_back(cfg.box_lo + (cfg.box_hi - cfg.box_lo) *
                                   static_cast<double>(i) /
                                   static_cast<double>(n - 1));
    if (std::none_of(g.begin(), g.end(),
                     [](double x) { return x == 0.0; }))
      g.push_back(0.0);
    for (double e : extra)
      if (std::isfinite(e) &&
          std::none_of(g.begin(), g.end(), [&](double x) {
            return std::fabs(x - e) <= 1e-12;
          }))
        g.push_back(e);
    return g;
  }

  bool eval_term(const TermPtr& t, const Vec& s, double& out) const {
    switch (t->kind) {
      case Term::Kind::Var: {
        if (!uni.contains(t->var)) return false;
        out = s[uni.index(t->var)];
        return true;
      }
      case Term::Kind::Int:
        out = static_cast<double>(t->value);
        return true;
      case Term::Kind::Plus:
      case Term::Kind::Minus:
      case Term::Kind::Times: {
        double a, b;
        if (!eval_term(t->lhs, s, a) || !eval_term(t->rhs, s, b))
          return false;
        out = t->kind == Term::Kind::Plus    ? a + b
              : t->kind == Term::Kind::Minus ? a - b
                                             : a * b;
        return true;
      }
      case Term::Kind::Differential: return false;
    }
    return false;
  }

  TriBool fml(const FormulaPtr& f, const Vec& s) const;
  StateSet run(const ProgramPtr& a, const Vec& s) const;

  // sorts and removes near-duplicates; truncates at the cap
  void normalize(StateSet& set) const {
    if (set.states.size() > cfg.max_states) {
      set.states.resize(cfg.max_states);
      if (tracing) set.traces.resize(cfg.max_states);
      set.complete = false;
      set.note = "state cap exceeded";
    }
    std::vector<size_t> order(set.states.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
      return set.states[i] < set.states[j];
    });
    std::vector<Vec> out;
    std::vector<std::vector<std::string>> otr;
    out.reserve(set.states.size());
    for (size_t k = 0; k < order.size(); ++k) {
      const Vec& v = set.states[order[k]];
      if (!out.empty() && vec_close(out.back(), v, tol)) continue;
      out.push_back(v);
      if (tracing) otr.push_back(set.traces[order[k]]);
    }
    set.states = std::move(out);
    set.traces = std::move(otr);
  }

  // is x within tol of some element of the sorted set?
  bool member(const StateSet& set, const Vec& x) const {
    if (set.states.empty()) return false;
    if (x.empty()) return true;  // zero-dimensional states coincide
    Vec lo = x;
    lo[0] -= tol * 1.0000001;
    auto it = std::lower_bound(set.states.begin(), set.states.end(), lo);
    for (; it != set.states.end() && (*it)[0] <= x[0] + tol * 1.0000001;
         ++it)
      if (vec_close(*it, x, tol)) return true;
    return false;
  }
};

TriBool tri_not(TriBool a) {
  if (a == TriBool::True) return TriBool::False;
  if (a == TriBool::False) return TriBool::True;
  return TriBool::Unknown;
}

TriBool Evaluator::fml(const FormulaPtr& f, const Vec& s) const {
  switch (f->kind) {
    case FK::True: return TriBool::True;
    case FK::False: return TriBool::False;
    case FK::Cmp: {
      double a, b;
      if (!eval_term(f->t1, s, a) || !eval_term(f->t2, s, b))
        return TriBool::Unknown;
      bool r = false;
      switch (f->cmp) {
        case CmpOp::Le: r = a <= b + tol; break;
        case CmpOp::Lt: r = a < b + tol; break;
        case CmpOp::Eq: r = std::fabs(a - b) <= tol; break;
        case CmpOp::Ge: r = a + tol >= b; break;
        case CmpOp::Gt: r = a + tol > b; break;
      }
      return r ? TriBool::True : TriBool::False;
    }
    case FK::Not: return tri_not(fml(f->f1, s));
    case FK::And: {
      TriBool a = fml(f->f1, s);
      if (a == TriBool::False) return TriBool::False;
      TriBool b = fml(f->f2, s);
      if (b == TriBool::False) return TriBool::False;
      if (a == TriBool::True && b == TriBool::True) return TriBool::True;
      return TriBool::Unknown;
    }
    case FK::Or: {
      TriBool a = fml(f->f1, s);
      if (a == TriBool::True) return TriBool::True;
      TriBool b = fml(f->f2, s);
      if (b == TriBool::True) return TriBool::True;
      if (a == TriBool::False && b == TriBool::False) return TriBool::False;
      return TriBool::Unknown;
    }
    case FK::Imply: {
      TriBool a = fml(f->f1, s);
      if (a == TriBool::False) return TriBool::True;
      TriBool b = fml(f->f2, s);
      if (b == TriBool::True) return TriBool::True;
      if (a == TriBool::True && b == TriBool::False) return TriBool::False;
      return TriBool::Unknown;
    }
    case FK::Equiv: {
      TriBool a = fml(f->f1, s);
      TriBool b = fml(f->f2, s);
      if (a == TriBool::Unknown || b == TriBool::Unknown)
        return TriBool::Unknown;
      return a == b ? TriBool::True : TriBool::False;
    }
    case FK::Exists: {
      // only grid-positive decisions; a full miss stays unknown
      if (!uni.contains(f->var)) return TriBool::Unknown;
      Vec s2 = s;
      size_t i = uni.index(f->var);
      for (double g : grid()) {
        s2[i] = g;
        if (fml(f->f1, s2) == TriBool::True) return TriBool::True;
      }
      return TriBool::Unknown;
    }
    case FK::Forall: {
      if (!uni.contains(f->var)) return TriBool::Unknown;
      Vec s2 = s;
      size_t i = uni.index(f->var);
      for (double g : grid()) {
        s2[i] = g;
        if (fml(f->f1, s2) == TriBool::False) return TriBool::False;
      }
      return TriBool::Unknown;
    }
    case FK::Box:
    case FK::Diamond: {
      StateSet r = run(f->p1, s);
      bool all = true, some = false, unknown = false;
      for (const auto& st : r.states) {
        TriBool v = fml(f->f1, st);
        if (v == TriBool::False) all = false;
        else if (v == TriBool::True) some = true;
        else unknown = true;
      }
      if (f->kind == FK::Box) {
        if (!all) return TriBool::False;
        if (unknown || !r.complete) return TriBool::Unknown;
        return TriBool::True;
      }
      if (some) return TriBool::True;
      if (unknown || !r.complete) return TriBool::Unknown;
      return TriBool::False;
    }
    case FK::Refines:
    case FK::ProgEq: {
      // inclusion up to tol; a miss is retried with the concrete values
      // mixed into the random grid, since the grid under-approximates
      auto inc = [&](const ProgramPtr& pa, const ProgramPtr& pb) -> TriBool {
        StateSet x = run(pa, s);
        StateSet y = run(pb, s);
        bool retried = false;
        for (const auto& xs : x.states) {
          if (member(y, xs)) continue;
          if (!retried) {
            retried = true;
            Evaluator rich = *this;
            rich.tracing = false;
            for (double v : s) rich.extra.push_back(v);
            for (const auto& zs : x.states)
              for (double v : zs) rich.extra.push_back(v);
            y = rich.run(pb, s);
          }
          if (!member(y, xs))
            return y.complete ? TriBool::False : TriBool::Unknown;
        }
        return x.complete ? TriBool::True : TriBool::Unknown;
      };
      TriBool fwd = inc(f->p1, f->p2);
      if (f->kind == FK::Refines) return fwd;
      if (fwd == TriBool::False) return TriBool::False;
      TriBool bwd = inc(f->p2, f->p1);
      if (bwd == TriBool::False) return TriBool::False;
      if (fwd == TriBool::True && bwd == TriBool::True) return TriBool::True;
      return TriBool::Unknown;
    }
  }
  return TriBool::Unknown;
}

StateSet Evaluator::run(const ProgramPtr& a, const Vec& s) const {
  StateSet res;
  switch (a->kind) {
    case PK::Test: {
      TriBool v = fml(a->fml, s);
      if (v == TriBool::True) {
        res.states.push_back(s);
        if (tracing) res.traces.push_back({"?pass"});
      } else if (v == TriBool::Unknown) {
        res.complete = false;
        res.note = "undecided test";
      }
      return res;
    }
    case PK::Assign: {
      double v;
      if (!eval_term(a->term, s, v) || !std::isfinite(v)) {
        res.complete = false;
        res.note = "unevaluable assignment";
        return res;
      }
      Vec s2 = s;
      s2[uni.index(a->var)] = v;
      res.states.push_back(std::move(s2));
      if (tracing) res.traces.push_back({a->var.str() + ":=" + fmt(v)});
      return res;
    }
    case PK::Random: {
      size_t i = uni.index(a->var);
      for (double g : grid()) {
        Vec s2 = s;
        s2[i] = g;
        res.states.push_back(std::move(s2));
        if (tracing) res.traces.push_back({a->var.str() + ":=*" + fmt(g)});
      }
      normalize(res);
      return res;
    }
    case PK::ODE: {
      Vec cur = s;
      for (const auto& eq : a->odes) {
        double v;
        if (!eval_term(eq.rhs, cur, v)) {
          res.complete = false;
          return res;
        }
        cur[uni.index(eq.var.prime())] = v;
      }
      TriBool dom0 = fml(a->fml, cur);
      if (dom0 == TriBool::Unknown) res.complete = false;
      if (dom0 != TriBool::True) return res;

      std::vector<double> stops;
      size_t n = cfg.duration_grid < 2 ? 2 : cfg.duration_grid;
      for (size_t i = 0; i < n; ++i)
        stops.push_back(cfg.ode_horizon * static_cast<double>(i) /
                        static_cast<double>(n - 1));

      std::vector<std::pair<double, Vec>> traj;
      traj.push_back({0.0, cur});
      double t = 0.0;
      Vec prev = cur;
      double exit_time = cfg.ode_horizon;
      bool exited = false;
      while (t < cfg.ode_horizon - 1e-12) {
        double h = std::min(cfg.ode_step, cfg.ode_horizon - t);
        Vec next = prev;
        bool fail = false;
        for (const auto& eq : a->odes) {
          double d;
          if (!eval_term(eq.rhs, prev, d)) {
            fail = true;
            break;
          }
          next[uni.index(eq.var)] = prev[uni.index(eq.var)] + h * d;
        }
        if (!fail)
          for (const auto& eq : a->odes) {
            double d;
            if (!eval_term(eq.rhs, next, d)) {
              fail = true;
              break;
            }
            next[uni.index(eq.var.prime())] = d;
          }
        if (fail) {
          res.complete = false;
          break;
        }
        bool blown = false;
        for (const auto& eq : a->odes) {
          double v = next[uni.index(eq.var)];
          if (!std::isfinite(v) || std::fabs(v) > cfg.blowup) blown = true;
        }
        if (blown) {
          exit_time = t;
          exited = true;
          break;
        }
        TriBool dv = fml(a->fml, next);
        if (dv == TriBool::Unknown) res.complete = false;
        if (dv != TriBool::True) {
          // bisect the domain exit between t and t + h
          double lo = t, hi = t + h;
          Vec slo = prev;
          for (int k = 0; k < 30 && hi - lo > 1e-9; ++k) {
            double mid = (lo + hi) / 2;
            Vec smid = slo;
            double hh = mid - lo;
            for (const auto& eq : a->odes) {
              double d;
              if (eval_term(eq.rhs, slo, d))
                smid[uni.index(eq.var)] = slo[uni.index(eq.var)] + hh * d;
            }
            for (const auto& eq : a->odes) {
              double d;
              if (eval_term(eq.rhs, smid, d))
                smid[uni.index(eq.var.prime())] = d;
            }
            if (fml(a->fml, smid) == TriBool::True) {
              lo = mid;
              slo = smid;
            } else {
              hi = mid;
            }
          }
          exit_time = lo;
          traj.push_back({lo, slo});
          exited = true;
          break;
        }
        t += h;
        prev = next;
        traj.push_back({t, prev});
      }
      if (exited) {
        std::vector<double> cut;
        for (double st : stops)
          if (st <= exit_time + 1e-12) cut.push_back(st);
        cut.push_back(exit_time);
        stops = std::move(cut);
      }
      for (double st : stops) {
        const Vec* best = nullptr;
        double bt = -1;
        for (const auto& [tt, ss] : traj) {
          if (tt <= st + 1e-9 && tt > bt) {
            bt = tt;
            best = &ss;
          }
        }
        if (!best) continue;
        res.states.push_back(*best);
        if (tracing) res.traces.push_back({"ode t=" + fmt(bt)});
      }
      normalize(res);
      return res;
    }
    case PK::Choice: {
      StateSet l = run(a->p1, s);
      StateSet r = run(a->p2, s);
      res = std::move(l);
      if (tracing)
        for (auto& tr : res.traces) tr.insert(tr.begin(), "left");
      for (size_t i = 0; i < r.states.size(); ++i) {
        res.states.push_back(std::move(r.states[i]));
        if (tracing) {
          auto tr = std::move(r.traces[i]);
          tr.insert(tr.begin(), "right");
          res.traces.push_back(std::move(tr));
        }
      }
      res.merge_flags(r);
      normalize(res);
      return res;
    }
    case PK::Seq: {
      StateSet l = run(a->p1, s);
      res.complete = l.complete;
      res.note = l.note;
      for (size_t i = 0; i < l.states.size(); ++i) {
        StateSet r = run(a->p2, l.states[i]);
        res.merge_flags(r);
        for (size_t k = 0; k < r.states.size(); ++k) {
          res.states.push_back(std::move(r.states[k]));
          if (tracing) {
            auto tr = l.traces[i];
            tr.insert(tr.end(), r.traces[k].begin(), r.traces[k].end());
            res.traces.push_back(std::move(tr));
          }
          if (res.states.size() > cfg.max_states) {
            normalize(res);
            res.complete = false;
            res.note = "state cap exceeded";
          }
        }
      }
      normalize(res);
      return res;
    }
    case PK::Star: {
      res.states.push_back(s);
      if (tracing) res.traces.push_back({"iter0"});
      normalize(res);
      StateSet frontier = res;
      for (size_t it = 1; it <= cfg.unroll; ++it) {
        StateSet next;
        for (size_t i = 0; i < frontier.states.size(); ++i) {
          StateSet r = run(a->p1, frontier.states[i]);
          res.merge_flags(r);
          for (size_t k = 0; k < r.states.size(); ++k) {
            if (member(res, r.states[k])) continue;
            next.states.push_back(r.states[k]);
            if (tracing) {
              auto tr = frontier.traces[i];
              tr.push_back("iter" + std::to_string(it));
              tr.insert(tr.end(), r.traces[k].begin(), r.traces[k].end());
              next.traces.push_back(std::move(tr));
            }
          }
        }
        if (next.states.empty()) break;
        normalize(next);
        // merge next into res keeping sortedness
        for (size_t k = 0; k < next.states.size(); ++k) {
          res.states.push_back(next.states[k]);
          if (tracing) res.traces.push_back(next.traces[k]);
        }
        normalize(res);
        if (res.states.size() >= cfg.max_states) {
          res.complete = false;
          res.note = "state cap exceeded";
          break;
        }
        frontier = std::move(next);
      }
      return res;
    }
  }
  return res;
}

Vec to_vec(const Universe& u, const State& s) {
  Vec v(u.vars.size(), 0.0);
  for (size_t i = 0; i < u.vars.size(); ++i) {
    auto it = s.find(u.vars[i]);
    if (it != s.end()) v[i] = it->second;
  }
  return v;
}

State to_state(const Universe& u, const Vec& v) {
  State s;
  for (size_t i = 0; i < u.vars.size(); ++i) s[u.vars[i]] = v[i];
  return s;
}

}  // namespace

bool mentions_ode(const ProgramPtr& p) {
  switch (p->kind) {
    case PK::ODE: return true;
    case PK::Test: return mentions_ode(p->fml);
    case PK::Assign:
    case PK::Random: return false;
    case PK::Choice:
    case PK::Seq: return mentions_ode(p->p1) || mentions_ode(p->p2);
    case PK::Star: return mentions_ode(p->p1);
  }
  return false;
}

bool mentions_ode(const FormulaPtr& f) {
  switch (f->kind) {
    case FK::True:
    case FK::False:
    case FK::Cmp: return false;
    case FK::Not:
    case FK::Forall:
    case FK::Exists: return mentions_ode(f->f1);
    case FK::And:
    case FK::Or:
    case FK::Imply:
    case FK::Equiv: return mentions_ode(f->f1) || mentions_ode(f->f2);
    case FK::Box:
    case FK::Diamond: return mentions_ode(f->p1) || mentions_ode(f->f1);
    case FK::Refines:
    case FK::ProgEq: return mentions_ode(f->p1) || mentions_ode(f->p2);
  }
  return false;
}

double effective_tol(const OracleConfig& cfg, bool has_ode) {
  if (cfg.tol > 0) return cfg.tol;
  return has_ode ? 1e-2 : 1e-6;
}

std::vector<State> sample_states(const VarSet& vars,
                                 const OracleConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> dist(cfg.box_lo, cfg.box_hi);
  std::vector<State> out;
  for (size_t i = 0; i < cfg.samples; ++i) {
    State s;
    for (const auto& v : vars) s[v] = dist(rng);
    out.push_back(std::move(s));
  }
  return out;
}

ReachResult reach(const ProgramPtr& a, const State& s,
                  const OracleConfig& cfg) {
  VarSet vars = all_vars(a);
  for (const auto& [v, val] : s) {
    (void)val;
    vars.insert(v);
  }
  Universe uni = Universe::of(vars);
  Evaluator ev{cfg, effective_tol(cfg, mentions_ode(a)), uni, true, {}};
  StateSet set = ev.run(a, to_vec(uni, s));
  ReachResult res;
  res.complete = set.complete;
  res.note = set.note;
  for (size_t i = 0; i < set.states.size(); ++i)
    res.states.push_back(Reached{to_state(uni, set.states[i]),
                                 set.traces[i]});
  return res;
}

Verdict check_refinement(const ProgramPtr& a, const ProgramPtr& b,
                         const OracleConfig& cfg) {
  Verdict v;
  double tol = effective_tol(cfg, mentions_ode(a) || mentions_ode(b));
  VarSet vars = all_vars(a);
  {
    VarSet vb = all_vars(b);
    vars.insert(vb.begin(), vb.end());
  }
  Universe uni = Universe::of(vars);
  VarSet sample_vars(uni.vars.begin(), uni.vars.end());
  Evaluator ev{cfg, tol, uni, true, {}};
  for (const State& s0 : sample_states(sample_vars, cfg)) {
    Vec s = to_vec(uni, s0);
    StateSet ra = ev.run(a, s);
    StateSet rb = ev.run(b, s);
    std::optional<size_t> miss;
    for (size_t i = 0; i < ra.states.size() && !miss; ++i)
      if (!ev.member(rb, ra.states[i])) miss = i;
    if (miss) {
      // retry with the concrete values mixed into the random grid
      Evaluator rich = ev;
      rich.tracing = false;
      for (double x : s) rich.extra.push_back(x);
      for (const auto& xs : ra.states)
        for (double x : xs) rich.extra.push_back(x);
      StateSet rb2 = rich.run(b, s);
      miss = std::nullopt;
      for (size_t i = 0; i < ra.states.size() && !miss; ++i)
        if (!rich.member(rb2, ra.states[i])) miss = i;
      if (miss && !rb2.complete) {
        v.conclusive = false;
        v.note = "right side incomplete: " + rb2.note;
        continue;
      }
    }
    if (miss) {
      v.pass = false;
      Counterexample c;
      c.initial = s0;
      c.output = to_state(uni, ra.states[*miss]);
      c.trace = ra.traces[*miss];
      v.counterexample = std::move(c);
      return v;
    }
    if (!ra.complete) {
      v.conclusive = false;
      if (v.note.empty()) v.note = "left side incomplete: " + ra.note;
    }
  }
  return v;
}

TriBool check_formula(const FormulaPtr& f, const State& s,
                      const OracleConfig& cfg) {
  VarSet vars = all_vars(f);
  for (const auto& [v, val] : s) {
    (void)val;
    vars.insert(v);
  }
  Universe uni = Universe::of(vars);
  Evaluator ev{cfg, effective_tol(cfg, mentions_ode(f)), uni, false, {}};
  return ev.fml(f, to_vec(uni, s));
}

}  // namespace drlref
