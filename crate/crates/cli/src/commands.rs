use crate::load::{self, InputError};
use crate::report::Report;
use crate::{Cmd, Opts};
use hocalc::algebra::pushout::zero_presentation;
use hocalc::algebra::{homotopy_pullback, homotopy_pushout, loop_phi, AlgMap, Algebra};
use hocalc::bar::{bar_algebra, bar_operad, cobar_bar_operad, cofibrant_replacement, join, suspension};
use hocalc::calculus::{
    canonical_point, chain_rule_check, co_cross_effect, cross_effect, d_n_layer, derivative, taylor_stage, Cat, Ctx,
    FunctorExpr, StabilizeOpts, Stabilized, Value,
};
use hocalc::chain::{homology, WindowedComplex};
use hocalc::operad::builtin_operad;
use hocalc::Error;
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

fn core(e: Error) -> InputError {
    InputError(e.to_string())
}

type Res<T> = Result<T, InputError>;

struct Env<'a> {
    o: &'a Opts,
    ctx: Ctx,
    complex: Option<(String, Arc<WindowedComplex>)>,
    lo: i64,
    hi: i64,
    top: i64,
}

impl<'a> Env<'a> {
    fn new(o: &'a Opts) -> Res<Self> {
        let complex = o.complex.as_ref().map(|p| load::complex(p, o.field)).transpose()?;
        let n = o.arity.unwrap_or(3).max(3) as usize;
        let op = match &o.operad {
            Some(s) => load::operad(s, o.field)?,
            None => {
                let f = o.field.or(complex.as_ref().map(|c| c.1.field)).unwrap_or(hocalc::linalg::Field::Q);
                Arc::new(builtin_operad("Com", n, f).map_err(core)?)
            }
        };
        if let Some((name, c)) = &complex {
            if c.field != op.field() {
                return Err(InputError(format!("complex {name} is over {} but the operad is over {}", c.field, op.field())));
            }
        }
        let mut ctx = Ctx::new(op);
        ctx.tdeg = o.tdeg as usize;
        let (lo, hi) = (o.window.lo, o.window.hi);
        Ok(Env { o, ctx, complex, lo, hi, top: hi + 2 })
    }

    fn meta(&self, cmd: &str, r: &mut Report, extra: Vec<(&str, serde_json::Value)>) {
        let mut m = vec![
            ("field", json!(self.ctx.field().to_string())),
            ("window", json!([self.lo, self.hi])),
            ("truncation", json!(self.ctx.op.trunc)),
            ("operad", json!(self.ctx.op.name)),
        ];
        m.extend(extra);
        r.meta(cmd, m);
    }

    fn algebra(&self) -> Res<Option<Arc<Algebra>>> {
        self.o.algebra.as_ref().map(|p| load::algebra(p, self.ctx.op.clone(), self.top)).transpose()
    }

    /// The algebra input, or the trivial algebra on the complex input.
    fn alg_input(&self) -> Res<Arc<Algebra>> {
        if let Some(a) = self.algebra()? {
            return Ok(a);
        }
        match &self.complex {
            Some((name, c)) => Ok(Arc::new(Algebra::trivial(name.clone(), self.ctx.op.clone(), c).map_err(core)?)),
            None => Err(InputError("this command needs --algebra or --complex".into())),
        }
    }

    fn value(&self, f: &FunctorExpr) -> Res<Value> {
        if let Some(a) = self.algebra()? {
            return Ok(Value::Alg(a));
        }
        if let Some((_, c)) = &self.complex {
            return Ok(Value::Chain(c.clone()));
        }
        canonical_point(&self.ctx, f.dom).map_err(core)
    }

    fn hint(&self) -> Option<Cat> {
        if self.o.algebra.is_some() {
            Some(Cat::Alg)
        } else if self.o.complex.is_some() {
            Some(Cat::Ch)
        } else {
            None
        }
    }

    fn functor(&self, i: usize) -> Res<FunctorExpr> {
        let Some(src) = self.o.functor.get(i) else {
            return Err(InputError(format!("expected {} --functor argument(s)", i + 1)));
        };
        let bad = |e: Error| InputError(format!("--functor `{src}`: {e}"));
        match self.hint() {
            Some(c) => FunctorExpr::parse(src, Some(c)).map_err(bad),
            None => FunctorExpr::parse(src, None).or_else(|e| FunctorExpr::parse(src, Some(Cat::Alg)).map_err(|_| bad(e))),
        }
    }

    fn arity(&self, default: usize) -> usize {
        self.o.arity.map_or(default, |a| a as usize)
    }

    fn stab(&self) -> StabilizeOpts {
        let mut s = StabilizeOpts::new(self.lo, self.hi);
        s.max_p = self.o.max_susp;
        s
    }

    fn betti(&self, c: &WindowedComplex) -> BTreeMap<i64, usize> {
        homology(c).table_on(self.lo, self.hi)
    }
}

fn differing(a: &BTreeMap<i64, usize>, b: &BTreeMap<i64, usize>) -> Vec<i64> {
    let keys: BTreeSet<i64> = a.keys().chain(b.keys()).copied().collect();
    keys.into_iter().filter(|d| a.get(d) != b.get(d)).collect()
}

fn stages(r: &mut Report, table: &str, s: &Stabilized) {
    r.stabilization(table, s.p, true, &s.composite_rank);
    for st in &s.stages {
        r.stage(table, st.p, &st.betti, &st.map_rank);
    }
}

/// Instability is a failed verification; every other core error is an input problem.
fn stable_or_fail<T>(r: &mut Report, res: hocalc::Result<T>) -> Res<Option<T>> {
    match res {
        Ok(v) => Ok(Some(v)),
        Err(Error::Unstable(p)) => {
            r.note("unstable", json!(format!("no stabilization up to p = {p}")));
            r.verdict("stabilization", false, &[]);
            Ok(None)
        }
        Err(e) => Err(core(e)),
    }
}

pub fn run(cmd: Cmd, o: &Opts, r: &mut Report) -> Res<()> {
    if matches!(cmd, Cmd::Validate) {
        return validate(o, r);
    }
    let env = Env::new(o)?;
    match cmd {
        Cmd::Homology => {
            env.meta("homology", r, vec![]);
            let (name, c) = match (&env.complex, env.algebra()?) {
                (_, Some(a)) => (a.name.clone(), a.complex.clone()),
                (Some((n, c)), None) => (n.clone(), c.clone()),
                _ => return Err(InputError("homology needs --complex or --algebra".into())),
            };
            r.betti(&format!("H({name})"), &env.betti(&c));
        }
        Cmd::Bar => {
            if env.o.algebra.is_some() || env.complex.is_some() {
                let x = env.alg_input()?;
                env.meta("bar", r, vec![("algebra", json!(x.name))]);
                let b = bar_algebra(x.clone(), env.top).map_err(core)?;
                r.betti(&format!("B(O,{})", x.name), &env.betti(&b.complex));
            } else {
                let n = env.arity(env.ctx.op.trunc);
                env.meta("bar", r, vec![("arity", json!(n))]);
                let b = bar_operad(env.ctx.op.clone(), n).map_err(core)?;
                r.betti(&format!("B(O)({n})"), &env.betti(&b.complex));
            }
        }
        Cmd::CobarCheck => {
            let m = env.arity(env.ctx.op.trunc);
            env.meta("cobar-check", r, vec![("arity", json!(m))]);
            for n in 1..=m {
                let c = cobar_bar_operad(env.ctx.op.clone(), n).map_err(core)?;
                r.betti(&format!("BcB(O)({n})"), &env.betti(&c.complex));
                r.verdict(&format!("counit quasi-iso at arity {n}"), c.induced.quasi_iso, &c.induced.failing);
            }
        }
        Cmd::SuspensionCheck => {
            let z = env.alg_input()?;
            env.meta("suspension-check", r, vec![("algebra", json!(z.name))]);
            let zc = match z.presentation() {
                Some(_) => z.clone(),
                None => {
                    let rep = cofibrant_replacement(z.clone(), env.top).map_err(core)?;
                    r.verdict("cofibrant replacement", rep.verdict(), &rep.induced.failing);
                    rep.algebra.clone()
                }
            };
            let zero = Arc::new(Algebra::free("0", zero_presentation(env.ctx.op.clone()), env.top).map_err(core)?);
            let g = AlgMap::zero(zc.clone(), zero.clone());
            let model = homotopy_pushout(&g, &g, env.top).map_err(core)?;
            let closed = suspension(&z, env.top).map_err(core)?;
            let (a, b) = (env.betti(&model.complex), env.betti(&closed.complex));
            r.betti("pushout model", &a);
            r.betti("closed form", &b);
            r.verdict("pushout model matches closed form", a == b, &differing(&a, &b));
        }
        Cmd::PathobjCheck => {
            let x = env.alg_input()?;
            let l = env.o.tdeg as usize;
            env.meta("pathobj-check", r, vec![("algebra", json!(x.name)), ("tdeg", json!(l))]);
            let mut tables = vec![];
            for ll in [l, l + 1] {
                let lp = loop_phi(x.clone(), ll).map_err(core)?;
                let t = env.betti(&lp.omega.complex);
                r.betti(&format!("ΩX at L={ll}"), &t);
                let failing = hocalc::chain::induced_homology_map(&lp.phi.chain).map_err(core)?.failing;
                r.verdict(&format!("Φ quasi-iso at L={ll}"), lp.quasi_iso, &failing);
                if !lp.guaranteed {
                    r.note("guarantee", json!("none outside characteristic 0"));
                }
                tables.push(t);
            }
            r.verdict(&format!("L={l} and L={} agree", l + 1), tables[0] == tables[1], &differing(&tables[0], &tables[1]));
        }
        Cmd::Pushout => {
            let x = env.alg_input()?;
            let t = env.arity(2);
            env.meta("pushout", r, vec![("algebra", json!(x.name)), ("t", json!(t))]);
            let j = join(x.clone(), t, env.top).map_err(core)?;
            r.verdict("cofibrant replacement", j.replacement.verdict(), &j.replacement.induced.failing);
            r.betti(&format!("{}*{t}", x.name), &env.betti(&j.algebra.complex));
        }
        Cmd::Pullback => {
            let x = env.alg_input()?;
            let l = env.o.tdeg as usize;
            env.meta("pullback", r, vec![("algebra", json!(x.name)), ("tdeg", json!(l))]);
            let zero = Arc::new(Algebra::zero(env.ctx.op.clone()));
            let g = AlgMap::zero(zero, x.clone());
            let (p, _) = homotopy_pullback(&g, &g, l).map_err(core)?;
            r.betti(&format!("0 ×_{} 0", x.name), &env.betti(&p.complex));
        }
        Cmd::CrossEffect => {
            let f = env.functor(0)?;
            let n = env.arity(2);
            let x = env.value(&f)?;
            env.meta("cross-effect", r, vec![("functor", json!(f.to_string())), ("arity", json!(n))]);
            let xs = vec![x; n];
            let cr = env.betti(&cross_effect(&env.ctx, &f, &xs, env.top).map_err(core)?);
            r.betti("cross-effect", &cr);
            if f.dom.is_chain() && f.cod.is_chain() {
                let co = env.betti(&co_cross_effect(&env.ctx, &f, &xs, env.top).map_err(core)?);
                r.betti("co-cross-effect", &co);
                r.verdict("cross-effect equals co-cross-effect", cr == co, &differing(&cr, &co));
            }
        }
        Cmd::Derivative => {
            let f = env.functor(0)?;
            let n = env.arity(1);
            env.meta("derivative", r, vec![("functor", json!(f.to_string())), ("arity", json!(n))]);
            if let Some(d) = stable_or_fail(r, derivative(&env.ctx, &f, n, &env.stab()))? {
                r.betti("derivative", &d.betti());
                stages(r, "derivative", &d.stable);
            }
        }
        Cmd::Layer => {
            let f = env.functor(0)?;
            let n = env.arity(1);
            let x = env.value(&f)?;
            env.meta("layer", r, vec![("functor", json!(f.to_string())), ("arity", json!(n))]);
            if let Some(l) = stable_or_fail(r, d_n_layer(&env.ctx, &f, n, &x, &env.stab()))? {
                let (a, b) = l.betti();
                r.betti("orbits of (Σ^∞X)^⊗n", &a);
                r.betti("Ω^∞ of stabilized orbits", &b);
                r.verdict("both routes agree", a == b, &differing(&a, &b));
                stages(r, "derivative", &l.derivative.stable);
                stages(r, "stabilized cross-effect", &l.stable);
            }
        }
        Cmd::TaylorStage => {
            let f = env.functor(0)?;
            let n = env.arity(1);
            let it = env.o.iterations as usize;
            let x = env.value(&f)?;
            env.meta("taylor-stage", r, vec![("functor", json!(f.to_string())), ("arity", json!(n)), ("iterations", json!(it))]);
            let t = taylor_stage(&env.ctx, &f, n, &x, it, env.top).map_err(core)?;
            r.betti("Taylor stage", &env.betti(&t));
        }
        Cmd::ChainRule => {
            let (f, g) = (env.functor(0)?, env.functor(1)?);
            let n = env.arity(2);
            env.meta("chain-rule", r, vec![("outer", json!(f.to_string())), ("inner", json!(g.to_string())), ("arity", json!(n))]);
            if let Some(c) = stable_or_fail(r, chain_rule_check(&env.ctx, &f, &g, n, &env.stab()))? {
                let pick = |k: fn(&hocalc::calculus::ChainRuleRow) -> usize| -> BTreeMap<i64, usize> {
                    c.rows.iter().filter(|w| k(w) > 0).map(|w| (w.deg, k(w))).collect()
                };
                let (lhs, rhs) = (pick(|w| w.lhs), pick(|w| w.rhs));
                r.betti("derivative of composite", &lhs);
                r.betti("composition product", &rhs);
                r.betti("Σ_n-invariants of derivative of composite", &pick(|w| w.lhs_invariants));
                r.verdict("chain rule", c.equal, &differing(&lhs, &rhs));
                stages(r, "derivative of composite", &c.lhs.stable);
            }
        }
        Cmd::Validate => unreachable!(),
    }
    Ok(())
}

fn validate(o: &Opts, r: &mut Report) -> Res<()> {
    let Some(spec) = &o.operad else {
        return Err(InputError("validate needs --operad".into()));
    };
    let op = load::operad_unchecked(spec, o.field)?;
    r.meta(
        "validate",
        vec![("field", json!(op.field().to_string())), ("truncation", json!(op.trunc)), ("operad", json!(op.name))],
    );
    let bad = op.validate();
    for b in &bad {
        r.note("operad failure", json!(format!("{spec}: {b}")));
    }
    r.verdict("operad axioms", bad.is_empty(), &[]);
    let Some(path) = &o.algebra else { return Ok(()) };
    if !bad.is_empty() {
        r.note("algebra", json!("skipped: the operad is invalid"));
        return Ok(());
    }
    let (name, qf) = load::presentation(path, Arc::new(op))?;
    match Algebra::free(name, qf, o.window.hi + 2) {
        Ok(a) => {
            let bad = a.validate(200);
            for b in &bad {
                r.note("algebra failure", json!(format!("{}: {b}", path.display())));
            }
            r.verdict("algebra axioms", bad.is_empty(), &[]);
        }
        Err(e) => {
            r.note("algebra failure", json!(format!("{}: {e}", path.display())));
            r.verdict("algebra axioms", false, &[]);
        }
    }
    Ok(())
}
