//! Total sequences over the naturals, with budgeted evaluation.
//!
//! A [`Sequence`] is an immutable description of a total function from the
//! naturals to the naturals. Evaluation happens under an [`EvalCtx`] that
//! owns the per-call budget and records the largest index probed. Shifted
//! views are index arithmetic over the base sequence and never copy.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Flow, FlowResult, Result};

/// Arbitrary-precision natural number. The extracted bounds compose sums of
/// nested bounds and overflow any fixed width on small inputs already.
pub type Nat = BigUint;

pub fn nat(v: u64) -> Nat {
    Nat::from(v)
}

/// Limits shared by one engine call.
#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Allowed point evaluations per engine call.
    pub eval_budget: u64,
    /// Recursion guard; breaches surface like budget exhaustion.
    pub depth_cap: u32,
    /// Work cap for exhaustive subset searches in the oracle.
    pub subset_cap: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            eval_budget: 10_000_000,
            depth_cap: 2048,
            subset_cap: 1_000_000,
        }
    }
}

impl EngineConfig {
    pub fn with_budget(eval_budget: u64) -> Self {
        Self {
            eval_budget,
            ..Self::default()
        }
    }
}

/// Mutable evaluation state owned by a single engine call.
///
/// Not shareable across threads; distinct calls build their own context and
/// may then run concurrently on distinct sequences.
pub struct EvalCtx {
    remaining: std::cell::Cell<u64>,
    used: std::cell::Cell<u64>,
    depth: std::cell::Cell<u32>,
    depth_cap: u32,
    max_index: std::cell::RefCell<Nat>,
    token_counter: std::cell::Cell<u64>,
}

impl EvalCtx {
    pub fn new(cfg: &EngineConfig) -> Self {
        Self {
            remaining: std::cell::Cell::new(cfg.eval_budget),
            used: std::cell::Cell::new(0),
            depth: std::cell::Cell::new(0),
            depth_cap: cfg.depth_cap,
            max_index: std::cell::RefCell::new(Nat::zero()),
            token_counter: std::cell::Cell::new(0),
        }
    }

    pub fn charge(&self) -> Result<()> {
        let r = self.remaining.get();
        if r == 0 {
            return Err(Error::BudgetExhausted {
                used: self.used.get(),
            });
        }
        self.remaining.set(r - 1);
        self.used.set(self.used.get() + 1);
        Ok(())
    }

    pub fn evals_used(&self) -> u64 {
        self.used.get()
    }

    pub fn max_index_probed(&self) -> Nat {
        self.max_index.borrow().clone()
    }

    fn note_index(&self, n: &Nat) {
        let mut m = self.max_index.borrow_mut();
        if n > &*m {
            *m = n.clone();
        }
    }

    pub(crate) fn enter(&self) -> Result<DepthGuard<'_>> {
        let d = self.depth.get();
        if d >= self.depth_cap {
            return Err(Error::DepthCapExceeded {
                cap: self.depth_cap,
            });
        }
        self.depth.set(d + 1);
        Ok(DepthGuard { ctx: self })
    }

    pub(crate) fn new_token(&self) -> u64 {
        let t = self.token_counter.get();
        self.token_counter.set(t + 1);
        t
    }
}

pub(crate) struct DepthGuard<'a> {
    ctx: &'a EvalCtx,
}

impl Drop for DepthGuard<'_> {
    fn drop(&mut self) {
        let d = self.ctx.depth.get();
        self.ctx.depth.set(d - 1);
    }
}

type RuleFn = dyn Fn(&Nat) -> Result<Nat> + Send + Sync;

/// A round harvested lazily while an engine call runs. Derived sequences
/// read the `first` components; drivers read the rest after the recursion
/// on the derived sequences returns.
#[derive(Debug, Clone)]
pub(crate) struct HarvestRound {
    /// First witness index of this round, absolute.
    pub first: Nat,
    /// Full witness of this round, absolute indices.
    pub witness: Vec<Nat>,
    /// Length of the initial segment the round consumed from its offset.
    pub extent: Nat,
    /// Certificate trace of the round's sub-call.
    pub trace: Vec<crate::engine::TraceEntry>,
}

pub(crate) trait Feed: Send + Sync {
    /// Ensure rounds `0..=n` exist, generating them in order.
    fn force(&self, n: &Nat, ctx: &EvalCtx) -> FlowResult<()>;
    /// First index of round `n`, which must already be forced.
    fn first_of(&self, n: &Nat) -> Result<Nat>;
}

enum SeqKind {
    Const(Nat),
    Affine {
        a: Nat,
        b: Nat,
    },
    Prefix {
        vals: Vec<Nat>,
        tail: Sequence,
    },
    Periodic(Vec<Nat>),
    Dec(Nat),
    Cex(Nat),
    Sum(Sequence, Sequence),
    Shift {
        base: Sequence,
        offset: Nat,
    },
    /// Sliding window sum of `width` consecutive values of `base`.
    WindowSum {
        base: Sequence,
        width: Nat,
    },
    Rule {
        name: String,
        f: Box<RuleFn>,
        memo: Mutex<HashMap<Nat, Nat>>,
    },
    /// Finite table that refuses probes beyond its range. Used by the
    /// certificate checker to rebuild derived sequences from recorded data.
    Table(Vec<Nat>),
    /// `base(feed.first_of(n))`: the derived sequences steering the
    /// engine's repetition schemes.
    Derived {
        feed: Arc<dyn Feed>,
        base: Sequence,
    },
}

/// A total function from the naturals to the naturals.
///
/// Cloning is cheap; the representation is shared. Evaluation is
/// deterministic: the same index always yields the same value.
#[derive(Clone)]
pub struct Sequence {
    kind: Arc<SeqKind>,
}

impl Sequence {
    fn from_kind(kind: SeqKind) -> Self {
        Self {
            kind: Arc::new(kind),
        }
    }

    pub fn constant(c: Nat) -> Self {
        Self::from_kind(SeqKind::Const(c))
    }

    /// `n ↦ a·n + b`.
    pub fn affine(a: Nat, b: Nat) -> Self {
        Self::from_kind(SeqKind::Affine { a, b })
    }

    /// Explicit prefix followed by `tail` (re-indexed to start at 0).
    pub fn prefix(vals: Vec<Nat>, tail: Sequence) -> Self {
        Self::from_kind(SeqKind::Prefix { vals, tail })
    }

    /// Repeats `vals` forever. Empty lists are rejected by the parser.
    pub fn periodic(vals: Vec<Nat>) -> Self {
        Self::from_kind(SeqKind::Periodic(vals))
    }

    /// `n, n−1, …, 1, 0, 0, …`
    pub fn dec(n: Nat) -> Self {
        Self::from_kind(SeqKind::Dec(n))
    }

    /// Member `n ≥ 1` of the family `n, n−1, …, 1, n+1, n+2, …` whose
    /// members admit no common good pair.
    pub fn cex(n: Nat) -> Self {
        Self::from_kind(SeqKind::Cex(n))
    }

    pub fn sum(a: Sequence, b: Sequence) -> Self {
        Self::from_kind(SeqKind::Sum(a, b))
    }

    /// Zero-copy view `n ↦ self(n + d)`. Nested shifts collapse into one.
    pub fn shifted(&self, d: Nat) -> Self {
        if d.is_zero() {
            return self.clone();
        }
        match &*self.kind {
            SeqKind::Shift { base, offset } => Self::from_kind(SeqKind::Shift {
                base: base.clone(),
                offset: offset + &d,
            }),
            _ => Self::from_kind(SeqKind::Shift {
                base: self.clone(),
                offset: d,
            }),
        }
    }

    /// `n ↦ Σ_{j<width} self(n+j)`. Costs one budget unit per summed term.
    pub fn window_sum(&self, width: Nat) -> Self {
        Self::from_kind(SeqKind::WindowSum {
            base: self.clone(),
            width,
        })
    }

    /// Black-box evaluator. Totality cannot be verified; failures surface as
    /// [`Error::Rule`]. Values are memoized per sequence.
    pub fn from_fn<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Nat) -> Result<Nat> + Send + Sync + 'static,
    {
        Self::from_kind(SeqKind::Rule {
            name: name.into(),
            f: Box::new(f),
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub(crate) fn table(vals: Vec<Nat>) -> Self {
        Self::from_kind(SeqKind::Table(vals))
    }

    pub(crate) fn derived(feed: Arc<dyn Feed>, base: Sequence) -> Self {
        Self::from_kind(SeqKind::Derived { feed, base })
    }

    /// Evaluate at `n`, charging one budget unit per point evaluation
    /// regardless of representation depth. Window sums charge per term and
    /// derived sequences additionally charge for the engine work their
    /// forcing triggers.
    pub fn eval(&self, n: &Nat, ctx: &EvalCtx) -> Result<Nat> {
        self.eval_flow(n, ctx).map_err(Flow::into_error)
    }

    pub(crate) fn eval_flow(&self, n: &Nat, ctx: &EvalCtx) -> FlowResult<Nat> {
        ctx.charge()?;
        ctx.note_index(n);
        self.value_of(n, ctx)
    }

    fn value_of(&self, n: &Nat, ctx: &EvalCtx) -> FlowResult<Nat> {
        match &*self.kind {
            SeqKind::Const(c) => Ok(c.clone()),
            SeqKind::Affine { a, b } => Ok(a * n + b),
            SeqKind::Prefix { vals, tail } => match usize::try_from(n) {
                Ok(i) if i < vals.len() => Ok(vals[i].clone()),
                _ => tail.value_of(&(n - nat(vals.len() as u64)), ctx),
            },
            SeqKind::Periodic(vals) => {
                let i = n % nat(vals.len() as u64);
                let i = usize::try_from(&i).expect("index reduced modulo period length");
                Ok(vals[i].clone())
            }
            SeqKind::Dec(m) => {
                if n < m {
                    Ok(m - n)
                } else {
                    Ok(Nat::zero())
                }
            }
            SeqKind::Cex(m) => {
                if n < m {
                    Ok(m - n)
                } else {
                    Ok(n + 1u32)
                }
            }
            SeqKind::Sum(a, b) => Ok(a.value_of(n, ctx)? + b.value_of(n, ctx)?),
            SeqKind::Shift { base, offset } => {
                let idx = n + offset;
                ctx.note_index(&idx);
                base.value_of(&idx, ctx)
            }
            SeqKind::WindowSum { base, width } => {
                let mut acc = Nat::zero();
                let mut j = Nat::zero();
                while &j < width {
                    acc += base.eval_flow(&(n + &j), ctx)?;
                    j += 1u32;
                }
                Ok(acc)
            }
            SeqKind::Rule { f, memo, .. } => {
                if let Some(v) = memo.lock().unwrap().get(n) {
                    return Ok(v.clone());
                }
                let v = f(n)?;
                memo.lock().unwrap().insert(n.clone(), v.clone());
                Ok(v)
            }
            SeqKind::Table(vals) => match usize::try_from(n) {
                Ok(i) if i < vals.len() => Ok(vals[i].clone()),
                _ => Err(Error::Internal(format!(
                    "table probe at {n} beyond recorded range {}",
                    vals.len()
                ))
                .into()),
            },
            SeqKind::Derived { feed, base } => {
                feed.force(n, ctx)?;
                let idx = feed.first_of(n)?;
                base.eval_flow(&idx, ctx)
            }
        }
    }
}

impl fmt::Display for Sequence {
    /// Prints the description in the textual syntax accepted by the parser.
    /// Black-box and engine-internal kinds print non-parseable markers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, vals: &[Nat]) -> fmt::Result {
            for (i, v) in vals.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        }
        match &*self.kind {
            SeqKind::Const(c) => write!(f, "const({c})"),
            SeqKind::Affine { a, b } => write!(f, "affine({a},{b})"),
            SeqKind::Prefix { vals, tail } => {
                write!(f, "prefix(")?;
                list(f, vals)?;
                write!(f, ");{tail}")
            }
            SeqKind::Periodic(vals) => {
                write!(f, "periodic(")?;
                list(f, vals)?;
                write!(f, ")")
            }
            SeqKind::Dec(n) => write!(f, "dec({n})"),
            SeqKind::Cex(n) => write!(f, "cex({n})"),
            SeqKind::Sum(a, b) => write!(f, "sum({a},{b})"),
            SeqKind::Shift { base, offset } => write!(f, "shift({base},{offset})"),
            SeqKind::WindowSum { base, width } => write!(f, "<window-sum {width} of {base}>"),
            SeqKind::Rule { name, .. } => write!(f, "<rule {name}>"),
            SeqKind::Table(vals) => write!(f, "<table len {}>", vals.len()),
            SeqKind::Derived { .. } => write!(f, "<derived>"),
        }
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence({self})")
    }
}

/// Expression over the arguments of a [`MultiFunction`].
#[derive(Debug, Clone)]
pub(crate) enum Expr {
    Num(Nat),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Monus(Box<Expr>, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn eval(&self, args: &[Nat]) -> Result<Nat> {
        Ok(match self {
            Expr::Num(c) => c.clone(),
            Expr::Var(i) => args[*i].clone(),
            Expr::Add(a, b) => a.eval(args)? + b.eval(args)?,
            Expr::Mul(a, b) => a.eval(args)? * b.eval(args)?,
            Expr::Pow(a, b) => {
                let base = a.eval(args)?;
                let exp = b.eval(args)?;
                let exp = u32::try_from(&exp).map_err(|_| {
                    Error::InvalidArg(format!("exponent {exp} exceeds the supported range"))
                })?;
                base.pow(exp)
            }
            Expr::Monus(a, b) => {
                let x = a.eval(args)?;
                let y = b.eval(args)?;
                if x > y { x - y } else { Nat::zero() }
            }
            Expr::Min(a, b) => a.eval(args)?.min(b.eval(args)?),
            Expr::Max(a, b) => a.eval(args)?.max(b.eval(args)?),
        })
    }

    fn print(&self, names: &[&str], out: &mut String) {
        match self {
            Expr::Num(c) => out.push_str(&c.to_string()),
            Expr::Var(i) => out.push_str(names[*i]),
            Expr::Add(a, b) => {
                out.push('(');
                a.print(names, out);
                out.push('+');
                b.print(names, out);
                out.push(')');
            }
            Expr::Mul(a, b) => {
                out.push('(');
                a.print(names, out);
                out.push('*');
                b.print(names, out);
                out.push(')');
            }
            Expr::Pow(a, b) => {
                out.push('(');
                a.print(names, out);
                out.push('^');
                b.print(names, out);
                out.push(')');
            }
            Expr::Monus(a, b) | Expr::Min(a, b) | Expr::Max(a, b) => {
                out.push_str(match self {
                    Expr::Monus(..) => "monus(",
                    Expr::Min(..) => "min(",
                    _ => "max(",
                });
                a.print(names, out);
                out.push(',');
                b.print(names, out);
                out.push(')');
            }
        }
    }
}

type MultiRuleFn = dyn Fn(&[Nat]) -> Result<Nat> + Send + Sync;

enum FnKind {
    Expr(Expr),
    Rule {
        name: String,
        f: Box<MultiRuleFn>,
        memo: Mutex<HashMap<Vec<Nat>, Nat>>,
    },
}

/// A total function from pairs or triples of naturals to the naturals.
#[derive(Clone)]
pub struct MultiFunction {
    arity: usize,
    kind: Arc<FnKind>,
}

impl MultiFunction {
    pub(crate) fn from_expr(arity: usize, expr: Expr) -> Self {
        Self {
            arity,
            kind: Arc::new(FnKind::Expr(expr)),
        }
    }

    pub fn from_fn<F>(arity: usize, name: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(&[Nat]) -> Result<Nat> + Send + Sync + 'static,
    {
        if arity != 2 && arity != 3 {
            return Err(Error::InvalidArg(format!("unsupported arity {arity}")));
        }
        Ok(Self {
            arity,
            kind: Arc::new(FnKind::Rule {
                name: name.into(),
                f: Box::new(f),
                memo: Mutex::new(HashMap::new()),
            }),
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, args: &[Nat], ctx: &EvalCtx) -> Result<Nat> {
        if args.len() != self.arity {
            return Err(Error::InvalidArg(format!(
                "expected {} arguments, got {}",
                self.arity,
                args.len()
            )));
        }
        ctx.charge()?;
        match &*self.kind {
            FnKind::Expr(e) => e.eval(args),
            FnKind::Rule { f, memo, .. } => {
                if let Some(v) = memo.lock().unwrap().get(args) {
                    return Ok(v.clone());
                }
                let v = f(args)?;
                memo.lock().unwrap().insert(args.to_vec(), v.clone());
                Ok(v)
            }
        }
    }

    /// `args ↦ self(args) ∸ amount` (truncated subtraction).
    pub fn monus_shifted(&self, amount: Nat) -> Self {
        let inner = self.clone();
        let name = format!("monus-shift {amount} of {inner}");
        let f = move |args: &[Nat]| -> Result<Nat> {
            // Re-enters the inner evaluator without a context; shifted
            // functions are only built inside engine calls which charge at
            // their own eval sites.
            let v = inner.eval_uncharged(args)?;
            Ok(if v > amount { v - &amount } else { Nat::zero() })
        };
        Self {
            arity: self.arity,
            kind: Arc::new(FnKind::Rule {
                name,
                f: Box::new(f),
                memo: Mutex::new(HashMap::new()),
            }),
        }
    }

    pub(crate) fn eval_uncharged(&self, args: &[Nat]) -> Result<Nat> {
        match &*self.kind {
            FnKind::Expr(e) => e.eval(args),
            FnKind::Rule { f, memo, .. } => {
                if let Some(v) = memo.lock().unwrap().get(args) {
                    return Ok(v.clone());
                }
                let v = f(args)?;
                memo.lock().unwrap().insert(args.to_vec(), v.clone());
                Ok(v)
            }
        }
    }
}

impl fmt::Display for MultiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.kind {
            FnKind::Expr(e) => {
                let names: &[&str] = if self.arity == 2 {
                    &["i", "j"]
                } else {
                    &["i", "j", "k"]
                };
                let mut s = String::new();
                e.print(names, &mut s);
                write!(f, "f{}:{}", self.arity, s)
            }
            FnKind::Rule { name, .. } => write!(f, "<rule f{} {}>", self.arity, name),
        }
    }
}

impl fmt::Debug for MultiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiFunction({self})")
    }
}

/// A 2-coloring of the naturals.
#[derive(Clone, Debug)]
pub struct Coloring {
    seq: Sequence,
}

impl Coloring {
    pub fn new(seq: Sequence) -> Self {
        Self { seq }
    }

    pub fn sequence(&self) -> &Sequence {
        &self.seq
    }

    /// Evaluate, insisting the value really is a color.
    pub fn color(&self, n: &Nat, ctx: &EvalCtx) -> Result<Nat> {
        let v = self.seq.eval(n, ctx)?;
        if v > Nat::one() {
            return Err(Error::NotAColor {
                index: n.clone(),
                value: v,
            });
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> EvalCtx {
        EvalCtx::new(&EngineConfig::default())
    }

    #[test]
    fn affine_evaluates_directly() {
        let s = Sequence::affine(nat(2), nat(1));
        assert_eq!(s.eval(&nat(3), &ctx()).unwrap(), nat(7));
    }

    #[test]
    fn prefix_falls_through_to_tail() {
        let s = Sequence::prefix(
            vec![nat(3), nat(1), nat(4)],
            Sequence::constant(Nat::zero()),
        );
        assert_eq!(s.eval(&nat(5), &ctx()).unwrap(), nat(0));
        assert_eq!(s.eval(&nat(2), &ctx()).unwrap(), nat(4));
    }

    #[test]
    fn shift_is_index_arithmetic() {
        let s = Sequence::prefix(
            vec![nat(3), nat(1), nat(4)],
            Sequence::constant(Nat::zero()),
        );
        let sh = s.shifted(nat(2));
        assert_eq!(sh.eval(&nat(0), &ctx()).unwrap(), nat(4));
        let sh2 = sh.shifted(nat(1));
        // collapsed, single layer
        assert_eq!(sh2.eval(&nat(0), &ctx()).unwrap(), nat(0));
        assert_eq!(format!("{sh2}"), "shift(prefix(3,1,4);const(0),3)");
    }

    #[test]
    fn dec_and_cex_shapes() {
        let d = Sequence::dec(nat(5));
        let vals: Vec<u64> = (0..8)
            .map(|i| u64::try_from(&d.eval(&nat(i), &ctx()).unwrap()).unwrap())
            .collect();
        assert_eq!(vals, vec![5, 4, 3, 2, 1, 0, 0, 0]);

        let c = Sequence::cex(nat(3));
        let vals: Vec<u64> = (0..6)
            .map(|i| u64::try_from(&c.eval(&nat(i), &ctx()).unwrap()).unwrap())
            .collect();
        assert_eq!(vals, vec![3, 2, 1, 4, 5, 6]);
    }

    #[test]
    fn budget_exhaustion_is_loud() {
        let s = Sequence::constant(nat(1));
        let c = EvalCtx::new(&EngineConfig::with_budget(2));
        assert!(s.eval(&nat(0), &c).is_ok());
        assert!(s.eval(&nat(1), &c).is_ok());
        match s.eval(&nat(2), &c) {
            Err(Error::BudgetExhausted { used }) => assert_eq!(used, 2),
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn window_sum_charges_per_term() {
        let s = Sequence::affine(nat(1), nat(0));
        let w = s.window_sum(nat(3));
        let c = ctx();
        // 0+1+2
        assert_eq!(w.eval(&nat(0), &c).unwrap(), nat(3));
        assert_eq!(c.evals_used(), 4);
    }

    #[test]
    fn coloring_rejects_large_values() {
        let c = Coloring::new(Sequence::constant(nat(2)));
        assert!(matches!(
            c.color(&nat(0), &ctx()),
            Err(Error::NotAColor { .. })
        ));
    }
}
