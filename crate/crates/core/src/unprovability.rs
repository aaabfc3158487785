//! Executable refuters: no single function of pairs (or pair of functions of
//! triples) can linearize the product order so that one application of a
//! weaker extraction case yields a stronger one. Each operation constructs
//! the violating tuples and re-verifies them by fresh evaluation before
//! returning.

use num_traits::{One, Zero};

use crate::canon::Value;
use crate::error::{Error, Result};
use crate::pigeonhole::{MonoOutcome, mono_run_inner};
use crate::sequence::{EngineConfig, EvalCtx, MultiFunction, Nat, Sequence, nat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqSide {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `M ≤ a(n) ≤ b(m)`
    AlphaBeta,
    /// `M ≤ b(n) ≤ a(m)`
    BetaAlpha,
}

/// Either one of the sequences repeats a value below the threshold `l`
/// times, or two values at or above the threshold cross between the
/// sequences.
#[derive(Debug, Clone)]
pub enum DichotomyVariant {
    EqualRun {
        side: SeqSide,
        indices: Vec<Nat>,
        value: Nat,
    },
    Crossing {
        orientation: Orientation,
        n: Nat,
        m: Nat,
        first: Nat,
        second: Nat,
    },
}

#[derive(Debug, Clone)]
pub struct DichotomyResult {
    pub variant: DichotomyVariant,
    /// Every index in the variant is at most this.
    pub bound_b: Nat,
    /// Block length `K = (l-1)·M + 1`.
    pub window: Nat,
}

impl DichotomyResult {
    pub fn to_value(&self) -> Value {
        let mut fields = vec![
            ("kind", Value::str("dichotomy")),
            ("bound", Value::Nat(self.bound_b.clone())),
            ("window", Value::Nat(self.window.clone())),
        ];
        match &self.variant {
            DichotomyVariant::EqualRun {
                side,
                indices,
                value,
            } => {
                fields.push(("variant", Value::str("equal-run")));
                fields.push((
                    "side",
                    Value::str(match side {
                        SeqSide::A => "a",
                        SeqSide::B => "b",
                    }),
                ));
                fields.push(("indices", Value::nat_arr(indices.iter())));
                fields.push(("value", Value::Nat(value.clone())));
            }
            DichotomyVariant::Crossing {
                orientation,
                n,
                m,
                first,
                second,
            } => {
                fields.push(("variant", Value::str("crossing")));
                fields.push((
                    "orientation",
                    Value::str(match orientation {
                        Orientation::AlphaBeta => "a<=b",
                        Orientation::BetaAlpha => "b<=a",
                    }),
                ));
                fields.push(("n", Value::Nat(n.clone())));
                fields.push(("m", Value::Nat(m.clone())));
                fields.push(("first", Value::Nat(first.clone())));
                fields.push(("second", Value::Nat(second.clone())));
            }
        }
        Value::obj(fields)
    }
}

/// Scan consecutive blocks of length `K = (l-1)·M + 1`. A block of `a` or
/// `b` whose values all stay below `M` yields an equal-value run; otherwise
/// each block contributes one escape index per sequence and the alternating
/// escape values admit a crossing within `a(n_1) + 1` rounds.
pub fn dichotomy_lemma(
    a: &Sequence,
    b: &Sequence,
    m: &Nat,
    l: u64,
    cfg: &EngineConfig,
) -> Result<DichotomyResult> {
    let ctx = EvalCtx::new(cfg);
    dichotomy_inner(a, b, m, l, &ctx)
}

pub(crate) fn dichotomy_inner(
    a: &Sequence,
    b: &Sequence,
    m: &Nat,
    l: u64,
    ctx: &EvalCtx,
) -> Result<DichotomyResult> {
    if l < 2 {
        return Err(Error::InvalidArg("run length must be at least 2".into()));
    }
    let window = (m * nat(l - 1)) + 1u32;

    let bound_of = |escape1: Option<&Nat>, round: &Nat, ctx: &EvalCtx| -> Result<Nat> {
        match escape1 {
            Some(n1) => Ok(&window * (a.eval(n1, ctx)? + 1u32)),
            // an all-below block in the very first round: everything
            // happened inside one window
            None => Ok(&window * (round + 1u32)),
        }
    };

    let mut first_escape: Option<Nat> = None;
    let mut round = Nat::zero();
    // alternating escape values a(n_1), b(m_1), a(n_2), ...
    let mut prev_gamma: Option<(Nat, Nat, bool)> = None; // (index, value, is_alpha)
    loop {
        let offset = &round * &window;
        let scan_a = mono_run_inner(&a.shifted(offset.clone()), m, l, ctx)?;
        let n_r = match scan_a.outcome {
            MonoOutcome::Run(run) => {
                let indices: Vec<Nat> = run.indices.iter().map(|i| i + &offset).collect();
                return verify_equal_run(
                    a,
                    b,
                    m,
                    SeqSide::A,
                    indices,
                    run.color,
                    bound_of(first_escape.as_ref(), &round, ctx)?,
                    window,
                    ctx,
                );
            }
            MonoOutcome::NotAllBelow { index, .. } => index + &offset,
        };
        let scan_b = mono_run_inner(&b.shifted(offset.clone()), m, l, ctx)?;
        let m_r = match scan_b.outcome {
            MonoOutcome::Run(run) => {
                let indices: Vec<Nat> = run.indices.iter().map(|i| i + &offset).collect();
                return verify_equal_run(
                    a,
                    b,
                    m,
                    SeqSide::B,
                    indices,
                    run.color,
                    bound_of(first_escape.as_ref(), &round, ctx)?,
                    window,
                    ctx,
                );
            }
            MonoOutcome::NotAllBelow { index, .. } => index + &offset,
        };
        if first_escape.is_none() {
            first_escape = Some(n_r.clone());
        }

        let va = a.eval(&n_r, ctx)?;
        let vb = b.eval(&m_r, ctx)?;
        // look for the first ascent in the alternating value stream
        for (idx, val, is_alpha) in [(n_r, va, true), (m_r, vb, false)] {
            if let Some((pidx, pval, p_alpha)) = prev_gamma.take()
                && pval <= val
            {
                let (orientation, n, m_idx, first, second) = if p_alpha {
                    (Orientation::AlphaBeta, pidx, idx, pval, val)
                } else {
                    (Orientation::BetaAlpha, pidx, idx, pval, val)
                };
                debug_assert!(p_alpha != is_alpha);
                let bound_b = bound_of(first_escape.as_ref(), &round, ctx)?;
                return verify_crossing(
                    a,
                    b,
                    m,
                    orientation,
                    n,
                    m_idx,
                    first,
                    second,
                    bound_b,
                    window,
                    ctx,
                );
            }
            prev_gamma = Some((idx, val, is_alpha));
        }

        round += 1u32;
        if let Some(n1) = &first_escape {
            // strict descents of the escape values cannot outlast a(n_1)
            let cap = a.eval(n1, ctx)? + 1u32;
            if round > cap {
                return Err(Error::Internal(
                    "alternating escape values descended past their cap".into(),
                ));
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn verify_equal_run(
    a: &Sequence,
    b: &Sequence,
    m: &Nat,
    side: SeqSide,
    indices: Vec<Nat>,
    value: Nat,
    bound_b: Nat,
    window: Nat,
    ctx: &EvalCtx,
) -> Result<DichotomyResult> {
    let seq = match side {
        SeqSide::A => a,
        SeqSide::B => b,
    };
    if !m.is_zero() && value >= *m {
        return Err(Error::Internal(
            "equal run value reaches the threshold".into(),
        ));
    }
    for w in indices.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Internal("equal run indices do not increase".into()));
        }
    }
    for i in &indices {
        if seq.eval(i, ctx)? != value {
            return Err(Error::Internal("equal run re-evaluation mismatch".into()));
        }
        if *i > bound_b {
            return Err(Error::Internal("equal run index beyond its bound".into()));
        }
    }
    Ok(DichotomyResult {
        variant: DichotomyVariant::EqualRun {
            side,
            indices,
            value,
        },
        bound_b,
        window,
    })
}

#[allow(clippy::too_many_arguments)]
fn verify_crossing(
    a: &Sequence,
    b: &Sequence,
    m: &Nat,
    orientation: Orientation,
    n: Nat,
    m_idx: Nat,
    first: Nat,
    second: Nat,
    bound_b: Nat,
    window: Nat,
    ctx: &EvalCtx,
) -> Result<DichotomyResult> {
    let (fst_seq, snd_seq) = match orientation {
        Orientation::AlphaBeta => (a, b),
        Orientation::BetaAlpha => (b, a),
    };
    let v1 = fst_seq.eval(&n, ctx)?;
    let v2 = snd_seq.eval(&m_idx, ctx)?;
    if v1 != first || v2 != second || &v1 < m || v1 > v2 || n > bound_b || m_idx > bound_b {
        return Err(Error::Internal("crossing re-evaluation mismatch".into()));
    }
    Ok(DichotomyResult {
        variant: DichotomyVariant::Crossing {
            orientation,
            n,
            m: m_idx,
            first,
            second,
        },
        bound_b,
        window,
    })
}

/// How the final step of a chain construction closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainBranch {
    /// Single point, only used as an inner anchor.
    Anchor,
    /// Alternating-ray scan; records the parity of the chosen index.
    Interleave { even: bool },
    /// A full equal-value run on the vertical ray replaced the chain.
    EqualRunAlpha,
    /// A full equal-value run on the horizontal ray replaced the chain.
    EqualRunBeta,
    /// Two crossing ray points extended the recursive chain.
    CrossingExtend,
}

impl ChainBranch {
    fn tag(self) -> &'static str {
        match self {
            ChainBranch::Anchor => "anchor",
            ChainBranch::Interleave { even: true } => "interleave-even",
            ChainBranch::Interleave { even: false } => "interleave-odd",
            ChainBranch::EqualRunAlpha => "equal-run-alpha",
            ChainBranch::EqualRunBeta => "equal-run-beta",
            ChainBranch::CrossingExtend => "crossing-extend",
        }
    }
}

/// Points of the plane on which `f` weakly increases while no earlier point
/// is dominated by a later one, all coordinates at least `floor_m`.
#[derive(Debug, Clone)]
pub struct WitnessChain {
    pub points: Vec<[Nat; 2]>,
    pub f_values: Vec<Nat>,
    pub floor_m: Nat,
    pub branch: ChainBranch,
}

impl WitnessChain {
    pub fn to_value(&self) -> Value {
        Value::obj([
            ("kind", Value::str("chain")),
            (
                "points",
                Value::arr(self.points.iter().map(|p| Value::nat_arr(p.iter()))),
            ),
            ("values", Value::nat_arr(self.f_values.iter())),
            ("floor", Value::Nat(self.floor_m.clone())),
            ("branch", Value::str(self.branch.tag())),
        ])
    }
}

fn le2(p: &[Nat; 2], q: &[Nat; 2]) -> bool {
    p[0] <= q[0] && p[1] <= q[1]
}

/// The vertical ray `n ↦ f(m, m+n+1)` or horizontal ray `n ↦ f(m+n+1, m)`.
fn ray(f: &MultiFunction, m: &Nat, vertical: bool) -> Sequence {
    let f = f.clone();
    let m = m.clone();
    let name = if vertical {
        "ray-vertical"
    } else {
        "ray-horizontal"
    };
    Sequence::from_fn(name, move |n: &Nat| {
        let far = &m + n + 1u32;
        let args = if vertical {
            [m.clone(), far]
        } else {
            [far, m.clone()]
        };
        f.eval_uncharged(&args)
    })
}

fn chain_points(
    f: &MultiFunction,
    l: &Nat,
    m: &Nat,
    ctx: &EvalCtx,
) -> Result<(Vec<[Nat; 2]>, ChainBranch)> {
    let _guard = ctx.enter()?;
    if l.is_one() {
        return Ok((vec![[m.clone(), m.clone()]], ChainBranch::Anchor));
    }
    if *l == nat(2) {
        // scan f(m+1,m), f(m,m+1), f(m+2,m), f(m,m+2), … for the first
        // non-descent; the window is bounded by the first value plus one
        let interleave = {
            let f = f.clone();
            let m = m.clone();
            Sequence::from_fn("interleave", move |n: &Nat| {
                let q = n / 2u32;
                let far = &m + &q + 1u32;
                let args = if (n % 2u32).is_zero() {
                    [far, m.clone()]
                } else {
                    [m.clone(), far]
                };
                f.eval_uncharged(&args)
            })
        };
        let rw = crate::engine::base_scan_public(&interleave, &Nat::zero(), ctx)?;
        let i = &rw.0;
        let q = i / 2u32;
        let even = (i % 2u32).is_zero();
        let points = if even {
            // f(m+q+1, m) <= f(m, m+q+1)
            vec![[m + &q + 1u32, m.clone()], [m.clone(), m + &q + 1u32]]
        } else {
            // f(m, m+q+1) <= f(m+q+2, m)
            vec![[m.clone(), m + &q + 1u32], [m + &q + 2u32, m.clone()]]
        };
        return Ok((points, ChainBranch::Interleave { even }));
    }

    let deeper = m + 1u32;
    let (prefix, _) = chain_points(f, &(l - 2u32), &deeper, ctx)?;
    let threshold = f.eval(prefix.last().expect("chains are never empty"), ctx)?;
    let alpha = ray(f, m, true);
    let beta = ray(f, m, false);
    let l_small = u64::try_from(l).map_err(|_| Error::BudgetExhausted {
        used: ctx.evals_used(),
    })?;
    let dich = dichotomy_inner(&alpha, &beta, &threshold, l_small, ctx)?;
    match dich.variant {
        DichotomyVariant::EqualRun { side, indices, .. } => {
            // descending ray positions so no earlier point sits below a
            // later one
            let points: Vec<[Nat; 2]> = indices
                .iter()
                .rev()
                .map(|n| match side {
                    SeqSide::A => [m.clone(), m + n + 1u32],
                    SeqSide::B => [m + n + 1u32, m.clone()],
                })
                .collect();
            Ok((
                points,
                match side {
                    SeqSide::A => ChainBranch::EqualRunAlpha,
                    SeqSide::B => ChainBranch::EqualRunBeta,
                },
            ))
        }
        DichotomyVariant::Crossing {
            orientation,
            n,
            m: m2,
            ..
        } => {
            let (p, q) = match orientation {
                Orientation::AlphaBeta => ([m.clone(), m + &n + 1u32], [m + &m2 + 1u32, m.clone()]),
                Orientation::BetaAlpha => ([m + &n + 1u32, m.clone()], [m.clone(), m + &m2 + 1u32]),
            };
            let mut points = prefix;
            points.push(p);
            points.push(q);
            Ok((points, ChainBranch::CrossingExtend))
        }
    }
}

/// A chain of `l` points witnessing that `f` cannot reduce the product
/// order in one step: `f` weakly increases along the chain while no earlier
/// point is componentwise below a later one. All coordinates are at least
/// `m`.
pub fn incomparable_chain(
    f: &MultiFunction,
    l: u64,
    m: &Nat,
    cfg: &EngineConfig,
) -> Result<WitnessChain> {
    if f.arity() != 2 {
        return Err(Error::InvalidArg("chains need a function of pairs".into()));
    }
    if l < 2 {
        return Err(Error::InvalidArg("chain length must be at least 2".into()));
    }
    let ctx = EvalCtx::new(cfg);
    let (points, branch) = chain_points(f, &nat(l), m, &ctx)?;
    let mut f_values = Vec::with_capacity(points.len());
    for p in &points {
        f_values.push(f.eval(p, &ctx)?);
    }
    let chain = WitnessChain {
        points,
        f_values,
        floor_m: m.clone(),
        branch,
    };
    verify_chain(f, &chain, &ctx)?;
    Ok(chain)
}

fn verify_chain(f: &MultiFunction, chain: &WitnessChain, ctx: &EvalCtx) -> Result<()> {
    for (p, recorded) in chain.points.iter().zip(&chain.f_values) {
        if f.eval(p, ctx)? != *recorded {
            return Err(Error::Internal("chain value re-evaluation mismatch".into()));
        }
        if p[0] < chain.floor_m || p[1] < chain.floor_m {
            return Err(Error::Internal("chain point below the floor".into()));
        }
    }
    for w in chain.f_values.windows(2) {
        if w[0] > w[1] {
            return Err(Error::Internal("chain values descend".into()));
        }
    }
    for r in 0..chain.points.len() {
        for s in (r + 1)..chain.points.len() {
            if le2(&chain.points[r], &chain.points[s]) {
                return Err(Error::Internal(format!(
                    "chain point {r} is dominated by point {s}"
                )));
            }
        }
    }
    Ok(())
}

/// Which branch closed a triple witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleBranch {
    /// Both functions vanish on the base triple.
    BothZero,
    /// One vanishes; the chain over the zeroed plane closes the pair.
    ZeroPositive,
}

impl TripleBranch {
    fn tag(self) -> &'static str {
        match self {
            TripleBranch::BothZero => "both-zero",
            TripleBranch::ZeroPositive => "zero-positive",
        }
    }
}

/// Two triples, incomparable in the product order, on which both functions
/// weakly increase.
#[derive(Debug, Clone)]
pub struct TripleWitness {
    pub lhs: [Nat; 3],
    pub rhs: [Nat; 3],
    pub f1_values: (Nat, Nat),
    pub f2_values: (Nat, Nat),
    /// The two functions traded roles while descending.
    pub swapped: bool,
    /// Truncated-subtraction descents performed before a base case closed.
    pub descents: u64,
    pub branch: TripleBranch,
}

impl TripleWitness {
    pub fn to_value(&self) -> Value {
        Value::obj([
            ("kind", Value::str("triple")),
            ("lhs", Value::nat_arr(self.lhs.iter())),
            ("rhs", Value::nat_arr(self.rhs.iter())),
            (
                "f1",
                Value::arr([
                    Value::Nat(self.f1_values.0.clone()),
                    Value::Nat(self.f1_values.1.clone()),
                ]),
            ),
            (
                "f2",
                Value::arr([
                    Value::Nat(self.f2_values.0.clone()),
                    Value::Nat(self.f2_values.1.clone()),
                ]),
            ),
            ("swapped", Value::Bool(self.swapped)),
            ("descents", Value::nat(nat(self.descents))),
            ("branch", Value::str(self.branch.tag())),
        ])
    }
}

fn le3(p: &[Nat; 3], q: &[Nat; 3]) -> bool {
    p.iter().zip(q.iter()).all(|(a, b)| a <= b)
}

fn first_positive(t: &[Nat; 3]) -> Result<usize> {
    t.iter()
        .position(|c| !c.is_zero())
        .ok_or_else(|| Error::Internal("base triple degenerated to zero".into()))
}

fn unit(q: usize) -> [Nat; 3] {
    let mut u = [Nat::zero(), Nat::zero(), Nat::zero()];
    u[q] = Nat::one();
    u
}

/// Embed a plane point into a triple with coordinate `p` pinned to zero.
fn embed(p: usize, u: &Nat, v: &Nat) -> [Nat; 3] {
    match p {
        0 => [Nat::zero(), u.clone(), v.clone()],
        1 => [u.clone(), Nat::zero(), v.clone()],
        _ => [u.clone(), v.clone(), Nat::zero()],
    }
}

/// Basic step: `f_a` vanishes on the non-zero base triple. Produces two
/// non-zero triples with both functions weakly increasing and the first not
/// below the second.
fn basic_step(
    f_a: &MultiFunction,
    f_b: &MultiFunction,
    base: &[Nat; 3],
    v_b: &Nat,
    floor: &Nat,
    ctx: &EvalCtx,
) -> Result<([Nat; 3], [Nat; 3], TripleBranch)> {
    let p = first_positive(base)?;
    if v_b.is_zero() {
        let q = if p == 2 { 1 } else { 2 };
        return Ok((base.clone(), unit(q), TripleBranch::BothZero));
    }
    // chain of length v_b + 1 over the plane with coordinate p zeroed
    let plane_fn = {
        let f_a = f_a.clone();
        MultiFunction::from_fn(2, "plane-restriction", move |args: &[Nat]| {
            let t = embed(p, &args[0], &args[1]);
            f_a.eval_uncharged(&t)
        })?
    };
    let chain_len = v_b + 1u32;
    let (points, _) = chain_points(&plane_fn, &chain_len, floor, ctx)?;
    let lifted: Vec<[Nat; 3]> = points.iter().map(|pt| embed(p, &pt[0], &pt[1])).collect();

    // either some value of f_b on the chain reaches v_b …
    for cand in &lifted {
        if f_b.eval(cand, ctx)? >= *v_b {
            return Ok((base.clone(), cand.clone(), TripleBranch::ZeroPositive));
        }
    }
    // … or all are below it and two must agree
    for s in 1..lifted.len() {
        for r in 0..s {
            if f_b.eval(&lifted[r], ctx)? == f_b.eval(&lifted[s], ctx)? {
                return Ok((
                    lifted[r].clone(),
                    lifted[s].clone(),
                    TripleBranch::ZeroPositive,
                ));
            }
        }
    }
    Err(Error::Internal(
        "pigeonhole failed over the restricted chain".into(),
    ))
}

/// Construct a [`TripleWitness`] for any two functions of triples, following
/// the case analysis on their values at (1,0,0) with truncated-subtraction
/// descents for the both-positive case. `floor` (at least 1) seeds the chain
/// floor used inside the basic step.
pub fn incomparable_triples(
    f1: &MultiFunction,
    f2: &MultiFunction,
    floor: &Nat,
    cfg: &EngineConfig,
) -> Result<TripleWitness> {
    if f1.arity() != 3 || f2.arity() != 3 {
        return Err(Error::InvalidArg(
            "triple witnesses need functions of triples".into(),
        ));
    }
    if floor.is_zero() {
        return Err(Error::InvalidArg("the chain floor must be positive".into()));
    }
    let ctx = EvalCtx::new(cfg);

    let mut f_a = f1.clone();
    let mut f_b = f2.clone();
    let mut swapped = false;
    let mut base: [Nat; 3] = [Nat::one(), Nat::zero(), Nat::zero()];
    let mut descents: u64 = 0;
    let mut last_min: Option<Nat> = None;

    loop {
        let mut v_a = f_a.eval(&base, &ctx)?;
        let mut v_b = f_b.eval(&base, &ctx)?;
        if v_a > v_b {
            std::mem::swap(&mut f_a, &mut f_b);
            std::mem::swap(&mut v_a, &mut v_b);
            swapped = !swapped;
        }
        if let Some(prev) = &last_min
            && v_a >= *prev
        {
            return Err(Error::Internal("descent failed to decrease".into()));
        }
        last_min = Some(v_a.clone());

        if v_a.is_zero() {
            let (lhs, rhs, branch) = basic_step(&f_a, &f_b, &base, &v_b, floor, &ctx)?;
            return finish_triple(f1, f2, lhs, rhs, swapped, descents, branch, &ctx);
        }

        // shift both functions down by the smaller value and analyze the
        // basic step's output under the original functions
        let l1 = v_a.clone();
        let g_a = f_a.monus_shifted(l1.clone());
        let g_b = f_b.monus_shifted(l1.clone());
        let g_b_at_base = &v_b - &l1;
        let (n, m3, branch) = basic_step(&g_a, &g_b, &base, &g_b_at_base, floor, &ctx)?;

        let a_n = f_a.eval(&n, &ctx)?;
        let b_n = f_b.eval(&n, &ctx)?;
        let a_m = f_a.eval(&m3, &ctx)?;
        let b_m = f_b.eval(&m3, &ctx)?;

        if a_n >= l1 && b_n >= l1 {
            if a_n > l1 && b_n > l1 {
                return finish_triple(f1, f2, n, m3, swapped, descents, branch, &ctx);
            }
            if a_n == l1 {
                if a_m < l1 {
                    base = m3;
                } else if b_n > l1 || b_m >= l1 {
                    return finish_triple(f1, f2, n, m3, swapped, descents, branch, &ctx);
                } else {
                    base = m3;
                }
            } else {
                // a_n > l1, so b_n == l1
                if b_m < l1 {
                    base = m3;
                } else {
                    return finish_triple(f1, f2, n, m3, swapped, descents, branch, &ctx);
                }
            }
        } else {
            base = n;
        }
        descents += 1;
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_triple(
    f1: &MultiFunction,
    f2: &MultiFunction,
    lhs: [Nat; 3],
    rhs: [Nat; 3],
    swapped: bool,
    descents: u64,
    branch: TripleBranch,
    ctx: &EvalCtx,
) -> Result<TripleWitness> {
    let f1_values = (f1.eval(&lhs, ctx)?, f1.eval(&rhs, ctx)?);
    let f2_values = (f2.eval(&lhs, ctx)?, f2.eval(&rhs, ctx)?);
    if f1_values.0 > f1_values.1 || f2_values.0 > f2_values.1 {
        return Err(Error::Internal("triple witness values descend".into()));
    }
    if le3(&lhs, &rhs) {
        return Err(Error::Internal("triple witness is comparable".into()));
    }
    Ok(TripleWitness {
        lhs,
        rhs,
        f1_values,
        f2_values,
        swapped,
        descents,
        branch,
    })
}

/// Report wrapping one or more chain constructions, one per trial with the
/// coordinate floor set to the trial number.
#[derive(Debug, Clone)]
pub struct Refutation2d {
    pub l: u64,
    pub witnesses: Vec<WitnessChain>,
}

impl Refutation2d {
    pub fn to_value(&self) -> Value {
        Value::obj([
            ("kind", Value::str("refutation")),
            ("mode", Value::str("one-step-2d")),
            ("l", Value::nat(nat(self.l))),
            ("trials", Value::nat(nat(self.witnesses.len() as u64))),
            (
                "message",
                Value::str(
                    "candidate cannot linearize the product order in one step; \
                     it weakly increases along tuples that never increase together",
                ),
            ),
            (
                "witnesses",
                Value::arr(self.witnesses.iter().map(WitnessChain::to_value)),
            ),
        ])
    }
}

pub fn one_step_refute_2d(
    f: &MultiFunction,
    l: u64,
    trials: u64,
    cfg: &EngineConfig,
) -> Result<Refutation2d> {
    if trials == 0 {
        return Err(Error::InvalidArg("at least one trial is required".into()));
    }
    let mut witnesses = Vec::with_capacity(trials as usize);
    for m in 0..trials {
        witnesses.push(incomparable_chain(f, l, &nat(m), cfg)?);
    }
    Ok(Refutation2d { l, witnesses })
}

#[derive(Debug, Clone)]
pub struct Refutation3d {
    pub witnesses: Vec<TripleWitness>,
}

impl Refutation3d {
    pub fn to_value(&self) -> Value {
        Value::obj([
            ("kind", Value::str("refutation")),
            ("mode", Value::str("one-step-3d")),
            ("trials", Value::nat(nat(self.witnesses.len() as u64))),
            (
                "message",
                Value::str(
                    "candidate pair cannot linearize the product order on triples \
                     in one step; both weakly increase across an incomparable pair",
                ),
            ),
            (
                "witnesses",
                Value::arr(self.witnesses.iter().map(TripleWitness::to_value)),
            ),
        ])
    }
}

pub fn one_step_refute_3d(
    f1: &MultiFunction,
    f2: &MultiFunction,
    trials: u64,
    cfg: &EngineConfig,
) -> Result<Refutation3d> {
    if trials == 0 {
        return Err(Error::InvalidArg("at least one trial is required".into()));
    }
    let mut witnesses = Vec::with_capacity(trials as usize);
    for m in 0..trials {
        witnesses.push(incomparable_triples(f1, f2, &nat(m + 1), cfg)?);
    }
    Ok(Refutation3d { witnesses })
}

#[derive(Debug, Clone)]
pub enum AscentViolationKind {
    /// The value at this position is not below the ceiling.
    ValueNotBelow { value: Nat },
    /// The value fails to strictly exceed its predecessor.
    NotStrictlyIncreasing { prev: Nat, value: Nat },
}

/// Position in a claimed strictly-increasing-below-`n` run where the claim
/// breaks.
#[derive(Debug, Clone)]
pub struct AscentViolation {
    pub position: usize,
    pub kind: AscentViolationKind,
}

impl AscentViolation {
    pub fn to_value(&self) -> Value {
        let mut fields = vec![
            ("kind", Value::str("ascent-violation")),
            ("position", Value::nat(nat(self.position as u64))),
        ];
        match &self.kind {
            AscentViolationKind::ValueNotBelow { value } => {
                fields.push(("reason", Value::str("value-not-below")));
                fields.push(("value", Value::Nat(value.clone())));
            }
            AscentViolationKind::NotStrictlyIncreasing { prev, value } => {
                fields.push(("reason", Value::str("not-strictly-increasing")));
                fields.push(("prev", Value::Nat(prev.clone())));
                fields.push(("value", Value::Nat(value.clone())));
            }
        }
        Value::obj(fields)
    }
}

/// No sequence strictly increases forever while staying below `n`: any
/// claimed run longer than `n` contains a violation, found by counting.
/// Runs of length at most `n` are consistent and rejected as too short.
pub fn bounded_ascent_refute(n: &Nat, run: &[Nat]) -> Result<AscentViolation> {
    if nat(run.len() as u64) <= *n {
        return Err(Error::RunTooShort {
            len: run.len(),
            n: n.clone(),
        });
    }
    for (p, v) in run.iter().enumerate() {
        if v >= n {
            return Ok(AscentViolation {
                position: p,
                kind: AscentViolationKind::ValueNotBelow { value: v.clone() },
            });
        }
        if p > 0 && v <= &run[p - 1] {
            return Ok(AscentViolation {
                position: p,
                kind: AscentViolationKind::NotStrictlyIncreasing {
                    prev: run[p - 1].clone(),
                    value: v.clone(),
                },
            });
        }
    }
    // strictly increasing values below n admit at most n entries
    Err(Error::Internal(
        "over-long run contained no violation".into(),
    ))
}

#[derive(Debug, Clone)]
pub enum LexViolationKind {
    /// `f(0,t) ≥ f(0,t+1)` although `(0,t)` precedes `(0,t+1)`.
    StrictIncrease { t: Nat, value: Nat, next: Nat },
    /// `f(0,t) ≥ f(1,0)` although `(0,t)` precedes `(1,0)`.
    OrderCollapse { t: Nat, value: Nat, limit: Nat },
}

/// Evidence that `f` does not embed the lexicographic order: found by
/// walking the ray `(0,0), (0,1), …`, which must stay strictly below the
/// value at `(1,0)`.
#[derive(Debug, Clone)]
pub struct LexViolation {
    pub kind: LexViolationKind,
    /// Probes of the `(0,·)` ray performed before the violation surfaced.
    pub ray_probes: u64,
}

impl LexViolation {
    pub fn to_value(&self) -> Value {
        let mut fields = vec![
            ("kind", Value::str("lex-violation")),
            ("ray_probes", Value::nat(nat(self.ray_probes))),
        ];
        match &self.kind {
            LexViolationKind::StrictIncrease { t, value, next } => {
                fields.push(("reason", Value::str("strict-increase")));
                fields.push(("t", Value::Nat(t.clone())));
                fields.push(("value", Value::Nat(value.clone())));
                fields.push(("next", Value::Nat(next.clone())));
            }
            LexViolationKind::OrderCollapse { t, value, limit } => {
                fields.push(("reason", Value::str("order-collapse")));
                fields.push(("t", Value::Nat(t.clone())));
                fields.push(("value", Value::Nat(value.clone())));
                fields.push(("limit", Value::Nat(limit.clone())));
            }
        }
        Value::obj(fields)
    }
}

pub fn lex_embed_refute(f: &MultiFunction, cfg: &EngineConfig) -> Result<LexViolation> {
    if f.arity() != 2 {
        return Err(Error::InvalidArg(
            "lex refutation needs a function of pairs".into(),
        ));
    }
    let ctx = EvalCtx::new(cfg);
    let limit = f.eval(&[Nat::one(), Nat::zero()], &ctx)?;
    let mut t = Nat::zero();
    let mut v = f.eval(&[Nat::zero(), Nat::zero()], &ctx)?;
    let mut ray_probes: u64 = 1;
    loop {
        let next = f.eval(&[Nat::zero(), &t + 1u32], &ctx)?;
        ray_probes += 1;
        if v >= next {
            return Ok(LexViolation {
                kind: LexViolationKind::StrictIncrease { t, value: v, next },
                ray_probes,
            });
        }
        if v >= limit {
            return Ok(LexViolation {
                kind: LexViolationKind::OrderCollapse { t, value: v, limit },
                ray_probes,
            });
        }
        if t >= limit {
            // strictly increasing values reach the limit by then
            return Err(Error::Internal("ray walk escaped its window".into()));
        }
        t += 1u32;
        v = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_multifunction, parse_sequence};

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    fn u(n: &Nat) -> u64 {
        u64::try_from(n).unwrap()
    }

    #[test]
    fn dichotomy_equal_run_on_zeros() {
        let a = parse_sequence("const(0)").unwrap();
        let b = parse_sequence("const(0)").unwrap();
        let r = dichotomy_lemma(&a, &b, &nat(1), 2, &cfg()).unwrap();
        match r.variant {
            DichotomyVariant::EqualRun {
                side,
                indices,
                value,
            } => {
                assert_eq!(side, SeqSide::A);
                assert_eq!(indices.iter().map(u).collect::<Vec<_>>(), vec![0, 1]);
                assert!(value.is_zero());
            }
            other => panic!("expected equal run, got {other:?}"),
        }
    }

    #[test]
    fn dichotomy_crossing_on_large_constants() {
        let a = parse_sequence("const(5)").unwrap();
        let b = parse_sequence("const(5)").unwrap();
        let r = dichotomy_lemma(&a, &b, &nat(3), 2, &cfg()).unwrap();
        match r.variant {
            DichotomyVariant::Crossing { first, second, .. } => {
                assert_eq!(u(&first), 5);
                assert_eq!(u(&second), 5);
            }
            other => panic!("expected crossing, got {other:?}"),
        }
    }

    #[test]
    fn dichotomy_zero_threshold_always_crosses() {
        let a = parse_sequence("periodic(2,1)").unwrap();
        let b = parse_sequence("dec(3)").unwrap();
        let r = dichotomy_lemma(&a, &b, &Nat::zero(), 3, &cfg()).unwrap();
        assert!(matches!(r.variant, DichotomyVariant::Crossing { .. }));
    }

    #[test]
    fn chain_for_additive_function() {
        let f = parse_multifunction("f2: i+j").unwrap();
        let c = incomparable_chain(&f, 2, &Nat::zero(), &cfg()).unwrap();
        assert_eq!(c.points.len(), 2);
    }

    #[test]
    fn chain_for_constant_function_any_length() {
        let f = parse_multifunction("f2: 0").unwrap();
        let c = incomparable_chain(&f, 4, &Nat::one(), &cfg()).unwrap();
        assert_eq!(c.points.len(), 4);
        for p in &c.points {
            assert!(p[0] >= Nat::one() && p[1] >= Nat::one());
        }
    }

    #[test]
    fn chain_floor_is_respected() {
        let f = parse_multifunction("f2: max(i,j)").unwrap();
        for l in [2u64, 3, 5] {
            let c = incomparable_chain(&f, l, &nat(5), &cfg()).unwrap();
            assert_eq!(c.points.len(), l as usize);
            for p in &c.points {
                assert!(p[0] >= nat(5) && p[1] >= nat(5));
            }
        }
    }

    #[test]
    fn triples_for_zero_functions() {
        let f = parse_multifunction("f3: 0").unwrap();
        let w = incomparable_triples(&f, &f, &Nat::one(), &cfg()).unwrap();
        assert_eq!(w.lhs.iter().map(u).collect::<Vec<_>>(), vec![1, 0, 0]);
        assert_eq!(w.branch, TripleBranch::BothZero);
    }

    #[test]
    fn triples_for_mixed_pair() {
        let f1 = parse_multifunction("f3: i+j+k").unwrap();
        let f2 = parse_multifunction("f3: max(i,max(j,k))").unwrap();
        let w = incomparable_triples(&f1, &f2, &Nat::one(), &cfg()).unwrap();
        assert!(w.f1_values.0 <= w.f1_values.1);
        assert!(w.f2_values.0 <= w.f2_values.1);
        assert!(!le3(&w.lhs, &w.rhs));
    }

    #[test]
    fn triples_through_the_descent_branch() {
        let f = parse_multifunction("f3: min(i,1)").unwrap();
        let w = incomparable_triples(&f, &f, &Nat::one(), &cfg()).unwrap();
        assert!(w.descents >= 1);
    }

    #[test]
    fn ascent_refuter_counts() {
        let run: Vec<Nat> = [0u64, 1, 2, 3].iter().map(|&v| nat(v)).collect();
        let v = bounded_ascent_refute(&nat(3), &run).unwrap();
        assert_eq!(v.position, 3);
        assert!(matches!(v.kind, AscentViolationKind::ValueNotBelow { .. }));

        let run: Vec<Nat> = [0u64, 0].iter().map(|&v| nat(v)).collect();
        let v = bounded_ascent_refute(&Nat::one(), &run).unwrap();
        assert_eq!(v.position, 1);
        assert!(matches!(
            v.kind,
            AscentViolationKind::NotStrictlyIncreasing { .. }
        ));

        assert!(matches!(
            bounded_ascent_refute(&nat(5), &run),
            Err(Error::RunTooShort { .. })
        ));
    }

    #[test]
    fn lex_refuter_on_constants_and_projections() {
        let f = parse_multifunction("f2: 0").unwrap();
        let v = lex_embed_refute(&f, &cfg()).unwrap();
        match v.kind {
            LexViolationKind::StrictIncrease { t, .. } => assert!(t.is_zero()),
            other => panic!("expected strict-increase violation, got {other:?}"),
        }

        let f = parse_multifunction("f2: j").unwrap();
        let v = lex_embed_refute(&f, &cfg()).unwrap();
        match v.kind {
            LexViolationKind::OrderCollapse { t, .. } => assert!(t.is_zero()),
            other => panic!("expected order collapse, got {other:?}"),
        }
    }

    #[test]
    fn lex_refuter_probe_bound() {
        let f = parse_multifunction("f2: i*100 + j").unwrap();
        let ctx = EvalCtx::new(&cfg());
        let limit = f.eval(&[Nat::one(), Nat::zero()], &ctx).unwrap();
        let v = lex_embed_refute(&f, &cfg()).unwrap();
        assert!(nat(v.ray_probes) <= limit + 2u32);
    }
}
