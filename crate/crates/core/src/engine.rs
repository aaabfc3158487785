//! Witness extraction for the finite cases: given `k` sequences and a length
//! `l`, find strictly increasing indices on which every sequence weakly
//! increases, together with a certificate for the extracted bound.
//!
//! The general case is driven by two repetition schemes over the trivial
//! base scan:
//!
//! * horizontal (`(k, l) → (k, l+1)`): harvest witnesses from successive
//!   tails and run the shorter case on the values sampled at the harvested
//!   first indices;
//! * vertical (`(k, ·) → (k+1, 2)`): the extra sequence steers how long each
//!   harvested witness must be; either its value drops between rounds, which
//!   closes a pair inside the last round's witness, or it weakly increases
//!   along the first indices and the `k`-sequence case applied to the
//!   sampled values closes the pair.
//!
//! Both schemes realize the steered repetition lazily: a derived sequence
//! forces one harvest round per fresh index probed, so the recursion itself
//! decides how many rounds are needed. Every round is recorded in the
//! certificate trace, and [`check_certificate`] re-derives the bound from
//! the trace and the input sequences.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::Zero;

use crate::canon::Value;
use crate::error::{EarlyExit, Error, Flow, FlowResult, Result};
use crate::sequence::{EngineConfig, EvalCtx, Feed, HarvestRound, Nat, Sequence, nat};

mod checker;

pub use checker::{Verdict, Violation, check_certificate};

/// Strictly increasing indices on which all `k` input sequences weakly
/// increase. Weak increase on consecutive indices gives every pair by
/// transitivity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodSet {
    pub indices: Vec<Nat>,
    pub k: usize,
}

impl GoodSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn last(&self) -> &Nat {
        self.indices.last().expect("good sets are never empty")
    }
}

/// Which extraction scheme produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertKind {
    /// Base scan: one sequence, pair of consecutive indices.
    Base,
    /// Horizontal repetition for one sequence.
    OneHorizontal,
    /// Vertical repetition: pair for two or more sequences.
    Vertical,
    /// Horizontal repetition over pairs for two or more sequences.
    Horizontal,
}

impl CertKind {
    pub fn tag(self) -> &'static str {
        match self {
            CertKind::Base => "dl12",
            CertKind::OneHorizontal => "dl1l",
            CertKind::Vertical => "dlk2",
            CertKind::Horizontal => "dlkl",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        Ok(match tag {
            "dl12" => CertKind::Base,
            "dl1l" => CertKind::OneHorizontal,
            "dlk2" => CertKind::Vertical,
            "dlkl" => CertKind::Horizontal,
            other => {
                return Err(Error::Certificate(format!("unknown kind '{other}'")));
            }
        })
    }

    /// The scheme the engine dispatches to for `k` sequences and length `l`.
    pub fn expected(k: usize, l: &Nat) -> Self {
        let two = nat(2);
        if k == 1 && *l == two {
            CertKind::Base
        } else if k == 1 {
            CertKind::OneHorizontal
        } else if *l == two {
            CertKind::Vertical
        } else {
            CertKind::Horizontal
        }
    }
}

/// One tagged record of a certificate trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub sym: String,
    pub j: Option<u64>,
    pub val: Option<Nat>,
    pub index: Option<Nat>,
    pub indices: Option<Vec<Nat>>,
    pub sub: Option<Vec<TraceEntry>>,
}

impl TraceEntry {
    fn new(sym: &str) -> Self {
        Self {
            sym: sym.to_string(),
            j: None,
            val: None,
            index: None,
            indices: None,
            sub: None,
        }
    }

    fn val(sym: &str, v: Nat) -> Self {
        Self {
            val: Some(v),
            ..Self::new(sym)
        }
    }

    pub fn to_value(&self) -> Value {
        let mut fields: Vec<(&'static str, Value)> = vec![("sym", Value::str(self.sym.clone()))];
        if let Some(j) = self.j {
            fields.push(("j", Value::nat(nat(j))));
        }
        if let Some(v) = &self.val {
            fields.push(("val", Value::Nat(v.clone())));
        }
        if let Some(i) = &self.index {
            fields.push(("index", Value::Nat(i.clone())));
        }
        if let Some(is) = &self.indices {
            fields.push(("indices", Value::nat_arr(is.iter())));
        }
        if let Some(sub) = &self.sub {
            fields.push(("sub", Value::arr(sub.iter().map(TraceEntry::to_value))));
        }
        Value::obj(fields)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let sym = v.required("sym")?.as_str()?.to_string();
        let j =
            match v.get("j") {
                Some(x) => Some(u64::try_from(x.as_nat()?).map_err(|_| {
                    Error::Certificate("round number exceeds supported range".into())
                })?),
                None => None,
            };
        let val = v.get("val").map(|x| x.as_nat().cloned()).transpose()?;
        let index = v.get("index").map(|x| x.as_nat().cloned()).transpose()?;
        let indices = match v.get("indices") {
            Some(x) => Some(
                x.as_arr()?
                    .iter()
                    .map(|e| e.as_nat().cloned())
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        let sub = match v.get("sub") {
            Some(x) => Some(
                x.as_arr()?
                    .iter()
                    .map(TraceEntry::from_value)
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        Ok(Self {
            sym,
            j,
            val,
            index,
            indices,
            sub,
        })
    }
}

/// Extracted bound plus the derivation trace that re-derives it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCertificate {
    pub kind: CertKind,
    pub k: usize,
    pub l: Nat,
    pub bound: Nat,
    pub trace: Vec<TraceEntry>,
    pub max_index_probed: Nat,
}

/// A good set together with its certificate.
#[derive(Debug, Clone)]
pub struct Witness {
    pub good: GoodSet,
    pub cert: BoundCertificate,
}

impl Witness {
    /// Canonical document: `{kind, k, l, indices[], bound, trace[],
    /// max_index_probed}` plus optional caller metadata.
    pub fn to_value(&self, meta: Option<Value>) -> Value {
        let mut fields: Vec<(&'static str, Value)> = vec![
            ("kind", Value::str(self.cert.kind.tag())),
            ("k", Value::nat(nat(self.cert.k as u64))),
            ("l", Value::Nat(self.cert.l.clone())),
            ("indices", Value::nat_arr(self.good.indices.iter())),
            ("bound", Value::Nat(self.cert.bound.clone())),
            (
                "trace",
                Value::arr(self.cert.trace.iter().map(TraceEntry::to_value)),
            ),
            (
                "max_index_probed",
                Value::Nat(self.cert.max_index_probed.clone()),
            ),
        ];
        if let Some(m) = meta {
            fields.push(("meta", m));
        }
        Value::obj(fields)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let kind = CertKind::from_tag(v.required("kind")?.as_str()?)?;
        let k = usize::try_from(v.required("k")?.as_nat()?)
            .map_err(|_| Error::Certificate("k exceeds supported range".into()))?;
        let l = v.required("l")?.as_nat()?.clone();
        let indices = v
            .required("indices")?
            .as_arr()?
            .iter()
            .map(|e| e.as_nat().cloned())
            .collect::<Result<Vec<_>>>()?;
        let bound = v.required("bound")?.as_nat()?.clone();
        let trace = v
            .required("trace")?
            .as_arr()?
            .iter()
            .map(TraceEntry::from_value)
            .collect::<Result<Vec<_>>>()?;
        let max_index_probed = v.required("max_index_probed")?.as_nat()?.clone();
        Ok(Witness {
            good: GoodSet { indices, k },
            cert: BoundCertificate {
                kind,
                k,
                l,
                bound,
                trace,
                max_index_probed,
            },
        })
    }
}

/// Result of [`gap_pair`]: an index `i ≤ bound` with `a(i) ≤ a(i+gap)`.
#[derive(Debug, Clone)]
pub struct GapPair {
    pub index: Nat,
    pub gap: Nat,
    /// Sum of the first `gap` values of the sequence.
    pub bound: Nat,
}

impl GapPair {
    pub fn mate(&self) -> Nat {
        &self.index + &self.gap
    }

    pub fn to_value(&self) -> Value {
        Value::obj([
            ("kind", Value::str("gap")),
            ("index", Value::Nat(self.index.clone())),
            ("gap", Value::Nat(self.gap.clone())),
            ("bound", Value::Nat(self.bound.clone())),
        ])
    }
}

impl fmt::Display for GapPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}) within bound {}",
            self.index,
            self.mate(),
            self.bound
        )
    }
}

struct RawWitness {
    /// Absolute indices, strictly increasing.
    indices: Vec<Nat>,
    /// Length of the initial segment consumed from the call's offset.
    extent: Nat,
    trace: Vec<TraceEntry>,
    kind: CertKind,
}

/// First `t` with `vals[t] <= vals[t+1]`.
fn first_ascent(vals: &[Nat]) -> Option<usize> {
    vals.windows(2).position(|w| w[0] <= w[1])
}

/// Trivial base case: scan one sequence from `offset` for the first
/// non-descent. The first value bounds how far the scan can go.
fn base_scan(a: &Sequence, offset: &Nat, ctx: &EvalCtx) -> FlowResult<RawWitness> {
    let v0 = a.eval_flow(offset, ctx)?;
    let extent = &v0 + 1u32;
    let mut i = offset.clone();
    let mut v = v0.clone();
    loop {
        let next = &i + 1u32;
        let v1 = a.eval_flow(&next, ctx)?;
        if v <= v1 {
            let trace = vec![
                TraceEntry {
                    index: Some(i.clone()),
                    ..TraceEntry::new("i")
                },
                TraceEntry::val("M", extent.clone()),
            ];
            return Ok(RawWitness {
                indices: vec![i, next],
                extent,
                trace,
                kind: CertKind::Base,
            });
        }
        if &i - offset >= v0 {
            // Each step descended by at least one, so the value at
            // offset + v0 is zero and cannot descend further.
            return Err(Error::Internal("descending past the scan window".into()).into());
        }
        i = next;
        v = v1;
    }
}

/// Horizontal repetition for a single sequence, `l >= 3`. Runs the shorter
/// case on successive tails, then scans the values at the harvested first
/// indices and splices the chosen round's witness.
fn horizontal_one(a: &Sequence, offset: &Nat, l: &Nat, ctx: &EvalCtx) -> FlowResult<RawWitness> {
    let shorter = l - 1u32;
    let first_round = dl_rec(std::slice::from_ref(a), offset, &shorter, ctx)?;
    let n_rounds = a.eval_flow(&first_round.indices[0], ctx)? + 2u32;

    let mut rounds = vec![first_round];
    let mut off = offset + &rounds[0].extent;
    let mut j = nat(2);
    while j <= n_rounds {
        let r = dl_rec(std::slice::from_ref(a), &off, &shorter, ctx)?;
        off += &r.extent;
        rounds.push(r);
        j += 1u32;
    }

    let mut gamma = Vec::with_capacity(rounds.len());
    for r in &rounds {
        gamma.push(a.eval_flow(&r.indices[0], ctx)?);
    }
    let t = first_ascent(&gamma)
        .ok_or_else(|| Error::Internal("no ascent among harvested values".into()))?;
    if t + 1 >= rounds.len() {
        // unreachable for deterministic total sequences
        return Err(Error::Internal("ascent landed on the final round".into()).into());
    }

    let mut indices = vec![rounds[t].indices[0].clone()];
    indices.extend(rounds[t + 1].indices.iter().cloned());

    let mut extent = Nat::zero();
    let mut trace = vec![TraceEntry::val("N", n_rounds)];
    for (idx, r) in rounds.iter().enumerate() {
        extent += &r.extent;
        trace.push(TraceEntry {
            j: Some(idx as u64 + 1),
            val: Some(r.extent.clone()),
            index: Some(r.indices[0].clone()),
            sub: Some(r.trace.clone()),
            ..TraceEntry::new("M_j")
        });
    }
    trace.push(TraceEntry {
        val: Some(nat(t as u64)),
        indices: Some(rounds[t + 1].indices.clone()),
        ..TraceEntry::new("t")
    });
    trace.push(TraceEntry::val("M", extent.clone()));

    Ok(RawWitness {
        indices,
        extent,
        trace,
        kind: CertKind::OneHorizontal,
    })
}

struct FeedState {
    offset: Nat,
    /// Steering value of the previous round; starts at 2 so the first round
    /// asks for a witness of length 3.
    prev: Nat,
    rounds: Vec<HarvestRound>,
}

/// Harvests witnesses for the first `k-1` sequences from successive tails,
/// with the witness length of each round steered by the last sequence.
struct VerticalFeed {
    token: u64,
    base: Vec<Sequence>,
    steer: Sequence,
    state: Mutex<FeedState>,
}

impl Feed for VerticalFeed {
    fn force(&self, n: &Nat, ctx: &EvalCtx) -> FlowResult<()> {
        let mut st = self.state.lock().unwrap();
        while nat(st.rounds.len() as u64) <= *n {
            let l_param = &st.prev + 1u32;
            let rw = dl_rec(&self.base, &st.offset, &l_param, ctx)?;
            let first = rw.indices[0].clone();
            let cur = self.steer.eval_flow(&first, ctx)?;
            let dropped = cur < st.prev;
            st.offset += &rw.extent;
            st.rounds.push(HarvestRound {
                first,
                witness: rw.indices,
                extent: rw.extent,
                trace: rw.trace,
            });
            if dropped {
                // The steering value fell, so the fresh round's witness is
                // long enough to close a pair under the steering sequence.
                let witness = &st.rounds.last().expect("just pushed").witness;
                let mut gamma = Vec::with_capacity(witness.len());
                for idx in witness {
                    gamma.push(self.steer.eval_flow(idx, ctx)?);
                }
                let t = first_ascent(&gamma).ok_or_else(|| {
                    Error::Internal("dropped steering values admit no ascent".into())
                })?;
                if t + 1 >= witness.len() {
                    return Err(Error::Internal(
                        "ascent beyond the dropped round's witness".into(),
                    )
                    .into());
                }
                return Err(Flow::Early(EarlyExit {
                    token: self.token,
                    t,
                }));
            }
            st.prev = cur;
        }
        Ok(())
    }

    fn first_of(&self, n: &Nat) -> Result<Nat> {
        let st = self.state.lock().unwrap();
        usize::try_from(n)
            .ok()
            .and_then(|i| st.rounds.get(i))
            .map(|r| r.first.clone())
            .ok_or_else(|| Error::Internal(format!("round {n} not forced")))
    }
}

/// Vertical repetition: a common pair for `k >= 2` sequences.
fn vertical(seqs: &[Sequence], offset: &Nat, ctx: &EvalCtx) -> FlowResult<RawWitness> {
    let k = seqs.len();
    let steer = seqs[k - 1].clone();
    let base: Vec<Sequence> = seqs[..k - 1].to_vec();
    let token = ctx.new_token();
    let feed = Arc::new(VerticalFeed {
        token,
        base: base.clone(),
        steer: steer.clone(),
        state: Mutex::new(FeedState {
            offset: offset.clone(),
            prev: nat(2),
            rounds: Vec::new(),
        }),
    });
    let starred: Vec<Sequence> = base
        .iter()
        .map(|s| Sequence::derived(feed.clone() as Arc<dyn Feed>, s.clone()))
        .collect();

    let rec = dl_rec(&starred, &Nat::zero(), &nat(2), ctx);
    let (pair, exit_entries) = match rec {
        Ok(rw) => {
            let st = feed.state.lock().unwrap();
            let s = position(&rw.indices[0], st.rounds.len())?;
            let t = position(&rw.indices[1], st.rounds.len())?;
            let pair = (st.rounds[s].first.clone(), st.rounds[t].first.clone());
            drop(st);
            let entry = TraceEntry {
                indices: Some(rw.indices.clone()),
                sub: Some(rw.trace),
                ..TraceEntry::new("rec")
            };
            (pair, vec![entry])
        }
        Err(Flow::Early(e)) if e.token == token => {
            let st = feed.state.lock().unwrap();
            let last = st.rounds.last().expect("drop happens inside a round");
            let pair = (last.witness[e.t].clone(), last.witness[e.t + 1].clone());
            let entry = TraceEntry {
                j: Some(st.rounds.len() as u64),
                val: Some(nat(e.t as u64)),
                indices: Some(last.witness.clone()),
                ..TraceEntry::new("drop")
            };
            (pair, vec![entry])
        }
        Err(other) => return Err(other),
    };

    let st = feed.state.lock().unwrap();
    let mut extent = Nat::zero();
    let mut trace = vec![TraceEntry::val("K", nat(st.rounds.len() as u64))];
    if k == 2 {
        let n_cap = base[0].eval_flow(&st.rounds[0].first, ctx)? + 2u32;
        trace.push(TraceEntry::val("N", n_cap));
    }
    for (idx, r) in st.rounds.iter().enumerate() {
        extent += &r.extent;
        trace.push(TraceEntry {
            j: Some(idx as u64 + 1),
            val: Some(r.extent.clone()),
            index: Some(r.first.clone()),
            sub: Some(r.trace.clone()),
            ..TraceEntry::new("M_j")
        });
    }
    trace.extend(exit_entries);
    trace.push(TraceEntry::val("M", extent.clone()));

    Ok(RawWitness {
        indices: vec![pair.0, pair.1],
        extent,
        trace,
        kind: CertKind::Vertical,
    })
}

fn position(n: &Nat, len: usize) -> FlowResult<usize> {
    usize::try_from(n)
        .ok()
        .filter(|i| *i < len)
        .ok_or_else(|| Error::Internal(format!("derived position {n} out of range {len}")).into())
}

struct PairState {
    offset: Nat,
    rounds: Vec<HarvestRound>,
}

/// Harvests common pairs for all `k` sequences from successive tails.
struct PairFeed {
    seqs: Vec<Sequence>,
    state: Mutex<PairState>,
}

impl Feed for PairFeed {
    fn force(&self, n: &Nat, ctx: &EvalCtx) -> FlowResult<()> {
        let mut st = self.state.lock().unwrap();
        while nat(st.rounds.len() as u64) <= *n {
            let rw = dl_rec(&self.seqs, &st.offset, &nat(2), ctx)?;
            st.offset += &rw.extent;
            st.rounds.push(HarvestRound {
                first: rw.indices[0].clone(),
                witness: rw.indices,
                extent: rw.extent,
                trace: rw.trace,
            });
        }
        Ok(())
    }

    fn first_of(&self, n: &Nat) -> Result<Nat> {
        let st = self.state.lock().unwrap();
        usize::try_from(n)
            .ok()
            .and_then(|i| st.rounds.get(i))
            .map(|r| r.first.clone())
            .ok_or_else(|| Error::Internal(format!("round {n} not forced")))
    }
}

/// Horizontal repetition for `k >= 2` sequences and `l >= 3`: recurse at
/// `l-1` on the values sampled at the harvested pair firsts, then splice the
/// second component of the last harvested pair.
fn horizontal_many(
    seqs: &[Sequence],
    offset: &Nat,
    l: &Nat,
    ctx: &EvalCtx,
) -> FlowResult<RawWitness> {
    let feed = Arc::new(PairFeed {
        seqs: seqs.to_vec(),
        state: Mutex::new(PairState {
            offset: offset.clone(),
            rounds: Vec::new(),
        }),
    });
    let starred: Vec<Sequence> = seqs
        .iter()
        .map(|s| Sequence::derived(feed.clone() as Arc<dyn Feed>, s.clone()))
        .collect();

    let shorter = l - 1u32;
    let rec = dl_rec(&starred, &Nat::zero(), &shorter, ctx)?;

    let st = feed.state.lock().unwrap();
    let positions = rec
        .indices
        .iter()
        .map(|p| position(p, st.rounds.len()))
        .collect::<FlowResult<Vec<_>>>()?;
    let mut indices: Vec<Nat> = positions
        .iter()
        .map(|&p| st.rounds[p].first.clone())
        .collect();
    let last = *positions.last().expect("witnesses are never empty");
    indices.push(st.rounds[last].witness[1].clone());

    let lambda = seqs[0].eval_flow(&st.rounds[positions[0]].first, ctx)? + 1u32;
    let mut extent = Nat::zero();
    let mut trace = vec![
        TraceEntry::val("Lambda", lambda),
        TraceEntry::val("K", nat(st.rounds.len() as u64)),
    ];
    for (idx, r) in st.rounds.iter().enumerate() {
        extent += &r.extent;
        trace.push(TraceEntry {
            j: Some(idx as u64 + 1),
            val: Some(r.extent.clone()),
            indices: Some(r.witness.clone()),
            sub: Some(r.trace.clone()),
            ..TraceEntry::new("M_j")
        });
    }
    trace.push(TraceEntry {
        indices: Some(rec.indices.clone()),
        sub: Some(rec.trace),
        ..TraceEntry::new("rec")
    });
    trace.push(TraceEntry::val("M", extent.clone()));

    Ok(RawWitness {
        indices,
        extent,
        trace,
        kind: CertKind::Horizontal,
    })
}

/// Crate-internal view of the base scan: the first non-descent index of
/// `a` from `offset` plus the scan window length.
pub(crate) fn base_scan_public(a: &Sequence, offset: &Nat, ctx: &EvalCtx) -> Result<(Nat, Nat)> {
    let rw = base_scan(a, offset, ctx).map_err(Flow::into_error)?;
    let mut indices = rw.indices.into_iter();
    let i = indices.next().expect("pair witness");
    Ok((i, rw.extent))
}

fn dl_rec(seqs: &[Sequence], offset: &Nat, l: &Nat, ctx: &EvalCtx) -> FlowResult<RawWitness> {
    let _guard = ctx.enter()?;
    let two = nat(2);
    match (seqs.len(), l) {
        (0, _) => Err(Error::Internal("no sequences".into()).into()),
        (1, l) if *l == two => base_scan(&seqs[0], offset, ctx),
        (1, l) => horizontal_one(&seqs[0], offset, l, ctx),
        (_, l) if *l == two => vertical(seqs, offset, ctx),
        (_, l) => horizontal_many(seqs, offset, l, ctx),
    }
}

fn finish(seqs: &[Sequence], l: Nat, rw: RawWitness, ctx: &EvalCtx) -> Witness {
    Witness {
        good: GoodSet {
            indices: rw.indices,
            k: seqs.len(),
        },
        cert: BoundCertificate {
            kind: rw.kind,
            k: seqs.len(),
            l,
            bound: rw.extent,
            trace: rw.trace,
            max_index_probed: ctx.max_index_probed(),
        },
    }
}

/// General entry point: a common good set of size `l` for `k` sequences.
///
/// Expect [`Error::BudgetExhausted`] on adversarial inputs already for
/// modest `k` and `l`; the extracted bounds grow explosively and honest
/// failure is part of the contract.
pub fn dl_k_l(seqs: &[Sequence], l: u64, cfg: &EngineConfig) -> Result<Witness> {
    if seqs.is_empty() {
        return Err(Error::InvalidArg("need at least one sequence".into()));
    }
    if l < 2 {
        return Err(Error::InvalidArg(
            "witness length must be at least 2".into(),
        ));
    }
    let ctx = EvalCtx::new(cfg);
    let l = nat(l);
    let rw = dl_rec(seqs, &Nat::zero(), &l, &ctx).map_err(Flow::into_error)?;
    Ok(finish(seqs, l, rw, &ctx))
}

/// Pair of consecutive indices on which `a` weakly increases. The first
/// value of the sequence plus one bounds the scan.
pub fn dl_1_2(a: &Sequence, cfg: &EngineConfig) -> Result<Witness> {
    dl_k_l(std::slice::from_ref(a), 2, cfg)
}

/// Good set of size `l` for a single sequence.
pub fn dl_1_l(a: &Sequence, l: u64, cfg: &EngineConfig) -> Result<Witness> {
    dl_k_l(std::slice::from_ref(a), l, cfg)
}

/// Common good pair for two sequences.
pub fn dl_2_2(a: &Sequence, b: &Sequence, cfg: &EngineConfig) -> Result<Witness> {
    dl_k_l(&[a.clone(), b.clone()], 2, cfg)
}

/// Common good set of size `l` for two sequences.
pub fn dl_2_l(a: &Sequence, b: &Sequence, l: u64, cfg: &EngineConfig) -> Result<Witness> {
    dl_k_l(&[a.clone(), b.clone()], l, cfg)
}

/// Index `i` with `i ≤ Σ_{j<n} a(j)` and `a(i) ≤ a(i+n)`: a good pair at
/// distance exactly `n`, found by the base scan over the sliding window sum.
pub fn gap_pair(a: &Sequence, n: &Nat, cfg: &EngineConfig) -> Result<GapPair> {
    if n.is_zero() {
        return Err(Error::InvalidArg("gap must be at least 1".into()));
    }
    let ctx = EvalCtx::new(cfg);
    let beta = a.window_sum(n.clone());
    let rw = base_scan(&beta, &Nat::zero(), &ctx).map_err(Flow::into_error)?;
    // The scan window is Σ+1; the bound on the index itself is Σ.
    let bound = &rw.extent - 1u32;
    Ok(GapPair {
        index: rw.indices[0].clone(),
        gap: n.clone(),
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_sequence;

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    fn seq(text: &str) -> Sequence {
        parse_sequence(text).unwrap()
    }

    fn idx(w: &Witness) -> Vec<u64> {
        w.good
            .indices
            .iter()
            .map(|n| u64::try_from(n).unwrap())
            .collect()
    }

    fn bound(w: &Witness) -> u64 {
        u64::try_from(&w.cert.bound).unwrap()
    }

    #[test]
    fn base_case_on_zero_sequence() {
        let w = dl_1_2(&seq("const(0)"), &cfg()).unwrap();
        assert_eq!(idx(&w), vec![0, 1]);
        assert_eq!(bound(&w), 1);
    }

    #[test]
    fn base_case_attains_its_bound_on_descents() {
        let w = dl_1_2(&seq("dec(5)"), &cfg()).unwrap();
        assert_eq!(idx(&w), vec![5, 6]);
        assert_eq!(bound(&w), 6);
    }

    #[test]
    fn base_case_returns_least_index() {
        let w = dl_1_2(&seq("prefix(2,0,7);const(7)"), &cfg()).unwrap();
        assert_eq!(idx(&w), vec![1, 2]);
        assert_eq!(bound(&w), 3);
    }

    #[test]
    fn gap_pair_matches_optimality_construction() {
        let a = seq("prefix(1,0,0,0);const(0)");
        let g = gap_pair(&a, &nat(3), &cfg()).unwrap();
        assert_eq!(u64::try_from(&g.index).unwrap(), 1);
        assert_eq!(u64::try_from(&g.bound).unwrap(), 1);
    }

    #[test]
    fn gap_pair_on_constants() {
        let g = gap_pair(&seq("const(4)"), &nat(7), &cfg()).unwrap();
        assert_eq!(u64::try_from(&g.index).unwrap(), 0);
        assert_eq!(u64::try_from(&g.bound).unwrap(), 28);
    }

    #[test]
    fn gap_pair_agrees_with_direct_scan() {
        let a = seq("dec(3)");
        let n = nat(2);
        let g = gap_pair(&a, &n, &cfg()).unwrap();
        // oracle: first i with a(i) <= a(i+2), scanned directly
        let ctx = EvalCtx::new(&cfg());
        let mut expect = None;
        for i in 0..=5u64 {
            let vi = a.eval(&nat(i), &ctx).unwrap();
            let vn = a.eval(&nat(i + 2), &ctx).unwrap();
            if vi <= vn {
                expect = Some(i);
                break;
            }
        }
        assert_eq!(u64::try_from(&g.index).unwrap(), expect.unwrap());
        assert_eq!(u64::try_from(&g.bound).unwrap(), 5);
    }

    #[test]
    fn constants_splice_deterministically() {
        // the repetition harvests from successive tails, so even constant
        // sequences get the spliced witness, not the leftmost one
        let w = dl_1_l(&seq("const(0)"), 4, &cfg()).unwrap();
        assert_eq!(idx(&w), vec![0, 2, 3, 4]);
        assert_eq!(bound(&w), 4);
        let w = dl_1_l(&seq("const(7)"), 4, &cfg()).unwrap();
        assert_eq!(idx(&w), vec![0, 72, 80, 81]);
    }

    #[test]
    fn triple_on_alternating_sequence_is_non_consecutive() {
        let w = dl_1_l(&seq("periodic(0,1)"), 3, &cfg()).unwrap();
        let is = idx(&w);
        assert_eq!(is.len(), 3);
        // 0,1,0,1,… never weakly increases on three consecutive indices.
        assert!(is[2] > is[0] + 2, "witness {is:?} must not be consecutive");
        assert!(is[0] < is[1] && is[1] < is[2]);
    }

    #[test]
    fn known_splice_for_mixed_prefix() {
        let w = dl_1_l(&seq("prefix(2,1,3,0,5);const(5)"), 3, &cfg()).unwrap();
        assert_eq!(idx(&w), vec![3, 4, 5]);
        assert_eq!(bound(&w), 10);
    }

    #[test]
    fn pair_for_two_constant_sequences() {
        let w = dl_2_2(&seq("const(0)"), &seq("const(0)"), &cfg()).unwrap();
        assert_eq!(idx(&w), vec![0, 1]);
    }

    #[test]
    fn pair_in_the_plateau() {
        let w = dl_2_2(&seq("dec(2)"), &seq("affine(1,0)"), &cfg()).unwrap();
        assert_eq!(idx(&w), vec![2, 4]);
        assert_eq!(bound(&w), 6);
    }

    #[test]
    fn opposed_alternations_force_distance_two() {
        let w = dl_2_2(&seq("periodic(1,0)"), &seq("periodic(0,1)"), &cfg()).unwrap();
        let is = idx(&w);
        assert!(is[1] >= is[0] + 2, "adjacent pairs are bad for one side");
    }

    #[test]
    fn common_triple_for_two_sequences() {
        let a = seq("prefix(1,0);const(0)");
        let b = seq("prefix(0,1);const(1)");
        let w = dl_2_l(&a, &b, 3, &cfg()).unwrap();
        assert_eq!(idx(&w), vec![1, 3, 4]);
    }

    #[test]
    fn three_constant_sequences_splice_deterministically() {
        let seqs = [seq("const(1)"), seq("const(1)"), seq("const(1)")];
        let w = dl_k_l(&seqs, 2, &cfg()).unwrap();
        // the steered harvesting walks well past the leftmost pair
        assert_eq!(idx(&w), vec![0, 12]);
        assert_eq!(bound(&w), 36);
    }

    #[test]
    fn three_sequences_width_two() {
        let seqs = [seq("dec(2)"), seq("periodic(0,1)"), seq("const(5)")];
        let w = dl_k_l(&seqs, 2, &cfg()).unwrap();
        let is = idx(&w);
        let ctx = EvalCtx::new(&cfg());
        for s in &seqs {
            let vi = s.eval(&nat(is[0]), &ctx).unwrap();
            let vj = s.eval(&nat(is[1]), &ctx).unwrap();
            assert!(vi <= vj);
        }
        assert!(nat(is[1]) <= w.cert.bound);
    }

    #[test]
    fn k1_route_is_the_single_sequence_route() {
        for text in ["dec(4)", "periodic(0,1)", "prefix(2,1,3,0,5);const(5)"] {
            let a = seq(text);
            let direct = dl_1_l(&a, 3, &cfg()).unwrap();
            let general = dl_k_l(std::slice::from_ref(&a), 3, &cfg()).unwrap();
            assert_eq!(direct.good.indices, general.good.indices);
            assert_eq!(direct.cert.bound, general.cert.bound);
        }
    }

    #[test]
    fn rejects_degenerate_arguments() {
        assert!(dl_k_l(&[], 2, &cfg()).is_err());
        assert!(dl_k_l(&[seq("const(0)")], 1, &cfg()).is_err());
        assert!(gap_pair(&seq("const(0)"), &Nat::zero(), &cfg()).is_err());
    }

    #[test]
    fn budget_exhaustion_on_explosive_recursion() {
        let seqs = [
            seq("affine(2,1)"),
            seq("affine(3,2)"),
            seq("affine(2,5)"),
            seq("affine(1,1)"),
        ];
        let cfg = EngineConfig::with_budget(50_000);
        match dl_k_l(&seqs, 4, &cfg) {
            Err(e) if e.is_exhaustion() => {}
            other => panic!("expected resource exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn witness_document_round_trips() {
        let w = dl_2_2(&seq("dec(2)"), &seq("affine(1,0)"), &cfg()).unwrap();
        let doc = w.to_value(None).to_canonical_string();
        let back = Witness::from_value(&crate::canon::parse(&doc).unwrap()).unwrap();
        assert_eq!(back.good.indices, w.good.indices);
        assert_eq!(back.cert, w.cert);
    }
}
