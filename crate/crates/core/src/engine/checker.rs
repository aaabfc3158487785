//! Independent certificate checking.
//!
//! The checker never trusts values cached during extraction: it re-evaluates
//! goodness of the returned indices, re-derives the bound by walking the
//! trace against the input sequences, and reconstructs the witness from the
//! recorded rounds. Any disagreement is reported as a violated clause.

use std::fmt;

use num_traits::Zero;

use crate::engine::{BoundCertificate, CertKind, GoodSet, TraceEntry};
use crate::sequence::{EngineConfig, EvalCtx, Nat, Sequence, nat};

#[derive(Debug, Clone)]
pub enum Violation {
    Shape(String),
    Monotonic(String),
    Goodness { seq: usize, detail: String },
    Bound(String),
    Trace(String),
}

impl Violation {
    pub fn clause(&self) -> &'static str {
        match self {
            Violation::Shape(_) => "shape",
            Violation::Monotonic(_) => "monotonic",
            Violation::Goodness { .. } => "goodness",
            Violation::Bound(_) => "bound",
            Violation::Trace(_) => "trace",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(d) => write!(f, "shape: {d}"),
            Violation::Monotonic(d) => write!(f, "monotonic: {d}"),
            Violation::Goodness { seq, detail } => write!(f, "goodness: sequence {seq}: {detail}"),
            Violation::Bound(d) => write!(f, "bound: {d}"),
            Violation::Trace(d) => write!(f, "trace: {d}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub pass: bool,
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn to_value(&self) -> crate::canon::Value {
        use crate::canon::Value;
        Value::obj([
            ("kind", Value::str("verdict")),
            ("pass", Value::Bool(self.pass)),
            (
                "violations",
                Value::arr(self.violations.iter().map(|v| Value::str(v.to_string()))),
            ),
        ])
    }
}

type Check<T> = std::result::Result<T, String>;

fn ev(s: &Sequence, n: &Nat, ctx: &EvalCtx) -> Check<Nat> {
    s.eval(n, ctx)
        .map_err(|e| format!("evaluation failed at {n}: {e}"))
}

fn find<'a>(trace: &'a [TraceEntry], sym: &str) -> Option<&'a TraceEntry> {
    trace.iter().find(|e| e.sym == sym)
}

fn need<'a>(trace: &'a [TraceEntry], sym: &str) -> Check<&'a TraceEntry> {
    find(trace, sym).ok_or_else(|| format!("missing '{sym}' entry"))
}

fn need_val(e: &TraceEntry) -> Check<&Nat> {
    e.val
        .as_ref()
        .ok_or_else(|| format!("'{}' entry has no value", e.sym))
}

/// The `M_j` entries in round order, insisting the numbering is 1..=count.
fn round_entries(trace: &[TraceEntry]) -> Check<Vec<&TraceEntry>> {
    let mut rounds: Vec<&TraceEntry> = trace.iter().filter(|e| e.sym == "M_j").collect();
    rounds.sort_by_key(|e| e.j.unwrap_or(0));
    for (i, e) in rounds.iter().enumerate() {
        if e.j != Some(i as u64 + 1) {
            return Err(format!(
                "round entries are not numbered 1..={}",
                rounds.len()
            ));
        }
    }
    Ok(rounds)
}

fn as_usize(n: &Nat, what: &str) -> Check<usize> {
    usize::try_from(n).map_err(|_| format!("{what} {n} exceeds the supported range"))
}

/// Re-derives the extent consumed by one node of the trace and reconstructs
/// the witness it committed to. `offset` is where this node started reading
/// its sequences.
fn check_node(
    seqs: &[Sequence],
    kind: CertKind,
    offset: &Nat,
    l: &Nat,
    trace: &[TraceEntry],
    ctx: &EvalCtx,
) -> Check<(Nat, Vec<Nat>)> {
    let _guard = ctx
        .enter()
        .map_err(|e| format!("trace too deep to re-derive: {e}"))?;
    match kind {
        CertKind::Base => check_base(&seqs[0], offset, trace, ctx),
        CertKind::OneHorizontal => check_one_horizontal(&seqs[0], offset, l, trace, ctx),
        CertKind::Vertical => check_vertical(seqs, offset, trace, ctx),
        CertKind::Horizontal => check_horizontal(seqs, offset, l, trace, ctx),
    }
}

fn check_base(
    a: &Sequence,
    offset: &Nat,
    trace: &[TraceEntry],
    ctx: &EvalCtx,
) -> Check<(Nat, Vec<Nat>)> {
    let i = need(trace, "i")?
        .index
        .as_ref()
        .ok_or("'i' entry has no index")?;
    let m = need_val(need(trace, "M")?)?;
    let v0 = ev(a, offset, ctx)?;
    let expect = &v0 + 1u32;
    if *m != expect {
        return Err(format!("scan window is {m}, re-derived {expect}"));
    }
    if i < offset || i - offset > v0 {
        return Err(format!("scan index {i} outside [{offset}, {offset}+{v0}]"));
    }
    let next = i + 1u32;
    let vi = ev(a, i, ctx)?;
    let vn = ev(a, &next, ctx)?;
    if vi > vn {
        return Err(format!("recorded index {i} is not an ascent"));
    }
    Ok((expect, vec![i.clone(), next]))
}

fn check_one_horizontal(
    a: &Sequence,
    offset: &Nat,
    l: &Nat,
    trace: &[TraceEntry],
    ctx: &EvalCtx,
) -> Check<(Nat, Vec<Nat>)> {
    let n_cap = need_val(need(trace, "N")?)?;
    let rounds = round_entries(trace)?;
    if nat(rounds.len() as u64) != *n_cap {
        return Err(format!("{} rounds recorded, N is {n_cap}", rounds.len()));
    }
    let shorter = l - 1u32;
    let sub_kind = CertKind::expected(1, &shorter);

    let mut extent = Nat::zero();
    let mut off = offset.clone();
    let mut firsts: Vec<Nat> = Vec::with_capacity(rounds.len());
    let mut witnesses: Vec<Vec<Nat>> = Vec::with_capacity(rounds.len());
    for r in &rounds {
        let sub = r.sub.as_deref().ok_or("round without sub-trace")?;
        let (ext, wit) = check_node(std::slice::from_ref(a), sub_kind, &off, &shorter, sub, ctx)?;
        if Some(&ext) != r.val.as_ref() {
            return Err(format!(
                "round {} extent {:?} disagrees with re-derived {ext}",
                r.j.unwrap_or(0),
                r.val
            ));
        }
        if r.index.as_ref() != Some(&wit[0]) {
            return Err(format!("round {} first index mismatch", r.j.unwrap_or(0)));
        }
        off += &ext;
        extent += &ext;
        firsts.push(wit[0].clone());
        witnesses.push(wit);
    }

    let expect_n = ev(a, &firsts[0], ctx)? + 2u32;
    if *n_cap != expect_n {
        return Err(format!("N is {n_cap}, re-derived {expect_n}"));
    }

    let t_entry = need(trace, "t")?;
    let t = as_usize(need_val(t_entry)?, "scan position")?;
    if t + 1 >= rounds.len() {
        return Err(format!("scan position {t} has no successor round"));
    }
    if t_entry.indices.as_deref() != Some(&witnesses[t + 1][..]) {
        return Err("spliced witness disagrees with its round".into());
    }
    let mut gamma = Vec::with_capacity(t + 2);
    for f in firsts.iter().take(t + 2) {
        gamma.push(ev(a, f, ctx)?);
    }
    for s in 0..t {
        if gamma[s] <= gamma[s + 1] {
            return Err(format!("scan position {t} is not the first ascent"));
        }
    }
    if gamma[t] > gamma[t + 1] {
        return Err(format!("scan position {t} is not an ascent"));
    }

    let m = need_val(need(trace, "M")?)?;
    if *m != extent {
        return Err(format!("total extent is {m}, re-derived {extent}"));
    }

    let mut witness = vec![firsts[t].clone()];
    witness.extend(witnesses[t + 1].iter().cloned());
    Ok((extent, witness))
}

fn check_vertical(
    seqs: &[Sequence],
    offset: &Nat,
    trace: &[TraceEntry],
    ctx: &EvalCtx,
) -> Check<(Nat, Vec<Nat>)> {
    let k = seqs.len();
    let steer = &seqs[k - 1];
    let base = &seqs[..k - 1];

    let k_rounds = as_usize(need_val(need(trace, "K")?)?, "round count")?;
    let rounds = round_entries(trace)?;
    if rounds.len() != k_rounds {
        return Err(format!("{} rounds recorded, K is {k_rounds}", rounds.len()));
    }
    if k_rounds == 0 {
        return Err("at least one round is required".into());
    }

    let mut extent = Nat::zero();
    let mut off = offset.clone();
    let mut prev = nat(2);
    let mut firsts = Vec::with_capacity(k_rounds);
    let mut witnesses = Vec::with_capacity(k_rounds);
    let mut steer_vals = Vec::with_capacity(k_rounds);
    for r in &rounds {
        let l_param = &prev + 1u32;
        let sub_kind = CertKind::expected(k - 1, &l_param);
        let sub = r.sub.as_deref().ok_or("round without sub-trace")?;
        let (ext, wit) = check_node(base, sub_kind, &off, &l_param, sub, ctx)?;
        if Some(&ext) != r.val.as_ref() {
            return Err(format!(
                "round {} extent disagrees with re-derived {ext}",
                r.j.unwrap_or(0)
            ));
        }
        if r.index.as_ref() != Some(&wit[0]) {
            return Err(format!("round {} first index mismatch", r.j.unwrap_or(0)));
        }
        let v = ev(steer, &wit[0], ctx)?;
        let is_last = r.j == Some(k_rounds as u64);
        if !is_last && v < prev {
            return Err(format!(
                "steering value dropped at round {} without closing",
                r.j.unwrap_or(0)
            ));
        }
        off += &ext;
        extent += &ext;
        firsts.push(wit[0].clone());
        witnesses.push(wit);
        steer_vals.push(v.clone());
        if !is_last {
            prev = v;
        }
    }
    let last_dropped = steer_vals[k_rounds - 1] < prev;

    if k == 2 {
        let n_cap = need_val(need(trace, "N")?)?;
        let expect = ev(&base[0], &firsts[0], ctx)? + 2u32;
        if *n_cap != expect {
            return Err(format!("N is {n_cap}, re-derived {expect}"));
        }
        if nat(k_rounds as u64) > *n_cap {
            return Err(format!("K = {k_rounds} exceeds N = {n_cap}"));
        }
    }

    let witness = match (find(trace, "drop"), find(trace, "rec")) {
        (Some(d), None) => {
            if !last_dropped {
                return Err("drop recorded but the steering value did not fall".into());
            }
            if d.j != Some(k_rounds as u64) {
                return Err("drop round is not the final round".into());
            }
            let w = d.indices.as_deref().ok_or("drop entry without witness")?;
            if w != witnesses[k_rounds - 1] {
                return Err("drop witness disagrees with its round".into());
            }
            let t = as_usize(need_val(d)?, "scan position")?;
            if t + 1 >= w.len() {
                return Err(format!("scan position {t} has no successor"));
            }
            let mut gamma = Vec::with_capacity(t + 2);
            for idx in w.iter().take(t + 2) {
                gamma.push(ev(steer, idx, ctx)?);
            }
            for s in 0..t {
                if gamma[s] <= gamma[s + 1] {
                    return Err(format!("scan position {t} is not the first ascent"));
                }
            }
            if gamma[t] > gamma[t + 1] {
                return Err(format!("scan position {t} is not an ascent"));
            }
            vec![w[t].clone(), w[t + 1].clone()]
        }
        (None, Some(rec)) => {
            if last_dropped {
                return Err("steering value fell on the final round but no drop recorded".into());
            }
            // Rebuild the sampled sequences from the recorded rounds; probes
            // beyond the recorded range fail the check.
            let tables: Vec<Sequence> = base
                .iter()
                .map(|s| -> Check<Sequence> {
                    let mut vals = Vec::with_capacity(firsts.len());
                    for f in &firsts {
                        vals.push(ev(s, f, ctx)?);
                    }
                    Ok(Sequence::table(vals))
                })
                .collect::<Check<_>>()?;
            let sub = rec.sub.as_deref().ok_or("rec entry without sub-trace")?;
            let two = nat(2);
            let sub_kind = CertKind::expected(k - 1, &two);
            let (_, rec_wit) = check_node(&tables, sub_kind, &Nat::zero(), &two, sub, ctx)?;
            if rec.indices.as_deref() != Some(&rec_wit[..]) {
                return Err("recursion witness disagrees with its trace".into());
            }
            let s = as_usize(&rec_wit[0], "sampled position")?;
            let t = as_usize(&rec_wit[1], "sampled position")?;
            if t >= k_rounds {
                return Err(format!("sampled position {t} beyond round count"));
            }
            vec![firsts[s].clone(), firsts[t].clone()]
        }
        _ => return Err("expected exactly one of 'drop' or 'rec'".into()),
    };

    let m = need_val(need(trace, "M")?)?;
    if *m != extent {
        return Err(format!("total extent is {m}, re-derived {extent}"));
    }
    Ok((extent, witness))
}

fn check_horizontal(
    seqs: &[Sequence],
    offset: &Nat,
    l: &Nat,
    trace: &[TraceEntry],
    ctx: &EvalCtx,
) -> Check<(Nat, Vec<Nat>)> {
    let k = seqs.len();
    let k_rounds = as_usize(need_val(need(trace, "K")?)?, "round count")?;
    let rounds = round_entries(trace)?;
    if rounds.len() != k_rounds || k_rounds == 0 {
        return Err(format!("{} rounds recorded, K is {k_rounds}", rounds.len()));
    }

    let two = nat(2);
    let mut extent = Nat::zero();
    let mut off = offset.clone();
    let mut pairs: Vec<(Nat, Nat)> = Vec::with_capacity(k_rounds);
    for r in &rounds {
        let sub = r.sub.as_deref().ok_or("round without sub-trace")?;
        let (ext, wit) = check_node(seqs, CertKind::expected(k, &two), &off, &two, sub, ctx)?;
        if Some(&ext) != r.val.as_ref() {
            return Err(format!(
                "round {} extent disagrees with re-derived {ext}",
                r.j.unwrap_or(0)
            ));
        }
        if r.indices.as_deref() != Some(&wit[..]) {
            return Err(format!("round {} pair mismatch", r.j.unwrap_or(0)));
        }
        off += &ext;
        extent += &ext;
        pairs.push((wit[0].clone(), wit[1].clone()));
    }

    let rec = need(trace, "rec")?;
    let tables: Vec<Sequence> = seqs
        .iter()
        .map(|s| -> Check<Sequence> {
            let mut vals = Vec::with_capacity(pairs.len());
            for (f, _) in &pairs {
                vals.push(ev(s, f, ctx)?);
            }
            Ok(Sequence::table(vals))
        })
        .collect::<Check<_>>()?;
    let shorter = l - 1u32;
    let sub = rec.sub.as_deref().ok_or("rec entry without sub-trace")?;
    let (_, rec_wit) = check_node(
        &tables,
        CertKind::expected(k, &shorter),
        &Nat::zero(),
        &shorter,
        sub,
        ctx,
    )?;
    if rec.indices.as_deref() != Some(&rec_wit[..]) {
        return Err("recursion witness disagrees with its trace".into());
    }
    let positions = rec_wit
        .iter()
        .map(|p| as_usize(p, "sampled position"))
        .collect::<Check<Vec<_>>>()?;
    if positions.iter().any(|&p| p >= k_rounds) {
        return Err("sampled position beyond round count".into());
    }

    let lambda = need_val(need(trace, "Lambda")?)?;
    let expect_lambda = ev(&seqs[0], &pairs[positions[0]].0, ctx)? + 1u32;
    if *lambda != expect_lambda {
        return Err(format!("Lambda is {lambda}, re-derived {expect_lambda}"));
    }

    let m = need_val(need(trace, "M")?)?;
    if *m != extent {
        return Err(format!("total extent is {m}, re-derived {extent}"));
    }

    let mut witness: Vec<Nat> = positions.iter().map(|&p| pairs[p].0.clone()).collect();
    witness.push(
        pairs[*positions.last().expect("non-empty witness")]
            .1
            .clone(),
    );
    Ok((extent, witness))
}

/// Independently re-validate an extraction result: goodness of the indices,
/// monotonicity, the bound clause, and exact re-derivation of the bound from
/// the trace. The verdict carries every violated clause.
pub fn check_certificate(
    seqs: &[Sequence],
    good: &GoodSet,
    cert: &BoundCertificate,
    cfg: &EngineConfig,
) -> Verdict {
    let mut violations = Vec::new();

    if good.k != seqs.len() || cert.k != seqs.len() {
        violations.push(Violation::Shape(format!(
            "certificate is for {} sequences, {} given",
            cert.k,
            seqs.len()
        )));
    }
    if nat(good.indices.len() as u64) != cert.l {
        violations.push(Violation::Shape(format!(
            "{} indices for witness length {}",
            good.indices.len(),
            cert.l
        )));
    }
    if good.indices.len() < 2 {
        violations.push(Violation::Shape("fewer than two indices".into()));
    }
    if !violations.is_empty() {
        return Verdict {
            pass: false,
            violations,
        };
    }
    if cert.kind != CertKind::expected(cert.k, &cert.l) {
        violations.push(Violation::Shape(format!(
            "kind '{}' does not match ({}, {})",
            cert.kind.tag(),
            cert.k,
            cert.l
        )));
    }

    for (p, w) in good.indices.windows(2).enumerate() {
        if w[0] >= w[1] {
            violations.push(Violation::Monotonic(format!(
                "indices at positions {p} and {} do not increase",
                p + 1
            )));
        }
    }

    let ctx = EvalCtx::new(cfg);
    for (si, s) in seqs.iter().enumerate() {
        let mut values = Vec::with_capacity(good.indices.len());
        let mut failed = false;
        for i in &good.indices {
            match s.eval(i, &ctx) {
                Ok(v) => values.push(v),
                Err(e) => {
                    violations.push(Violation::Goodness {
                        seq: si,
                        detail: format!("evaluation failed at {i}: {e}"),
                    });
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            continue;
        }
        for (p, w) in values.windows(2).enumerate() {
            if w[0] > w[1] {
                violations.push(Violation::Goodness {
                    seq: si,
                    detail: format!(
                        "descends between positions {p} and {}: {} > {}",
                        p + 1,
                        w[0],
                        w[1]
                    ),
                });
            }
        }
    }

    for i in &good.indices {
        if *i > cert.bound {
            violations.push(Violation::Bound(format!(
                "index {i} exceeds the bound {}",
                cert.bound
            )));
        }
    }

    match check_node(seqs, cert.kind, &Nat::zero(), &cert.l, &cert.trace, &ctx) {
        Ok((extent, witness)) => {
            if extent != cert.bound {
                violations.push(Violation::Trace(format!(
                    "re-derived bound {extent} disagrees with recorded {}",
                    cert.bound
                )));
            }
            if witness != good.indices {
                violations.push(Violation::Trace(
                    "reconstructed witness disagrees with the good set".into(),
                ));
            }
        }
        Err(detail) => violations.push(Violation::Trace(detail)),
    }

    Verdict {
        pass: violations.is_empty(),
        violations,
    }
}
