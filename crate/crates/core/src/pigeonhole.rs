//! Pigeonhole reductions: a monochromatic subsequence of any requested
//! length under a 2-coloring, and the finite counting bound used by the
//! dichotomy argument.

use num_traits::{One, Zero};

use crate::canon::Value;
use crate::engine::{BoundCertificate, dl_k_l};
use crate::error::{Error, Result};
use crate::sequence::{Coloring, EngineConfig, EvalCtx, Nat, Sequence, nat};

/// Strictly increasing indices at which a coloring (or a sequence, for the
/// finite case) takes one common value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoRun {
    pub indices: Vec<Nat>,
    pub color: Nat,
}

impl MonoRun {
    pub fn to_value(&self) -> Value {
        Value::obj([
            ("kind", Value::str("mono-run")),
            ("indices", Value::nat_arr(self.indices.iter())),
            ("color", Value::Nat(self.color.clone())),
        ])
    }
}

/// Result of [`ph2_from_dl`], with the composed bound of the rounds that
/// were actually run.
#[derive(Debug, Clone)]
pub struct Ph2Report {
    pub run: MonoRun,
    /// All returned indices lie strictly below offset + extent of the last
    /// round, which this field records.
    pub bound: Nat,
    pub rounds: u64,
    pub round_certs: Vec<BoundCertificate>,
}

impl Ph2Report {
    pub fn to_value(&self) -> Value {
        Value::obj([
            ("kind", Value::str("pigeonhole")),
            ("indices", Value::nat_arr(self.run.indices.iter())),
            ("color", Value::Nat(self.run.color.clone())),
            ("bound", Value::Nat(self.bound.clone())),
            ("rounds", Value::nat(nat(self.rounds))),
        ])
    }
}

/// A monochromatic run of length `l` under a 2-coloring of the naturals.
///
/// Each round extracts a weakly increasing set of `l` color values. A round
/// that is all zeros or all ones is returned whole; otherwise the round
/// contributes its zeros (at least one, since it starts at zero and ends at
/// one) to a pool that must fill up within `l` rounds.
pub fn ph2_from_dl(chi: &Coloring, l: u64, cfg: &EngineConfig) -> Result<Ph2Report> {
    if l < 2 {
        return Err(Error::InvalidArg("run length must be at least 2".into()));
    }
    let ctx = EvalCtx::new(cfg);
    let mut offset = Nat::zero();
    let mut zero_pool: Vec<Nat> = Vec::new();
    let mut round_certs = Vec::new();

    for round in 1..=l {
        let view = chi.sequence().shifted(offset.clone());
        let w = dl_k_l(std::slice::from_ref(&view), l, cfg)?;
        let absolute: Vec<Nat> = w.good.indices.iter().map(|i| i + &offset).collect();
        let bound = &offset + &w.cert.bound;
        round_certs.push(w.cert);

        let mut colors = Vec::with_capacity(absolute.len());
        for i in &absolute {
            colors.push(chi.color(i, &ctx)?);
        }
        // weakly increasing colors: all equal iff the ends agree
        let top = colors.last().expect("witness is non-empty").clone();
        let bottom = colors[0].clone();
        if top.is_zero() {
            return Ok(Ph2Report {
                run: MonoRun {
                    indices: absolute,
                    color: Nat::zero(),
                },
                bound,
                rounds: round,
                round_certs,
            });
        }
        if bottom.is_one() {
            return Ok(Ph2Report {
                run: MonoRun {
                    indices: absolute,
                    color: Nat::one(),
                },
                bound,
                rounds: round,
                round_certs,
            });
        }
        for (i, c) in absolute.iter().zip(&colors) {
            if c.is_zero() {
                zero_pool.push(i.clone());
            }
        }
        if zero_pool.len() >= l as usize {
            zero_pool.truncate(l as usize);
            return Ok(Ph2Report {
                run: MonoRun {
                    indices: zero_pool,
                    color: Nat::zero(),
                },
                bound,
                rounds: round,
                round_certs,
            });
        }
        // continue past the last index of this round
        offset = absolute.last().expect("non-empty") + 1u32;
    }
    // Every round without a full run contributes at least one zero, so the
    // pool fills within l rounds.
    Err(Error::Internal(
        "no monochromatic run within the round limit".into(),
    ))
}

/// Outcome of the finite counting scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonoOutcome {
    /// All of the first `K = (l-1)·M + 1` values were below `M`, so some
    /// value repeats `l` times.
    Run(MonoRun),
    /// The first scanned index whose value reaches `M`.
    NotAllBelow { index: Nat, value: Nat },
}

#[derive(Debug, Clone)]
pub struct MonoScan {
    /// `K = (l-1)·M + 1`, the number of leading terms examined.
    pub window: Nat,
    pub outcome: MonoOutcome,
}

impl MonoScan {
    pub fn to_value(&self) -> Value {
        let mut fields = vec![
            ("kind", Value::str("mono-scan")),
            ("window", Value::Nat(self.window.clone())),
        ];
        match &self.outcome {
            MonoOutcome::Run(run) => {
                fields.push(("indices", Value::nat_arr(run.indices.iter())));
                fields.push(("color", Value::Nat(run.color.clone())));
            }
            MonoOutcome::NotAllBelow { index, value } => {
                fields.push(("not_all_below", Value::Nat(index.clone())));
                fields.push(("value", Value::Nat(value.clone())));
            }
        }
        Value::obj(fields)
    }
}

/// Finite pigeonhole over the first `K = (l-1)·M + 1` values of `a`: either
/// every value is below `M` and some value occurs `l` times (the first value
/// to reach `l` occurrences wins), or the first index with a value `>= M` is
/// returned.
///
/// With `M = 0` no natural is below `M`, so the scan reports index 0.
pub fn mono_run(a: &Sequence, m: &Nat, l: u64, cfg: &EngineConfig) -> Result<MonoScan> {
    let ctx = EvalCtx::new(cfg);
    mono_run_inner(a, m, l, &ctx)
}

pub(crate) fn mono_run_inner(a: &Sequence, m: &Nat, l: u64, ctx: &EvalCtx) -> Result<MonoScan> {
    if l == 0 {
        return Err(Error::InvalidArg("run length must be at least 1".into()));
    }
    let window = (m * nat(l - 1)) + 1u32;
    if m.is_zero() {
        let value = a.eval(&Nat::zero(), ctx)?;
        return Ok(MonoScan {
            window,
            outcome: MonoOutcome::NotAllBelow {
                index: Nat::zero(),
                value,
            },
        });
    }

    // window fits in usize or the budget gives out first
    let mut occurrences: Vec<(Nat, Vec<Nat>)> = Vec::new();
    let mut i = Nat::zero();
    while i < window {
        let v = a.eval(&i, ctx)?;
        if v >= *m {
            return Ok(MonoScan {
                window,
                outcome: MonoOutcome::NotAllBelow { index: i, value: v },
            });
        }
        let slot = match occurrences.iter_mut().find(|(val, _)| *val == v) {
            Some((_, is)) => is,
            None => {
                occurrences.push((v.clone(), Vec::new()));
                &mut occurrences.last_mut().expect("just pushed").1
            }
        };
        slot.push(i.clone());
        if slot.len() == l as usize {
            let (color, indices) = occurrences
                .into_iter()
                .find(|(_, is)| is.len() == l as usize)
                .expect("slot just filled");
            return Ok(MonoScan {
                window,
                outcome: MonoOutcome::Run(MonoRun { indices, color }),
            });
        }
        i += 1u32;
    }
    // M distinct values over (l-1)·M + 1 slots force an l-fold repeat.
    Err(Error::Internal(
        "window exhausted without a repeat or an escape".into(),
    ))
}
