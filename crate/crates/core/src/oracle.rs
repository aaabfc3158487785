//! Brute-force oracles: exhaustive minimal-witness search, the family of
//! sequences with no common good pair, and bound-tightness tables.

use num_traits::Zero;

use crate::canon::Value;
use crate::engine::{GapPair, GoodSet, Witness, dl_k_l, gap_pair};
use crate::error::{Error, Result};
use crate::sequence::{EngineConfig, EvalCtx, Nat, Sequence, nat};

/// Exhaustive search result, coupled with the engine bound when the caller
/// ran the engine first.
#[derive(Debug, Clone)]
pub struct OracleReport {
    /// Lexicographically least valid good set with last index within the
    /// horizon, if any.
    pub minimal_witness: Option<GoodSet>,
    /// Least possible last index over all valid good sets in the horizon.
    pub min_last_index: Option<Nat>,
    /// Horizon actually searched (inclusive).
    pub horizon: Nat,
    pub requested_horizon: Nat,
    /// The horizon was shrunk to respect the subset work cap.
    pub truncated: bool,
    pub extracted_bound: Option<Nat>,
    /// Minimal last index equals the extracted bound.
    pub tight: Option<bool>,
    pub evals: u64,
}

impl OracleReport {
    pub fn to_value(&self) -> Value {
        let mut fields = vec![
            ("kind", Value::str("oracle")),
            ("horizon", Value::Nat(self.horizon.clone())),
            (
                "requested_horizon",
                Value::Nat(self.requested_horizon.clone()),
            ),
            ("truncated", Value::Bool(self.truncated)),
            ("evals", Value::nat(nat(self.evals))),
        ];
        if let Some(w) = &self.minimal_witness {
            fields.push(("minimal_witness", Value::nat_arr(w.indices.iter())));
        }
        if let Some(m) = &self.min_last_index {
            fields.push(("min_last_index", Value::Nat(m.clone())));
        }
        if let Some(b) = &self.extracted_bound {
            fields.push(("extracted_bound", Value::Nat(b.clone())));
        }
        if let Some(t) = self.tight {
            fields.push(("tight", Value::Bool(t)));
        }
        Value::obj(fields)
    }
}

/// `C(n, k)` with an early bail once the result provably exceeds `cap`.
fn binomial_exceeds(n: &Nat, k: u64, cap: u64) -> Result<bool> {
    if k == 0 {
        return Ok(1 > cap);
    }
    if *n < nat(k) {
        return Ok(false); // zero candidates
    }
    let mut acc = Nat::from(1u32);
    let cap = nat(cap);
    for i in 1..=k {
        // acc * (n - k + i) / i stays exact at every step
        acc = acc * (n - nat(k) + nat(i)) / nat(i);
        if acc > &cap * n {
            // even after the remaining divisions this cannot come back down
            return Ok(true);
        }
    }
    Ok(acc > cap)
}

fn goodness_values(seqs: &[Sequence], horizon: usize, ctx: &EvalCtx) -> Result<Vec<Vec<Nat>>> {
    let mut values = Vec::with_capacity(seqs.len());
    for s in seqs {
        let mut row = Vec::with_capacity(horizon + 1);
        for i in 0..=horizon {
            row.push(s.eval(&nat(i as u64), ctx)?);
        }
        values.push(row);
    }
    Ok(values)
}

/// Depth-first lexicographic enumeration of strictly increasing index sets
/// with goodness pruning: a prefix that already descends cannot extend to a
/// valid set.
fn dfs_lex(
    values: &[Vec<Nat>],
    l: usize,
    horizon: usize,
    prefix: &mut Vec<usize>,
    visited: &mut u64,
) -> Option<Vec<usize>> {
    if prefix.len() == l {
        return Some(prefix.clone());
    }
    let start = prefix.last().map_or(0, |&p| p + 1);
    // enough room for the remaining elements
    let room = l - prefix.len();
    if horizon + 1 < start + room {
        return None;
    }
    for next in start..=(horizon + 1 - room) {
        *visited += 1;
        let ok = match prefix.last() {
            None => true,
            Some(&p) => values.iter().all(|row| row[p] <= row[next]),
        };
        if !ok {
            continue;
        }
        prefix.push(next);
        if let Some(found) = dfs_lex(values, l, horizon, prefix, visited) {
            return Some(found);
        }
        prefix.pop();
    }
    None
}

/// Least last index: try each candidate last index in increasing order and
/// search for a valid completion below it.
fn min_last_search(
    values: &[Vec<Nat>],
    l: usize,
    horizon: usize,
    visited: &mut u64,
) -> Option<usize> {
    'outer: for last in (l - 1)..=horizon {
        // find l-1 indices below `last` forming a good prefix that links to it
        let mut prefix: Vec<usize> = Vec::with_capacity(l);
        if l == 1 {
            return Some(last);
        }
        if dfs_min_last(values, l - 1, last, &mut prefix, visited) {
            return Some(last);
        }
        continue 'outer;
    }
    None
}

fn dfs_min_last(
    values: &[Vec<Nat>],
    need: usize,
    last: usize,
    prefix: &mut Vec<usize>,
    visited: &mut u64,
) -> bool {
    if prefix.len() == need {
        let p = *prefix.last().expect("need >= 1");
        return values.iter().all(|row| row[p] <= row[last]);
    }
    let start = prefix.last().map_or(0, |&p| p + 1);
    let room = need - prefix.len();
    if last < start + room {
        return false;
    }
    for next in start..=(last - room) {
        *visited += 1;
        let ok = match prefix.last() {
            None => true,
            Some(&p) => values.iter().all(|row| row[p] <= row[next]),
        };
        if !ok {
            continue;
        }
        prefix.push(next);
        if dfs_min_last(values, need, last, prefix, visited) {
            return true;
        }
        prefix.pop();
    }
    false
}

/// Exhaustive search over strictly increasing `l`-subsets of
/// `{0, …, horizon}`. Errors with [`Error::HorizonTooLarge`] when the
/// subset space exceeds the configured work cap.
pub fn minimal_good_set(
    seqs: &[Sequence],
    l: u64,
    horizon: &Nat,
    cfg: &EngineConfig,
) -> Result<OracleReport> {
    if seqs.is_empty() {
        return Err(Error::InvalidArg("need at least one sequence".into()));
    }
    if l == 0 {
        return Err(Error::InvalidArg(
            "witness length must be at least 1".into(),
        ));
    }
    if *horizon < nat(l - 1) {
        return Err(Error::InvalidArg(
            "horizon leaves no room for the witness".into(),
        ));
    }
    let points = horizon + 1u32;
    if binomial_exceeds(&points, l, cfg.subset_cap)? {
        return Err(Error::HorizonTooLarge {
            points,
            l,
            cap: cfg.subset_cap,
        });
    }
    let ctx = EvalCtx::new(cfg);
    let report = search(seqs, l, horizon, horizon, false, &ctx)?;
    Ok(report)
}

fn search(
    seqs: &[Sequence],
    l: u64,
    horizon: &Nat,
    requested: &Nat,
    truncated: bool,
    ctx: &EvalCtx,
) -> Result<OracleReport> {
    let h = usize::try_from(horizon)
        .map_err(|_| Error::InvalidArg("horizon exceeds the addressable range".into()))?;
    let l_us = l as usize;
    let values = goodness_values(seqs, h, ctx)?;
    let mut visited = 0u64;
    let mut prefix = Vec::with_capacity(l_us);
    let lex = dfs_lex(&values, l_us, h, &mut prefix, &mut visited);
    let min_last = min_last_search(&values, l_us, h, &mut visited);
    Ok(OracleReport {
        minimal_witness: lex.map(|is| GoodSet {
            indices: is.into_iter().map(|i| nat(i as u64)).collect(),
            k: seqs.len(),
        }),
        min_last_index: min_last.map(|i| nat(i as u64)),
        horizon: horizon.clone(),
        requested_horizon: requested.clone(),
        truncated,
        extracted_bound: None,
        tight: None,
        evals: ctx.evals_used(),
    })
}

/// Run the engine, then search exhaustively with the extracted bound as the
/// horizon (shrunk to respect the work cap, recording the truncation).
pub fn oracle_report(
    seqs: &[Sequence],
    l: u64,
    horizon: Option<&Nat>,
    cfg: &EngineConfig,
) -> Result<(OracleReport, Witness)> {
    let witness = dl_k_l(seqs, l, cfg)?;
    let requested = horizon
        .cloned()
        .unwrap_or_else(|| witness.cert.bound.clone());
    let mut effective = requested.clone();
    let mut truncated = false;
    while binomial_exceeds(&(&effective + 1u32), l, cfg.subset_cap)? {
        truncated = true;
        effective = &effective / 2u32;
        if effective < nat(l - 1) {
            effective = nat(l - 1);
            break;
        }
    }
    let ctx = EvalCtx::new(cfg);
    let mut report = search(seqs, l, &effective, &requested, truncated, &ctx)?;
    report.tight = report
        .min_last_index
        .as_ref()
        .map(|m| *m == witness.cert.bound);
    report.extracted_bound = Some(witness.cert.bound.clone());
    Ok((report, witness))
}

/// Verdict for the family `n, n-1, …, 1, n+1, n+2, …`: no pair of indices
/// below `n_max` is good for every member.
#[derive(Debug, Clone)]
pub struct FamilyCheck {
    pub n_max: u64,
    pub pairs_checked: u64,
    pub all_refuted: bool,
}

impl FamilyCheck {
    pub fn to_value(&self) -> Value {
        Value::obj([
            ("kind", Value::str("counterexample")),
            ("n_max", Value::nat(nat(self.n_max))),
            ("pairs_checked", Value::nat(nat(self.pairs_checked))),
            ("all_refuted", Value::Bool(self.all_refuted)),
        ])
    }
}

/// For every pair `i < j ≤ n_max`, member `j+1` of the family takes value 1
/// at `j` and a value above 1 at `i`, so the pair is not good for it.
pub fn counterexample_family_check(n_max: u64) -> Result<FamilyCheck> {
    if n_max == 0 {
        return Err(Error::InvalidArg("need at least one pair".into()));
    }
    let mut pairs = 0u64;
    for j in 1..=n_max {
        // member j+1 is j+1, j, …, 1, j+2, j+3, …
        let member = j + 1;
        for i in 0..j {
            pairs += 1;
            let at_i = member - i; // i < j < member, still on the descending part
            let at_j = member - j;
            if at_j != 1 || at_i <= 1 {
                return Ok(FamilyCheck {
                    n_max,
                    pairs_checked: pairs,
                    all_refuted: false,
                });
            }
        }
    }
    Ok(FamilyCheck {
        n_max,
        pairs_checked: pairs,
        all_refuted: true,
    })
}

/// Families whose bound tightness is worth tabulating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `dec(n)`: the base bound is attained exactly.
    Dec,
    /// `prefix(1, 0…0)` probed at gap `n`: the window-sum bound is attained.
    Gap,
    /// `const(c)`: minimal witnesses start at zero.
    Const,
}

impl Family {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "dec" => Family::Dec,
            "gap" => Family::Gap,
            "const" => Family::Const,
            other => {
                return Err(Error::InvalidArg(format!(
                    "unknown family '{other}' (expected dec, gap or const)"
                )));
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Dec => "dec",
            Family::Gap => "gap",
            Family::Const => "const",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TightnessRow {
    pub family: &'static str,
    pub param: u64,
    pub l: u64,
    pub extracted_bound: Nat,
    pub minimal_last_index: Option<Nat>,
    pub tight: bool,
    pub evals: u64,
}

impl TightnessRow {
    pub fn to_value(&self) -> Value {
        let mut fields = vec![
            ("family", Value::str(self.family)),
            ("param", Value::nat(nat(self.param))),
            ("l", Value::nat(nat(self.l))),
            ("extracted_bound", Value::Nat(self.extracted_bound.clone())),
            ("tight", Value::Bool(self.tight)),
            ("evals", Value::nat(nat(self.evals))),
        ];
        if let Some(m) = &self.minimal_last_index {
            fields.push(("minimal_last_index", Value::Nat(m.clone())));
        }
        Value::obj(fields)
    }
}

fn gap_row(n: u64, cfg: &EngineConfig) -> Result<TightnessRow> {
    let mut vals = vec![nat(1)];
    vals.extend(std::iter::repeat_n(Nat::zero(), n as usize));
    let seq = Sequence::prefix(vals, Sequence::constant(Nat::zero()));
    let gap: GapPair = gap_pair(&seq, &nat(n), cfg)?;
    // scan for the least index directly; the engine bound caps the scan
    let ctx = EvalCtx::new(cfg);
    let mut minimal = None;
    let mut i = Nat::zero();
    while i <= gap.bound {
        let vi = seq.eval(&i, &ctx)?;
        let vn = seq.eval(&(&i + &gap.gap), &ctx)?;
        if vi <= vn {
            minimal = Some(i.clone());
            break;
        }
        i += 1u32;
    }
    let tight = minimal.as_ref() == Some(&gap.bound);
    Ok(TightnessRow {
        family: Family::Gap.name(),
        param: n,
        l: 2,
        extracted_bound: gap.bound,
        minimal_last_index: minimal,
        tight,
        evals: ctx.evals_used(),
    })
}

fn witness_row(
    family: Family,
    seq: Sequence,
    param: u64,
    l: u64,
    cfg: &EngineConfig,
) -> Result<TightnessRow> {
    let (report, witness) = oracle_report(std::slice::from_ref(&seq), l, None, cfg)?;
    Ok(TightnessRow {
        family: family.name(),
        param,
        l,
        extracted_bound: witness.cert.bound,
        minimal_last_index: report.min_last_index.clone(),
        tight: report.tight.unwrap_or(false),
        evals: report.evals,
    })
}

fn one_row(family: Family, param: u64, l: u64, cfg: &EngineConfig) -> Result<TightnessRow> {
    match family {
        Family::Dec => witness_row(family, Sequence::dec(nat(param)), param, l, cfg),
        Family::Const => witness_row(family, Sequence::constant(nat(param)), param, l, cfg),
        Family::Gap => {
            if param == 0 {
                return Err(Error::InvalidArg(
                    "gap family needs a positive parameter".into(),
                ));
            }
            gap_row(param, cfg)
        }
    }
}

/// One row per parameter. `jobs > 1` fans the parameter points out over
/// threads; the output order never depends on scheduling.
pub fn tightness_experiment(
    family: Family,
    params: &[u64],
    l: u64,
    jobs: usize,
    cfg: &EngineConfig,
) -> Result<Vec<TightnessRow>> {
    if params.is_empty() {
        return Err(Error::InvalidArg("no parameter points".into()));
    }
    let jobs = jobs.max(1).min(params.len());
    if jobs == 1 {
        return params.iter().map(|&p| one_row(family, p, l, cfg)).collect();
    }
    let mut slots: Vec<Option<Result<TightnessRow>>> = Vec::new();
    slots.resize_with(params.len(), || None);
    let slots = std::sync::Mutex::new(slots);
    let next = std::sync::atomic::AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| {
                loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= params.len() {
                        break;
                    }
                    let row = one_row(family, params[i], l, cfg);
                    slots.lock().unwrap()[i] = Some(row);
                }
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("every parameter point was visited"))
        .collect()
}

/// CSV with the fixed header; decimal integers only, missing minimal
/// witnesses leave the field empty.
pub fn tightness_csv(rows: &[TightnessRow]) -> String {
    let mut out = String::from("family,param,l,extracted_bound,minimal_last_index,tight,evals\n");
    for r in rows {
        let minimal = r
            .minimal_last_index
            .as_ref()
            .map(|m| m.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.family, r.param, r.l, r.extracted_bound, minimal, r.tight, r.evals
        ));
    }
    out
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

    fn idx(g: &GoodSet) -> Vec<u64> {
        g.indices
            .iter()
            .map(|n| u64::try_from(n).unwrap())
            .collect()
    }

    #[test]
    fn constant_sequences_minimize_at_zero() {
        let r = minimal_good_set(&[seq("const(0)")], 3, &nat(10), &cfg()).unwrap();
        assert_eq!(idx(r.minimal_witness.as_ref().unwrap()), vec![0, 1, 2]);
        assert_eq!(r.min_last_index, Some(nat(2)));
    }

    #[test]
    fn descending_prefix_minimizes_at_the_plateau() {
        let r = minimal_good_set(&[seq("dec(4)")], 2, &nat(10), &cfg()).unwrap();
        assert_eq!(idx(r.minimal_witness.as_ref().unwrap()), vec![4, 5]);
        assert_eq!(r.min_last_index, Some(nat(5)));
    }

    #[test]
    fn opposed_alternations_minimize_at_distance_two() {
        let r = minimal_good_set(
            &[seq("periodic(1,0)"), seq("periodic(0,1)")],
            2,
            &nat(10),
            &cfg(),
        )
        .unwrap();
        assert_eq!(idx(r.minimal_witness.as_ref().unwrap()), vec![0, 2]);
    }

    #[test]
    fn no_witness_under_a_tight_horizon() {
        let r = minimal_good_set(&[seq("dec(4)")], 2, &nat(4), &cfg()).unwrap();
        assert!(r.minimal_witness.is_none());
        assert!(r.min_last_index.is_none());
    }

    #[test]
    fn horizon_cap_is_enforced() {
        let mut cfg = cfg();
        cfg.subset_cap = 10;
        match minimal_good_set(&[seq("const(0)")], 3, &nat(100), &cfg) {
            Err(Error::HorizonTooLarge { .. }) => {}
            other => panic!("expected horizon error, got {other:?}"),
        }
    }

    #[test]
    fn family_counterexample_small_cases() {
        let c = counterexample_family_check(1).unwrap();
        assert_eq!(c.pairs_checked, 1);
        assert!(c.all_refuted);
        let c = counterexample_family_check(3).unwrap();
        assert_eq!(c.pairs_checked, 6);
        assert!(c.all_refuted);
        let c = counterexample_family_check(50).unwrap();
        assert_eq!(c.pairs_checked, 1275);
        assert!(c.all_refuted);
    }

    #[test]
    fn tightness_of_the_base_bound() {
        let params: Vec<u64> = (1..=20).collect();
        let rows = tightness_experiment(Family::Dec, &params, 2, 1, &cfg()).unwrap();
        for r in &rows {
            assert!(r.tight, "dec({}) must attain its bound", r.param);
            assert_eq!(r.extracted_bound, nat(r.param + 1));
        }
    }

    #[test]
    fn tightness_of_the_gap_bound() {
        let rows = tightness_experiment(Family::Gap, &[1, 2, 3], 2, 1, &cfg()).unwrap();
        for r in &rows {
            assert_eq!(r.extracted_bound, nat(1));
            assert_eq!(r.minimal_last_index, Some(nat(1)));
            assert!(r.tight);
        }
    }

    #[test]
    fn const_family_minimizes_at_prefix() {
        let rows = tightness_experiment(Family::Const, &[0, 3], 4, 1, &cfg()).unwrap();
        for r in &rows {
            assert_eq!(r.minimal_last_index, Some(nat(3)));
        }
    }

    #[test]
    fn parallel_rows_match_serial_rows() {
        let serial = tightness_experiment(Family::Dec, &[1, 2, 3, 4, 5, 6], 2, 1, &cfg()).unwrap();
        let parallel =
            tightness_experiment(Family::Dec, &[1, 2, 3, 4, 5, 6], 2, 3, &cfg()).unwrap();
        assert_eq!(tightness_csv(&serial), tightness_csv(&parallel));
    }

    #[test]
    fn csv_shape_is_fixed() {
        let rows = tightness_experiment(Family::Dec, &[2], 2, 1, &cfg()).unwrap();
        let csv = tightness_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "family,param,l,extracted_bound,minimal_last_index,tight,evals"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("dec,2,2,3,3,true,"), "{row}");
    }
}
