//! Batch engine: enumerate or sample conics through (0:1:0), run the oracle
//! and the prediction pipeline on every one, and aggregate.
//!
//! Work is split into fixed index ranges; each range folds into its own
//! [`Aggregate`] and the per-range results are merged in index order, so the
//! output is byte-identical no matter how many workers run. The parallel
//! driver (rayon, on by default through the `parallel` feature) and the
//! sequential one are both kept callable for benchmarking.

use crate::classifier::{predict, admissible_value_set, Case, PredictError, Report, WEIL_ALPHAS};
use crate::conic::{eq1_disc, Conic};
use crate::gf::{ExtElem, FieldCtx};
use crate::proj::{subplane_points, ProjPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::ops::Range;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RunError {
    #[error("exhaustive enumeration is only sized for q = 3, got q = {0}")]
    ExhaustiveGuard(u16),
    #[error("sampling is supported for q in {{5, 7, 9}}, got q = {0}")]
    SampleGuard(u16),
}

/// How many exemplar strings each failure list keeps; totals are exact.
const EXEMPLAR_CAP: usize = 100;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Mode {
    /// All nonsingular conics aX² + bXY + cXZ + dYZ + eZ² over GF(q²),
    /// one per projective coefficient class. Guarded to q = 3.
    Exhaustive,
    /// Pseudo-random coefficient vectors, deterministic in (seed, index),
    /// with singular draws rejected and redrawn.
    Sample { n: u64, seed: u64 },
}

#[derive(Copy, Clone, Debug)]
pub struct RunConfig {
    pub q: u16,
    pub mode: Mode,
    pub workers: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum RowFormat {
    Csv,
    JsonLines,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Mismatch {
    pub conic: String,
    pub case: String,
    pub predicted: u64,
    pub oracle: u64,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct InternalFailure {
    pub conic: String,
    pub message: String,
}

/// Order-independent tallies of a run; merging is commutative and the
/// exemplar lists are concatenated in index order, so worker count never
/// changes the result.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Aggregate {
    pub q: u16,
    pub processed: u64,
    pub degenerate_skipped: u64,
    pub case_counts: BTreeMap<&'static str, u64>,
    pub fq_conics: u64,
    /// E_q frequencies over conics not defined over the base field.
    pub value_counts_non_fq: BTreeMap<u64, u64>,
    pub k_hist: BTreeMap<u64, u64>,
    pub n0_hist: BTreeMap<u64, u64>,
    pub alpha_smooth_hist: BTreeMap<i64, u64>,
    pub alpha_lines_hist: BTreeMap<u64, u64>,
    pub beta_hist: BTreeMap<String, u64>,
    pub min_eq_non_fq: Option<u64>,
    pub max_eq_non_fq: Option<u64>,
    /// Conics not over the base field that reach E_q = q² (possible only
    /// at q = 3); recorded, never asserted away.
    pub q_squared_non_fq_count: u64,
    pub q_squared_non_fq: Vec<String>,
    pub mismatch_count: u64,
    pub mismatches: Vec<Mismatch>,
    pub internal_failure_count: u64,
    pub internal_failures: Vec<InternalFailure>,
}

impl Aggregate {
    pub fn new(q: u16) -> Aggregate {
        Aggregate {
            q,
            processed: 0,
            degenerate_skipped: 0,
            case_counts: BTreeMap::new(),
            fq_conics: 0,
            value_counts_non_fq: BTreeMap::new(),
            k_hist: BTreeMap::new(),
            n0_hist: BTreeMap::new(),
            alpha_smooth_hist: BTreeMap::new(),
            alpha_lines_hist: BTreeMap::new(),
            beta_hist: BTreeMap::new(),
            min_eq_non_fq: None,
            max_eq_non_fq: None,
            q_squared_non_fq_count: 0,
            q_squared_non_fq: Vec::new(),
            mismatch_count: 0,
            mismatches: Vec::new(),
            internal_failure_count: 0,
            internal_failures: Vec::new(),
        }
    }

    fn record(&mut self, report: &Report, conic_text: impl Fn() -> String) {
        self.processed += 1;
        *self.case_counts.entry(report.case.name()).or_insert(0) += 1;
        *self.k_hist.entry(report.k).or_insert(0) += 1;
        if let Some(n0) = report.n0 {
            *self.n0_hist.entry(n0).or_insert(0) += 1;
        }
        match report.case {
            Case::IrreducibleNonsingular => {
                if let Some(a) = report.alpha {
                    *self.alpha_smooth_hist.entry(a).or_insert(0) += 1;
                }
            }
            Case::IrreducibleSingular => {
                if let Some(a) = report.alpha {
                    *self.alpha_lines_hist.entry(a as u64).or_insert(0) += 1;
                }
                if let Some(b) = &report.beta {
                    *self.beta_hist.entry(b.clone()).or_insert(0) += 1;
                }
            }
            _ => {}
        }
        if report.case == Case::DefinedOverFq {
            self.fq_conics += 1;
        } else {
            let e = report.oracle;
            *self.value_counts_non_fq.entry(e).or_insert(0) += 1;
            self.min_eq_non_fq = Some(self.min_eq_non_fq.map_or(e, |m| m.min(e)));
            self.max_eq_non_fq = Some(self.max_eq_non_fq.map_or(e, |m| m.max(e)));
            if e == self.q as u64 * self.q as u64 {
                self.q_squared_non_fq_count += 1;
                if self.q_squared_non_fq.len() < EXEMPLAR_CAP {
                    self.q_squared_non_fq.push(conic_text());
                }
            }
        }
        if !report.matches {
            self.mismatch_count += 1;
            if self.mismatches.len() < EXEMPLAR_CAP {
                self.mismatches.push(Mismatch {
                    conic: conic_text(),
                    case: report.case.name().to_string(),
                    predicted: report.predicted,
                    oracle: report.oracle,
                });
            }
        }
    }

    fn record_failure(&mut self, conic: String, message: String) {
        self.processed += 1;
        self.internal_failure_count += 1;
        if self.internal_failures.len() < EXEMPLAR_CAP {
            self.internal_failures.push(InternalFailure { conic, message });
        }
    }

    pub fn merge(&mut self, other: Aggregate) {
        assert_eq!(self.q, other.q);
        self.processed += other.processed;
        self.degenerate_skipped += other.degenerate_skipped;
        for (k, v) in other.case_counts {
            *self.case_counts.entry(k).or_insert(0) += v;
        }
        self.fq_conics += other.fq_conics;
        for (k, v) in other.value_counts_non_fq {
            *self.value_counts_non_fq.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.k_hist {
            *self.k_hist.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.n0_hist {
            *self.n0_hist.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.alpha_smooth_hist {
            *self.alpha_smooth_hist.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.alpha_lines_hist {
            *self.alpha_lines_hist.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.beta_hist {
            *self.beta_hist.entry(k).or_insert(0) += v;
        }
        self.min_eq_non_fq = match (self.min_eq_non_fq, other.min_eq_non_fq) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.max_eq_non_fq = match (self.max_eq_non_fq, other.max_eq_non_fq) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.q_squared_non_fq_count += other.q_squared_non_fq_count;
        self.q_squared_non_fq.extend(other.q_squared_non_fq);
        self.q_squared_non_fq.truncate(EXEMPLAR_CAP);
        self.mismatch_count += other.mismatch_count;
        self.mismatches.extend(other.mismatches);
        self.mismatches.truncate(EXEMPLAR_CAP);
        self.internal_failure_count += other.internal_failure_count;
        self.internal_failures.extend(other.internal_failures);
        self.internal_failures.truncate(EXEMPLAR_CAP);
    }
}

/// Number of projective coefficient vectors in the exhaustive space,
/// (q⁸ + q⁶ + q⁴ + q² + 1 in terms of the subfield order).
pub fn exhaustive_total(q: u16) -> u64 {
    let q2 = q as u64 * q as u64;
    q2.pow(4) + q2.pow(3) + q2.pow(2) + q2 + 1
}

/// Decodes an index into the canonical representative (first nonzero
/// coefficient 1) of a point of the coefficient space PG(4, q²).
pub fn conic_from_index(ctx: &FieldCtx, idx: u64) -> [ExtElem; 5] {
    let q2 = ctx.q() as u64 * ctx.q() as u64;
    let mut coeffs = [ctx.ext_zero(); 5];
    let mut idx = idx;
    for lead in 0..5u32 {
        let block = q2.pow(4 - lead);
        if idx < block {
            coeffs[lead as usize] = ctx.ext_one();
            for slot in (lead as usize + 1..5).rev() {
                coeffs[slot] = ctx.ext_from_index((idx % q2) as u32);
                idx /= q2;
            }
            return coeffs;
        }
        idx -= block;
    }
    unreachable!("index out of range for the exhaustive space")
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Draws the idx-th sampled conic; deterministic in (seed, idx) so shards
/// can be processed in any order or degree of parallelism.
pub fn conic_from_sample(ctx: &FieldCtx, seed: u64, idx: u64, rejected: &mut u64) -> [ExtElem; 5] {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(idx)));
    let q2 = ctx.q() as u32 * ctx.q() as u32;
    loop {
        let coeffs: [ExtElem; 5] =
            std::array::from_fn(|_| ctx.ext_from_index(rng.random_range(0..q2)));
        if coeffs.iter().all(|&c| ctx.ext_is_zero(c)) || ctx.ext_is_zero(eq1_disc(ctx, &coeffs)) {
            *rejected += 1;
            continue;
        }
        return coeffs;
    }
}

struct ChunkOut {
    agg: Aggregate,
    rows: Vec<u8>,
}

fn process_range(
    ctx: &FieldCtx,
    subplane: &[ProjPoint],
    cfg: &RunConfig,
    range: Range<u64>,
    rows: Option<RowFormat>,
) -> ChunkOut {
    let mut agg = Aggregate::new(cfg.q);
    let mut out = Vec::new();
    for idx in range {
        let coeffs = match cfg.mode {
            Mode::Exhaustive => {
                let coeffs = conic_from_index(ctx, idx);
                if ctx.ext_is_zero(eq1_disc(ctx, &coeffs)) {
                    agg.degenerate_skipped += 1;
                    continue;
                }
                coeffs
            }
            Mode::Sample { seed, .. } => {
                conic_from_sample(ctx, seed, idx, &mut agg.degenerate_skipped)
            }
        };
        let conic = Conic::from_eq1(ctx, coeffs).expect("nonzero discriminant");
        let census = conic.count_externals_in_subplane(ctx, subplane);
        match predict(ctx, &conic, subplane) {
            Ok(prediction) => {
                let report = Report::new(cfg.q, &prediction, &census);
                agg.record(&report, || conic.to_text());
                match rows {
                    Some(RowFormat::Csv) => {
                        out.extend_from_slice(report.to_csv_row().as_bytes());
                        out.push(b'\n');
                    }
                    Some(RowFormat::JsonLines) => {
                        serde_json::to_writer(&mut out, &report).expect("report serializes");
                        out.push(b'\n');
                    }
                    None => {}
                }
            }
            Err(PredictError::NoSubplanePoint) => {
                agg.record_failure(
                    conic.to_text(),
                    "enumerated conic through (0:1:0) reported no subplane point".into(),
                );
            }
            Err(PredictError::Internal(msg)) => {
                agg.record_failure(conic.to_text(), msg);
            }
        }
    }
    ChunkOut { agg, rows: out }
}

fn total_indices(cfg: &RunConfig) -> u64 {
    match cfg.mode {
        Mode::Exhaustive => exhaustive_total(cfg.q),
        Mode::Sample { n, .. } => n,
    }
}

fn chunk_size(cfg: &RunConfig) -> u64 {
    match cfg.mode {
        Mode::Exhaustive => 256,
        Mode::Sample { .. } => 1 << 13,
    }
}

fn guard(cfg: &RunConfig) -> Result<(), RunError> {
    match cfg.mode {
        Mode::Exhaustive if cfg.q != 3 => Err(RunError::ExhaustiveGuard(cfg.q)),
        Mode::Sample { .. } if !matches!(cfg.q, 5 | 7 | 9) => Err(RunError::SampleGuard(cfg.q)),
        _ => Ok(()),
    }
}

fn ranges(total: u64, chunk: u64) -> Vec<Range<u64>> {
    let mut v = Vec::new();
    let mut lo = 0;
    while lo < total {
        let hi = (lo + chunk).min(total);
        v.push(lo..hi);
        lo = hi;
    }
    v
}

/// Sequential driver; always available and the reference for determinism.
pub fn run_sequential(
    ctx: &FieldCtx,
    cfg: &RunConfig,
    rows: Option<RowFormat>,
    mut sink: impl FnMut(&[u8]),
) -> Result<Aggregate, RunError> {
    guard(cfg)?;
    let subplane = subplane_points(ctx);
    let mut agg = Aggregate::new(cfg.q);
    for range in ranges(total_indices(cfg), chunk_size(cfg)) {
        let out = process_range(ctx, &subplane, cfg, range, rows);
        agg.merge(out.agg);
        sink(&out.rows);
    }
    Ok(agg)
}

/// Main driver: work-stealing over index ranges with ordered merge. Without
/// the `parallel` feature this is the sequential driver.
pub fn run(
    ctx: &FieldCtx,
    cfg: &RunConfig,
    rows: Option<RowFormat>,
    sink: impl FnMut(&[u8]),
) -> Result<Aggregate, RunError> {
    #[cfg(feature = "parallel")]
    {
        run_parallel(ctx, cfg, rows, sink)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = cfg.workers;
        run_sequential(ctx, cfg, rows, sink)
    }
}

#[cfg(feature = "parallel")]
pub fn run_parallel(
    ctx: &FieldCtx,
    cfg: &RunConfig,
    rows: Option<RowFormat>,
    mut sink: impl FnMut(&[u8]),
) -> Result<Aggregate, RunError> {
    use rayon::prelude::*;
    guard(cfg)?;
    let subplane = subplane_points(ctx);
    let all = ranges(total_indices(cfg), chunk_size(cfg));
    let mut agg = Aggregate::new(cfg.q);

    let pool = cfg.workers.map(|n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("worker pool")
    });
    let threads = pool
        .as_ref()
        .map(|p| p.current_num_threads())
        .unwrap_or_else(rayon::current_num_threads);
    // Process a bounded wave of ranges at a time so row buffers stay small,
    // then merge in index order for worker-count-independent output.
    for batch in all.chunks(threads.max(1) * 4) {
        let work = || -> Vec<ChunkOut> {
            batch
                .par_iter()
                .map(|r| process_range(ctx, &subplane, cfg, r.clone(), rows))
                .collect()
        };
        let outs = match &pool {
            Some(p) => p.install(work),
            None => work(),
        };
        for out in outs {
            agg.merge(out.agg);
            sink(&out.rows);
        }
    }
    Ok(agg)
}

/// One fully-checked verification run: zero mismatches, zero internal check
/// failures, and the published value-set facts for the given q.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub aggregate: Aggregate,
    /// Hard failures; empty exactly when the run passes.
    pub failures: Vec<String>,
    /// Informational observations (coverage, open recordings).
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify(ctx: &FieldCtx, cfg: &RunConfig) -> Result<VerifyReport, RunError> {
    let agg = run(ctx, cfg, None, |_| {})?;
    Ok(check_aggregate(cfg, agg))
}

pub fn check_aggregate(cfg: &RunConfig, agg: Aggregate) -> VerifyReport {
    let q = cfg.q;
    let qv = q as u64;
    let mut failures = Vec::new();
    let mut notes = Vec::new();

    if agg.mismatch_count != 0 {
        failures.push(format!(
            "{} prediction/oracle mismatches, e.g. {:?}",
            agg.mismatch_count,
            agg.mismatches.first()
        ));
    }
    if agg.internal_failure_count != 0 {
        failures.push(format!(
            "{} internal consistency failures, e.g. {:?}",
            agg.internal_failure_count,
            agg.internal_failures.first()
        ));
    }

    let observed: Vec<u64> = agg.value_counts_non_fq.keys().copied().collect();
    match (q, cfg.mode) {
        (3, Mode::Exhaustive) => {
            let expect: Vec<u64> = (3..=9).collect();
            if observed != expect {
                failures.push(format!(
                    "exhaustive q=3 value set {observed:?}, expected {expect:?}"
                ));
            }
            let total = agg.processed + agg.degenerate_skipped;
            if total != exhaustive_total(3) {
                failures.push(format!(
                    "processed + skipped = {total}, expected {}",
                    exhaustive_total(3)
                ));
            }
            notes.push(format!(
                "{} conics not over the base field attain E_q = q² = 9 at q = 3 (recorded, not asserted)",
                agg.q_squared_non_fq_count
            ));
        }
        _ => {
            let allowed: Vec<u64> = admissible_value_set(q)
                .into_iter()
                .filter(|&v| v != qv * qv)
                .filter(|&v| !(q == 5 && (v == 16 || v == 22)))
                .collect();
            let stray: Vec<u64> = observed
                .iter()
                .copied()
                .filter(|v| !allowed.contains(v))
                .collect();
            if !stray.is_empty() {
                failures.push(format!(
                    "values {stray:?} outside the admissible set {allowed:?} for q = {q}"
                ));
            }
            if agg.q_squared_non_fq_count != 0 {
                failures.push(format!(
                    "{} conics not over the base field reached E_q = q² at q = {q}",
                    agg.q_squared_non_fq_count
                ));
            }
            let missing: Vec<u64> = allowed
                .iter()
                .copied()
                .filter(|v| !observed.contains(v))
                .collect();
            notes.push(format!("admissible values not observed in this run: {missing:?}"));
        }
    }

    if q > 3 {
        let bound = (qv * qv - 3) / 2;
        if let Some(min) = agg.min_eq_non_fq {
            if min < bound {
                failures.push(format!(
                    "observed E_q = {min} below the blocking-set bound {bound}"
                ));
            }
        }
    }

    for &alpha in agg.alpha_smooth_hist.keys() {
        if !WEIL_ALPHAS.contains(&alpha) {
            failures.push(format!("smooth surface α = {alpha} outside the admissible set"));
        }
        if (q == 3 || q == 5) && alpha > 5 {
            failures.push(format!("α = {alpha} exceeds the improved bound at q = {q}"));
        }
    }

    let zero_lines = agg.alpha_lines_hist.get(&0).copied().unwrap_or(0);
    notes.push(format!(
        "singular surfaces with no line through the double point: {zero_lines}"
    ));
    notes.push(format!("k distribution: {:?}", agg.k_hist));
    notes.push(format!("case counts: {:?}", agg.case_counts));

    VerifyReport { aggregate: agg, failures, notes }
}
