//! Slack optimization and rate sweeps.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::bound::{corollary_bound, theorem1_bound, BoundForm, BoundInputs, BoundReport, SlackParams};
use super::concentration::golden_section_min;
use crate::channels::ChannelParams;
use crate::error::{Error, Result};

/// Points per slack parameter in the search grid.
pub const GRID_POINTS: usize = 25;
pub const GRID_MIN: f64 = 1e-4;
pub const GRID_MAX: f64 = 1.0;
/// `n delta5` above this would underflow `eps = 2^{-n delta5}`.
const MAX_EPS_EXPONENT: f64 = 1000.0;

/// Log-spaced search grid over `[GRID_MIN, GRID_MAX]`.
pub fn slack_grid() -> Vec<f64> {
    let (lo, hi) = (GRID_MIN.log10(), GRID_MAX.log10());
    (0..GRID_POINTS)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizedBound {
    pub report: BoundReport,
    pub slack: SlackParams,
}

/// A search point `(delta2, delta4, delta5)`; both forms use `alpha = 1 + delta4` and
/// `eps = 2^{-n delta5}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    form: BoundForm,
    delta2: f64,
    delta4: f64,
    delta5: f64,
}

struct Problem {
    channel: ChannelParams,
    ns: f64,
    n: u64,
    delta1: f64,
    delta3: f64,
}

impl Problem {
    fn slack(&self, c: &Candidate) -> SlackParams {
        SlackParams {
            delta1: self.delta1,
            delta2: c.delta2,
            delta3: self.delta3,
            delta4: c.delta4,
            delta5: c.delta5,
            alpha: 1.0 + c.delta4,
            eps: (-(self.n as f64) * c.delta5).exp2(),
        }
    }

    fn report(&self, c: &Candidate, rate: f64) -> Result<BoundReport> {
        let inputs = BoundInputs {
            channel: self.channel,
            ns: self.ns,
            n: self.n,
            rate,
            slack: self.slack(c),
        };
        match c.form {
            BoundForm::Renyi => theorem1_bound(&inputs),
            BoundForm::Continuity => corollary_bound(&inputs),
        }
    }

    fn value(&self, c: &Candidate, rate: f64) -> f64 {
        if c.form == BoundForm::Renyi && self.n as f64 * c.delta5 > MAX_EPS_EXPONENT {
            return f64::INFINITY;
        }
        self.report(c, rate).map_or(f64::INFINITY, |r| r.bound)
    }

    fn grid_best(&self, form: BoundForm, rate: f64, grid: &[f64]) -> Candidate {
        let mut best = Candidate {
            form,
            delta2: grid[0],
            delta4: grid[0],
            delta5: grid[0],
        };
        let mut best_v = f64::INFINITY;
        for &delta2 in grid {
            for &delta4 in grid {
                for &delta5 in grid {
                    let c = Candidate {
                        form,
                        delta2,
                        delta4,
                        delta5,
                    };
                    let v = self.value(&c, rate);
                    if v < best_v {
                        best_v = v;
                        best = c;
                    }
                }
            }
        }
        best
    }

    /// One coordinate pass of golden-section search in `log10` between grid neighbours.
    fn refine(&self, mut c: Candidate, rate: f64, grid: &[f64]) -> Candidate {
        let step = (grid[1] / grid[0]).log10();
        let (lo, hi) = (GRID_MIN.log10(), GRID_MAX.log10());
        for coord in 0..3 {
            let get = |c: &Candidate| match coord {
                0 => c.delta2,
                1 => c.delta4,
                _ => c.delta5,
            };
            let set = |c: &mut Candidate, x: f64| match coord {
                0 => c.delta2 = x,
                1 => c.delta4 = x,
                _ => c.delta5 = x,
            };
            let x0 = get(&c).log10();
            let f = |x: f64| {
                let mut trial = c;
                set(&mut trial, 10f64.powf(x));
                self.value(&trial, rate)
            };
            let x = golden_section_min(f, (x0 - step).max(lo), (x0 + step).min(hi), 1e-10);
            if f(x) < f(x0) {
                set(&mut c, 10f64.powf(x));
            }
        }
        c
    }

    fn optimize(&self, rate: f64) -> Vec<Candidate> {
        let grid = slack_grid();
        [BoundForm::Renyi, BoundForm::Continuity]
            .into_iter()
            .map(|form| {
                let c = self.grid_best(form, rate, &grid);
                self.refine(c, rate, &grid)
            })
            .collect()
    }

    fn best_of(&self, candidates: &[Candidate], rate: f64) -> Result<OptimizedBound> {
        let c = candidates
            .iter()
            .min_by(|a, b| {
                self.value(a, rate)
                    .total_cmp(&self.value(b, rate))
                    .then(a.form.cmp(&b.form))
            })
            .expect("at least one candidate");
        let report = self.report(c, rate)?;
        Ok(OptimizedBound {
            slack: report.slack,
            report,
        })
    }
}

fn check_problem(ch: &ChannelParams, ns: f64, rate: f64, n: u64, delta1: f64, delta3: f64) -> Result<Problem> {
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::domain(format!("rate must be >= 0, got {rate}")));
    }
    super::bound::delta6(delta1, delta3)?;
    Ok(Problem {
        channel: *ch,
        ns,
        n,
        delta1,
        delta3,
    })
}

/// Minimizes the bound over `(delta2, delta4, delta5)` on a log grid with one local
/// refinement pass, for both forms, and returns the smaller.
pub fn optimize_bound(
    ch: &ChannelParams,
    ns: f64,
    rate: f64,
    n: u64,
    delta1: f64,
    delta3: f64,
) -> Result<OptimizedBound> {
    let p = check_problem(ch, ns, rate, n, delta1, delta3)?;
    let candidates = p.optimize(rate);
    p.best_of(&candidates, rate)
}

/// How `delta1(n)` or `delta3(n)` is supplied to a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SlackModel {
    Constant(f64),
    /// `c 2^{-gamma n}`.
    Exponential { c: f64, gamma: f64 },
    /// Per-`n` measured values.
    Measured(BTreeMap<u64, f64>),
}

impl SlackModel {
    pub fn at(&self, n: u64) -> Result<f64> {
        match self {
            SlackModel::Constant(c) => Ok(*c),
            SlackModel::Exponential { c, gamma } => Ok(c * (-gamma * n as f64).exp2()),
            SlackModel::Measured(m) => m
                .get(&n)
                .copied()
                .ok_or_else(|| Error::domain(format!("no measured slack value for n = {n}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u64,
    pub rate: f64,
    pub bound: f64,
    pub exponent: f64,
    pub delta2: f64,
    pub delta4: f64,
    pub delta5: f64,
    pub form: BoundForm,
    pub components: BTreeMap<String, f64>,
    pub additive_terms: BTreeMap<String, f64>,
}

impl SweepRow {
    fn from_optimized(o: &OptimizedBound) -> Self {
        let r = &o.report;
        SweepRow {
            n: r.n,
            rate: r.rate,
            bound: r.bound,
            exponent: r.exponent,
            delta2: o.slack.delta2,
            delta4: o.slack.delta4,
            delta5: o.slack.delta5,
            form: r.form,
            components: r.components.clone(),
            additive_terms: r.additive_terms.clone(),
        }
    }
}

/// Optimized bound for every `(n, R)`, sorted by `(n, R)`.
///
/// After each cell is optimized, every rate at a given `n` is re-evaluated against the
/// slack choices of all rates at that `n`, so the bound is nonincreasing in `R`.
pub fn rate_sweep(
    ch: &ChannelParams,
    ns: f64,
    n_list: &[u64],
    rates: &[f64],
    delta1: &SlackModel,
    delta3: &SlackModel,
) -> Result<Vec<SweepRow>> {
    if n_list.is_empty() || rates.is_empty() {
        return Err(Error::domain("sweep grids must be non-empty"));
    }
    let mut n_sorted = n_list.to_vec();
    n_sorted.sort_unstable();
    n_sorted.dedup();
    let mut r_sorted = rates.to_vec();
    if r_sorted.iter().any(|r| !r.is_finite()) {
        return Err(Error::domain("rates must be finite"));
    }
    r_sorted.sort_by(f64::total_cmp);
    r_sorted.dedup();

    let problems: Vec<Problem> = n_sorted
        .iter()
        .map(|&n| check_problem(ch, ns, r_sorted[0].max(0.0), n, delta1.at(n)?, delta3.at(n)?))
        .collect::<Result<_>>()?;
    for &r in &r_sorted {
        if r < 0.0 {
            return Err(Error::domain(format!("rate must be >= 0, got {r}")));
        }
    }

    let cells: Vec<(usize, f64)> = (0..problems.len())
        .flat_map(|i| r_sorted.iter().map(move |&r| (i, r)))
        .collect();
    let chosen: Vec<Vec<Candidate>> = cells
        .par_iter()
        .map(|&(i, r)| problems[i].optimize(r))
        .collect();

    let rows: Vec<SweepRow> = problems
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let pool: Vec<Candidate> = cells
                .iter()
                .zip(&chosen)
                .filter(|((j, _), _)| *j == i)
                .flat_map(|(_, c)| c.iter().copied())
                .collect();
            r_sorted
                .iter()
                .map(|&r| p.best_of(&pool, r).map(|o| SweepRow::from_optimized(&o)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(rows)
}

/// Smallest swept rate at block length `n` whose bound falls below `level`.
pub fn transition_rate(rows: &[SweepRow], n: u64, level: f64) -> Option<f64> {
    rows.iter()
        .filter(|r| r.n == n && r.bound < level)
        .map(|r| r.rate)
        .min_by(f64::total_cmp)
}
