//! Seeded property suites over random states and measurements.
//!
//! Each suite draws its samples from child seeds of one base seed, evaluates
//! them in parallel and reduces every metric to its worst value together
//! with the sample that attained it. The reduction breaks ties by the
//! smaller sample index, so results do not depend on scheduling.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formats::Sig17;
use crate::locc::{
    average_gap, det_transformation_check, diagonal_povm, diagonal_squared_concurrence_gap, povm_from_angles, random_povm,
    sample_povm_angles, tau_gap_closed_form,
};
use crate::measures::{
    concurrence_fill, fill_via_assistance, fill_via_tangle, one_to_other_squared, pair_concurrence,
    pair_spin_flip_values, perimeter, perimeter_via_tangle, spin_flip_values_spectral, tangle_hyperdeterminant,
    tangle_via_assistance, three_tangle_detail, Bipartition, MeasureId, MeasureKind,
};
use crate::qstate::{
    acin_state, apply_local_unitary, random_pure_state, random_unitary, reduced_density, AcinParams, Party, PartySet,
    PureState,
};
use crate::search::{derive_seed, reproduce_case, PaperCase};

/// The suites the CLI can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Identities,
    Monotones,
    Diagonal,
    Violations,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Identities, Suite::Monotones, Suite::Diagonal, Suite::Violations];

    pub fn default_samples(self) -> usize {
        match self {
            Suite::Identities => 100_000,
            Suite::Monotones => 10_000,
            Suite::Diagonal => 1_000,
            Suite::Violations => PaperCase::ALL.len(),
        }
    }

    pub fn run(self, samples: usize, seed: u64) -> Result<SuiteReport> {
        if samples == 0 {
            return Err(Error::InvalidParameter("suite needs at least one sample".into()));
        }
        let checks = match self {
            Suite::Identities => identities(samples, seed)?,
            Suite::Monotones => monotones(samples, seed)?,
            Suite::Diagonal => diagonal(samples, seed)?,
            Suite::Violations => violations()?,
        };
        let samples = if self == Suite::Violations { PaperCase::ALL.len() } else { samples };
        Ok(SuiteReport {
            suite: self.to_string(),
            samples,
            seed,
            passed: checks.iter().all(|c| c.passed),
            checks,
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Identities => "identities",
            Suite::Monotones => "monotones",
            Suite::Diagonal => "diagonal",
            Suite::Violations => "violations",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string() == s.trim())
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// Direction of a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// One asserted quantity: its worst value over the samples and where it occurred.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub bound: Bound,
    pub limit: Sig17,
    /// `None` when some sample produced a non-finite value.
    pub worst: Option<Sig17>,
    /// Child seed of the worst sample; `None` for deterministic cases.
    pub worst_seed: Option<u64>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub samples: usize,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Worst value seen so far for one metric, with the sample index.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Worst {
    value: f64,
    index: u64,
}

impl Worst {
    const NONE: Worst = Worst {
        value: f64::NAN,
        index: u64::MAX,
    };

    /// Keeps the larger value; NaN dominates so failures are never hidden.
    fn merge(self, other: Worst) -> Worst {
        let rank = |w: &Worst| if w.index == u64::MAX { 0 } else if w.value.is_nan() { 2 } else { 1 };
        match rank(&self).cmp(&rank(&other)) {
            std::cmp::Ordering::Greater => self,
            std::cmp::Ordering::Less => other,
            std::cmp::Ordering::Equal => match self.value.total_cmp(&other.value) {
                std::cmp::Ordering::Greater => self,
                std::cmp::Ordering::Less => other,
                std::cmp::Ordering::Equal if self.index <= other.index => self,
                std::cmp::Ordering::Equal => other,
            },
        }
    }
}

/// A metric evaluated per sample. Lower bounds are tracked as maxima of the
/// negated value.
struct Metric {
    name: &'static str,
    bound: Bound,
    limit: f64,
}

impl Metric {
    const fn at_most(name: &'static str, limit: f64) -> Self {
        Self {
            name,
            bound: Bound::AtMost,
            limit,
        }
    }

    const fn at_least(name: &'static str, limit: f64) -> Self {
        Self {
            name,
            bound: Bound::AtLeast,
            limit,
        }
    }

    fn keyed(&self, v: f64) -> f64 {
        match self.bound {
            Bound::AtMost => v,
            Bound::AtLeast => -v,
        }
    }
}

/// Evaluates `sample` for every index in parallel and reduces each metric.
fn run_metrics<F>(metrics: &[Metric], samples: usize, seed: u64, sample: F) -> Result<Vec<Check>>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync,
{
    let m = metrics.len();
    let worst = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let values = sample(derive_seed(seed, i))?;
            debug_assert_eq!(values.len(), m);
            Ok(values
                .iter()
                .zip(metrics)
                .map(|(&v, metric)| Worst {
                    value: metric.keyed(v),
                    index: i,
                })
                .collect::<Vec<_>>())
        })
        .try_reduce(
            || vec![Worst::NONE; m],
            |a, b| Ok(a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()),
        )?;
    Ok(metrics
        .iter()
        .zip(worst)
        .map(|(metric, w)| {
            let value = metric.keyed(w.value);
            let passed = match metric.bound {
                Bound::AtMost => value <= metric.limit,
                Bound::AtLeast => value >= metric.limit,
            };
            Check {
                name: metric.name.to_string(),
                bound: metric.bound,
                limit: Sig17(metric.limit),
                worst: value.is_finite().then_some(Sig17(value)),
                worst_seed: (w.index != u64::MAX).then(|| derive_seed(seed, w.index)),
                passed,
            }
        })
        .collect())
}

fn pair(a: usize, b: usize) -> PartySet {
    PartySet::from_parties([Party(a), Party(b)])
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |a: f64, x| if x.is_nan() { f64::NAN } else { a.max(x.abs()) })
}

const IDENTITY_METRICS: [Metric; 11] = [
    Metric::at_most("ckw_residual", 1e-8),
    Metric::at_least("triangle_slack", -1e-10),
    Metric::at_most("fill_formula_spread", 1e-9),
    Metric::at_most("tangle_pivot_spread", 1e-8),
    Metric::at_most("tangle_assistance_route", 1e-8),
    Metric::at_most("perimeter_reformulation", 1e-9),
    Metric::at_most("single_qubit_trace_error", 1e-12),
    Metric::at_most("single_qubit_purity_excess", 1e-10),
    Metric::at_most("wootters_route_disagreement", 1e-7),
    Metric::at_most("local_unitary_drift", 1e-9),
    Metric::at_most("permutation_drift", 1e-10),
];

/// CKW, triangle, fill, tangle, perimeter and invariance identities on
/// Haar-random three-qubit states.
///
/// The CKW residual uses the hyperdeterminant tangle, which shares no code
/// with the concurrence routes.
pub fn identities(samples: usize, seed: u64) -> Result<Vec<Check>> {
    run_metrics(&IDENTITY_METRICS, samples, seed, |child| {
        let s: PureState<f64> = random_pure_state(child, 3)?;
        let mut sides = [0.0; 3];
        for (i, c) in sides.iter_mut().enumerate() {
            *c = one_to_other_squared(&s, PartySet::from_parties([Party(i)]))?;
        }
        let pc = [pair_concurrence(&s, pair(1, 2))?, pair_concurrence(&s, pair(0, 2))?, pair_concurrence(&s, pair(0, 1))?];
        let pc2 = pc.map(|c| c * c);
        let tau_h = tangle_hyperdeterminant(&s)?;
        // pc2[i] is the pair without party i
        let ckw = max_abs((0..3).map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            sides[i] - tau_h - pc2[k] - pc2[j]
        }));
        let slack = (0..3)
            .map(|i| sides[(i + 1) % 3] + sides[(i + 2) % 3] - sides[i])
            .fold(f64::INFINITY, f64::min);
        let f = concurrence_fill(&s)?;
        let fills = [f, fill_via_tangle(&s)?, fill_via_assistance(&s)?];
        let fill_spread = max_abs(fills.iter().map(|&x| x - f));
        let taus = [
            three_tangle_detail(&s, Party::A)?.raw,
            three_tangle_detail(&s, Party::B)?.raw,
            three_tangle_detail(&s, Party::C)?.raw,
        ];
        let pivot_spread = max_abs(taus.iter().map(|&t| t - taus[0]));
        let assist = max_abs([pair(1, 2), pair(0, 2), pair(0, 1)].into_iter().map(|p| {
            tangle_via_assistance(&s, p).map_or(f64::NAN, |t| t - taus[0])
        }));
        let perim = (perimeter(&s)? - perimeter_via_tangle(&s)?).abs();
        let mut trace_err: f64 = 0.0;
        let mut purity_excess: f64 = f64::NEG_INFINITY;
        for i in 0..3 {
            let rho = reduced_density(&s, PartySet::from_parties([Party(i)]))?;
            trace_err = trace_err.max((rho.matrix().trace().re - 1.0).abs());
            let p = rho.purity();
            purity_excess = purity_excess.max((0.5 - p).max(p - 1.0));
            for e in rho.eigenvalues() {
                purity_excess = purity_excess.max((-e).max(e - 1.0));
            }
        }
        let mut wootters = 0.0_f64;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(child, 1));
        for (idx, p) in [pair(1, 2), pair(0, 2), pair(0, 1)].into_iter().enumerate() {
            let sv = pair_spin_flip_values(&s, p)?;
            let spectral = spin_flip_values_spectral(&reduced_density(&s, p)?)?;
            let c_sv = (sv[0] - sv[1] - sv[2] - sv[3]).max(0.0);
            let c_sp = (spectral[0] - spectral[1] - spectral[2] - spectral[3]).max(0.0);
            wootters = wootters.max((c_sv - c_sp).abs()).max((pc[idx] - c_sv).abs());
        }
        let ids = ["fill", "tangle", "s", "perimeter", "g:BC"].map(|x| x.parse::<MeasureId>().expect("valid id"));
        let before: Vec<f64> = ids.iter().map(|m| crate::measures::evaluate(m, &s)).collect::<Result<_>>()?;
        let mut rotated = s.clone();
        for party in 0..3 {
            rotated = apply_local_unitary(&rotated, Party(party), &random_unitary(&mut rng))?;
        }
        let lu = max_abs(
            ids.iter()
                .zip(&before)
                .map(|(m, &b)| crate::measures::evaluate(m, &rotated).map_or(f64::NAN, |v| v - b)),
        );
        let perm = [[1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]][rng.gen_range(0..5)];
        let permuted = s.permute_parties(&perm)?;
        let perm_drift = max_abs(
            ids[..4]
                .iter()
                .zip(&before)
                .map(|(m, &b)| crate::measures::evaluate(m, &permuted).map_or(f64::NAN, |v| v - b)),
        );
        Ok(vec![
            ckw,
            slack,
            fill_spread,
            pivot_spread,
            assist,
            perim,
            trace_err,
            purity_excess,
            wootters,
            lu,
            perm_drift,
        ])
    })
}

const MONOTONE_METRICS: [Metric; 9] = [
    Metric::at_least("tangle_gap", -1e-10),
    Metric::at_least("s_gap", -1e-10),
    Metric::at_least("concurrence_a_gap_on_a", -1e-10),
    Metric::at_least("concurrence_gap_on_measured_party", -1e-10),
    Metric::at_most("tangle_closed_form_mismatch", 1e-9),
    Metric::at_least("tangle_closed_form", -1e-10),
    Metric::at_most("probability_closure", 1e-9),
    Metric::at_most("left_unitary_gap_drift", 1e-9),
    Metric::at_most("determinant_rule_residual", 1e-8),
];

/// Gaps of the proven monotones under random binary POVMs on a random party.
pub fn monotones(samples: usize, seed: u64) -> Result<Vec<Check>> {
    let tangle = MeasureId::tangle();
    let s_id = MeasureId::s();
    run_metrics(&MONOTONE_METRICS, samples, seed, |child| {
        let mut rng = ChaCha8Rng::seed_from_u64(child);
        let s: PureState<f64> = random_pure_state(rng.gen(), 3)?;
        let party = Party(rng.gen_range(0..3));
        let angles = sample_povm_angles(&mut rng);
        let povm = povm_from_angles(&angles);
        let tau = average_gap(&tangle, &s, &povm, party)?;
        let sg = average_gap(&s_id, &s, &povm, party)?;
        let ca = MeasureId::plain(MeasureKind::OneToOther(Bipartition::one_vs_rest(Party::A, 3)));
        let ca_gap = average_gap(&ca, &s, &povm, Party::A)?;
        let cp = MeasureId::plain(MeasureKind::OneToOther(Bipartition::one_vs_rest(party, 3)));
        let cp_gap = average_gap(&cp, &s, &povm, party)?;
        let closed = tau_gap_closed_form(&s, &angles, party)?;
        let closure = [&tau, &sg, &ca_gap].iter().map(|r| (r.total_probability() - 1.0).abs()).fold(0.0, f64::max);
        let povm_seed: u64 = rng.gen();
        let plain = random_povm(povm_seed, false);
        let dressed = random_povm(povm_seed, true);
        let fill = MeasureId::fill();
        let drift = max_abs([&tangle, &s_id, &fill].into_iter().map(|m| {
            match (average_gap(m, &s, &plain, party), average_gap(m, &s, &dressed, party)) {
                (Ok(a), Ok(b)) => a.gap - b.gap,
                _ => f64::NAN,
            }
        }));
        let det = det_transformation_check(&s, &dressed, party)?;
        Ok(vec![
            tau.gap,
            sg.gap,
            ca_gap.gap,
            cp_gap.gap,
            (closed - tau.gap).abs(),
            closed,
            closure,
            drift,
            det,
        ])
    })
}

const DIAGONAL_METRICS: [Metric; 4] = [
    Metric::at_most("plain_concurrence_gap", 1e-9),
    Metric::at_most("squared_concurrence_gap", 1e-12),
    Metric::at_most("closed_form_mismatch", 1e-9),
    Metric::at_most("closed_form_plain_gap", 1e-9),
];

/// Standard-form coefficients from a normalized real Gaussian vector, with a
/// uniform phase.
fn random_acin<R: Rng>(rng: &mut R) -> Result<AcinParams<f64>> {
    let g: Vec<f64> = (0..5).map(|_| rng.sample::<f64, _>(StandardNormal).abs()).collect();
    let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let phi = rng.gen_range(0.0..=std::f64::consts::PI);
    AcinParams::new([g[0] / n, g[1] / n, g[2] / n, g[3] / n, g[4] / n], phi)
}

/// Diagonal POVMs on A: the plain concurrence of `rho_BC` is unchanged on
/// average, its square strictly decreases, and both match the closed forms.
pub fn diagonal(samples: usize, seed: u64) -> Result<Vec<Check>> {
    let bc = pair(1, 2);
    let c = MeasureId::plain(MeasureKind::Wootters(bc));
    let c2: MeasureId = "c2:BC".parse().expect("valid id");
    run_metrics(&DIAGONAL_METRICS, samples, seed, |child| {
        let mut rng = ChaCha8Rng::seed_from_u64(child);
        loop {
            let p = random_acin(&mut rng)?;
            let (x1, y1): (f64, f64) = (rng.gen(), rng.gen());
            let l0s = p.l[0] * p.l[0];
            let p1 = x1 * x1 * l0s + y1 * y1 * (1.0 - l0s);
            if !(1e-6..=1.0 - 1e-6).contains(&p1) {
                continue;
            }
            let s = acin_state(&p)?;
            let povm = diagonal_povm(x1, y1)?;
            let plain = average_gap(&c, &s, &povm, Party::A)?;
            let squared = average_gap(&c2, &s, &povm, Party::A)?;
            let (closed_sq, closed_plain) = diagonal_squared_concurrence_gap(&p, x1, y1)?;
            return Ok(vec![
                plain.gap.abs(),
                squared.gap.max(closed_sq),
                (squared.gap - closed_sq).abs(),
                closed_plain.abs(),
            ]);
        }
    })
}

/// The four published counterexamples at their printed parameters; a case
/// outside its window passes if the phase scan finds an in-window phase.
pub fn violations() -> Result<Vec<Check>> {
    PaperCase::ALL
        .into_par_iter()
        .map(|case| {
            let r = reproduce_case(case, false)?;
            let scan_ok = if r.in_window {
                true
            } else {
                reproduce_case(case, true)?.confirmed()
            };
            let (lo, hi) = r.window;
            Ok(Check {
                name: format!("{case}_gap_in_[{lo:e},{hi:e}]"),
                bound: Bound::AtMost,
                limit: Sig17(hi),
                worst: r.extended_gap.is_finite().then_some(Sig17(r.extended_gap)),
                worst_seed: None,
                passed: r.in_window || scan_ok,
            })
        })
        .collect()
}
