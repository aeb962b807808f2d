//! Binary local POVMs, post-measurement ensembles and the average gap
//! `M(psi) - sum_k p_k M(psi_k)` whose sign decides LOCC monotonicity.
//!
//! A positive gap is consistent with monotonicity; a negative gap is a
//! violation.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::measures::{acin_cbc_squared, evaluate, three_tangle, MeasureId};
use crate::qstate::{random_unitary, AcinParams, Party, PureState};
use crate::scalar::{cis, cx, norm_sqr, Real, C};

/// Outcomes less likely than this carry no post-measurement state.
pub const DEGENERATE_PROBABILITY: f64 = 1e-12;

/// Angles of `X_i = D_i V` with `D_1 = diag(sin varphi1, sin varphi2)`,
/// `D_2 = diag(cos varphi1, cos varphi2)` and
/// `V = [[cos psi1, -e^{i psi2} sin psi1], [sin psi1, e^{i psi2} cos psi1]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PovmAngles<T> {
    pub varphi1: T,
    pub varphi2: T,
    pub psi1: T,
    pub psi2: T,
}

impl<T: Real> PovmAngles<T> {
    pub fn new(varphi1: T, varphi2: T, psi1: T, psi2: T) -> Self {
        Self {
            varphi1,
            varphi2,
            psi1,
            psi2,
        }
    }

    pub fn to_array(self) -> [T; 4] {
        [self.varphi1, self.varphi2, self.psi1, self.psi2]
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// Whether every angle lies in `[-pi, pi]`.
    pub fn in_principal_range(&self) -> bool {
        let pi = T::PI();
        self.to_array().iter().all(|&x| x >= -pi && x <= pi)
    }

    /// `sin^2 varphi1` and `sin^2 varphi2`, the squared diagonal of `D_1`.
    pub fn sin_sq(&self) -> (T, T) {
        let (s1, s2) = (self.varphi1.sin(), self.varphi2.sin());
        (s1 * s1, s2 * s2)
    }
}

/// Two-outcome measurement `{X1, X2}` on one qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryPovm<T> {
    x1: CMatrix<T>,
    x2: CMatrix<T>,
}

fn det2<T: Real>(m: &CMatrix<T>) -> C<T> {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

impl<T: Real> BinaryPovm<T> {
    /// Validates shape and completeness `X1^dag X1 + X2^dag X2 = 1` within `1e-9`.
    pub fn new(x1: CMatrix<T>, x2: CMatrix<T>) -> Result<Self> {
        for x in [&x1, &x2] {
            if x.rows() != 2 || x.cols() != 2 {
                return Err(Error::InvalidParameter(format!(
                    "POVM operators must be 2x2, got {}x{}",
                    x.rows(),
                    x.cols()
                )));
            }
            if x.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidParameter("POVM operator has non-finite entries".into()));
            }
        }
        let povm = Self { x1, x2 };
        let res = povm.completeness_residual();
        if res > T::tol(1e-9) {
            return Err(Error::Incomplete(res.to_f64_lossy()));
        }
        Ok(povm)
    }

    pub fn x1(&self) -> &CMatrix<T> {
        &self.x1
    }

    pub fn x2(&self) -> &CMatrix<T> {
        &self.x2
    }

    pub fn operators(&self) -> [&CMatrix<T>; 2] {
        [&self.x1, &self.x2]
    }

    /// Largest entry of `|X1^dag X1 + X2^dag X2 - 1|`.
    pub fn completeness_residual(&self) -> T {
        let e = &(&self.x1.adjoint() * &self.x1) + &(&self.x2.adjoint() * &self.x2);
        e.max_abs_diff(&CMatrix::identity(2))
    }

    /// `|det X_k|^2` for both outcomes.
    pub fn det_sqr(&self) -> [T; 2] {
        [norm_sqr(det2(&self.x1)), norm_sqr(det2(&self.x2))]
    }

    /// `{U1 X1, U2 X2}`, an equivalent measurement followed by local unitaries.
    pub fn with_left_unitaries(&self, u1: &CMatrix<T>, u2: &CMatrix<T>) -> Result<Self> {
        for u in [u1, u2] {
            let res = u.unitarity_residual();
            if u.rows() != 2 || u.cols() != 2 || res > T::tol(1e-10) {
                return Err(Error::NotUnitary(res.to_f64_lossy()));
            }
        }
        Self::new(u1 * &self.x1, u2 * &self.x2)
    }
}

/// `X_i = D_i V` from the four angles. Complete up to `sin^2 + cos^2` roundoff.
pub fn povm_from_angles<T: Real>(a: &PovmAngles<T>) -> BinaryPovm<T> {
    let (s1, c1) = a.varphi1.sin_cos();
    let (s2, c2) = a.varphi2.sin_cos();
    let (sp, cp) = a.psi1.sin_cos();
    let ph = cis(a.psi2);
    let re = |x: T| cx(x, T::zero());
    let v = [re(cp), -ph * re(sp), re(sp), ph * re(cp)];
    let row_scaled = |d0: T, d1: T| {
        CMatrix::from_row_major(
            2,
            2,
            vec![v[0] * re(d0), v[1] * re(d0), v[2] * re(d1), v[3] * re(d1)],
        )
    };
    BinaryPovm {
        x1: row_scaled(s1, s2),
        x2: row_scaled(c1, c2),
    }
}

/// Diagonal measurement `X1 = diag(x1, y1)`, `X2 = diag(sqrt(1 - x1^2), sqrt(1 - y1^2))`.
pub fn diagonal_povm<T: Real>(x1: T, y1: T) -> Result<BinaryPovm<T>> {
    let unit = |v: T| v >= T::zero() && v <= T::one();
    if !unit(x1) || !unit(y1) {
        return Err(Error::InvalidParameter(format!(
            "diagonal POVM entries must lie in [0, 1], got x1 = {x1}, y1 = {y1}"
        )));
    }
    let comp = |v: T| (T::one() - v * v).max(T::zero()).sqrt();
    BinaryPovm::new(CMatrix::diagonal(&[x1, y1]), CMatrix::diagonal(&[comp(x1), comp(y1)]))
}

/// One branch of a measurement: its probability and, unless degenerate, the
/// normalized post-measurement state.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<T> {
    pub probability: T,
    pub state: Option<PureState<T>>,
}

/// Measures `party` with `povm`:
/// `p_k = ||X_k psi||^2`, `psi_k = X_k psi / sqrt(p_k)`.
pub fn apply_binary_povm<T: Real>(s: &PureState<T>, povm: &BinaryPovm<T>, party: Party) -> Result<Vec<Outcome<T>>> {
    s.check_party(party)?;
    let res = povm.completeness_residual();
    if res > T::tol(1e-9) {
        return Err(Error::Incomplete(res.to_f64_lossy()));
    }
    let cutoff = T::lit(DEGENERATE_PROBABILITY);
    Ok(povm
        .operators()
        .into_iter()
        .map(|x| {
            let amp = s.apply_local_raw(party, x);
            let p = amp.iter().fold(T::zero(), |a, &z| a + norm_sqr(z));
            let state = (p >= cutoff).then(|| PureState::from_normalized(s.n_qubits(), amp));
            Outcome { probability: p, state }
        })
        .collect())
}

/// Probability and measure value of one outcome; `value` is `None` for
/// outcomes excluded as degenerate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutcomeValue<T> {
    pub probability: T,
    pub value: Option<T>,
}

/// Measure value before a measurement, the outcome ensemble after it and
/// the average gap.
#[derive(Clone, Debug, PartialEq)]
pub struct GapReport<T> {
    pub measure: MeasureId,
    pub party: Party,
    pub value_before: T,
    pub outcomes: Vec<OutcomeValue<T>>,
    /// `value_before - sum_k p_k value_k` over non-degenerate outcomes.
    pub gap: T,
    pub degenerate_outcomes: usize,
}

impl<T: Real> GapReport<T> {
    /// `sum_k p_k` over all outcomes, degenerate ones included.
    pub fn total_probability(&self) -> T {
        self.outcomes.iter().fold(T::zero(), |a, o| a + o.probability)
    }

    pub fn is_violation(&self) -> bool {
        self.gap < T::zero()
    }
}

/// Average gap of `m` when `party` is measured with `povm`.
pub fn average_gap<T: Real>(m: &MeasureId, s: &PureState<T>, povm: &BinaryPovm<T>, party: Party) -> Result<GapReport<T>> {
    let value_before = evaluate(m, s)?;
    let mut outcomes = Vec::with_capacity(2);
    let mut after = T::zero();
    let mut degenerate = 0;
    for o in apply_binary_povm(s, povm, party)? {
        let value = match &o.state {
            Some(st) => {
                let v = evaluate(m, st)?;
                after = after + o.probability * v;
                Some(v)
            }
            None => {
                degenerate += 1;
                None
            }
        };
        outcomes.push(OutcomeValue {
            probability: o.probability,
            value,
        });
    }
    Ok(GapReport {
        measure: *m,
        party,
        value_before,
        outcomes,
        gap: value_before - after,
        degenerate_outcomes: degenerate,
    })
}

/// Three-tangle gap in closed form,
/// `tau / (p1 (1 - p1)) (p1 - sin^2 varphi1)(sin^2 varphi2 - p1)`.
///
/// Returns 0 when `p1` is within `1e-12` of 0 or 1.
pub fn tau_gap_closed_form<T: Real>(s: &PureState<T>, a: &PovmAngles<T>, party: Party) -> Result<T> {
    let povm = povm_from_angles(a);
    let outcomes = apply_binary_povm(s, &povm, party)?;
    let p1 = outcomes[0].probability;
    let cutoff = T::lit(DEGENERATE_PROBABILITY);
    if p1 < cutoff || T::one() - p1 < cutoff {
        return Ok(T::zero());
    }
    let tau = three_tangle(s, Party::A)?;
    let (s1, s2) = a.sin_sq();
    Ok(tau / (p1 * (T::one() - p1)) * (p1 - s1) * (s2 - p1))
}

/// Closed forms for the diagonal POVM on party A of a standard-form state:
/// `(-(x1^2 - y1^2)^2 l0^4 C^2(rho_BC) / (p1 p2), (1 - y1^2 - y2^2) C(rho_BC))`,
/// the gaps of `C^2(rho_BC)` and of `C(rho_BC)`.
pub fn diagonal_squared_concurrence_gap<T: Real>(p: &AcinParams<T>, x1: T, y1: T) -> Result<(T, T)> {
    let povm = diagonal_povm(x1, y1)?;
    let l0 = p.l[0];
    let l0s = l0 * l0;
    let p1 = x1 * x1 * l0s + y1 * y1 * (T::one() - l0s);
    let p2 = T::one() - p1;
    let cutoff = T::lit(DEGENERATE_PROBABILITY);
    if p1 < cutoff || p2 < cutoff {
        return Err(Error::DegenerateProbability(p1.to_f64_lossy()));
    }
    let c2 = acin_cbc_squared(p).max(T::zero());
    let d = x1 * x1 - y1 * y1;
    let squared = -(d * d) * l0s * l0s * c2 / (p1 * p2);
    let y2 = povm.x2()[(1, 1)].re;
    let plain = (T::one() - y1 * y1 - y2 * y2) * c2.sqrt();
    Ok((squared, plain))
}

/// Uniform angles in `[-pi, pi]`.
pub fn sample_povm_angles<T: Real, R: Rng + ?Sized>(rng: &mut R) -> PovmAngles<T> {
    let mut draw = || T::lit(rng.gen_range(-std::f64::consts::PI..=std::f64::consts::PI));
    let (a, b, c, d) = (draw(), draw(), draw(), draw());
    PovmAngles::new(a, b, c, d)
}

/// Seeded random POVM. The angles are drawn first, so toggling
/// `with_left_unitaries` only appends Haar unitaries `U_k X_k`.
pub fn random_povm<T: Real>(seed: u64, with_left_unitaries: bool) -> BinaryPovm<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let povm = povm_from_angles(&sample_povm_angles(&mut rng));
    if !with_left_unitaries {
        return povm;
    }
    let u1: CMatrix<T> = random_unitary(&mut rng);
    let u2: CMatrix<T> = random_unitary(&mut rng);
    BinaryPovm {
        x1: &u1 * &povm.x1,
        x2: &u2 * &povm.x2,
    }
}

/// Largest `|tau(psi_k) - tau(psi) |det X_k|^2 / p_k^2|` over non-degenerate outcomes.
pub fn det_transformation_check<T: Real>(s: &PureState<T>, povm: &BinaryPovm<T>, party: Party) -> Result<T> {
    let tau = three_tangle(s, Party::A)?;
    let dets = povm.det_sqr();
    let mut worst = T::zero();
    for (o, d) in apply_binary_povm(s, povm, party)?.iter().zip(dets) {
        if let Some(st) = &o.state {
            let predicted = tau * d / (o.probability * o.probability);
            worst = worst.max((three_tangle(st, Party::A)? - predicted).abs());
        }
    }
    Ok(worst)
}
