//! Pure qubit states, their standard-form constructors and reduced density
//! matrices.
//!
//! Amplitude index bits are ordered with party A as the most significant bit,
//! so for three qubits index `0b101` is `|1>_A |0>_B |1>_C`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::scalar::{cis, conj, cx, czero, norm_sqr, scale, Real, C};

/// Largest qubit count accepted by the constructors.
pub const MAX_QUBITS: usize = 20;

/// One party, `0 = A`, `1 = B`, and so on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Party(pub usize);

impl Party {
    pub const A: Party = Party(0);
    pub const B: Party = Party(1);
    pub const C: Party = Party(2);

    pub fn letter(self) -> char {
        (b'A' + self.0 as u8) as char
    }

    pub fn from_letter(c: char) -> Result<Self> {
        let c = c.to_ascii_uppercase();
        if c.is_ascii_uppercase() {
            Ok(Party((c as u8 - b'A') as usize))
        } else {
            Err(Error::BadSubset(format!("`{c}` is not a party letter")))
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Party {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Party::from_letter(c),
            _ => Err(Error::BadSubset(format!("`{s}` is not a single party"))),
        }
    }
}

/// A set of parties as a bit mask (bit `i` set means party `i` is included).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct PartySet(pub u32);

impl PartySet {
    pub fn from_parties(parties: impl IntoIterator<Item = Party>) -> Self {
        PartySet(parties.into_iter().fold(0, |m, p| m | (1 << p.0)))
    }

    pub fn all(n: usize) -> Self {
        PartySet((1u32 << n) - 1)
    }

    pub fn contains(self, p: Party) -> bool {
        self.0 & (1 << p.0) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self, n: usize) -> Self {
        PartySet(!self.0 & Self::all(n).0)
    }

    pub fn parties(self) -> impl Iterator<Item = Party> {
        (0..32).filter(move |i| self.0 & (1 << i) != 0).map(Party)
    }

    /// Largest party index plus one, or zero for the empty set.
    pub fn span(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }
}

impl fmt::Display for PartySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.parties() {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for PartySet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut set = PartySet::default();
        for c in s.trim().chars() {
            let p = Party::from_letter(c)?;
            if set.contains(p) {
                return Err(Error::BadSubset(format!("party {p} repeated in `{s}`")));
            }
            set = PartySet(set.0 | (1 << p.0));
        }
        if set.is_empty() {
            return Err(Error::BadSubset("empty party set".into()));
        }
        Ok(set)
    }
}

/// Normalized pure state on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    n: usize,
    amp: Vec<C<T>>,
    renormalized: bool,
}

fn check_qubits(n: usize) -> Result<()> {
    if (2..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::QubitCount(n))
    }
}

impl<T: Real> PureState<T> {
    /// Normalizes `amp` and records whether the input norm was off by more than `1e-9`.
    pub fn new(n: usize, amp: Vec<C<T>>) -> Result<Self> {
        check_qubits(n)?;
        let expected = 1usize << n;
        if amp.len() != expected {
            return Err(Error::DimensionMismatch {
                n,
                expected,
                got: amp.len(),
            });
        }
        let norm2 = amp.iter().fold(T::zero(), |a, &z| a + norm_sqr(z));
        let norm = norm2.sqrt();
        if norm.is_nan() || norm <= T::lit(1e-12) {
            return Err(Error::ZeroVector);
        }
        let dev = (norm2 - T::one()).abs();
        let renormalized = dev > T::tol(1e-9);
        // Inputs normalized to roundoff are kept bit-for-bit.
        if dev <= T::precision() * T::lit(8.0) {
            return Ok(Self { n, amp, renormalized });
        }
        let inv = T::one() / norm;
        Ok(Self {
            n,
            amp: amp.into_iter().map(|z| scale(z, inv)).collect(),
            renormalized,
        })
    }

    /// Wraps amplitudes that are already normalized up to roundoff, rescaling
    /// silently.
    pub(crate) fn from_normalized(n: usize, amp: Vec<C<T>>) -> Self {
        let norm2 = amp.iter().fold(T::zero(), |a, &z| a + norm_sqr(z));
        let inv = T::one() / norm2.sqrt();
        Self {
            n,
            amp: amp.into_iter().map(|z| scale(z, inv)).collect(),
            renormalized: false,
        }
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        let mut amp = vec![czero(); 1 << n];
        *amp
            .get_mut(index)
            .ok_or_else(|| Error::InvalidParameter(format!("basis index {index} out of range")))? =
            cx(T::one(), T::zero());
        Ok(Self {
            n,
            amp,
            renormalized: false,
        })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amp
    }

    /// Whether construction had to rescale the input by more than `1e-9`.
    #[inline]
    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn norm_sqr(&self) -> T {
        self.amp.iter().fold(T::zero(), |a, &z| a + norm_sqr(z))
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        self.amp
            .iter()
            .zip(&other.amp)
            .fold(czero(), |acc, (&a, &b)| acc + conj(a) * b)
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> T {
        norm_sqr(self.inner(other))
    }

    pub fn check_party(&self, p: Party) -> Result<()> {
        if p.0 < self.n {
            Ok(())
        } else {
            Err(Error::BadSubset(format!(
                "party {p} does not exist in a {}-qubit state",
                self.n
            )))
        }
    }

    #[inline]
    fn bit_of(&self, index: usize, p: Party) -> usize {
        (index >> (self.n - 1 - p.0)) & 1
    }

    /// Reshapes the amplitudes into a `2^|side| x 2^(n-|side|)` matrix whose row
    /// index enumerates the parties in `side` and whose column index enumerates
    /// the rest, both in party order with the first party most significant.
    pub fn matricize(&self, side: PartySet) -> CMatrix<T> {
        let k = side.len();
        let mut m = CMatrix::zeros(1 << k, 1 << (self.n - k));
        for (idx, &a) in self.amp.iter().enumerate() {
            let (mut r, mut c) = (0usize, 0usize);
            for i in 0..self.n {
                let b = self.bit_of(idx, Party(i));
                if side.contains(Party(i)) {
                    r = (r << 1) | b;
                } else {
                    c = (c << 1) | b;
                }
            }
            m[(r, c)] = a;
        }
        m
    }

    /// Amplitudes of `(op on party) |self>`, not renormalized.
    pub(crate) fn apply_local_raw(&self, party: Party, op: &CMatrix<T>) -> Vec<C<T>> {
        let shift = self.n - 1 - party.0;
        let mask = 1usize << shift;
        let mut out = vec![czero(); self.amp.len()];
        for idx in 0..self.amp.len() {
            if idx & mask != 0 {
                continue;
            }
            let a0 = self.amp[idx];
            let a1 = self.amp[idx | mask];
            out[idx] = op[(0, 0)] * a0 + op[(0, 1)] * a1;
            out[idx | mask] = op[(1, 0)] * a0 + op[(1, 1)] * a1;
        }
        out
    }

    /// Relabels parties: party `i` of the result is party `perm[i]` of `self`.
    pub fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n || perm.iter().any(|&p| p >= self.n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter(format!(
                "{perm:?} is not a permutation of {} parties",
                self.n
            )));
        }
        let mut amp = vec![czero(); self.amp.len()];
        for (idx, &a) in self.amp.iter().enumerate() {
            let mut new_idx = 0usize;
            for &p in perm {
                new_idx = (new_idx << 1) | self.bit_of(idx, Party(p));
            }
            amp[new_idx] = a;
        }
        Ok(Self {
            n: self.n,
            amp,
            renormalized: false,
        })
    }

    /// Converts the scalar type through `f64`.
    pub fn cast<U: Real>(&self) -> PureState<U> {
        PureState {
            n: self.n,
            amp: self
                .amp
                .iter()
                .map(|z| cx(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy())))
                .collect(),
            renormalized: self.renormalized,
        }
    }
}

/// `make_pure_state` in functional form.
pub fn make_pure_state<T: Real>(n: usize, amp: Vec<C<T>>) -> Result<PureState<T>> {
    PureState::new(n, amp)
}

/// Coefficients of the five-term three-qubit standard form
/// `l0|000> + l1 e^{i phi}|100> + l2|101> + l3|110> + l4|111>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcinParams<T> {
    pub l: [T; 5],
    pub phi: T,
}

impl<T: Real> AcinParams<T> {
    /// Rejects coefficient sets whose squares do not sum to one within `1e-6`.
    pub fn new(l: [T; 5], phi: T) -> Result<Self> {
        if l.iter().any(|x| !x.is_finite()) || !phi.is_finite() {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        let p = Self { l, phi };
        let dev = (p.norm_sqr() - T::one()).abs();
        if dev > T::tol(1e-6) {
            return Err(Error::NotNormalized(p.norm_sqr().to_f64_lossy()));
        }
        Ok(p)
    }

    /// Fixes `l0 >= 0` from `l1..l4` so the coefficients are normalized.
    pub fn with_derived_l0(l1: T, l2: T, l3: T, l4: T, phi: T) -> Result<Self> {
        let rest = l1 * l1 + l2 * l2 + l3 * l3 + l4 * l4;
        if rest > T::one() {
            return Err(Error::NotNormalized(rest.to_f64_lossy()));
        }
        Self::new([(T::one() - rest).sqrt(), l1, l2, l3, l4], phi)
    }

    pub fn norm_sqr(&self) -> T {
        self.l.iter().fold(T::zero(), |a, &x| a + x * x)
    }

    /// Whether the coefficients are in canonical range: all `l >= 0` and `phi` in `[0, pi]`.
    ///
    /// Not enforced; the angle parametrization produces signed coefficients.
    pub fn is_canonical(&self) -> bool {
        self.l.iter().all(|&x| x >= T::zero()) && self.phi >= T::zero() && self.phi <= T::PI()
    }
}

/// Standard-form state.
pub fn acin_state<T: Real>(p: &AcinParams<T>) -> Result<PureState<T>> {
    let p = AcinParams::new(p.l, p.phi)?;
    let mut amp = vec![czero(); 8];
    let re = |x: T| cx(x, T::zero());
    amp[0b000] = re(p.l[0]);
    amp[0b100] = cis(p.phi) * p.l[1];
    amp[0b101] = re(p.l[2]);
    amp[0b110] = re(p.l[3]);
    amp[0b111] = re(p.l[4]);
    PureState::new(3, amp)
}

/// Hyperspherical angles for the standard-form coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaParams<T> {
    pub theta: [T; 4],
    pub phi: T,
}

/// `l_j = cos(theta_{j+1}) prod_{i<=j} sin(theta_i)` for `j <= 3` and
/// `l_4 = prod_{i=1..4} sin(theta_i)`.
pub fn acin_from_thetas<T: Real>(t: &ThetaParams<T>) -> AcinParams<T> {
    let mut l = [T::zero(); 5];
    let mut prod = T::one();
    for (j, &th) in t.theta.iter().enumerate() {
        let (s, c) = th.sin_cos();
        l[j] = c * prod;
        prod = prod * s;
    }
    l[4] = prod;
    AcinParams { l, phi: t.phi }
}

/// Angles reproducing `p` under [`acin_from_thetas`]:
/// `theta_{j+1} = atan2(sqrt(sum_{m>j} l_m^2), l_j)`.
pub fn thetas_from_acin<T: Real>(p: &AcinParams<T>) -> ThetaParams<T> {
    let mut theta = [T::zero(); 4];
    for (j, th) in theta.iter_mut().enumerate() {
        let tail = p.l[j + 1..].iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
        *th = tail.atan2(p.l[j]);
    }
    ThetaParams { theta, phi: p.phi }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedState {
    Ghz3,
    W3,
    Product3,
    /// `|0>_A (|00> + |11>)/sqrt(2)`.
    BisepA,
    Ghz4,
    ProductN(usize),
}

impl FromStr for NamedState {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Ok(match s.as_str() {
            "ghz3" | "ghz" => NamedState::Ghz3,
            "w3" | "w" => NamedState::W3,
            "product3" => NamedState::Product3,
            "bisep_a" => NamedState::BisepA,
            "ghz4" => NamedState::Ghz4,
            other => {
                let n = other
                    .strip_prefix("product_n:")
                    .or_else(|| other.strip_prefix("product"))
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| Error::UnknownName(s.clone()))?;
                NamedState::ProductN(n)
            }
        })
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedState::Ghz3 => write!(f, "ghz3"),
            NamedState::W3 => write!(f, "w3"),
            NamedState::Product3 => write!(f, "product3"),
            NamedState::BisepA => write!(f, "bisep_a"),
            NamedState::Ghz4 => write!(f, "ghz4"),
            NamedState::ProductN(n) => write!(f, "product_n:{n}"),
        }
    }
}

pub fn named_state<T: Real>(name: NamedState) -> Result<PureState<T>> {
    let h = T::FRAC_1_SQRT_2();
    let re = |x: T| cx(x, T::zero());
    let (n, entries): (usize, Vec<(usize, T)>) = match name {
        NamedState::Ghz3 => (3, vec![(0b000, h), (0b111, h)]),
        NamedState::W3 => {
            let w = T::one() / T::lit(3.0).sqrt();
            (3, vec![(0b100, w), (0b010, w), (0b001, w)])
        }
        NamedState::Product3 => (3, vec![(0, T::one())]),
        NamedState::BisepA => (3, vec![(0b000, h), (0b011, h)]),
        NamedState::Ghz4 => (4, vec![(0b0000, h), (0b1111, h)]),
        NamedState::ProductN(n) => {
            check_qubits(n)?;
            (n, vec![(0, T::one())])
        }
    };
    let mut amp = vec![czero(); 1 << n];
    for (i, a) in entries {
        amp[i] = re(a);
    }
    Ok(PureState {
        n,
        amp,
        renormalized: false,
    })
}

/// Hermitian, unit-trace, positive semidefinite matrix on one or two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    m: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if !m.is_square() || !(m.rows() == 2 || m.rows() == 4) {
            return Err(Error::InvalidDensity(format!(
                "shape {}x{} (need 2x2 or 4x4)",
                m.rows(),
                m.cols()
            )));
        }
        let herm = m.hermiticity_residual();
        if herm > T::tol(1e-10) {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (residual {:e})",
                herm.to_f64_lossy()
            )));
        }
        let tr = m.trace().re;
        if (tr - T::one()).abs() > T::tol(1e-9) {
            return Err(Error::InvalidDensity(format!("trace {}", tr.to_f64_lossy())));
        }
        let eig = hermitian_eigen(&m);
        let min = eig.values.last().copied().unwrap_or_else(T::zero);
        if min < -T::tol(1e-10) {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {:e}",
                min.to_f64_lossy()
            )));
        }
        Ok(Self { m })
    }

    /// Projector onto a normalized vector.
    pub fn from_pure(v: &[C<T>]) -> Result<Self> {
        let norm2 = v.iter().fold(T::zero(), |a, &z| a + norm_sqr(z));
        if norm2.is_nan() || norm2 <= T::zero() {
            return Err(Error::ZeroVector);
        }
        let inv = T::one() / norm2;
        let m = CMatrix::from_fn(v.len(), v.len(), |i, j| scale(v[i] * conj(v[j]), inv));
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn purity(&self) -> T {
        // Tr rho^2 = ||rho||_F^2 for Hermitian rho.
        self.m.frobenius_sqr()
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigen(&self.m).values
    }
}

/// Partial trace onto `keep` (one or two parties).
pub fn reduced_density<T: Real>(s: &PureState<T>, keep: PartySet) -> Result<DensityMatrix<T>> {
    let n = s.n_qubits();
    if keep.is_empty() || keep.span() > n || keep.len() >= n || keep.len() > 2 {
        return Err(Error::BadSubset(format!(
            "`{keep}` is not a proper subset of one or two parties of a {n}-qubit state"
        )));
    }
    let m = s.matricize(keep);
    DensityMatrix::new(&m * &m.adjoint())
}

/// Haar-random pure state from normalized complex Gaussian amplitudes.
pub fn random_pure_state<T: Real>(seed: u64, n: usize) -> Result<PureState<T>> {
    check_qubits(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(random_pure_state_with(&mut rng, n))
}

pub(crate) fn random_pure_state_with<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> PureState<T> {
    let amp: Vec<C<T>> = (0..1usize << n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            cx(T::lit(re), T::lit(im))
        })
        .collect();
    PureState::from_normalized(n, amp)
}

/// Haar-random 2x2 unitary: Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R) -> CMatrix<T> {
    let mut g = |_: usize, _: usize| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        cx(T::lit(re), T::lit(im))
    };
    let a: Vec<C<T>> = (0..2).map(|i| g(i, 0)).collect();
    let b: Vec<C<T>> = (0..2).map(|i| g(i, 1)).collect();
    let na = (norm_sqr(a[0]) + norm_sqr(a[1])).sqrt();
    let u0: Vec<C<T>> = a.iter().map(|&z| scale(z, T::one() / na)).collect();
    let proj = conj(u0[0]) * b[0] + conj(u0[1]) * b[1];
    let w: Vec<C<T>> = (0..2).map(|i| b[i] - u0[i] * proj).collect();
    let nw = (norm_sqr(w[0]) + norm_sqr(w[1])).sqrt();
    let u1: Vec<C<T>> = w.iter().map(|&z| scale(z, T::one() / nw)).collect();
    CMatrix::from_row_major(2, 2, vec![u0[0], u1[0], u0[1], u1[1]])
}

pub fn random_unitary_seeded<T: Real>(seed: u64) -> CMatrix<T> {
    random_unitary(&mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn apply_local_unitary<T: Real>(s: &PureState<T>, party: Party, u: &CMatrix<T>) -> Result<PureState<T>> {
    s.check_party(party)?;
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::InvalidParameter("local unitary must be 2x2".into()));
    }
    let res = u.unitarity_residual();
    if res > T::tol(1e-10) {
        return Err(Error::NotUnitary(res.to_f64_lossy()));
    }
    Ok(PureState::from_normalized(s.n_qubits(), s.apply_local_raw(party, u)))
}
