//! Entanglement quantifiers for pure qubit states.
//!
//! Several quantities have more than one closed form (the fill through the
//! triangle sides, through the three-tangle, or through the concurrence of
//! assistance). The default route of each function is noted on it and the
//! alternatives are exported under `*_via_*` names so they can be checked
//! against each other.
//!
//! Squared one-to-other concurrences are computed from the 2x2 minors of the
//! amplitude matrix, `C^2 = 4 e_2(rho)`, rather than `2(1 - Tr rho^2)`; the
//! two agree exactly in real arithmetic, but the minor sum does not cancel
//! catastrophically for nearly product states.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, psd_sqrt, singular_values, CMatrix};
use crate::qstate::{AcinParams, DensityMatrix, Party, PartySet, PureState};
use crate::scalar::{cx, czero, norm_sqr, Real, C};

/// Above this many 2x2 minors the squared concurrence falls back to the purity.
const MINOR_BUDGET: usize = 1 << 16;

/// A cut `S1 | S2` of the parties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    pub left: PartySet,
    pub right: PartySet,
}

impl Bipartition {
    pub fn new(left: PartySet, right: PartySet) -> Result<Self> {
        if left.is_empty() || right.is_empty() || left.0 & right.0 != 0 {
            return Err(Error::BadBipartition(format!("{left}|{right}")));
        }
        Ok(Self { left, right })
    }

    /// `party | everyone else` for an `n`-party system.
    pub fn one_vs_rest(party: Party, n: usize) -> Self {
        let left = PartySet::from_parties([party]);
        Self {
            left,
            right: left.complement(n),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let all = PartySet::all(n);
        if self.left.0 | self.right.0 != all.0 || self.left.span() > n || self.right.span() > n {
            return Err(Error::BadBipartition(format!(
                "{self} does not partition {n} parties"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.left, self.right)
    }
}

impl FromStr for Bipartition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (l, r) = s
            .split_once('|')
            .ok_or_else(|| Error::BadBipartition(format!("`{s}` has no `|`")))?;
        Self::new(l.parse()?, r.parse()?)
    }
}

fn require_three<T: Real>(s: &PureState<T>) -> Result<()> {
    if s.n_qubits() == 3 {
        Ok(())
    } else {
        Err(Error::WrongQubitCount {
            expected: "exactly 3",
            got: s.n_qubits(),
        })
    }
}

fn check_pair<T: Real>(s: &PureState<T>, pair: PartySet) -> Result<()> {
    if pair.len() != 2 || pair.span() > s.n_qubits() {
        return Err(Error::BadSubset(format!(
            "`{pair}` is not a pair of parties of a {}-qubit state",
            s.n_qubits()
        )));
    }
    Ok(())
}

/// Squared concurrence across `side | rest`: `4 e_2(rho_side)`, normalized by
/// the state norm.
pub fn one_to_other_squared<T: Real>(s: &PureState<T>, side: PartySet) -> Result<T> {
    let n = s.n_qubits();
    if side.is_empty() || side.len() >= n || side.span() > n {
        return Err(Error::BadBipartition(format!("`{side}` in a {n}-qubit state")));
    }
    let m = s.matricize(side);
    let (d1, d2) = (m.rows(), m.cols());
    let norm2 = s.norm_sqr();
    let pairs = |d: usize| d * (d - 1) / 2;
    if pairs(d1).saturating_mul(pairs(d2)) <= MINOR_BUDGET {
        let mut e2 = T::zero();
        for i in 0..d1 {
            for k in (i + 1)..d1 {
                for j in 0..d2 {
                    let (a, b) = (m[(i, j)], m[(k, j)]);
                    if a == czero() && b == czero() {
                        continue;
                    }
                    for l in (j + 1)..d2 {
                        e2 = e2 + norm_sqr(a * m[(k, l)] - m[(i, l)] * b);
                    }
                }
            }
        }
        Ok(T::lit(4.0) * e2 / (norm2 * norm2))
    } else {
        let g = if d1 <= d2 { &m * &m.adjoint() } else { &m.adjoint() * &m };
        let purity = g.frobenius_sqr() / (norm2 * norm2);
        Ok((T::lit(2.0) * (T::one() - purity)).max(T::zero()))
    }
}

/// `2 (1 - Tr rho^2)` from the reduced density matrix directly.
pub fn one_to_other_squared_via_purity<T: Real>(s: &PureState<T>, side: PartySet) -> Result<T> {
    let n = s.n_qubits();
    if side.is_empty() || side.len() >= n || side.span() > n {
        return Err(Error::BadBipartition(format!("`{side}` in a {n}-qubit state")));
    }
    let m = s.matricize(side);
    let rho = &m * &m.adjoint();
    Ok(T::lit(2.0) * (T::one() - rho.frobenius_sqr()))
}

/// `C(S1|S2) = sqrt(2 (1 - Tr rho_{S1}^2))`.
pub fn one_to_other_concurrence<T: Real>(s: &PureState<T>, part: &Bipartition) -> Result<T> {
    part.check(s.n_qubits())?;
    Ok(one_to_other_squared(s, part.left)?.sqrt())
}

/// Spin-flip values `lambda_1 >= ... >= lambda_4` from a factor `X` with
/// `rho = X X^dagger`: the singular values of `X^T (sigma_y x sigma_y) X`.
pub fn spin_flip_values_from_factor<T: Real>(x: &CMatrix<T>) -> [T; 4] {
    assert_eq!(x.rows(), 4, "two-qubit factor must have four rows");
    // sigma_y (x) sigma_y = antidiag(-1, 1, 1, -1)
    let flipped = CMatrix::from_fn(4, x.cols(), |i, j| {
        let z = x[(3 - i, j)];
        if i == 0 || i == 3 {
            -z
        } else {
            z
        }
    });
    let y = &x.transpose() * &flipped;
    let sv = singular_values(&y);
    let mut out = [T::zero(); 4];
    for (o, v) in out.iter_mut().zip(sv) {
        *o = v;
    }
    out
}

/// Factor `X = V sqrt(D)` of a density matrix, dropping eigenvalues at roundoff level.
fn density_factor<T: Real>(rho: &DensityMatrix<T>) -> CMatrix<T> {
    let eig = hermitian_eigen(rho.matrix());
    let cut = T::precision() * T::lit(256.0);
    let keep: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > cut).collect();
    let keep = if keep.is_empty() { vec![0] } else { keep };
    CMatrix::from_fn(rho.dim(), keep.len(), |i, k| {
        let col = keep[k];
        eig.vectors[(i, col)] * eig.values[col].max(T::zero()).sqrt()
    })
}

fn check_two_qubit<T: Real>(rho: &DensityMatrix<T>) -> Result<()> {
    if rho.dim() == 4 {
        Ok(())
    } else {
        Err(Error::InvalidDensity(format!(
            "expected a two-qubit state, got dimension {}",
            rho.dim()
        )))
    }
}

/// Spin-flip values through an explicit factor of `rho` (singular-value route).
pub fn spin_flip_values<T: Real>(rho: &DensityMatrix<T>) -> Result<[T; 4]> {
    check_two_qubit(rho)?;
    Ok(spin_flip_values_from_factor(&density_factor(rho)))
}

/// Spin-flip values as square roots of the eigenvalues of
/// `rho (sigma_y x sigma_y) rho^* (sigma_y x sigma_y)`, evaluated through the
/// similar Hermitian matrix `sqrt(rho) rho~ sqrt(rho)`.
///
/// Loses about half the digits on eigenvalues near zero (the square root of
/// roundoff), so it serves as a cross-check rather than the default.
pub fn spin_flip_values_spectral<T: Real>(rho: &DensityMatrix<T>) -> Result<[T; 4]> {
    check_two_qubit(rho)?;
    let yy = CMatrix::from_fn(4, 4, |i, j| {
        if i + j == 3 {
            if i == 0 || i == 3 {
                cx(-T::one(), T::zero())
            } else {
                cx(T::one(), T::zero())
            }
        } else {
            czero()
        }
    });
    let tilde = &(&yy * &rho.matrix().conjugate()) * &yy;
    let root = psd_sqrt(rho.matrix());
    let h = &(&root * &tilde) * &root;
    let eig = hermitian_eigen(&h);
    let mut out = [T::zero(); 4];
    for (o, v) in out.iter_mut().zip(eig.values) {
        // eigenvalues within -1e-12 of zero are roundoff
        *o = v.max(T::zero()).sqrt();
    }
    Ok(out)
}

fn concurrence_from_values<T: Real>(l: &[T; 4]) -> T {
    (l[0] - l[1] - l[2] - l[3]).max(T::zero())
}

fn assistance_from_values<T: Real>(l: &[T; 4]) -> T {
    l[0] + l[1] + l[2] + l[3]
}

/// `C(rho) = max(0, lambda_1 - lambda_2 - lambda_3 - lambda_4)`.
pub fn wootters_concurrence<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    Ok(concurrence_from_values(&spin_flip_values(rho)?))
}

/// `C_a(rho) = lambda_1 + lambda_2 + lambda_3 + lambda_4`.
pub fn concurrence_of_assistance<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    Ok(assistance_from_values(&spin_flip_values(rho)?))
}

/// Spin-flip values of the reduction of `s` onto `pair`. The amplitude matrix
/// with the pair as rows is already a factor of the reduced state.
pub fn pair_spin_flip_values<T: Real>(s: &PureState<T>, pair: PartySet) -> Result<[T; 4]> {
    check_pair(s, pair)?;
    let x = s.matricize(pair);
    let mut l = spin_flip_values_from_factor(&x);
    let norm2 = s.norm_sqr();
    for v in &mut l {
        *v = *v / norm2;
    }
    Ok(l)
}

/// Wootters concurrence of the two-party reduction.
pub fn pair_concurrence<T: Real>(s: &PureState<T>, pair: PartySet) -> Result<T> {
    Ok(concurrence_from_values(&pair_spin_flip_values(s, pair)?))
}

/// Concurrence of assistance of the two-party reduction.
pub fn pair_assistance<T: Real>(s: &PureState<T>, pair: PartySet) -> Result<T> {
    Ok(assistance_from_values(&pair_spin_flip_values(s, pair)?))
}

fn others(pivot: Party) -> (Party, Party) {
    match pivot.0 {
        0 => (Party(1), Party(2)),
        1 => (Party(0), Party(2)),
        _ => (Party(0), Party(1)),
    }
}

fn pair_of(a: Party, b: Party) -> PartySet {
    PartySet::from_parties([a, b])
}

/// Three-tangle with the raw CKW residual before clamping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangleEstimate<T> {
    pub value: T,
    /// `C^2(pivot|rest) - C^2(rho_pivot,j) - C^2(rho_pivot,k)` before clamping to `[0, 1]`.
    pub raw: T,
}

pub fn three_tangle_detail<T: Real>(s: &PureState<T>, pivot: Party) -> Result<TangleEstimate<T>> {
    require_three(s)?;
    s.check_party(pivot)?;
    let (j, k) = others(pivot);
    let side = one_to_other_squared(s, PartySet::from_parties([pivot]))?;
    let cj = pair_concurrence(s, pair_of(pivot, j))?;
    let ck = pair_concurrence(s, pair_of(pivot, k))?;
    let raw = side - cj * cj - ck * ck;
    Ok(TangleEstimate {
        value: raw.max(T::zero()).min(T::one()),
        raw,
    })
}

/// Three-tangle through the CKW relation on `pivot`.
pub fn three_tangle<T: Real>(s: &PureState<T>, pivot: Party) -> Result<T> {
    Ok(three_tangle_detail(s, pivot)?.value)
}

/// Three-tangle as `C_a^2(rho_pair) - C^2(rho_pair)`.
pub fn tangle_via_assistance<T: Real>(s: &PureState<T>, pair: PartySet) -> Result<T> {
    require_three(s)?;
    let l = pair_spin_flip_values(s, pair)?;
    let ca = assistance_from_values(&l);
    let c = concurrence_from_values(&l);
    Ok(ca * ca - c * c)
}

fn side_squares<T: Real>(s: &PureState<T>) -> Result<[T; 3]> {
    require_three(s)?;
    let mut out = [T::zero(); 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = one_to_other_squared(s, PartySet::from_parties([Party(i)]))?;
    }
    Ok(out)
}

fn pair_squares<T: Real>(s: &PureState<T>) -> Result<[T; 3]> {
    // indexed by the party left out: [C^2(BC), C^2(AC), C^2(AB)]
    let mut out = [T::zero(); 3];
    for (i, o) in out.iter_mut().enumerate() {
        let (j, k) = others(Party(i));
        let c = pair_concurrence(s, pair_of(j, k))?;
        *o = c * c;
    }
    Ok(out)
}

/// Sum of the three squared one-to-other concurrences.
pub fn perimeter<T: Real>(s: &PureState<T>) -> Result<T> {
    let c = side_squares(s)?;
    Ok(c[0] + c[1] + c[2])
}

/// `3 tau + 2 [C^2(rho_AB) + C^2(rho_AC) + C^2(rho_BC)]`.
pub fn perimeter_via_tangle<T: Real>(s: &PureState<T>) -> Result<T> {
    require_three(s)?;
    let tau = three_tangle_detail(s, Party::A)?.raw;
    let p = pair_squares(s)?;
    Ok(T::lit(3.0) * tau + T::lit(2.0) * (p[0] + p[1] + p[2]))
}

fn fill_from_factors<T: Real>(perimeter: T, factors: [T; 3]) -> T {
    let prod = factors
        .iter()
        .fold(perimeter / T::lit(3.0), |acc, &f| acc * f.max(T::zero()));
    prod.max(T::zero()).sqrt().sqrt()
}

/// Square root of the area of the concurrence triangle,
/// `[(P/3) prod_i (P - 2 C^2(i|jk))]^{1/4}`.
pub fn concurrence_fill<T: Real>(s: &PureState<T>) -> Result<T> {
    let c = side_squares(s)?;
    let p = c[0] + c[1] + c[2];
    Ok(fill_from_factors(p, [p - T::lit(2.0) * c[0], p - T::lit(2.0) * c[1], p - T::lit(2.0) * c[2]]))
}

/// The triangle factors `P - 2 C^2(i|jk)` for `i = A, B, C`, unclamped.
pub fn triangle_factors<T: Real>(s: &PureState<T>) -> Result<[T; 3]> {
    let c = side_squares(s)?;
    let p = c[0] + c[1] + c[2];
    Ok([p - T::lit(2.0) * c[0], p - T::lit(2.0) * c[1], p - T::lit(2.0) * c[2]])
}

/// Fill from the three-tangle and reduced concurrences:
/// `{[tau + 2 sum C^2 / 3] prod_{jk} (tau + 2 C^2(rho_jk))}^{1/4}`.
pub fn fill_via_tangle<T: Real>(s: &PureState<T>) -> Result<T> {
    require_three(s)?;
    let tau = three_tangle_detail(s, Party::A)?.raw;
    let q = pair_squares(s)?;
    let two = T::lit(2.0);
    let head = tau + two * (q[0] + q[1] + q[2]) / T::lit(3.0);
    let prod = [q[0], q[1], q[2]]
        .iter()
        .fold(head, |acc, &c2| acc * (tau + two * c2).max(T::zero()));
    Ok(prod.max(T::zero()).sqrt().sqrt())
}

/// Fill from the reduced concurrences and concurrences of assistance only.
pub fn fill_via_assistance<T: Real>(s: &PureState<T>) -> Result<T> {
    require_three(s)?;
    let mut terms = [T::zero(); 3];
    for (i, t) in terms.iter_mut().enumerate() {
        let (j, k) = others(Party(i));
        let l = pair_spin_flip_values(s, pair_of(j, k))?;
        let c = concurrence_from_values(&l);
        let ca = assistance_from_values(&l);
        *t = c * c + ca * ca;
    }
    let p = terms[0] + terms[1] + terms[2];
    Ok(terms
        .iter()
        .fold(p / T::lit(3.0), |acc, &t| acc * t)
        .max(T::zero())
        .sqrt()
        .sqrt())
}

/// `G_jk = tau + 2 C^2(rho_jk)`, the triangle factor opposite the remaining party.
pub fn g_quantity<T: Real>(s: &PureState<T>, pair: PartySet) -> Result<T> {
    require_three(s)?;
    check_pair(s, pair)?;
    let pivot = pair.complement(3).parties().next().expect("pair leaves one party");
    let tau = three_tangle_detail(s, pivot)?.raw;
    let c = pair_concurrence(s, pair)?;
    Ok(tau + T::lit(2.0) * c * c)
}

/// `S = sqrt(C(A|BC) C(B|AC) C(C|AB))`.
pub fn side_product_s<T: Real>(s: &PureState<T>) -> Result<T> {
    let c = side_squares(s)?;
    Ok(c.iter().fold(T::one(), |acc, &x| acc * x.max(T::zero()).sqrt()).sqrt())
}

/// Every unordered bipartition of `n` parties, each listed once with party A on the left.
pub fn bipartitions(n: usize) -> Vec<Bipartition> {
    let all = PartySet::all(n);
    (1..all.0)
        .filter(|m| m & 1 == 1)
        .map(|m| Bipartition {
            left: PartySet(m),
            right: PartySet(m).complement(n),
        })
        .collect()
}

/// `[prod_{S1|S2} C(S1|S2)]^{1 / 2^{n-2}}` over all `2^{n-1} - 1` bipartitions.
pub fn nqubit_s<T: Real>(s: &PureState<T>) -> Result<T> {
    let n = s.n_qubits();
    if n < 3 {
        return Err(Error::WrongQubitCount {
            expected: "at least 3",
            got: n,
        });
    }
    let mut prod = T::one();
    for b in bipartitions(n) {
        prod = prod * one_to_other_squared(s, b.left)?.max(T::zero()).sqrt();
    }
    let root = T::one() / T::lit((1u64 << (n - 2)) as f64);
    Ok(prod.powf(root))
}

/// `C^2(rho_BC) = 4 (l2^2 l3^2 + l1^2 l4^2 - 2 l1 l2 l3 l4 cos phi)` for the standard form.
pub fn acin_cbc_squared<T: Real>(p: &AcinParams<T>) -> T {
    let [_, l1, l2, l3, l4] = p.l;
    T::lit(4.0) * (l2 * l2 * l3 * l3 + l1 * l1 * l4 * l4 - T::lit(2.0) * l1 * l2 * l3 * l4 * p.phi.cos())
}

/// What a [`MeasureId`] evaluates, with any party context it needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    OneToOther(Bipartition),
    Fill,
    Perimeter,
    Tangle(Party),
    Wootters(PartySet),
    Assistance(PartySet),
    GQuantity(PartySet),
    SideProductS,
    NQubitS,
}

/// A measure and a positive rational exponent applied to its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MeasureId {
    pub kind: MeasureKind,
    pub exponent: Ratio<u32>,
}

impl MeasureId {
    pub fn new(kind: MeasureKind, exponent: Ratio<u32>) -> Result<Self> {
        if *exponent.numer() == 0 {
            return Err(Error::BadMeasure(format!("{exponent}"), "exponent must be positive".into()));
        }
        Ok(Self { kind, exponent })
    }

    pub fn plain(kind: MeasureKind) -> Self {
        Self {
            kind,
            exponent: Ratio::from_integer(1),
        }
    }

    pub fn fill() -> Self {
        Self::plain(MeasureKind::Fill)
    }

    pub fn fill_pow(numer: u32, denom: u32) -> Self {
        Self {
            kind: MeasureKind::Fill,
            exponent: Ratio::new(numer, denom),
        }
    }

    pub fn tangle() -> Self {
        Self::plain(MeasureKind::Tangle(Party::A))
    }

    pub fn s() -> Self {
        Self::plain(MeasureKind::SideProductS)
    }

    pub fn g(pair: PartySet) -> Self {
        Self::plain(MeasureKind::GQuantity(pair))
    }

    /// Whether the underlying quantity is only defined on three qubits.
    pub fn requires_three_qubits(&self) -> bool {
        !matches!(self.kind, MeasureKind::OneToOther(_) | MeasureKind::NQubitS | MeasureKind::Wootters(_) | MeasureKind::Assistance(_))
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut exponent = self.exponent;
        match self.kind {
            MeasureKind::OneToOther(b) => write!(f, "concurrence:{b}")?,
            MeasureKind::Fill => write!(f, "fill")?,
            MeasureKind::Perimeter => write!(f, "perimeter")?,
            MeasureKind::Tangle(Party::A) => write!(f, "tangle")?,
            MeasureKind::Tangle(p) => write!(f, "tangle:{p}")?,
            MeasureKind::Wootters(pair) if exponent.numer() % 2 == 0 => {
                exponent /= 2;
                write!(f, "c2:{pair}")?
            }
            MeasureKind::Wootters(pair) => write!(f, "c:{pair}")?,
            MeasureKind::Assistance(pair) => write!(f, "ca:{pair}")?,
            MeasureKind::GQuantity(pair) => write!(f, "g:{pair}")?,
            MeasureKind::SideProductS => write!(f, "s")?,
            MeasureKind::NQubitS => write!(f, "nqubit-s")?,
        }
        if exponent != Ratio::from_integer(1) {
            if *exponent.denom() == 1 {
                write!(f, "^{}", exponent.numer())?;
            } else {
                write!(f, "^{}/{}", exponent.numer(), exponent.denom())?;
            }
        }
        Ok(())
    }
}

fn parse_exponent(s: &str, whole: &str) -> Result<Ratio<u32>> {
    let bad = |why: &str| Error::BadMeasure(whole.to_string(), why.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: u32 = n.trim().parse().map_err(|_| bad("exponent numerator"))?;
    let d: u32 = d.trim().parse().map_err(|_| bad("exponent denominator"))?;
    if n == 0 || d == 0 {
        return Err(bad("exponent must be a positive rational"));
    }
    Ok(Ratio::new(n, d))
}

impl FromStr for MeasureId {
    type Err = Error;

    /// Accepts `fill`, `fill^1/2`, `perimeter`, `tangle[:P]`, `s`, `nqubit-s`,
    /// `g:JK`, `c:JK`, `c2:JK`, `ca:JK` and `concurrence:S1|S2`, each with an
    /// optional `^p/q` exponent.
    fn from_str(raw: &str) -> Result<Self> {
        let whole = raw.trim();
        let (base, mut exponent) = match whole.rsplit_once('^') {
            Some((b, e)) => (b, parse_exponent(e, whole)?),
            None => (whole, Ratio::from_integer(1)),
        };
        let base = base.trim().to_ascii_lowercase();
        let (head, ctx) = match base.split_once(':') {
            Some((h, c)) => (h.to_string(), Some(c.to_ascii_uppercase())),
            None => (base.clone(), None),
        };
        let need = |ctx: &Option<String>| ctx.clone().ok_or_else(|| Error::MissingContext(whole.to_string()));
        let pair = |ctx: &Option<String>| -> Result<PartySet> {
            let p: PartySet = need(ctx)?.parse()?;
            if p.len() != 2 {
                return Err(Error::BadMeasure(whole.to_string(), "expected a pair of parties".into()));
            }
            Ok(p)
        };
        let no_ctx = |ctx: &Option<String>| -> Result<()> {
            if ctx.is_some() {
                Err(Error::BadMeasure(whole.to_string(), "unexpected context".into()))
            } else {
                Ok(())
            }
        };
        let kind = match head.as_str() {
            "fill" => {
                no_ctx(&ctx)?;
                MeasureKind::Fill
            }
            "perimeter" => {
                no_ctx(&ctx)?;
                MeasureKind::Perimeter
            }
            "tangle" => match ctx {
                Some(c) => MeasureKind::Tangle(c.parse()?),
                None => MeasureKind::Tangle(Party::A),
            },
            "s" => {
                no_ctx(&ctx)?;
                MeasureKind::SideProductS
            }
            "nqubit-s" => {
                no_ctx(&ctx)?;
                MeasureKind::NQubitS
            }
            "g" => MeasureKind::GQuantity(pair(&ctx)?),
            "c" => MeasureKind::Wootters(pair(&ctx)?),
            "c2" => {
                exponent *= 2;
                MeasureKind::Wootters(pair(&ctx)?)
            }
            "ca" => MeasureKind::Assistance(pair(&ctx)?),
            "concurrence" => MeasureKind::OneToOther(need(&ctx)?.parse()?),
            _ => return Err(Error::BadMeasure(whole.to_string(), "unknown measure".into())),
        };
        MeasureId::new(kind, exponent)
    }
}

fn raise<T: Real>(x: T, e: Ratio<u32>) -> T {
    let (n, d) = (*e.numer(), *e.denom());
    let base = match n {
        1 => x,
        2 => x * x,
        _ => x.powi(n as i32),
    };
    match d {
        1 => base,
        2 => base.sqrt(),
        4 => base.sqrt().sqrt(),
        _ => base.powf(T::one() / T::lit(d as f64)),
    }
}

/// Base value of the measure, before the exponent.
pub fn evaluate_base<T: Real>(m: &MeasureKind, s: &PureState<T>) -> Result<T> {
    match *m {
        MeasureKind::OneToOther(b) => one_to_other_concurrence(s, &b),
        MeasureKind::Fill => concurrence_fill(s),
        MeasureKind::Perimeter => perimeter(s),
        MeasureKind::Tangle(p) => three_tangle(s, p),
        MeasureKind::Wootters(pair) => pair_concurrence(s, pair),
        MeasureKind::Assistance(pair) => pair_assistance(s, pair),
        MeasureKind::GQuantity(pair) => g_quantity(s, pair),
        MeasureKind::SideProductS => side_product_s(s),
        MeasureKind::NQubitS => nqubit_s(s),
    }
}

/// Measure value raised to its exponent.
pub fn evaluate<T: Real>(m: &MeasureId, s: &PureState<T>) -> Result<T> {
    let base = evaluate_base(&m.kind, s)?;
    Ok(raise(base.max(T::zero()), m.exponent))
}

/// Cayley hyperdeterminant form `tau = 4 |d1 - 2 d2 + 4 d3|`; independent of
/// every concurrence route above.
pub fn tangle_hyperdeterminant<T: Real>(s: &PureState<T>) -> Result<T> {
    require_three(s)?;
    let a = s.amplitudes();
    let n2 = s.norm_sqr();
    let g = |i: usize| a[i];
    let d1 = g(0) * g(0) * g(7) * g(7)
        + g(1) * g(1) * g(6) * g(6)
        + g(2) * g(2) * g(5) * g(5)
        + g(4) * g(4) * g(3) * g(3);
    let d2 = g(0) * g(7) * g(3) * g(4)
        + g(0) * g(7) * g(5) * g(2)
        + g(0) * g(7) * g(6) * g(1)
        + g(3) * g(4) * g(5) * g(2)
        + g(3) * g(4) * g(6) * g(1)
        + g(5) * g(2) * g(6) * g(1);
    let d3 = g(0) * g(6) * g(5) * g(3) + g(7) * g(1) * g(2) * g(4);
    let two: C<T> = cx(T::lit(2.0), T::zero());
    let four: C<T> = cx(T::lit(4.0), T::zero());
    let h = d1 - two * d2 + four * d3;
    Ok(T::lit(4.0) * norm_sqr(h).sqrt() / (n2 * n2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{
        acin_state, apply_local_unitary, named_state, random_pure_state, random_unitary_seeded, reduced_density,
        NamedState,
    };
    use proptest::prelude::*;

    fn st(n: NamedState) -> PureState<f64> {
        named_state(n).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn bip(s: &str) -> Bipartition {
        s.parse().unwrap()
    }

    fn set(s: &str) -> PartySet {
        s.parse().unwrap()
    }

    #[test]
    fn one_to_other_examples() {
        close(one_to_other_concurrence(&st(NamedState::Ghz3), &bip("A|BC")).unwrap(), 1.0, 1e-15);
        for b in ["A|BC", "B|AC", "C|AB", "AB|C"] {
            close(one_to_other_concurrence(&st(NamedState::Product3), &bip(b)).unwrap(), 0.0, 1e-15);
        }
        close(
            one_to_other_concurrence(&st(NamedState::W3), &bip("A|BC")).unwrap(),
            (8.0f64 / 9.0).sqrt(),
            1e-15,
        );
        assert!(one_to_other_concurrence(&st(NamedState::W3), &bip("A|B")).is_err());
        assert!("A|AB".parse::<Bipartition>().is_err());
        assert!("ABC".parse::<Bipartition>().is_err());
    }

    #[test]
    fn bell_and_product_wootters() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::from_pure(&[cx(h, 0.0), czero(), czero(), cx(h, 0.0)]).unwrap();
        close(wootters_concurrence(&bell).unwrap(), 1.0, 1e-12);
        close(concurrence_of_assistance(&bell).unwrap(), 1.0, 1e-12);
        let zero = DensityMatrix::from_pure(&[cx(1.0, 0.0), czero(), czero(), czero()]).unwrap();
        close(wootters_concurrence(&zero).unwrap(), 0.0, 1e-15);
        close(concurrence_of_assistance(&zero).unwrap(), 0.0, 1e-15);
        let one_qubit = reduced_density(&st(NamedState::W3), set("A")).unwrap();
        assert!(wootters_concurrence(&one_qubit).is_err());
    }

    #[test]
    fn w_pair_concurrence_two_routes() {
        let rho = reduced_density(&st(NamedState::W3), set("BC")).unwrap();
        let sv = spin_flip_values(&rho).unwrap();
        let sp = spin_flip_values_spectral(&rho).unwrap();
        close(concurrence_from_values(&sv), 2.0 / 3.0, 1e-12);
        close(concurrence_from_values(&sp), 2.0 / 3.0, 1e-7);
        close(pair_concurrence(&st(NamedState::W3), set("BC")).unwrap(), 2.0 / 3.0, 1e-15);
    }

    #[test]
    fn ghz_assistance_is_one() {
        let ghz = st(NamedState::Ghz3);
        let rho = reduced_density(&ghz, set("BC")).unwrap();
        close(concurrence_of_assistance(&rho).unwrap(), 1.0, 1e-12);
        close(wootters_concurrence(&rho).unwrap(), 0.0, 1e-12);
        let ca = pair_assistance(&ghz, set("BC")).unwrap();
        close(ca * ca - 0.0, three_tangle(&ghz, Party::A).unwrap(), 1e-12);
    }

    #[test]
    fn tangle_examples() {
        close(three_tangle(&st(NamedState::Ghz3), Party::A).unwrap(), 1.0, 1e-14);
        let w = three_tangle_detail(&st(NamedState::W3), Party::B).unwrap();
        close(w.value, 0.0, 1e-14);
        close(w.raw, 0.0, 1e-14);
        close(three_tangle(&st(NamedState::Product3), Party::C).unwrap(), 0.0, 1e-15);
        assert!(three_tangle(&st(NamedState::Ghz4), Party::A).is_err());
    }

    #[test]
    fn perimeter_examples() {
        close(perimeter(&st(NamedState::Ghz3)).unwrap(), 3.0, 1e-14);
        close(perimeter(&st(NamedState::Product3)).unwrap(), 0.0, 1e-15);
        close(perimeter(&st(NamedState::W3)).unwrap(), 8.0 / 3.0, 1e-14);
        assert!(perimeter(&st(NamedState::Ghz4)).is_err());
    }

    #[test]
    fn fill_examples() {
        close(concurrence_fill(&st(NamedState::Ghz3)).unwrap(), 1.0, 1e-14);
        close(concurrence_fill(&st(NamedState::BisepA)).unwrap(), 0.0, 1e-15);
        close(concurrence_fill(&st(NamedState::W3)).unwrap(), 8.0 / 9.0, 1e-14);
        close(fill_via_tangle(&st(NamedState::W3)).unwrap(), 8.0 / 9.0, 1e-14);
        close(fill_via_assistance(&st(NamedState::W3)).unwrap(), 8.0 / 9.0, 1e-14);
    }

    #[test]
    fn g_examples() {
        close(g_quantity(&st(NamedState::Ghz3), set("BC")).unwrap(), 1.0, 1e-14);
        for p in ["AB", "AC", "BC"] {
            close(g_quantity(&st(NamedState::Product3), set(p)).unwrap(), 0.0, 1e-15);
        }
        close(g_quantity(&st(NamedState::W3), set("BC")).unwrap(), 8.0 / 9.0, 1e-14);
    }

    #[test]
    fn s_examples() {
        close(side_product_s(&st(NamedState::Ghz3)).unwrap(), 1.0, 1e-14);
        close(side_product_s(&st(NamedState::BisepA)).unwrap(), 0.0, 1e-15);
        close(side_product_s(&st(NamedState::W3)).unwrap(), (8.0f64 / 9.0).powf(0.75), 1e-14);
    }

    #[test]
    fn nqubit_s_examples() {
        close(nqubit_s(&st(NamedState::Ghz3)).unwrap(), 1.0, 1e-14);
        close(nqubit_s(&st(NamedState::Ghz4)).unwrap(), 1.0, 1e-14);
        close(nqubit_s(&st(NamedState::ProductN(4))).unwrap(), 0.0, 1e-15);
        assert_eq!(bipartitions(4).len(), 7);
        assert_eq!(bipartitions(5).len(), 15);
        assert!(nqubit_s(&st(NamedState::ProductN(2))).is_err());
    }

    #[test]
    fn acin_cbc_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        close(acin_cbc_squared(&AcinParams::new([h, 0.0, 0.0, 0.0, h], 0.0).unwrap()), 0.0, 1e-15);
        let p = AcinParams::new([0.0, 0.0, h, h, 0.0], 0.0).unwrap();
        close(acin_cbc_squared(&p), 1.0, 1e-15);
        let c = pair_concurrence(&acin_state(&p).unwrap(), set("BC")).unwrap();
        close(c * c, 1.0, 1e-12);
        let main = AcinParams::with_derived_l0(0.096, 0.238, 0.173, 0.0, 0.0).unwrap();
        let rho = reduced_density(&acin_state(&main).unwrap(), set("BC")).unwrap();
        let c = wootters_concurrence(&rho).unwrap();
        close(acin_cbc_squared(&main), c * c, 1e-9);
    }

    #[test]
    fn evaluate_dispatch() {
        let ghz = st(NamedState::Ghz3);
        close(evaluate(&"fill^1/2".parse().unwrap(), &ghz).unwrap(), 1.0, 1e-14);
        close(evaluate(&"tangle".parse().unwrap(), &st(NamedState::W3)).unwrap(), 0.0, 1e-14);
        close(evaluate(&"fill^1/4".parse().unwrap(), &st(NamedState::BisepA)).unwrap(), 0.0, 1e-15);
        close(evaluate(&"c2:BC".parse().unwrap(), &st(NamedState::W3)).unwrap(), 4.0 / 9.0, 1e-14);
    }

    #[test]
    fn measure_ids_parse_and_print() {
        for s in ["fill", "fill^1/2", "fill^1/4", "perimeter", "tangle", "tangle:B", "s", "nqubit-s", "g:BC", "c2:BC", "c:AB", "ca:AC", "concurrence:A|BC"] {
            let m: MeasureId = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert!(matches!("g".parse::<MeasureId>(), Err(Error::MissingContext(_))));
        assert!(matches!("concurrence".parse::<MeasureId>(), Err(Error::MissingContext(_))));
        assert!("fill^0".parse::<MeasureId>().is_err());
        assert!("fill:A".parse::<MeasureId>().is_err());
        assert!("g:ABC".parse::<MeasureId>().is_err());
        assert!("entropy".parse::<MeasureId>().is_err());
        let m: MeasureId = "c2:BC^1/2".parse().unwrap();
        assert_eq!(m.exponent, Ratio::from_integer(1));
    }

    #[test]
    fn hyperdeterminant_matches_named_values() {
        close(tangle_hyperdeterminant(&st(NamedState::Ghz3)).unwrap(), 1.0, 1e-15);
        close(tangle_hyperdeterminant(&st(NamedState::W3)).unwrap(), 0.0, 1e-15);
    }

    #[test]
    fn minors_agree_with_purity_route() {
        for seed in 0..50 {
            let s = random_pure_state::<f64>(seed, 4).unwrap();
            for b in bipartitions(4) {
                let a = one_to_other_squared(&s, b.left).unwrap();
                let p = one_to_other_squared_via_purity(&s, b.left).unwrap();
                close(a, p, 1e-13);
            }
        }
    }

    #[test]
    fn nearly_product_state_keeps_relative_accuracy() {
        let eps = 1e-10;
        let mut amp = vec![czero(); 8];
        amp[0] = cx(1.0, 0.0);
        amp[0b111] = cx(eps, 0.0);
        let s = PureState::new(3, amp).unwrap();
        let c2 = one_to_other_squared(&s, set("A")).unwrap();
        // exact: 4 eps^2 / (1 + eps^2)^2
        close(c2 / (4.0 * eps * eps), 1.0, 1e-12);
        assert_eq!(one_to_other_squared_via_purity(&s, set("A")).unwrap(), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn routes_and_bounds(seed in any::<u64>()) {
            let s = random_pure_state::<f64>(seed, 3).unwrap();
            let f = concurrence_fill(&s).unwrap();
            prop_assert!((f - fill_via_tangle(&s).unwrap()).abs() < 1e-9);
            prop_assert!((f - fill_via_assistance(&s).unwrap()).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&f));
            let tau = three_tangle(&s, Party::A).unwrap();
            prop_assert!((tau - tangle_hyperdeterminant(&s).unwrap()).abs() < 1e-9);
            for p in ["AB", "AC", "BC"] {
                let rho = reduced_density(&s, set(p)).unwrap();
                let c = wootters_concurrence(&rho).unwrap();
                let ca = concurrence_of_assistance(&rho).unwrap();
                prop_assert!(ca >= c - 1e-12);
                prop_assert!((c - pair_concurrence(&s, set(p)).unwrap()).abs() < 1e-9);
                let sp = spin_flip_values_spectral(&rho).unwrap();
                let sv = spin_flip_values(&rho).unwrap();
                for k in 0..4 {
                    prop_assert!((sp[k] - sv[k]).abs() < 1e-6, "{sp:?} vs {sv:?}");
                }
            }
            let fq = evaluate(&MeasureId::fill_pow(1, 4), &s).unwrap();
            let fh = evaluate(&MeasureId::fill_pow(1, 2), &s).unwrap();
            prop_assert!(fq >= fh - 1e-15 && fh >= f - 1e-15);
        }

        #[test]
        fn concurrence_upper_bound(seed in any::<u64>(), n in 3usize..6) {
            let s = random_pure_state::<f64>(seed, n).unwrap();
            for b in bipartitions(n) {
                let d = b.left.len().min(b.right.len()) as i32;
                let c = one_to_other_concurrence(&s, &b).unwrap();
                let bound = (2.0 * (1.0 - 2f64.powi(-d))).sqrt();
                prop_assert!(c >= 0.0 && c <= bound + 1e-12);
                let sw = Bipartition::new(b.right, b.left).unwrap();
                prop_assert!((c - one_to_other_concurrence(&s, &sw).unwrap()).abs() < 1e-12);
            }
        }

        #[test]
        fn local_unitary_invariance(seed in any::<u64>(), party in 0usize..3) {
            let s = random_pure_state::<f64>(seed, 3).unwrap();
            let u = random_unitary_seeded::<f64>(seed.wrapping_add(17));
            let t = apply_local_unitary(&s, Party(party), &u).unwrap();
            for m in ["fill", "perimeter", "tangle", "s", "g:BC", "c:AB", "ca:AC", "nqubit-s", "concurrence:B|AC"] {
                let id: MeasureId = m.parse().unwrap();
                let a = evaluate(&id, &s).unwrap();
                let b = evaluate(&id, &t).unwrap();
                prop_assert!((a - b).abs() < 1e-9, "{m}: {a} vs {b}");
            }
        }
    }
}
