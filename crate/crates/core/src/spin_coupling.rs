//! Clebsch-Gordan coefficients and two-/N-body spin states built on a
//! common fiber `(n, tau)`.
//!
//! Coefficient vectors are ordered by descending `m` (`m = j, j-1, ..., -j`),
//! so spin one-half is `(up, down)`. Two-body coefficients are a matrix
//! with rows indexed by `m1` and columns by `m2`, in the same order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, LazyLock, RwLock};

use nalgebra::{DMatrix, DVector, Matrix2};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::FourVector;
use crate::C64;

/// Componentwise tolerance for two states to share a fiber.
pub const FIBER_TOL: f64 = 1e-9;

pub const STATE_NORM_TOL: f64 = 1e-10;

/// Largest `j` accepted by the coefficient tables.
pub const MAX_J: HalfInt = HalfInt(40);

/// Squared norm below which a projected state counts as zero.
const ZERO_STATE_TOL: f64 = 1e-24;

/// A non-negative or signed half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub const fn integer(n: i32) -> Self {
        Self(2 * n)
    }

    /// Exact conversion; rejects values that are not multiples of 1/2.
    pub fn from_f64(x: f64) -> Result<Self> {
        let twice = 2.0 * x;
        if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > i32::MAX as f64 {
            return Err(Error::QuantumNumbers(format!("{x} is not a half-integer")));
        }
        Ok(Self(twice as i32))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// `2j + 1` for non-negative `j`.
    pub fn multiplicity(self) -> usize {
        (self.0 + 1) as usize
    }

    /// `m = j, j-1, ..., -j`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        (0..=self.0).map(move |k| HalfInt(self.0 - 2 * k))
    }

    /// Index of `m` in descending order for spin `self`.
    fn index_of(self, m: HalfInt) -> usize {
        ((self.0 - m.0) / 2) as usize
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

fn check_spin(j: HalfInt) -> Result<()> {
    if j.0 < 0 || j > MAX_J {
        return Err(Error::QuantumNumbers(format!("spin {j} outside 0..={MAX_J}")));
    }
    Ok(())
}

fn check_projection(j: HalfInt, m: HalfInt) -> Result<()> {
    if m.0.abs() > j.0 || (j.0 - m.0) % 2 != 0 {
        return Err(Error::QuantumNumbers(format!("m = {m} invalid for j = {j}")));
    }
    Ok(())
}

fn triangle(j1: HalfInt, j2: HalfInt, j: HalfInt) -> bool {
    j.0 >= (j1.0 - j2.0).abs() && j.0 <= j1.0 + j2.0 && (j1.0 + j2.0 - j.0) % 2 == 0
}

/// Allowed total spins `|j1 - j2| ..= j1 + j2`.
pub fn coupled_spins(j1: HalfInt, j2: HalfInt) -> impl Iterator<Item = HalfInt> {
    let lo = (j1.0 - j2.0).abs();
    (lo..=j1.0 + j2.0).step_by(2).map(HalfInt)
}

/// `0! ..= (2 * MAX_J + 2)!`, enough for every Racah term.
static FACTORIALS: LazyLock<Vec<BigInt>> = LazyLock::new(|| {
    let mut f = vec![BigInt::one()];
    for k in 1..=(2 * MAX_J.0 + 2) {
        let next = f.last().expect("non-empty") * k;
        f.push(next);
    }
    f
});

fn factorial(n: i32) -> &'static BigInt {
    &FACTORIALS[n.max(0) as usize]
}

fn binomial(n: i32, k: i32) -> BigInt {
    if k < 0 || k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Exact coefficient as `sign * sqrt(square)`, by Racah's closed-form sum.
///
/// Grouping the factorials of the sum into binomials makes it an integer
/// `S = sum_k (-1)^k C(A, k) C(X, B - k) C(Y, C - k)`, so that
/// `<..|..>^2 = (2J+1)(J+M)!(J-M)! prod (j_i +- m_i)! S^2 / ((j1+j2+J+1)! A! X! Y!)`.
fn cg_exact(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> (i8, BigRational) {
    if m1 + m2 != m || !triangle(j1, j2, j) {
        return (0, BigRational::zero());
    }
    // all of these combinations are integers once the selection rules hold
    let h = |x: i32| x / 2;
    let (a, b, c) = (j1.0, j2.0, j.0);
    let big_a = h(a + b - c);
    let x = h(c + a - b);
    let y = h(c - a + b);
    let (lower1, upper2) = (h(a - m1.0), h(b + m2.0));
    let sum: BigInt = (0..=big_a)
        .map(|k| {
            let term = binomial(big_a, k) * binomial(x, lower1 - k) * binomial(y, upper2 - k);
            if k % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum();
    if sum.is_zero() {
        return (0, BigRational::zero());
    }
    let sign = if sum.is_negative() { -1 } else { 1 };
    let numerator = BigInt::from(c + 1)
        * factorial(h(c + m.0))
        * factorial(h(c - m.0))
        * factorial(h(a - m1.0))
        * factorial(h(a + m1.0))
        * factorial(h(b - m2.0))
        * factorial(h(b + m2.0))
        * &sum
        * &sum;
    let denominator = factorial(h(a + b + c) + 1) * factorial(big_a) * factorial(x) * factorial(y);
    (sign, BigRational::new(numerator, denominator))
}

/// Exact Clebsch-Gordan coefficient `<j1 m1; j2 m2 | J M>` as `(sign, value^2)`.
pub fn cg_squared(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> Result<(i8, BigRational)> {
    validate(j1, m1, j2, m2, j, m)?;
    Ok(cg_exact(j1, m1, j2, m2, j, m))
}

fn validate(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> Result<()> {
    check_spin(j1)?;
    check_spin(j2)?;
    check_projection(j1, m1)?;
    check_projection(j2, m2)?;
    if !triangle(j1, j2, j) {
        return Err(Error::QuantumNumbers(format!("J = {j} violates the triangle rule for {j1} x {j2}")));
    }
    check_projection(j, m)
}

/// Coefficients for fixed `(j1, j2)`: rows are product states `(m1, m2)` in
/// row-major descending order, columns are `(J, M)` with `J` ascending and
/// `M` descending.
#[derive(Debug)]
pub struct CgTable {
    pub j1: HalfInt,
    pub j2: HalfInt,
    pub columns: Vec<(HalfInt, HalfInt)>,
    pub matrix: DMatrix<f64>,
}

impl CgTable {
    fn build(j1: HalfInt, j2: HalfInt) -> Self {
        let columns: Vec<(HalfInt, HalfInt)> = coupled_spins(j1, j2).flat_map(|j| j.projections().map(move |m| (j, m))).collect();
        let (d1, d2) = (j1.multiplicity(), j2.multiplicity());
        let mut matrix = DMatrix::zeros(d1 * d2, columns.len());
        for (col, &(j, m)) in columns.iter().enumerate() {
            for m1 in j1.projections() {
                let m2 = m - m1;
                if m2.0.abs() > j2.0 {
                    continue;
                }
                let (sign, square) = cg_exact(j1, m1, j2, m2, j, m);
                let value = f64::from(sign) * square.to_f64().unwrap_or(0.0).sqrt();
                matrix[(j1.index_of(m1) * d2 + j2.index_of(m2), col)] = value;
            }
        }
        Self { j1, j2, columns, matrix }
    }

    pub fn coefficient(&self, m1: HalfInt, j: HalfInt, m: HalfInt) -> f64 {
        let m2 = m - m1;
        if m2.0.abs() > self.j2.0 || m1.0.abs() > self.j1.0 {
            return 0.0;
        }
        let col = self.columns.iter().position(|&c| c == (j, m));
        col.map_or(0.0, |c| self.matrix[(self.j1.index_of(m1) * self.j2.multiplicity() + self.j2.index_of(m2), c)])
    }

    /// The coupled state `|J M>` as a `(m1, m2)` coefficient matrix.
    pub fn coupled_state(&self, j: HalfInt, m: HalfInt) -> DMatrix<C64> {
        let (d1, d2) = (self.j1.multiplicity(), self.j2.multiplicity());
        let col = self.columns.iter().position(|&c| c == (j, m)).expect("validated (J, M)");
        DMatrix::from_fn(d1, d2, |r, c| C64::from(self.matrix[(r * d2 + c, col)]))
    }
}

static TABLES: LazyLock<RwLock<HashMap<(HalfInt, HalfInt), Arc<CgTable>>>> = LazyLock::new(Default::default);

/// Shared coefficient table for `(j1, j2)`, built on first use.
pub fn cg_table(j1: HalfInt, j2: HalfInt) -> Result<Arc<CgTable>> {
    check_spin(j1)?;
    check_spin(j2)?;
    if let Some(table) = TABLES.read().expect("cg cache poisoned").get(&(j1, j2)) {
        return Ok(Arc::clone(table));
    }
    let table = Arc::new(CgTable::build(j1, j2));
    let mut guard = TABLES.write().expect("cg cache poisoned");
    Ok(Arc::clone(guard.entry((j1, j2)).or_insert(table)))
}

/// `<j1 m1; j2 m2 | J M>` with the Condon-Shortley phase.
pub fn cg(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> Result<f64> {
    validate(j1, m1, j2, m2, j, m)?;
    if m1 + m2 != m {
        return Ok(0.0);
    }
    Ok(cg_table(j1, j2)?.coefficient(m1, j, m))
}

/// One-particle spin factor on the fiber `(n, tau)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinState {
    pub j: HalfInt,
    coefficients: DVector<C64>,
    pub n: FourVector,
    pub tau: f64,
}

impl SpinState {
    pub fn new(j: HalfInt, coefficients: Vec<C64>, n: FourVector, tau: f64) -> Result<Self> {
        check_spin(j)?;
        if coefficients.len() != j.multiplicity() {
            return Err(Error::QuantumNumbers(format!(
                "spin {j} needs {} coefficients, got {}",
                j.multiplicity(),
                coefficients.len()
            )));
        }
        let coefficients = DVector::from_vec(coefficients);
        let norm = coefficients.norm_squared();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { j, coefficients, n, tau })
    }

    /// The basis state `|j m>`.
    pub fn basis(j: HalfInt, m: HalfInt, n: FourVector, tau: f64) -> Result<Self> {
        check_spin(j)?;
        check_projection(j, m)?;
        let mut c = vec![C64::new(0.0, 0.0); j.multiplicity()];
        c[j.index_of(m)] = C64::new(1.0, 0.0);
        Self::new(j, c, n, tau)
    }

    pub fn coefficients(&self) -> &DVector<C64> {
        &self.coefficients
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    None,
    Symmetric,
    Antisymmetric,
}

/// Two-body spin factor on a common fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoBodySpinState {
    pub j1: HalfInt,
    pub j2: HalfInt,
    coefficients: DMatrix<C64>,
    pub n: FourVector,
    pub tau: f64,
    symmetry: Symmetry,
}

impl TwoBodySpinState {
    /// Validates the norm and, for a symmetry tag, the exchange behaviour.
    pub fn new(j1: HalfInt, j2: HalfInt, coefficients: DMatrix<C64>, n: FourVector, tau: f64, symmetry: Symmetry) -> Result<Self> {
        check_spin(j1)?;
        check_spin(j2)?;
        if coefficients.shape() != (j1.multiplicity(), j2.multiplicity()) {
            return Err(Error::QuantumNumbers(format!("coefficient shape {:?} does not match {j1} x {j2}", coefficients.shape())));
        }
        let norm = coefficients.norm_squared();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let sign = match symmetry {
            Symmetry::None => None,
            Symmetry::Symmetric => Some(1.0),
            Symmetry::Antisymmetric => Some(-1.0),
        };
        if let Some(sign) = sign {
            if j1 != j2 {
                return Err(Error::QuantumNumbers("exchange symmetry needs equal spins".into()));
            }
            let defect = (coefficients.transpose() * C64::from(sign) - &coefficients).camax();
            if defect > STATE_NORM_TOL {
                return Err(Error::InvalidParameter(format!("state is not {symmetry:?} (defect {defect:.3e})")));
            }
        }
        Ok(Self {
            j1,
            j2,
            coefficients,
            n,
            tau,
            symmetry,
        })
    }

    pub fn coefficients(&self) -> &DMatrix<C64> {
        &self.coefficients
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    /// Exchange-symmetry tag matching the actual coefficients, if any.
    pub fn detect_symmetry(&self) -> Symmetry {
        if self.j1 != self.j2 {
            return Symmetry::None;
        }
        let t = self.coefficients.transpose();
        if (&t - &self.coefficients).camax() < STATE_NORM_TOL {
            Symmetry::Symmetric
        } else if (&t + &self.coefficients).camax() < STATE_NORM_TOL {
            Symmetry::Antisymmetric
        } else {
            Symmetry::None
        }
    }

    /// `<other|self>`.
    pub fn overlap(&self, other: &TwoBodySpinState) -> C64 {
        self.coefficients.iter().zip(other.coefficients.iter()).map(|(a, b)| b.conj() * a).sum()
    }

    /// `(U (x) V) psi`, i.e. `U C V^T` on the coefficient matrix.
    pub fn apply_local(&self, u: &DMatrix<C64>, v: &DMatrix<C64>) -> DMatrix<C64> {
        u * &self.coefficients * v.transpose()
    }
}

fn same_fiber(a: (&FourVector, f64), b: (&FourVector, f64)) -> Result<()> {
    let dn = (*a.0 - *b.0).max_abs();
    let dt = (a.1 - b.1).abs();
    if dn > FIBER_TOL || dt > FIBER_TOL {
        return Err(Error::FiberMismatch(format!("n differs by {dn:.3e}, tau by {dt:.3e}")));
    }
    Ok(())
}

fn product(a: &SpinState, b: &SpinState) -> DMatrix<C64> {
    &a.coefficients * b.coefficients.transpose()
}

/// Projects `a (x) b` onto `|J M>` and normalizes.
pub fn couple_two(a: &SpinState, b: &SpinState, j: HalfInt, m: HalfInt) -> Result<TwoBodySpinState> {
    same_fiber((&a.n, a.tau), (&b.n, b.tau))?;
    if !triangle(a.j, b.j, j) {
        return Err(Error::QuantumNumbers(format!("J = {j} violates the triangle rule for {} x {}", a.j, b.j)));
    }
    check_projection(j, m)?;
    let target = cg_table(a.j, b.j)?.coupled_state(j, m);
    let prod = product(a, b);
    let amplitude: C64 = target.iter().zip(prod.iter()).map(|(t, p)| t.conj() * p).sum();
    if amplitude.norm_sqr() < ZERO_STATE_TOL {
        return Err(Error::ZeroState(format!("a (x) b has no |{j} {m}> component")));
    }
    let phase = amplitude / amplitude.norm();
    let state = TwoBodySpinState {
        j1: a.j,
        j2: b.j,
        coefficients: target * phase,
        n: a.n,
        tau: a.tau,
        symmetry: Symmetry::None,
    };
    let symmetry = state.detect_symmetry();
    Ok(TwoBodySpinState { symmetry, ..state })
}

/// `(a (x) b + sign * b (x) a)`, normalized.
pub fn symmetrize(a: &SpinState, b: &SpinState, symmetry: Symmetry) -> Result<TwoBodySpinState> {
    same_fiber((&a.n, a.tau), (&b.n, b.tau))?;
    if a.j != b.j {
        return Err(Error::QuantumNumbers(format!("cannot symmetrize spins {} and {}", a.j, b.j)));
    }
    let sign = match symmetry {
        Symmetry::Symmetric => 1.0,
        Symmetry::Antisymmetric => -1.0,
        Symmetry::None => return Err(Error::InvalidParameter("symmetrize needs a sign".into())),
    };
    let c = product(a, b) + product(b, a) * C64::from(sign);
    let norm = c.norm_squared();
    if norm < ZERO_STATE_TOL {
        return Err(Error::ZeroState("antisymmetrized identical states vanish".into()));
    }
    TwoBodySpinState::new(a.j, b.j, c / C64::from(norm.sqrt()), a.n, a.tau, symmetry)
}

/// Interchange of the two particles (transpose of the coefficients).
pub fn exchange(state: &TwoBodySpinState) -> Result<TwoBodySpinState> {
    if state.j1 != state.j2 {
        return Err(Error::QuantumNumbers("exchange needs equal spins".into()));
    }
    Ok(TwoBodySpinState {
        coefficients: state.coefficients.transpose(),
        ..state.clone()
    })
}

/// Weight of each total spin `J` in the state.
pub fn total_spin_decompose(state: &TwoBodySpinState) -> Result<BTreeMap<HalfInt, f64>> {
    let table = cg_table(state.j1, state.j2)?;
    let flat = DVector::from_iterator(
        state.coefficients.len(),
        (0..state.coefficients.nrows()).flat_map(|r| (0..state.coefficients.ncols()).map(move |c| (r, c))).map(|(r, c)| state.coefficients[(r, c)]),
    );
    let mut weights = BTreeMap::new();
    for (col, &(j, _)) in table.columns.iter().enumerate() {
        let amp: C64 = table.matrix.column(col).iter().zip(flat.iter()).map(|(t, p)| p * *t).sum();
        *weights.entry(j).or_insert(0.0) += amp.norm_sqr();
    }
    Ok(weights)
}

/// Total-spin weights of `s1 (x) s2 (x) ... (x) sN`, coupling left to right:
/// `((j1 j2) J12, j3) J123, ...`. Intermediate couplings are summed out.
pub fn total_spin_decompose_n(states: &[SpinState]) -> Result<BTreeMap<HalfInt, f64>> {
    let (first, rest) = states.split_first().ok_or_else(|| Error::InvalidParameter("need at least one state".into()))?;
    for s in rest {
        same_fiber((&first.n, first.tau), (&s.n, s.tau))?;
    }
    // key: (intermediate J path, current J, current M)
    let mut amplitudes: HashMap<(Vec<HalfInt>, HalfInt, HalfInt), C64> = first
        .j
        .projections()
        .map(|m| ((Vec::new(), first.j, m), first.coefficients[first.j.index_of(m)]))
        .collect();
    for s in rest {
        let mut next: HashMap<(Vec<HalfInt>, HalfInt, HalfInt), C64> = HashMap::new();
        for ((path, j, m), alpha) in &amplitudes {
            let table = cg_table(*j, s.j)?;
            for mb in s.j.projections() {
                let beta = s.coefficients[s.j.index_of(mb)];
                if beta == C64::new(0.0, 0.0) {
                    continue;
                }
                for jn in coupled_spins(*j, s.j) {
                    let mn = *m + mb;
                    if mn.0.abs() > jn.0 {
                        continue;
                    }
                    let c = table.coefficient(*m, jn, mn);
                    if c != 0.0 {
                        let mut p = path.clone();
                        p.push(*j);
                        *next.entry((p, jn, mn)).or_insert(C64::new(0.0, 0.0)) += alpha * beta * c;
                    }
                }
            }
        }
        amplitudes = next;
    }
    let mut weights = BTreeMap::new();
    for ((_, j, _), a) in amplitudes {
        *weights.entry(j).or_insert(0.0) += a.norm_sqr();
    }
    Ok(weights)
}

/// `i sigma_y`-type rotation by pi about the fiber's y axis: `[[0, -1], [1, 0]]`.
pub fn pi_rotation_y() -> Matrix2<C64> {
    Matrix2::new(C64::new(0.0, 0.0), C64::new(-1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0))
}

/// `max |(R (x) R) psi + exchange(psi)|` for spin one-half pairs, with `R`
/// the pi rotation about y. Vanishes on the singlet, on all `M = 0` states
/// and on products `a (x) R a`, but not on arbitrary products.
pub fn pi_rotation_exchange_deviation(state: &TwoBodySpinState) -> Result<f64> {
    if state.j1 != HalfInt::HALF || state.j2 != HalfInt::HALF {
        return Err(Error::QuantumNumbers("pi-rotation check is for spin one-half pairs".into()));
    }
    let r = DMatrix::from_iterator(2, 2, pi_rotation_y().iter().copied());
    let rotated = state.apply_local(&r, &r);
    Ok((rotated + state.coefficients.transpose()).camax())
}
