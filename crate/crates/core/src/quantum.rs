//! Dense complex linear algebra and the quantum objects built on it.
//!
//! Everything here is small and dense: dimensions are expected to stay at or
//! below 64. Objects are immutable after construction.
//!
//! JSON wire format, shared by every file the crate reads or writes: a complex
//! number is a two-element array `[re, im]`, a vector is an array of complex
//! numbers and a matrix is a row-major array of rows.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::mub::Basis;

pub type C64 = nalgebra::Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;

/// Tolerance on state normalisation and operator Hermiticity.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance on POVM positivity and completeness.
pub const POVM_TOL: f64 = 1e-9;
/// Elements with trace at or below this carry zero weight in the reverted ensemble.
pub const ZERO_TRACE: f64 = 1e-12;

pub(crate) type WireComplex = [f64; 2];
pub(crate) type WireVector = Vec<WireComplex>;
pub(crate) type WireMatrix = Vec<Vec<WireComplex>>;

pub(crate) fn complex_to_wire(z: C64) -> WireComplex {
    [z.re, z.im]
}

pub(crate) fn wire_to_complex(w: WireComplex) -> C64 {
    C64::new(w[0], w[1])
}

pub(crate) fn matrix_to_wire(m: &ComplexMatrix) -> WireMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_to_wire(m[(i, j)])).collect())
        .collect()
}

pub(crate) fn wire_to_matrix(w: &WireMatrix) -> Result<ComplexMatrix> {
    let rows = w.len();
    let cols = w.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    if let Some(bad) = w.iter().find(|r| r.len() != cols) {
        return Err(Error::Parse(format!(
            "ragged matrix: row of length {} in a {rows}x{cols} matrix",
            bad.len()
        )));
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| wire_to_complex(w[i][j])))
}

/// A normalised pure state `|ψ⟩` of a `d`-level system, `d ≥ 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WireVector", into = "WireVector")]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::with_tolerance(amplitudes, NORM_TOL)
    }

    pub(crate) fn with_tolerance(amplitudes: Vec<C64>, tol: f64) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::Structural(format!(
                "state dimension must be at least 2, got {}",
                amplitudes.len()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > tol {
            return Err(Error::Validation(format!(
                "state is not normalised: squared norm {norm_sq}"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Argument("cannot normalise a zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(amplitudes)
    }

    /// Computational basis state `|k⟩`.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::Argument(format!("index {k} out of range for d={dim}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[k] = C64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Multiplies by a global phase so that the first nonzero amplitude is real positive.
    pub fn with_canonical_phase(mut self) -> Self {
        if let Some(idx) = self.amplitudes.iter().position(|a| a.norm() > 1e-12) {
            let first = self.amplitudes[idx];
            let phase = first.conj() / first.norm();
            self.amplitudes.iter_mut().for_each(|a| *a *= phase);
            self.amplitudes[idx] = C64::new(first.norm(), 0.0);
        }
        self
    }

    /// `⟨ψ|A|ψ⟩`, real part only (exact for Hermitian `A`).
    pub fn expectation(&self, op: &HermitianOperator) -> f64 {
        let m = op.matrix();
        let d = self.dim();
        let mut acc = 0.0;
        for j in 0..d {
            let mut row = C64::new(0.0, 0.0);
            for k in 0..d {
                row += m[(j, k)] * self.amplitudes[k];
            }
            acc += (self.amplitudes[j].conj() * row).re;
        }
        acc
    }

    /// The rank-one projector `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> HermitianOperator {
        let d = self.dim();
        let a = &self.amplitudes;
        HermitianOperator {
            entries: DMatrix::from_fn(d, d, |j, k| a[j] * a[k].conj()),
        }
    }
}

impl TryFrom<WireVector> for StateVector {
    type Error = Error;

    fn try_from(w: WireVector) -> Result<Self> {
        Self::new(w.into_iter().map(wire_to_complex).collect())
    }
}

impl From<StateVector> for WireVector {
    fn from(s: StateVector) -> Self {
        s.amplitudes.into_iter().map(complex_to_wire).collect()
    }
}

/// A `d×d` operator equal to its conjugate transpose within [`NORM_TOL`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WireMatrix", into = "WireMatrix")]
pub struct HermitianOperator {
    entries: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(entries: ComplexMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Structural(format!(
                "operator is not square: {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.nrows() == 0 {
            return Err(Error::Structural("operator has dimension 0".into()));
        }
        let dev = hermiticity_deviation(&entries);
        if dev > NORM_TOL {
            return Err(Error::Validation(format!(
                "operator is not Hermitian: max |A - A†| = {dev:e}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: ComplexMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: ComplexMatrix::zeros(dim, dim),
        }
    }

    /// Real diagonal operator.
    pub fn diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        Self {
            entries: DMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    C64::new(diag[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: self.entries.map(|z| z * factor),
        }
    }

    pub fn plus(&self, other: &HermitianOperator) -> Result<Self> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries + &other.entries,
        })
    }

    /// Symmetrises `(A + A†)/2` without checking; used where Hermiticity holds by construction.
    pub(crate) fn from_matrix_symmetrized(m: ComplexMatrix) -> Self {
        let herm = (&m + m.adjoint()).map(|z| z * 0.5);
        Self { entries: herm }
    }
}

impl TryFrom<WireMatrix> for HermitianOperator {
    type Error = Error;

    fn try_from(w: WireMatrix) -> Result<Self> {
        Self::new(wire_to_matrix(&w)?)
    }
}

impl From<HermitianOperator> for WireMatrix {
    fn from(op: HermitianOperator) -> Self {
        matrix_to_wire(&op.entries)
    }
}

fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Bob's measurement `{M_s}`: an ordered list of `D ≥ 1` Hermitian operators
/// on a common `d`-dimensional space.
///
/// Construction only checks structure. Positivity and completeness are
/// checked by [`validate_povm`], so an invalid candidate can still be built
/// and inspected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PovmWire", into = "PovmWire")]
pub struct Povm {
    elements: Vec<HermitianOperator>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct PovmWire {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

impl TryFrom<PovmWire> for Povm {
    type Error = Error;

    fn try_from(w: PovmWire) -> Result<Self> {
        let povm = Povm::new(w.elements)?;
        ensure_dim(w.dim, povm.dim())?;
        Ok(povm)
    }
}

impl From<Povm> for PovmWire {
    fn from(p: Povm) -> Self {
        PovmWire {
            dim: p.dim,
            elements: p.elements,
        }
    }
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let dim = elements
            .first()
            .map(HermitianOperator::dim)
            .ok_or_else(|| Error::Structural("POVM needs at least one element".into()))?;
        for e in &elements {
            ensure_dim(dim, e.dim())?;
        }
        Ok(Self { elements, dim })
    }

    /// Builds a POVM and rejects it unless [`validate_povm`] passes at `tol`.
    pub fn validated(elements: Vec<HermitianOperator>, tol: f64) -> Result<Self> {
        let povm = Self::new(elements)?;
        let report = validate_povm(&povm, tol);
        if report.passed {
            Ok(povm)
        } else {
            Err(Error::Validation(format!(
                "invalid POVM: PSD deficit {:e}, completeness deviation {:e}",
                report.max_psd_deficit, report.max_completeness_deviation
            )))
        }
    }

    /// Rank-one elements `M_s = v_s† v_s` built from the rows `v_s` of a
    /// `D×d` matrix. Complete iff the matrix is an isometry.
    pub fn from_isometry_rows(iso: &ComplexMatrix) -> Result<Self> {
        let d = iso.ncols();
        let elements = (0..iso.nrows())
            .map(|s| {
                HermitianOperator::from_matrix_symmetrized(DMatrix::from_fn(d, d, |j, k| {
                    iso[(s, j)].conj() * iso[(s, k)]
                }))
            })
            .collect();
        Self::new(elements)
    }

    /// Elements `M_s = B_s† B_s` where `B_s` is the `s`-th `d×d` block of rows
    /// of a `(D·d)×d` isometry. Covers POVMs of arbitrary rank.
    pub fn from_isometry_blocks(iso: &ComplexMatrix, outcomes: usize) -> Result<Self> {
        let d = iso.ncols();
        if iso.nrows() != outcomes * d {
            return Err(Error::DimensionMismatch {
                expected: outcomes * d,
                got: iso.nrows(),
            });
        }
        let elements = (0..outcomes)
            .map(|s| {
                let block = iso.rows(s * d, d);
                HermitianOperator::from_matrix_symmetrized(block.adjoint() * block)
            })
            .collect();
        Self::new(elements)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    /// Replaces elements `a` and `b` by the single element `M_a + M_b`
    /// (stored at the lower index).
    pub fn coarse_grained(&self, a: usize, b: usize) -> Result<Self> {
        let n = self.outcomes();
        if a == b || a >= n || b >= n {
            return Err(Error::Argument(format!(
                "cannot merge outcomes {a} and {b} of a {n}-outcome POVM"
            )));
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let mut elements = self.elements.clone();
        let merged = elements[lo].plus(&elements[hi])?;
        elements[lo] = merged;
        elements.remove(hi);
        Self::new(elements)
    }

    /// Reorders elements so that outcome `s` of the result is outcome `order[s]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.outcomes();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::Argument("order is not a permutation of the outcomes".into()));
        }
        Self::new(order.iter().map(|&i| self.elements[i].clone()).collect())
    }
}

/// Numeric deviations of a POVM from positivity and completeness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    /// `max(0, -λ_min)` over all elements.
    pub max_psd_deficit: f64,
    /// Largest entrywise modulus of `Σ_s M_s - I`.
    pub max_completeness_deviation: f64,
    pub passed: bool,
}

pub fn validate_povm(povm: &Povm, tol: f64) -> ValidationReport {
    let d = povm.dim();
    let mut sum = ComplexMatrix::zeros(d, d);
    let mut deficit: f64 = 0.0;
    for e in povm.elements() {
        sum += e.matrix();
        deficit = deficit.max(-e.min_eigenvalue());
    }
    sum -= ComplexMatrix::identity(d, d);
    let completeness = sum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    ValidationReport {
        max_psd_deficit: deficit,
        max_completeness_deviation: completeness,
        passed: deficit <= tol && completeness <= tol,
    }
}

/// A weighted collection of density operators `{p(s), ρ_s}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ensemble {
    states: Vec<HermitianOperator>,
    weights: Vec<f64>,
}

impl Ensemble {
    pub fn states(&self) -> &[HermitianOperator] {
        &self.states
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// The reverted protocol: Bob prepares `ρ_s = M_s / tr M_s` with probability
/// `p(s) = tr M_s / d` and sends it back to Alice.
///
/// Elements with trace at or below [`ZERO_TRACE`] keep their outcome slot
/// with weight 0 and a maximally mixed placeholder state.
pub fn revert_protocol(povm: &Povm) -> Result<Ensemble> {
    let report = validate_povm(povm, POVM_TOL);
    if !report.passed {
        return Err(Error::Validation(format!(
            "reverted ensemble needs a valid POVM: PSD deficit {:e}, completeness deviation {:e}",
            report.max_psd_deficit, report.max_completeness_deviation
        )));
    }
    let d = povm.dim();
    let traces: Vec<f64> = povm.elements().iter().map(HermitianOperator::trace).collect();
    if traces.iter().all(|&t| t <= ZERO_TRACE) {
        return Err(Error::Structural("every POVM element has zero trace".into()));
    }
    let total: f64 = traces.iter().map(|&t| t.max(0.0)).sum();
    let mut states = Vec::with_capacity(traces.len());
    let mut weights = Vec::with_capacity(traces.len());
    for (s, (e, &t)) in povm.elements().iter().zip(&traces).enumerate() {
        if t <= ZERO_TRACE {
            log::warn!("POVM element {s} has trace {t:e}; it gets weight 0 in the reverted ensemble");
            states.push(HermitianOperator::identity(d).scaled(1.0 / d as f64));
            weights.push(0.0);
        } else {
            states.push(e.scaled(1.0 / t));
            // tr M_s / d, renormalised by the actual trace sum to absorb rounding
            weights.push(t / total);
        }
    }
    Ok(Ensemble { states, weights })
}

/// Projective measurement `{|i⟩⟨i|}` onto an orthonormal basis.
pub fn projector_povm(basis: &Basis) -> Result<Povm> {
    let dev = basis.orthonormality_deviation();
    if dev > NORM_TOL {
        return Err(Error::Validation(format!(
            "basis is not orthonormal: max deviation {dev:e}"
        )));
    }
    Povm::new(basis.vectors().iter().map(StateVector::projector).collect())
}

/// Orthonormalises the columns of a tall matrix (QR with a positive real
/// diagonal in `R`), returning the isometry `Q`.
pub fn orthonormalize_columns(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = a.shape();
    if rows < cols {
        return Err(Error::Argument(format!(
            "cannot orthonormalise {cols} columns in dimension {rows}"
        )));
    }
    let qr = a.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let rjj = r[(j, j)];
        let norm = rjj.norm();
        if norm.is_nan() || norm <= 1e-300 || !norm.is_finite() {
            return Err(Error::Validation("matrix is rank deficient".into()));
        }
        let phase = rjj / norm;
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(q)
}
