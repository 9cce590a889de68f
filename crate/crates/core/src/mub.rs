//! Mutually unbiased bases.
//!
//! For prime `d` the standard family is the computational basis plus the
//! quadratic-phase bases
//!
//! ```text
//! |i_m⟩_k = ω^(m·k² + i·k) / √d,   ω = exp(2πi/d),   m = 0, …, d-1
//! ```
//!
//! (with the Z, X, Y eigenbases used for `d = 2`). Other dimensions are
//! supported only through [`import_family`].

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{StateVector, WireVector, C64, NORM_TOL};

/// Tolerance applied to families loaded from disk.
pub const IMPORT_TOL: f64 = 1e-8;

/// An orthonormal basis `{|i⟩ : i = 1..d}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    label: String,
    vectors: Vec<StateVector>,
}

impl Basis {
    /// Accepts `d` vectors of dimension `d` that are orthonormal within [`NORM_TOL`].
    pub fn new(label: impl Into<String>, vectors: Vec<StateVector>) -> Result<Self> {
        let basis = Self::unchecked(label, vectors)?;
        let dev = basis.orthonormality_deviation();
        if dev > NORM_TOL {
            return Err(Error::Validation(format!(
                "basis '{}' is not orthonormal: max deviation {dev:e}",
                basis.label
            )));
        }
        Ok(basis)
    }

    /// Structural checks only.
    pub(crate) fn unchecked(label: impl Into<String>, vectors: Vec<StateVector>) -> Result<Self> {
        let label = label.into();
        let d = vectors.first().map(StateVector::dim).unwrap_or(0);
        if d < 2 || vectors.len() != d || vectors.iter().any(|v| v.dim() != d) {
            return Err(Error::Structural(format!(
                "basis '{label}' must hold d vectors of dimension d >= 2"
            )));
        }
        Ok(Self { label, vectors })
    }

    pub fn computational(dim: usize) -> Result<Self> {
        let vectors = (0..dim)
            .map(|k| StateVector::basis_state(dim, k))
            .collect::<Result<Vec<_>>>()?;
        Self::new("Z", vectors)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    /// `max_{i,j} |⟨i|j⟩ - δ_ij|`.
    pub fn orthonormality_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((a.inner(b) - C64::new(target, 0.0)).norm());
            }
        }
        dev
    }
}

/// `M` bases of a common dimension `d`.
///
/// Construction checks structure only; use [`check_unbiased`] for the
/// numeric unbiasedness invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct MubFamily {
    dim: usize,
    bases: Vec<Basis>,
}

impl MubFamily {
    pub fn new(bases: Vec<Basis>) -> Result<Self> {
        let dim = bases
            .first()
            .map(Basis::dim)
            .ok_or_else(|| Error::Structural("a family needs at least one basis".into()))?;
        if let Some(b) = bases.iter().find(|b| b.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: b.dim(),
            });
        }
        Ok(Self { dim, bases })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    /// The first `count` bases.
    pub fn truncated(&self, count: usize) -> Result<Self> {
        if count == 0 || count > self.len() {
            return Err(Error::Argument(format!(
                "cannot take {count} bases from a family of {}",
                self.len()
            )));
        }
        Self::new(self.bases[..count].to_vec())
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// The first `count` bases of the standard complete family for prime `dim`.
pub fn standard_mubs(dim: usize, count: usize) -> Result<MubFamily> {
    if !is_prime(dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    if count == 0 || count > dim + 1 {
        return Err(Error::Argument(format!(
            "number of bases must lie in 1..={} for d={dim}, got {count}",
            dim + 1
        )));
    }
    let mut bases = vec![Basis::computational(dim)?];
    if dim == 2 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let re = |x: f64| C64::new(x, 0.0);
        let x = vec![
            StateVector::new(vec![re(h), re(h)])?,
            StateVector::new(vec![re(h), re(-h)])?,
        ];
        let y = vec![
            StateVector::new(vec![re(h), C64::new(0.0, h)])?,
            StateVector::new(vec![re(h), C64::new(0.0, -h)])?,
        ];
        bases.push(Basis::new("X", x)?);
        bases.push(Basis::new("Y", y)?);
    } else {
        for m in 0..dim {
            bases.push(quadratic_phase_basis(dim, m)?);
        }
    }
    bases.truncate(count);
    MubFamily::new(bases)
}

fn quadratic_phase_basis(dim: usize, m: usize) -> Result<Basis> {
    let norm = 1.0 / (dim as f64).sqrt();
    let vectors = (0..dim)
        .map(|i| {
            let amps = (0..dim)
                .map(|k| {
                    // exponent reduced mod d keeps the phase argument small
                    let e = (m * k * k + i * k) % dim;
                    C64::from_polar(norm, 2.0 * PI * e as f64 / dim as f64)
                })
                .collect();
            StateVector::new(amps).map(StateVector::with_canonical_phase)
        })
        .collect::<Result<Vec<_>>>()?;
    let label = if m == 0 { "F".to_string() } else { format!("Q{m}") };
    Basis::new(label, vectors)
}

/// Numeric deviations of a family from orthonormality and unbiasedness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnbiasednessReport {
    pub max_orthonormality_deviation: f64,
    /// `max | |⟨i_m|j_n⟩|² - 1/d |` over `m ≠ n`.
    pub max_overlap_deviation: f64,
    pub passed: bool,
}

pub fn check_unbiased(family: &MubFamily, tol: f64) -> UnbiasednessReport {
    let d = family.dim() as f64;
    let ortho = family
        .bases()
        .iter()
        .map(Basis::orthonormality_deviation)
        .fold(0.0, f64::max);
    let mut overlap: f64 = 0.0;
    for (m, a) in family.bases().iter().enumerate() {
        for b in &family.bases()[m + 1..] {
            for u in a.vectors() {
                for v in b.vectors() {
                    overlap = overlap.max((u.inner(v).norm_sqr() - 1.0 / d).abs());
                }
            }
        }
    }
    UnbiasednessReport {
        max_orthonormality_deviation: ortho,
        max_overlap_deviation: overlap,
        passed: ortho <= tol && overlap <= tol,
    }
}

#[derive(Serialize, Deserialize)]
struct BasisWire {
    label: String,
    vectors: Vec<WireVector>,
}

#[derive(Serialize, Deserialize)]
struct FamilyWire {
    dim: usize,
    bases: Vec<BasisWire>,
}

pub fn family_to_json(family: &MubFamily) -> Result<String> {
    let wire = FamilyWire {
        dim: family.dim(),
        bases: family
            .bases()
            .iter()
            .map(|b| BasisWire {
                label: b.label().to_string(),
                vectors: b.vectors().iter().cloned().map(WireVector::from).collect(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&wire)?)
}

/// Parses a basis-family document and accepts it only if it is unbiased
/// within [`IMPORT_TOL`].
pub fn family_from_json(text: &str) -> Result<MubFamily> {
    let wire: FamilyWire = serde_json::from_str(text)?;
    let bases = wire
        .bases
        .into_iter()
        .map(|b| {
            let vectors = b
                .vectors
                .into_iter()
                .map(|v| {
                    let amps = v.into_iter().map(crate::quantum::wire_to_complex).collect();
                    StateVector::with_tolerance(amps, IMPORT_TOL)
                })
                .collect::<Result<Vec<_>>>()?;
            Basis::unchecked(b.label, vectors)
        })
        .collect::<Result<Vec<_>>>()?;
    let family = MubFamily::new(bases)?;
    if family.dim() != wire.dim {
        return Err(Error::DimensionMismatch {
            expected: wire.dim,
            got: family.dim(),
        });
    }
    let report = check_unbiased(&family, IMPORT_TOL);
    if !report.passed {
        return Err(Error::Validation(format!(
            "family is not mutually unbiased: orthonormality deviation {:e}, overlap deviation {:e}",
            report.max_orthonormality_deviation, report.max_overlap_deviation
        )));
    }
    Ok(family)
}

pub fn import_family(path: impl AsRef<Path>) -> Result<MubFamily> {
    family_from_json(&fs::read_to_string(path)?)
}

pub fn export_family(family: &MubFamily, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, family_to_json(family)?)?;
    Ok(())
}
