//! Canonical quantization of the reduced systems.
//!
//! Position and momentum matrices are built in two bases: the oscillator
//! number basis (ladder matrices; the reference truth, needing no boundary
//! conditions) and a uniform position grid on (-L, L) with Dirichlet ends.
//! The constraint operator M = ±(R^2 - p^2 - q^2) is diagonalized and the
//! physical subspace is the span of its positive eigenvectors; the
//! Hamiltonian spectrum on that subspace is (2/3) lambda^(3/2). States with
//! non-positive constraint eigenvalue are discarded — the quantum image of
//! the classical restriction of the phase space.
//!
//! The discretization grid deliberately covers the whole box for both models
//! rather than only the classically allowed interval: the positivity
//! projection itself enforces the restriction, and the grid spectrum then
//! converges to the number-basis values at O(h^2). A hard wall at the
//! classical turning radius would instead shift every eigenvalue by a
//! basis-mismatch offset that no grid refinement removes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ModelId;

/// Hermiticity tolerance applied to every operator matrix.
pub const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantError {
    #[error("invalid quantization parameters: {0}")]
    InvalidParams(String),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("operator dimensions or bases do not match")]
    DimensionMismatch,
    #[error("matrix is not Hermitian (defect {0:e})")]
    NonHermitian(f64),
}

/// Planck constant, radius, and model choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizationParams {
    pub hbar: f64,
    pub r: f64,
    pub model: ModelId,
}

impl QuantizationParams {
    pub fn new(hbar: f64, r: f64, model: ModelId) -> Result<Self, QuantError> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(QuantError::InvalidParams(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        if !(r >= 0.0) || !r.is_finite() {
            return Err(QuantError::InvalidParams(format!(
                "radius must be nonnegative, got {r}"
            )));
        }
        Ok(QuantizationParams { hbar, r, model })
    }

    pub fn r_squared(&self) -> f64 {
        self.r * self.r
    }
}

/// Basis choice: oscillator number basis of the given dimension, or a
/// uniform Dirichlet grid of `points` interior nodes on (-L, L) with
/// L = box_scale * R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BasisSpec {
    Number { n_max: usize },
    Grid { points: usize, box_scale: f64 },
}

impl BasisSpec {
    pub fn number(n_max: usize) -> Result<Self, QuantError> {
        let b = BasisSpec::Number { n_max };
        b.validate()?;
        Ok(b)
    }

    pub fn grid(points: usize, box_scale: f64) -> Result<Self, QuantError> {
        let b = BasisSpec::Grid { points, box_scale };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), QuantError> {
        match *self {
            BasisSpec::Number { n_max } => {
                if n_max < 2 {
                    return Err(QuantError::InvalidBasis(format!(
                        "number basis needs n_max >= 2, got {n_max}"
                    )));
                }
            }
            BasisSpec::Grid { points, box_scale } => {
                if points < 16 {
                    return Err(QuantError::InvalidBasis(format!(
                        "grid basis needs at least 16 points, got {points}"
                    )));
                }
                if !(box_scale > 1.0) || !box_scale.is_finite() {
                    return Err(QuantError::InvalidBasis(format!(
                        "box scale L/R must exceed 1, got {box_scale}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        match *self {
            BasisSpec::Number { n_max } => n_max,
            BasisSpec::Grid { points, .. } => points,
        }
    }

    /// Grid nodes and spacing for the given radius; `None` for number bases.
    pub fn grid_geometry(&self, r: f64) -> Option<(Vec<f64>, f64)> {
        match *self {
            BasisSpec::Grid { points, box_scale } => {
                let l = box_scale * r;
                let h = 2.0 * l / (points as f64 + 1.0);
                let xs = (1..=points).map(|i| -l + i as f64 * h).collect();
                Some((xs, h))
            }
            BasisSpec::Number { .. } => None,
        }
    }

    pub fn describe(&self, r: f64) -> String {
        match *self {
            BasisSpec::Number { n_max } => format!("number basis, {n_max} states"),
            BasisSpec::Grid { points, box_scale } => {
                let l = box_scale * r;
                format!("Dirichlet grid, {points} points on (-{l}, {l})")
            }
        }
    }
}

/// Dense complex operator matrix tagged with its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub data: DMatrix<Complex64>,
    pub basis: BasisSpec,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// max |M_ij - conj(M_ji)| over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                defect = defect.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        defect
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() < HERMITICITY_TOL
    }
}

/// Build the position and momentum matrices in the requested basis.
///
/// Number basis: Q = sqrt(hbar/2)(a + a†), P = i sqrt(hbar/2)(a† - a) with
/// ladder elements sqrt(n+1). Grid basis: Q diagonal on the nodes, P the
/// antisymmetric central first difference times -i hbar.
pub fn build_operators(
    basis: &BasisSpec,
    params: &QuantizationParams,
) -> Result<(OperatorMatrix, OperatorMatrix), QuantError> {
    basis.validate()?;
    match *basis {
        BasisSpec::Number { n_max } => {
            let n = n_max;
            let c = (params.hbar / 2.0).sqrt();
            let mut q = DMatrix::zeros(n, n);
            let mut p = DMatrix::zeros(n, n);
            for k in 1..n {
                let elem = (k as f64).sqrt();
                // a[k-1, k] = sqrt(k); a†[k, k-1] = sqrt(k)
                q[(k - 1, k)] = Complex64::new(c * elem, 0.0);
                q[(k, k - 1)] = Complex64::new(c * elem, 0.0);
                p[(k - 1, k)] = Complex64::new(0.0, -c * elem);
                p[(k, k - 1)] = Complex64::new(0.0, c * elem);
            }
            Ok((
                OperatorMatrix {
                    data: q,
                    basis: *basis,
                },
                OperatorMatrix {
                    data: p,
                    basis: *basis,
                },
            ))
        }
        BasisSpec::Grid { points, .. } => {
            let (xs, h) = basis
                .grid_geometry(params.r)
                .expect("grid basis has geometry");
            let n = points;
            let mut q = DMatrix::zeros(n, n);
            for (i, &x) in xs.iter().enumerate() {
                q[(i, i)] = Complex64::new(x, 0.0);
            }
            let mut p = DMatrix::zeros(n, n);
            let coeff = params.hbar / (2.0 * h);
            for i in 0..n {
                if i + 1 < n {
                    p[(i, i + 1)] = Complex64::new(0.0, -coeff);
                    p[(i + 1, i)] = Complex64::new(0.0, coeff);
                }
            }
            Ok((
                OperatorMatrix {
                    data: q,
                    basis: *basis,
                },
                OperatorMatrix {
                    data: p,
                    basis: *basis,
                },
            ))
        }
    }
}

/// The kinetic square in the grid basis comes from the central second
/// difference with Dirichlet ends, not from squaring the first-difference
/// matrix (which decouples even and odd nodes).
fn grid_p_squared(basis: &BasisSpec, params: &QuantizationParams) -> DMatrix<Complex64> {
    let (_, h) = basis
        .grid_geometry(params.r)
        .expect("grid basis has geometry");
    let n = basis.dimension();
    let k = params.hbar * params.hbar / (h * h);
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(2.0 * k, 0.0);
        if i + 1 < n {
            m[(i, i + 1)] = Complex64::new(-k, 0.0);
            m[(i + 1, i)] = Complex64::new(-k, 0.0);
        }
    }
    m
}

/// Truncation/discretization defect of the canonical commutator [Q, P] = i hbar.
///
/// Number basis: entrywise max of |(QP - PQ - i hbar I)| over the block that
/// excludes the last basis row and column (the truncation edge). Grid basis:
/// the first-difference matrix cannot satisfy the identity entrywise, so the
/// defect is measured as the residual applied to a smooth probe state
/// (a unit-amplitude Gaussian), excluding the boundary-adjacent rows; Taylor
/// expansion of the central difference makes this O(h^2).
pub fn commutator_defect(
    q: &OperatorMatrix,
    p: &OperatorMatrix,
    params: &QuantizationParams,
) -> Result<f64, QuantError> {
    if q.dim() != p.dim() || q.basis != p.basis {
        return Err(QuantError::DimensionMismatch);
    }
    let n = q.dim();
    let mut residual = &q.data * &p.data - &p.data * &q.data;
    let ihbar = Complex64::new(0.0, params.hbar);
    for i in 0..n {
        residual[(i, i)] -= ihbar;
    }
    match q.basis {
        BasisSpec::Number { .. } => {
            let mut defect: f64 = 0.0;
            for i in 0..n.saturating_sub(1) {
                for j in 0..n.saturating_sub(1) {
                    defect = defect.max(residual[(i, j)].norm());
                }
            }
            Ok(defect)
        }
        BasisSpec::Grid { .. } => {
            let (xs, _) = q.basis.grid_geometry(params.r).expect("grid geometry");
            let probe = DVector::from_iterator(
                n,
                xs.iter()
                    .map(|&x| Complex64::new((-x * x / 2.0).exp(), 0.0)),
            );
            let image = residual * probe;
            let mut defect: f64 = 0.0;
            for i in 1..n.saturating_sub(1) {
                defect = defect.max(image[i].norm());
            }
            Ok(defect)
        }
    }
}

/// The constraint operator: M = R^2 - P^2 - Q^2 for model A,
/// M = P^2 + Q^2 - R^2 for model B. Hermitian by construction.
pub fn constraint_operator(
    q: &OperatorMatrix,
    p: &OperatorMatrix,
    params: &QuantizationParams,
) -> Result<OperatorMatrix, QuantError> {
    if q.dim() != p.dim() || q.basis != p.basis {
        return Err(QuantError::DimensionMismatch);
    }
    let n = q.dim();
    let p_squared = match q.basis {
        BasisSpec::Number { .. } => &p.data * &p.data,
        BasisSpec::Grid { .. } => grid_p_squared(&q.basis, params),
    };
    let q_squared = &q.data * &q.data;
    let oscillator = p_squared + q_squared;
    let rr = Complex64::new(params.r_squared(), 0.0);
    let mut m = match params.model {
        ModelId::A => -oscillator,
        ModelId::B => oscillator,
    };
    let shift = match params.model {
        ModelId::A => rr,
        ModelId::B => -rr,
    };
    for i in 0..n {
        m[(i, i)] += shift;
    }
    Ok(OperatorMatrix {
        data: m,
        basis: q.basis,
    })
}

/// Spectrum of the constrained Hamiltonian on the physical subspace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralReport {
    pub params: QuantizationParams,
    pub basis: String,
    pub physical_dimension: usize,
    /// Hamiltonian eigenvalues (2/3) lambda^(3/2), descending.
    pub eigenvalues: Vec<f64>,
    pub discarded_count: usize,
    /// Non-positive eigenvalues of the constraint operator, descending.
    pub discarded: Vec<f64>,
}

impl SpectralReport {
    pub fn lowest(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectral report serialization")
    }

    /// CSV of the physical spectrum, one eigenvalue per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (i, e) in self.eigenvalues.iter().enumerate() {
            out.push_str(&format!("{i},{e}\n"));
        }
        out
    }
}

/// Diagonalize the Hermitian constraint operator, keep the strictly positive
/// part of the spectrum as the physical subspace, and map it through
/// f(lambda) = (2/3) lambda^(3/2).
pub fn physical_spectrum(
    m: &OperatorMatrix,
    params: &QuantizationParams,
) -> Result<SpectralReport, QuantError> {
    let defect = m.hermiticity_defect();
    if defect >= HERMITICITY_TOL {
        return Err(QuantError::NonHermitian(defect));
    }
    let eig = nalgebra::SymmetricEigen::new(m.data.clone());
    let mut lambdas: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));

    let mut eigenvalues = Vec::new();
    let mut discarded = Vec::new();
    for lambda in lambdas {
        if lambda > 0.0 {
            eigenvalues.push(2.0 / 3.0 * lambda.powf(1.5));
        } else {
            discarded.push(lambda);
        }
    }
    eigenvalues.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));

    Ok(SpectralReport {
        params: *params,
        basis: m.basis.describe(params.r),
        physical_dimension: eigenvalues.len(),
        eigenvalues,
        discarded_count: discarded.len(),
        discarded,
    })
}

/// Convenience: build operators, form the constraint operator, and return
/// the physical spectrum for the basis.
pub fn spectrum_in_basis(
    basis: &BasisSpec,
    params: &QuantizationParams,
) -> Result<SpectralReport, QuantError> {
    let (q, p) = build_operators(basis, params)?;
    let m = constraint_operator(&q, &p, params)?;
    physical_spectrum(&m, params)
}

/// One refinement level of the grid study.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub points: usize,
    pub h: f64,
    /// Lowest physical Hamiltonian eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Absolute errors against the number-basis reference.
    pub errors: Vec<f64>,
}

/// Grid-refinement study against the number-basis truth.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    /// Lowest physical eigenvalues in the number basis, ascending.
    pub reference: Vec<f64>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let k = self.reference.len();
        let mut out = String::from("h");
        for i in 1..=k {
            out.push_str(&format!(",eig_{i}"));
        }
        for i in 1..=k {
            out.push_str(&format!(",err_{i}"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{}", row.h));
            for i in 0..k {
                out.push_str(&format!(",{}", row.eigenvalues.get(i).copied().unwrap_or(f64::NAN)));
            }
            for i in 0..k {
                out.push_str(&format!(",{}", row.errors.get(i).copied().unwrap_or(f64::NAN)));
            }
            out.push('\n');
        }
        out
    }

    /// Least-squares slope of log(err_1) against log(h).
    pub fn lowest_error_slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter_map(|r| {
                let e = *r.errors.first()?;
                (e > 0.0).then(|| (r.h.ln(), e.ln()))
            })
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
    }
}

/// Run the grid spectrum for each size (independent jobs execute in
/// parallel) and tabulate the lowest `k` physical eigenvalues against the
/// number basis at `n_max_ref`.
pub fn grid_convergence_study(
    params: &QuantizationParams,
    sizes: &[usize],
    box_scale: f64,
    k: usize,
    n_max_ref: usize,
) -> Result<ConvergenceTable, QuantError> {
    let reference_report = spectrum_in_basis(&BasisSpec::number(n_max_ref)?, params)?;
    let mut reference: Vec<f64> = reference_report.eigenvalues.clone();
    reference.reverse(); // ascending
    reference.truncate(k);

    let mut results: Vec<Result<ConvergenceRow, QuantError>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = sizes
            .iter()
            .map(|&points| {
                let reference = reference.clone();
                scope.spawn(move || -> Result<ConvergenceRow, QuantError> {
                    let basis = BasisSpec::grid(points, box_scale)?;
                    let report = spectrum_in_basis(&basis, params)?;
                    let mut ascending = report.eigenvalues.clone();
                    ascending.reverse();
                    ascending.truncate(k);
                    let errors = ascending
                        .iter()
                        .zip(reference.iter())
                        .map(|(a, b)| (a - b).abs())
                        .collect();
                    let (_, h) = basis.grid_geometry(params.r).expect("grid geometry");
                    Ok(ConvergenceRow {
                        points,
                        h,
                        eigenvalues: ascending,
                        errors,
                    })
                })
            })
            .collect();
        for handle in handles {
            results.push(handle.join().expect("spectral job panicked"));
        }
    });

    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(ConvergenceTable { reference, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_a() -> QuantizationParams {
        QuantizationParams::new(1.0, 2.0, ModelId::A).unwrap()
    }

    fn params_b() -> QuantizationParams {
        QuantizationParams::new(1.0, 2.0, ModelId::B).unwrap()
    }

    #[test]
    fn ladder_q_element() {
        let (q, _) = build_operators(&BasisSpec::number(2).unwrap(), &params_a()).unwrap();
        let expect = 1.0 / 2.0_f64.sqrt();
        assert!((q.data[(0, 1)].re - expect).abs() < 1e-15);
        assert!(q.data[(0, 1)].im.abs() < 1e-15);
    }

    #[test]
    fn oscillator_is_diagonal_below_truncation_edge() {
        let n = 12;
        let params = params_a();
        let (q, p) = build_operators(&BasisSpec::number(n).unwrap(), &params).unwrap();
        let osc = &q.data * &q.data + &p.data * &p.data;
        for i in 0..n {
            for j in 0..n {
                if i == j && i < n - 1 {
                    let expect = params.hbar * (2 * i + 1) as f64;
                    assert!((osc[(i, j)].re - expect).abs() < 1e-12);
                    assert!(osc[(i, j)].im.abs() < 1e-15);
                } else if i != j {
                    assert!(osc[(i, j)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn hermiticity_of_all_operators() {
        let params = params_a();
        for basis in [
            BasisSpec::number(24).unwrap(),
            BasisSpec::grid(64, 4.0).unwrap(),
        ] {
            let (q, p) = build_operators(&basis, &params).unwrap();
            assert!(q.is_hermitian());
            assert!(p.is_hermitian());
            let m = constraint_operator(&q, &p, &params).unwrap();
            assert!(m.is_hermitian());
        }
    }

    #[test]
    fn grid_q_is_diagonal_on_the_nodes() {
        // 17 interior points on (-2, 2): box_scale 1 is rejected (L must
        // exceed R), so widen slightly and check the node values directly.
        let params = params_a();
        let basis = BasisSpec::grid(17, 1.5).unwrap();
        let (q, _) = build_operators(&basis, &params).unwrap();
        let (xs, h) = basis.grid_geometry(params.r).unwrap();
        assert!((h - 6.0 / 18.0).abs() < 1e-15);
        for (i, &x) in xs.iter().enumerate() {
            assert_eq!(q.data[(i, i)], Complex64::new(x, 0.0));
        }
    }

    #[test]
    fn commutator_defect_number_basis() {
        let params = params_a();
        let (q, p) = build_operators(&BasisSpec::number(40).unwrap(), &params).unwrap();
        let defect = commutator_defect(&q, &p, &params).unwrap();
        assert!(defect < 1e-12, "defect {defect}");

        // Scaling hbar rescales i hbar I; the interior block still cancels.
        let params2 = QuantizationParams::new(2.0, 2.0, ModelId::A).unwrap();
        let (q2, p2) = build_operators(&BasisSpec::number(40).unwrap(), &params2).unwrap();
        let defect2 = commutator_defect(&q2, &p2, &params2).unwrap();
        assert!(defect2 < 1e-12, "defect {defect2}");
    }

    #[test]
    fn commutator_defect_grid_is_second_order() {
        let params = params_a();
        // h = 0.02: 200 points spanning (-2.01, 2.01).
        let basis = BasisSpec::grid(200, 1.005).unwrap();
        let (q, p) = build_operators(&basis, &params).unwrap();
        let defect = commutator_defect(&q, &p, &params).unwrap();
        let (_, h) = basis.grid_geometry(params.r).unwrap();
        assert!((h - 0.02).abs() < 1e-12);
        assert!(defect > 0.0);
        assert!(defect < params.hbar * h * h, "defect {defect} vs h^2 {}", h * h);

        // Halving h divides the defect by about 4.
        let basis2 = BasisSpec::grid(401, 1.005).unwrap();
        let (q2, p2) = build_operators(&basis2, &params).unwrap();
        let defect2 = commutator_defect(&q2, &p2, &params).unwrap();
        let ratio = defect / defect2;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let params = params_a();
        let (q, _) = build_operators(&BasisSpec::number(10).unwrap(), &params).unwrap();
        let (_, p) = build_operators(&BasisSpec::number(12).unwrap(), &params).unwrap();
        assert_eq!(
            commutator_defect(&q, &p, &params),
            Err(QuantError::DimensionMismatch)
        );
    }

    #[test]
    fn constraint_operator_diagonal_entries() {
        let params = params_a();
        let (q, p) = build_operators(&BasisSpec::number(10).unwrap(), &params).unwrap();
        let m = constraint_operator(&q, &p, &params).unwrap();
        for n in 0..9 {
            let expect = 4.0 - (2 * n + 1) as f64;
            assert!((m.data[(n, n)].re - expect).abs() < 1e-12);
        }
        let pb = params_b();
        let mb = constraint_operator(&q, &p, &pb).unwrap();
        for n in 0..9 {
            let expect = (2 * n + 1) as f64 - 4.0;
            assert!((mb.data[(n, n)].re - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn model_a_number_spectrum() {
        let params = params_a();
        let report = spectrum_in_basis(&BasisSpec::number(10).unwrap(), &params).unwrap();
        assert_eq!(report.physical_dimension, 2);
        let expect_high = 2.0 / 3.0 * 3.0_f64.powf(1.5); // 2*sqrt(3)
        let expect_low = 2.0 / 3.0;
        assert!((report.eigenvalues[0] - expect_high).abs() < 1e-10);
        assert!((report.eigenvalues[1] - expect_low).abs() < 1e-10);
        assert!(report.eigenvalues.iter().all(|&e| e >= 0.0));
        assert_eq!(report.discarded_count + report.physical_dimension, 10);
        assert!(report.discarded.iter().all(|&l| l <= 0.0));
    }

    #[test]
    fn empty_disc_has_no_physical_states() {
        // R = 0: M = -(P^2 + Q^2) is negative definite.
        let params = QuantizationParams::new(1.0, 0.0, ModelId::A).unwrap();
        let (q, p) = build_operators(&BasisSpec::number(8).unwrap(), &params).unwrap();
        let m = constraint_operator(&q, &p, &params).unwrap();
        let report = physical_spectrum(&m, &params).unwrap();
        assert_eq!(report.physical_dimension, 0);

        // R^2 < hbar likewise removes every state.
        let small = QuantizationParams::new(1.0, 0.5, ModelId::A).unwrap();
        let r2 = spectrum_in_basis(&BasisSpec::number(8).unwrap(), &small).unwrap();
        assert_eq!(r2.physical_dimension, 0);
    }

    #[test]
    fn model_b_number_spectrum() {
        let report = spectrum_in_basis(&BasisSpec::number(6).unwrap(), &params_b()).unwrap();
        // Physical levels are n >= 2; the lowest Hamiltonian eigenvalue is
        // (2/3) * 1^(3/2).
        assert!((report.lowest().unwrap() - 2.0 / 3.0).abs() < 1e-10);
        let larger = spectrum_in_basis(&BasisSpec::number(40).unwrap(), &params_b()).unwrap();
        assert!((larger.lowest().unwrap() - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn truncation_stability_for_model_a() {
        // Beyond the last physical level the diagonal matrix gains only
        // negative entries, so the physical block is unchanged.
        let params = params_a();
        let baseline = spectrum_in_basis(&BasisSpec::number(6).unwrap(), &params).unwrap();
        for n_max in [8, 12, 20, 40] {
            let report = spectrum_in_basis(&BasisSpec::number(n_max).unwrap(), &params).unwrap();
            assert_eq!(report.physical_dimension, baseline.physical_dimension);
            for (a, b) in report.eigenvalues.iter().zip(baseline.eigenvalues.iter()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hbar_scaling() {
        // hbar -> c hbar with R^2 -> c R^2 scales M by c and the Hamiltonian
        // spectrum by c^(3/2).
        let c: f64 = 2.37;
        let base = spectrum_in_basis(&BasisSpec::number(16).unwrap(), &params_a()).unwrap();
        let scaled_params =
            QuantizationParams::new(c, 2.0 * c.sqrt(), ModelId::A).unwrap();
        let scaled = spectrum_in_basis(&BasisSpec::number(16).unwrap(), &scaled_params).unwrap();
        assert_eq!(base.physical_dimension, scaled.physical_dimension);
        for (a, b) in base.eigenvalues.iter().zip(scaled.eigenvalues.iter()) {
            let expect = a * c.powf(1.5);
            assert!((b - expect).abs() < 1e-10 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let params = params_a();
        let mut data = DMatrix::zeros(4, 4);
        data[(0, 1)] = Complex64::new(1.0, 0.5);
        data[(1, 0)] = Complex64::new(1.0, 0.5); // not the conjugate
        let m = OperatorMatrix {
            data,
            basis: BasisSpec::Number { n_max: 4 },
        };
        assert!(matches!(
            physical_spectrum(&m, &params),
            Err(QuantError::NonHermitian(_))
        ));
    }

    #[test]
    fn grid_study_converges_to_number_basis() {
        // Model B: errors shrink ~4x per refinement and the finest grid is
        // within 2 percent of the number-basis truth.
        let table = grid_convergence_study(&params_b(), &[100, 200, 400], 8.0, 2, 128).unwrap();
        assert!((table.reference[0] - 2.0 / 3.0).abs() < 1e-10);
        let errs: Vec<f64> = table.rows.iter().map(|r| r.errors[0]).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.0..5.5).contains(&ratio), "ratio {ratio} errs {errs:?}");
        }
        let slope = table.lowest_error_slope().unwrap();
        assert!((1.7..=2.3).contains(&slope), "slope {slope}");
        let finest = table.rows.last().unwrap();
        let rel = finest.errors[0] / table.reference[0];
        assert!(rel < 0.02, "relative error {rel}");

        // Model A: same behaviour for the disc spectrum.
        let table_a = grid_convergence_study(&params_a(), &[100, 200, 400], 8.0, 2, 128).unwrap();
        let slope_a = table_a.lowest_error_slope().unwrap();
        assert!((1.7..=2.3).contains(&slope_a), "slope {slope_a}");
        let finest_a = table_a.rows.last().unwrap();
        assert!(finest_a.errors[0] / table_a.reference[0] < 0.02);
    }

    #[test]
    fn minimal_grid_runs() {
        let basis = BasisSpec::grid(16, 8.0).unwrap();
        let report = spectrum_in_basis(&basis, &params_a()).unwrap();
        assert_eq!(report.physical_dimension + report.discarded_count, 16);
    }

    #[test]
    fn basis_validation() {
        assert!(BasisSpec::number(1).is_err());
        assert!(BasisSpec::grid(5, 8.0).is_err());
        assert!(BasisSpec::grid(32, 1.0).is_err());
    }
}
