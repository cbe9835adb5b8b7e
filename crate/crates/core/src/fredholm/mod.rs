//! Invariant order-0 operators on circle models, truncated to Fourier modes
//! `−N..N` and compressed to isotypical components.
//!
//! A symbol `a(x, ±)` is quantized by letting mode `m > 0` see `a(·, +)`,
//! mode `m < 0` see `a(·, −)` and mode `0` the average, so that the block
//! of the truncation at `(k, m)` is the Fourier coefficient `â^{sgn m}_{k−m}`.
//! Γ acts on sections by `(g·u)(x) = B(g) u(g⁻¹·x)`, which on modes reads
//! `(g·u)^_m = B(g) û_{εm} e^{−imθ}` for `g·x = εx + θ`. Modes `k` and `−k`
//! are coupled only with each other, so isotypical bases are built pair by
//! pair.

mod probe;
mod scenarios;

pub use probe::{
    compact_perturbation_test, fredholm_probe, index_after_probe, local_alpha_invertible,
    numerical_index, power_norm, window_bank, IndexLevel, IndexReport, LocalReport, Perturbation,
    PerturbationReport, ProbeLevel, ProbeOptions, ProbeReport, ProbeVerdict, Window, WindowResult,
    COMPACT_ALLOWANCE,
};
pub use scenarios::{builtin_scenario, scenarios, CircleFamily, Scenario, SCENARIO_NAMES};

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::action::{circle_model, CircleAction};
use crate::error::{Error, Result};
use crate::grp::{FiniteGroup, MatrixRep};
use crate::linalg::{c, operator_norm, projector_basis, trace, CMat, CVec, C64};
use crate::symbol::{EquivariantBundle, SymbolSample};

/// Tolerance on the invariance of circle symbols.
pub const SYMBOL_TOL: f64 = 1e-9;
/// Relative tolerance on `‖gTg⁻¹ − T‖`.
pub const EQUIVARIANCE_TOL: f64 = 1e-8;

/// `a(x, ±)` and an optional lower-order part `b(x)`, each a finite Fourier
/// series `Σ_j c_j e^{ijx}` with `n × n` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleSymbol {
    pub dim: usize,
    pub plus: Vec<(i64, CMat)>,
    pub minus: Vec<(i64, CMat)>,
    /// Contributes `b̂_{k−m} / (1 + |m|)` to the truncation.
    pub lower: Vec<(i64, CMat)>,
}

fn eval_series(series: &[(i64, CMat)], dim: usize, x: f64) -> CMat {
    let mut out = CMat::zeros(dim, dim);
    for (j, m) in series {
        out += m * C64::from_polar(1.0, *j as f64 * x);
    }
    out
}

fn coefficient(series: &[(i64, CMat)], j: i64) -> Option<&CMat> {
    series.iter().find(|(k, _)| *k == j).map(|(_, m)| m)
}

impl CircleSymbol {
    /// The constant symbol `a(x, ±) = value`.
    pub fn constant(value: CMat) -> Self {
        CircleSymbol {
            dim: value.nrows(),
            plus: vec![(0, value.clone())],
            minus: vec![(0, value)],
            lower: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::constant(CMat::identity(dim, dim))
    }

    pub fn eval(&self, x: f64, plus: bool) -> CMat {
        eval_series(if plus { &self.plus } else { &self.minus }, self.dim, x)
    }

    pub fn eval_lower(&self, x: f64) -> CMat {
        eval_series(&self.lower, self.dim, x)
    }

    /// Largest `|j|` among the Fourier coefficients.
    pub fn bandwidth(&self) -> usize {
        self.plus
            .iter()
            .chain(&self.minus)
            .chain(&self.lower)
            .map(|(j, _)| j.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Merge repeated frequencies and drop zero coefficients.
    fn normalize(series: Vec<(i64, CMat)>) -> Vec<(i64, CMat)> {
        let mut out: Vec<(i64, CMat)> = Vec::new();
        for (j, m) in series {
            match out.iter_mut().find(|(k, _)| *k == j) {
                Some((_, acc)) => *acc += m,
                None => out.push((j, m)),
            }
        }
        out.retain(|(_, m)| m.norm() > 0.0);
        out.sort_by_key(|(j, _)| *j);
        out
    }

    pub fn new(
        dim: usize,
        plus: Vec<(i64, CMat)>,
        minus: Vec<(i64, CMat)>,
        lower: Vec<(i64, CMat)>,
    ) -> Result<Self> {
        for (j, m) in plus.iter().chain(&minus).chain(&lower) {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::validation(format!(
                    "coefficient at frequency {j} is not {dim}x{dim}"
                )));
            }
        }
        Ok(CircleSymbol {
            dim,
            plus: Self::normalize(plus),
            minus: Self::normalize(minus),
            lower: Self::normalize(lower),
        })
    }

    /// Upper bound for the operator norm of the quantization.
    fn norm_bound(&self) -> f64 {
        let sum = |s: &[(i64, CMat)]| s.iter().map(|(_, m)| operator_norm(m)).sum::<f64>();
        sum(&self.plus).max(sum(&self.minus)) + sum(&self.lower)
    }
}

/// A finite group acting on the circle, a constant fiber representation on
/// `Cⁿ` and an invariant symbol.
#[derive(Clone, Debug)]
pub struct CircleOperatorModel {
    name: String,
    group: Arc<FiniteGroup>,
    action: CircleAction,
    fiber: MatrixRep,
    symbol: CircleSymbol,
    order: i32,
}

impl CircleOperatorModel {
    pub fn new(
        name: impl Into<String>,
        group: Arc<FiniteGroup>,
        action: CircleAction,
        fiber: MatrixRep,
        symbol: CircleSymbol,
    ) -> Result<Self> {
        action.validate(&group)?;
        if fiber.group_order() != group.order() {
            return Err(Error::validation(
                "fiber representation lives on a different group",
            ));
        }
        fiber.validate(&group)?;
        if symbol.dim != fiber.dim() {
            return Err(Error::validation(format!(
                "symbol is {0}x{0} but the fiber has dimension {1}",
                symbol.dim,
                fiber.dim()
            )));
        }
        let model = CircleOperatorModel {
            name: name.into(),
            group,
            action,
            fiber,
            symbol,
            order: 0,
        };
        model.check_invariance()?;
        Ok(model)
    }

    /// Same group, action and fiber with another symbol.
    pub fn with_symbol(&self, symbol: CircleSymbol) -> Result<Self> {
        Self::new(
            self.name.clone(),
            self.group.clone(),
            self.action.clone(),
            self.fiber.clone(),
            symbol,
        )
    }

    /// Declare the order of the operator. The symbol is read at order 0.
    pub fn with_order(mut self, m: i32) -> Self {
        self.order = m;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn action(&self) -> &CircleAction {
        &self.action
    }

    pub fn fiber(&self) -> &MatrixRep {
        &self.fiber
    }

    pub fn symbol(&self) -> &CircleSymbol {
        &self.symbol
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.fiber.dim()
    }

    /// `(θ_g, ε_g)` with `g·x = ε_g x + θ_g`.
    fn motion(&self, g: usize) -> (f64, i8) {
        let (k, eps) = self.action.elements[g];
        (2.0 * PI * k as f64 / self.action.n as f64, eps)
    }

    /// `a(g·x, ε_g s) = B(g) a(x, s) B(g)⁻¹` on a fixed set of angles.
    pub fn check_invariance(&self) -> Result<()> {
        let bound = SYMBOL_TOL * self.symbol.norm_bound().max(1.0);
        for j in 0..32 {
            let x = 2.0 * PI * j as f64 / 32.0 + 0.123;
            for g in self.group.elements() {
                let (theta, eps) = self.motion(g);
                let b = self.fiber.matrix(g);
                let y = eps as f64 * x + theta;
                for plus in [true, false] {
                    let lhs = self.symbol.eval(y, if eps > 0 { plus } else { !plus });
                    let rhs = b * self.symbol.eval(x, plus) * b.adjoint();
                    if (lhs - rhs).norm() > bound {
                        return Err(Error::Invariance(format!(
                            "symbol of {} is not invariant under {} at x = {x:.3}",
                            self.name,
                            self.group.element_label(g)
                        )));
                    }
                }
                let lhs = self.symbol.eval_lower(y);
                let rhs = b * self.symbol.eval_lower(x) * b.adjoint();
                if (lhs - rhs).norm() > bound {
                    return Err(Error::Invariance(format!(
                        "lower-order part of {} is not invariant under {}",
                        self.name,
                        self.group.element_label(g)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Block `(k, m)` of the quantization.
    pub fn block(&self, k: i64, m: i64) -> CMat {
        let n = self.dim();
        let j = k - m;
        let pick = |s: &[(i64, CMat)]| {
            coefficient(s, j)
                .cloned()
                .unwrap_or_else(|| CMat::zeros(n, n))
        };
        let mut out = match m.signum() {
            1 => pick(&self.symbol.plus),
            -1 => pick(&self.symbol.minus),
            _ => (pick(&self.symbol.plus) + pick(&self.symbol.minus)) * c(0.5, 0.0),
        };
        if let Some(b) = coefficient(&self.symbol.lower, j) {
            out += b * c(1.0 / (1.0 + m.unsigned_abs() as f64), 0.0);
        }
        out
    }

    /// Matrix of `g` on the modes of pair `p` (`[p, −p]`, or `[0]`).
    pub fn pair_action(&self, g: usize, p: usize) -> CMat {
        let n = self.dim();
        let (theta, eps) = self.motion(g);
        let b = self.fiber.matrix(g);
        let modes = pair_modes(p);
        let mut out = CMat::zeros(n * modes.len(), n * modes.len());
        for (r, &k) in modes.iter().enumerate() {
            let src = modes
                .iter()
                .position(|&m| m == eps as i64 * k)
                .expect("pair is closed");
            let phase = C64::from_polar(1.0, -(k as f64) * theta);
            out.view_mut((r * n, src * n), (n, n))
                .copy_from(&(b * phase));
        }
        out
    }

    /// Finite model of the circle on `m` grid points with the constant
    /// bundle and the sampled principal symbol.
    pub fn symbol_sample(&self, m: usize) -> Result<SymbolSample> {
        let model = Arc::new(circle_model(
            &self.name,
            self.group.clone(),
            self.action.clone(),
            m,
        )?);
        let bundle = Arc::new(EquivariantBundle::constant(model, &self.fiber)?);
        SymbolSample::from_fn(bundle, |_, s| {
            let x = 2.0 * PI * s.point as f64 / m as f64;
            self.symbol.eval(x, s.covector[0] > 0.0)
        })
        .map(|s| s.with_order(self.order))
    }

    /// Grid size for [`Self::symbol_sample`] compatible with the action.
    pub fn default_grid(&self) -> usize {
        let reflects = self.action.elements.iter().any(|&(_, e)| e < 0);
        let step = if reflects {
            2 * self.action.n
        } else {
            self.action.n
        };
        step * (24usize).div_ceil(step)
    }
}

fn pair_modes(p: usize) -> Vec<i64> {
    if p == 0 {
        vec![0]
    } else {
        vec![p as i64, -(p as i64)]
    }
}

/// Orthonormal vectors supported on single mode pairs.
#[derive(Clone, Debug)]
pub struct PairBasis {
    n_modes: usize,
    dim: usize,
    /// Coefficient matrix per pair: rows are the pair coordinates.
    pairs: Vec<CMat>,
    offsets: Vec<usize>,
}

impl PairBasis {
    pub fn len(&self) -> usize {
        *self.offsets.last().expect("offsets end with the total")
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Truncation radius `N`.
    pub fn radius(&self) -> usize {
        self.n_modes
    }

    /// Pair index of every basis vector.
    pub fn pair_of(&self) -> Vec<usize> {
        (0..self.pairs.len())
            .flat_map(|p| std::iter::repeat_n(p, self.pairs[p].ncols()))
            .collect()
    }

    /// Dense `(2N+1)n × len` matrix in mode order `−N..N`.
    pub fn dense(&self) -> CMat {
        let n = self.dim;
        let rows = (2 * self.n_modes + 1) * n;
        let mut out = CMat::zeros(rows, self.len());
        for (p, coeffs) in self.pairs.iter().enumerate() {
            for (r, &k) in pair_modes(p).iter().enumerate() {
                let row = (k + self.n_modes as i64) as usize * n;
                let block = coeffs.rows(r * n, n);
                out.view_mut((row, self.offsets[p]), (n, coeffs.ncols()))
                    .copy_from(&block);
            }
        }
        out
    }
}

/// Which subspace of the α-isotype a truncation is compressed to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compression {
    /// The whole α-isotype.
    Isotype,
    /// The range of `(dim α/|Γ|) Σ conj(α(g)₁₁) g`, one copy of the
    /// multiplicity space; the isotype is this times `I_{dim α}`.
    Multiplicity,
}

/// A truncated operator compressed to (part of) an α-isotype.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub radius: usize,
    pub alpha: usize,
    pub degree: usize,
    pub compression: Compression,
    pub basis: PairBasis,
    pub matrix: CMat,
    /// `‖T‖` of the uncompressed truncation, the scale for all cuts.
    pub reference_norm: f64,
}

impl TruncatedOperator {
    /// Number of copies of the compressed space inside the isotype.
    pub fn copies(&self) -> usize {
        match self.compression {
            Compression::Isotype => 1,
            Compression::Multiplicity => self.degree,
        }
    }
}

impl CircleOperatorModel {
    fn check_radius(&self, radius: usize) -> Result<()> {
        let b = self.symbol.bandwidth();
        if radius < b + 2 {
            return Err(Error::validation(format!(
                "N = {radius} is below bandwidth + 2 = {}",
                b + 2
            )));
        }
        Ok(())
    }

    /// Basis of the α-isotype (or its multiplicity copy) on modes `−N..N`.
    pub fn alpha_basis(
        &self,
        alpha: usize,
        radius: usize,
        compression: Compression,
    ) -> Result<PairBasis> {
        let table = self.group.character_table()?;
        if alpha >= table.num_irreps() {
            return Err(Error::validation(format!(
                "group has no irreducible {alpha}"
            )));
        }
        let d = table.degree(alpha);
        let order = self.group.order() as f64;
        let irrep = &self.group.irrep_matrices()?[alpha];
        let mut pairs = Vec::with_capacity(radius + 1);
        let mut offsets = vec![0];
        for p in 0..=radius {
            let w = self.dim() * pair_modes(p).len();
            let mut proj = CMat::zeros(w, w);
            for g in self.group.elements() {
                let weight = match compression {
                    Compression::Isotype => table.value(alpha, g).conj() * c(d as f64 / order, 0.0),
                    Compression::Multiplicity => {
                        irrep.matrix(g)[(0, 0)].conj() * c(d as f64 / order, 0.0)
                    }
                };
                proj += self.pair_action(g, p) * weight;
            }
            let tr = trace(&proj);
            let rank = tr.re.round();
            if (tr - c(rank, 0.0)).norm() > 1e-6 {
                return Err(Error::numerical(format!(
                    "projector trace {:.9} on pair {p} is not an integer",
                    tr.re
                )));
            }
            let q = projector_basis(&proj);
            if q.ncols() != rank as usize {
                return Err(Error::numerical(format!(
                    "projector on pair {p} has rank {} but trace {rank}",
                    q.ncols()
                )));
            }
            offsets.push(offsets[p] + q.ncols());
            pairs.push(q);
        }
        Ok(PairBasis {
            n_modes: radius,
            dim: self.dim(),
            pairs,
            offsets,
        })
    }

    /// `Qᴴ F Q` for a mode-block operator `F` of bandwidth `band`.
    pub fn compress_blocks(
        &self,
        basis: &PairBasis,
        band: usize,
        block: impl Fn(i64, i64) -> CMat,
    ) -> CMat {
        let n = self.dim();
        let np = basis.pairs.len();
        let mut out = CMat::zeros(basis.len(), basis.len());
        for q in 0..np {
            let cq = &basis.pairs[q];
            if cq.ncols() == 0 {
                continue;
            }
            let lo = q.saturating_sub(band);
            let hi = (q + band).min(np - 1);
            for p in lo..=hi {
                let cp = &basis.pairs[p];
                if cp.ncols() == 0 {
                    continue;
                }
                let rows = pair_modes(p);
                let cols = pair_modes(q);
                let mut pb = CMat::zeros(n * rows.len(), n * cols.len());
                for (r, &k) in rows.iter().enumerate() {
                    for (s, &m) in cols.iter().enumerate() {
                        if (k - m).unsigned_abs() as usize <= band {
                            pb.view_mut((r * n, s * n), (n, n)).copy_from(&block(k, m));
                        }
                    }
                }
                let sub = cp.adjoint() * pb * cq;
                out.view_mut(
                    (basis.offsets[p], basis.offsets[q]),
                    (cp.ncols(), cq.ncols()),
                )
                .copy_from(&sub);
            }
        }
        out
    }

    /// The truncation to modes `−N..N` compressed to α.
    pub fn truncate(
        &self,
        alpha: usize,
        radius: usize,
        compression: Compression,
    ) -> Result<TruncatedOperator> {
        self.check_radius(radius)?;
        let defect = self.equivariance_defect(radius);
        if defect > EQUIVARIANCE_TOL {
            return Err(Error::Invariance(format!(
                "truncation of {} is not equivariant (defect {defect:.2e})",
                self.name
            )));
        }
        let reference_norm = self.truncation_norm(radius);
        let basis = self.alpha_basis(alpha, radius, compression)?;
        let matrix = self.compress_blocks(&basis, self.symbol.bandwidth(), |k, m| self.block(k, m));
        let degree = self.group.character_table()?.degree(alpha);
        Ok(TruncatedOperator {
            radius,
            alpha,
            degree,
            compression,
            basis,
            matrix,
            reference_norm,
        })
    }

    /// The uncompressed `(2N+1)n` square truncation.
    pub fn assemble_truncation(&self, radius: usize) -> Result<CMat> {
        self.check_radius(radius)?;
        let n = self.dim();
        let r = radius as i64;
        let b = self.symbol.bandwidth() as i64;
        let size = (2 * radius + 1) * n;
        let mut out = CMat::zeros(size, size);
        for k in -r..=r {
            for m in (k - b).max(-r)..=(k + b).min(r) {
                let row = (k + r) as usize * n;
                let col = (m + r) as usize * n;
                out.view_mut((row, col), (n, n))
                    .copy_from(&self.block(k, m));
            }
        }
        Ok(out)
    }

    /// `‖T‖` of the square truncation by power iteration on its bands.
    pub fn truncation_norm(&self, radius: usize) -> f64 {
        let n = self.dim();
        let r = radius as i64;
        let b = self.symbol.bandwidth() as i64;
        let rows: Vec<Vec<(usize, CMat)>> = (-r..=r)
            .map(|k| {
                ((k - b).max(-r)..=(k + b).min(r))
                    .map(|m| ((m + r) as usize, self.block(k, m)))
                    .collect()
            })
            .collect();
        let size = (2 * radius + 1) * n;
        let apply = |v: &CVec, adjoint: bool| {
            let mut out = CVec::zeros(size);
            for (k, row) in rows.iter().enumerate() {
                for (m, blk) in row {
                    if adjoint {
                        let y = blk.ad_mul(&v.rows(k * n, n));
                        let mut dst = out.rows_mut(m * n, n);
                        dst += y;
                    } else {
                        let y = blk * v.rows(m * n, n);
                        let mut dst = out.rows_mut(k * n, n);
                        dst += y;
                    }
                }
            }
            out
        };
        probe::power_iteration(
            size,
            |v| apply(&apply(v, false), true),
            |v| apply(v, false).norm(),
        )
    }

    /// Matrix of `g` on modes `−N..N`.
    pub fn group_matrix(&self, g: usize, radius: usize) -> CMat {
        let n = self.dim();
        let r = radius as i64;
        let (theta, eps) = self.motion(g);
        let b = self.fiber.matrix(g);
        let size = (2 * radius + 1) * n;
        let mut out = CMat::zeros(size, size);
        for k in -r..=r {
            let src = eps as i64 * k;
            let phase = C64::from_polar(1.0, -(k as f64) * theta);
            out.view_mut(((k + r) as usize * n, (src + r) as usize * n), (n, n))
                .copy_from(&(b * phase));
        }
        out
    }

    /// `max_g ‖g T g⁻¹ − T‖` over the blocks of the truncation, relative to
    /// a bound on `‖T‖`.
    pub fn equivariance_defect(&self, radius: usize) -> f64 {
        let r = radius as i64;
        let b = self.symbol.bandwidth() as i64;
        let mut worst: f64 = 0.0;
        for g in self.group.elements() {
            let (theta, eps) = self.motion(g);
            let bg = self.fiber.matrix(g);
            let e = eps as i64;
            for k in -r..=r {
                for m in (k - b).max(-r)..=(k + b).min(r) {
                    let phase = C64::from_polar(1.0, -((k - m) as f64) * theta);
                    let moved = bg * self.block(e * k, e * m) * bg.adjoint() * phase;
                    worst = worst.max((moved - self.block(k, m)).norm());
                }
            }
        }
        worst / self.symbol.norm_bound().max(1e-300)
    }

    /// Multiplication by a scalar function, compressed to `basis`.
    pub fn multiplication(&self, basis: &PairBasis, series: &[(i64, C64)]) -> CMat {
        let n = self.dim();
        let band = series
            .iter()
            .map(|(j, _)| j.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        self.compress_blocks(basis, band, |k, m| {
            let v = series
                .iter()
                .find(|(j, _)| *j == k - m)
                .map(|(_, v)| *v)
                .unwrap_or(c(0.0, 0.0));
            CMat::identity(n, n) * v
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{singular_values, ONE, ZERO};

    fn winding_scalar() -> CircleOperatorModel {
        let g = Arc::new(FiniteGroup::builtin("trivial").unwrap());
        let sym = CircleSymbol::new(
            1,
            vec![(1, CMat::from_element(1, 1, ONE))],
            vec![(0, CMat::from_element(1, 1, ONE))],
            vec![],
        )
        .unwrap();
        CircleOperatorModel::new(
            "winding",
            g,
            CircleAction::trivial(1),
            MatrixRep::trivial(1, 1),
            sym,
        )
        .unwrap()
    }

    #[test]
    fn identity_truncation() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let fiber = MatrixRep::trivial(2, 2);
        let m = CircleOperatorModel::new(
            "id",
            g,
            CircleAction::trivial(2),
            fiber,
            CircleSymbol::identity(2),
        )
        .unwrap();
        let t = m.assemble_truncation(4).unwrap();
        assert!((t.clone() - CMat::identity(t.nrows(), t.ncols())).norm() < 1e-15);
    }

    #[test]
    fn winding_is_a_shift() {
        let m = winding_scalar();
        let t = m.assemble_truncation(5).unwrap();
        let r = 5i64;
        for k in -r..=r {
            for j in -r..=r {
                let v = t[((k + r) as usize, (j + r) as usize)];
                let expect = if j > 0 && k == j + 1 {
                    ONE
                } else if j < 0 && k == j {
                    ONE
                } else if j == 0 && (k == 0 || k == 1) {
                    c(0.5, 0.0)
                } else {
                    ZERO
                };
                assert!((v - expect).norm() < 1e-15, "({k},{j})");
            }
        }
    }

    #[test]
    fn radius_must_exceed_bandwidth() {
        assert!(matches!(
            winding_scalar().assemble_truncation(2),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn reflection_commutes_with_mode_reversal() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let action = CircleAction {
            n: 1,
            elements: vec![(0, 1), (0, -1)],
        };
        let sym = CircleSymbol::new(
            1,
            vec![
                (0, CMat::from_element(1, 1, c(2.0, 0.0))),
                (1, CMat::from_element(1, 1, c(0.5, 0.0))),
            ],
            vec![
                (0, CMat::from_element(1, 1, c(2.0, 0.0))),
                (-1, CMat::from_element(1, 1, c(0.5, 0.0))),
            ],
            vec![],
        )
        .unwrap();
        let m = CircleOperatorModel::new("refl", g, action, MatrixRep::trivial(2, 1), sym).unwrap();
        let t = m.assemble_truncation(8).unwrap();
        let j = m.group_matrix(1, 8);
        assert!((&j * &t - &t * &j).norm() < 1e-10);
        assert!(m.equivariance_defect(8) < 1e-12);
    }

    #[test]
    fn non_invariant_symbol_is_rejected() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let action = CircleAction {
            n: 1,
            elements: vec![(0, 1), (0, -1)],
        };
        let sym = CircleSymbol::new(
            1,
            vec![(1, CMat::from_element(1, 1, ONE))],
            vec![(0, CMat::from_element(1, 1, ONE))],
            vec![],
        )
        .unwrap();
        let err = CircleOperatorModel::new("bad", g, action, MatrixRep::trivial(2, 1), sym);
        assert!(matches!(err, Err(Error::Invariance(_))));
    }

    #[test]
    fn trivial_z2_isotypes_are_fiber_components() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let t = g.character_table().unwrap();
        let fiber =
            MatrixRep::linear(&t.character(0)).direct_sum(&MatrixRep::linear(&t.character(1)));
        let m = CircleOperatorModel::new(
            "z2",
            g,
            CircleAction::trivial(2),
            fiber,
            CircleSymbol::identity(2),
        )
        .unwrap();
        let q = m.alpha_basis(0, 3, Compression::Isotype).unwrap().dense();
        assert_eq!(q.ncols(), 7);
        for row in 0..q.nrows() {
            let weight: f64 = q.row(row).iter().map(|z| z.norm_sqr()).sum();
            assert!((weight - if row % 2 == 0 { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }

    #[test]
    fn reflection_trivial_isotype_is_even() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let action = CircleAction {
            n: 1,
            elements: vec![(0, 1), (0, -1)],
        };
        let m = CircleOperatorModel::new(
            "refl",
            g,
            action,
            MatrixRep::trivial(2, 1),
            CircleSymbol::identity(1),
        )
        .unwrap();
        let q = m.alpha_basis(0, 4, Compression::Isotype).unwrap().dense();
        assert_eq!(q.ncols(), 5);
        let rev = m.group_matrix(1, 4);
        assert!((&rev * &q - &q).norm() < 1e-12);
    }

    #[test]
    fn isotypes_fill_the_truncation() {
        let g = Arc::new(FiniteGroup::symmetric(3));
        let elements = g
            .elements()
            .map(|x| {
                let p = g.permutation(x).unwrap();
                let odd = (0..3).filter(|&i| p.apply(i) != i).count() == 2;
                (0, if odd { -1 } else { 1 })
            })
            .collect();
        let action = CircleAction { n: 1, elements };
        let fiber = MatrixRep::regular(&g);
        let m = CircleOperatorModel::new("s3", g.clone(), action, fiber, CircleSymbol::identity(6))
            .unwrap();
        let total: usize = (0..3)
            .map(|a| m.alpha_basis(a, 5, Compression::Isotype).unwrap().len())
            .sum();
        assert_eq!(total, 11 * 6);
        // the isotype is the multiplicity space times the degree
        let std = (0..3)
            .find(|&a| g.character_table().unwrap().degree(a) == 2)
            .unwrap();
        let full = m.alpha_basis(std, 5, Compression::Isotype).unwrap().len();
        let mult = m
            .alpha_basis(std, 5, Compression::Multiplicity)
            .unwrap()
            .len();
        assert_eq!(full, 2 * mult);
        // basis spans an invariant subspace
        let q = m.alpha_basis(std, 5, Compression::Isotype).unwrap().dense();
        for x in g.elements() {
            let u = m.group_matrix(x, 5);
            let moved = &u * &q;
            let back = &q * (q.adjoint() * &moved);
            assert!((moved - back).norm() < 1e-9);
        }
    }

    #[test]
    fn multiplicity_compression_repeats_singular_values() {
        let g = Arc::new(FiniteGroup::symmetric(3));
        let t = g.character_table().unwrap();
        let std = (0..3).find(|&a| t.degree(a) == 2).unwrap();
        let fiber = MatrixRep::irreducible(&g, t, std).unwrap();
        let sym = CircleSymbol::new(
            2,
            vec![
                (0, CMat::identity(2, 2)),
                (1, CMat::identity(2, 2) * c(0.3, 0.0)),
            ],
            vec![(0, CMat::identity(2, 2) * c(2.0, 0.0))],
            vec![],
        )
        .unwrap();
        let m = CircleOperatorModel::new("std", g, CircleAction::trivial(6), fiber, sym).unwrap();
        let full = m.truncate(std, 6, Compression::Isotype).unwrap();
        let mult = m.truncate(std, 6, Compression::Multiplicity).unwrap();
        let a = singular_values(&full.matrix);
        let b = singular_values(&mult.matrix);
        assert_eq!(a.len(), 2 * b.len());
        for (i, s) in b.iter().enumerate() {
            assert!((a[2 * i] - s).abs() < 1e-10 && (a[2 * i + 1] - s).abs() < 1e-10);
        }
    }
}
