use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{CircleOperatorModel, Compression, TruncatedOperator};
use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigen, singular_values, CMat, CVec, C64};

/// Seed of the power iteration for `‖T‖`.
pub const POWER_SEED: u64 = 0x5eed;
pub const POWER_STEPS: usize = 32;
/// Singular values of a local residual allowed above the gate.
pub const COMPACT_ALLOWANCE: usize = 16;
/// Smallest singular values kept in a probe profile.
const PROFILE_LEN: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeOptions {
    pub radii: Vec<usize>,
    pub eps: f64,
    pub compression: Compression,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            radii: vec![64, 128, 256],
            eps: 1e-6,
            compression: Compression::Multiplicity,
        }
    }
}

impl ProbeOptions {
    pub fn validate(&self) -> Result<()> {
        if self.radii.len() < 3 {
            return Err(Error::validation(
                "the probe needs at least three truncation radii",
            ));
        }
        if self.radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation(
                "truncation radii must be strictly increasing",
            ));
        }
        if !(self.eps > 0.0 && self.eps < 1e-2) {
            return Err(Error::validation(format!(
                "eps = {} is outside (0, 1e-2)",
                self.eps
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVerdict {
    FredholmLike,
    NonFredholmLike,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeLevel {
    pub radius: usize,
    /// Dimension of the α-isotype at this radius.
    pub dim: usize,
    /// Norm of the whole truncation.
    pub norm: f64,
    /// Singular values below `eps·‖T‖`, counted on the whole isotype.
    pub count: usize,
    /// Smallest singular value above the cut, relative to `‖T‖`.
    pub next_singular_value: Option<f64>,
    /// Smallest singular values relative to `‖T‖`, ascending.
    pub profile: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub model: String,
    pub alpha: usize,
    pub degree: usize,
    pub eps: f64,
    pub compression: Compression,
    pub levels: Vec<ProbeLevel>,
    pub verdict: ProbeVerdict,
}

/// `‖T‖` by power iteration on `TᴴT` from a fixed start.
pub fn power_norm(t: &CMat) -> f64 {
    if t.ncols() == 0 || t.nrows() == 0 {
        return 0.0;
    }
    power_iteration(t.ncols(), |v| t.ad_mul(&(t * v)), |v| (t * v).norm())
}

/// Power iteration for `‖T‖` given `v ↦ TᴴTv` and `v ↦ ‖Tv‖`.
pub(crate) fn power_iteration(
    dim: usize,
    gram: impl Fn(&CVec) -> CVec,
    apply_norm: impl Fn(&CVec) -> f64,
) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let mut v = CVec::from_fn(dim, |_, _| {
        C64::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        )
    });
    v /= c(v.norm(), 0.0);
    let mut est = 0.0;
    for _ in 0..POWER_STEPS {
        let w = gram(&v);
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        est = nw.sqrt();
        v = w / c(nw, 0.0);
    }
    est.max(apply_norm(&v))
}

fn level(op: &TruncatedOperator, eps: f64) -> ProbeLevel {
    let norm = op.reference_norm;
    let mut sv = singular_values(&op.matrix);
    sv.reverse();
    let scale = if norm > 0.0 { norm } else { 1.0 };
    let cut = eps * norm;
    let below = sv.iter().take_while(|&&s| s < cut || norm == 0.0).count();
    ProbeLevel {
        radius: op.radius,
        dim: op.matrix.ncols() * op.copies(),
        norm,
        count: below * op.copies(),
        next_singular_value: sv.get(below).map(|s| s / scale),
        profile: sv.iter().take(PROFILE_LEN).map(|s| s / scale).collect(),
    }
}

fn classify(levels: &[ProbeLevel], eps: f64) -> ProbeVerdict {
    let counts: Vec<usize> = levels.iter().map(|l| l.count).collect();
    let gap = levels
        .iter()
        .all(|l| l.norm > 0.0 && l.next_singular_value.is_some_and(|s| s >= 10.0 * eps));
    if counts.windows(2).all(|w| w[0] == w[1]) && gap {
        ProbeVerdict::FredholmLike
    } else if counts.windows(2).all(|w| w[0] < w[1]) {
        ProbeVerdict::NonFredholmLike
    } else {
        ProbeVerdict::Inconclusive
    }
}

/// Count near-zero singular values of the α-truncation along a ladder of
/// radii. Stable counts with a gap above the cut read as Fredholm, counts
/// that grow with the radius as not Fredholm.
pub fn fredholm_probe(
    model: &CircleOperatorModel,
    alpha: usize,
    opts: &ProbeOptions,
) -> Result<ProbeReport> {
    opts.validate()?;
    let mut levels = Vec::with_capacity(opts.radii.len());
    let mut degree = 1;
    for &radius in &opts.radii {
        let op = model.truncate(alpha, radius, opts.compression)?;
        degree = op.degree;
        levels.push(level(&op, opts.eps));
    }
    let verdict = classify(&levels, opts.eps);
    Ok(ProbeReport {
        model: model.name().to_string(),
        alpha,
        degree,
        eps: opts.eps,
        compression: opts.compression,
        levels,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexLevel {
    pub radius: usize,
    pub kernel: usize,
    pub cokernel: usize,
    pub interior_kernel: usize,
    pub interior_cokernel: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexReport {
    pub model: String,
    pub alpha: usize,
    pub probe: ProbeVerdict,
    pub levels: Vec<IndexLevel>,
    /// `dim ker − dim coker` on the α-isotype, when the last two radii agree.
    pub index: Option<i64>,
}

/// Near-kernel of `m` (eigenvalues of `mᴴm` below `cut²`) and how many of
/// its directions live on pairs `p ≤ N/2`.
fn interior_kernel(m: &CMat, cut: f64, pair_of: &[usize], radius: usize) -> (usize, usize) {
    let (vals, vecs) = hermitian_eigen(&(m.adjoint() * m));
    let k = vals.iter().take_while(|&&v| v < cut * cut).count();
    if k == 0 {
        return (0, 0);
    }
    let kv = vecs.columns(0, k);
    let mut dk = kv.clone_owned();
    for (row, &p) in pair_of.iter().enumerate() {
        if 2 * p > radius {
            dk.row_mut(row).fill(c(0.0, 0.0));
        }
    }
    let (w, _) = hermitian_eigen(&(kv.adjoint() * dk));
    (k, w.iter().filter(|&&x| x > 0.5).count())
}

fn index_level(op: &TruncatedOperator, eps: f64) -> IndexLevel {
    let cut = eps * op.reference_norm;
    let pair_of = op.basis.pair_of();
    let (ker, ker_int) = interior_kernel(&op.matrix, cut, &pair_of, op.radius);
    let (coker, coker_int) = interior_kernel(&op.matrix.adjoint(), cut, &pair_of, op.radius);
    let d = op.copies();
    IndexLevel {
        radius: op.radius,
        kernel: ker * d,
        cokernel: coker * d,
        interior_kernel: ker_int * d,
        interior_cokernel: coker_int * d,
    }
}

fn index_from(
    model: &str,
    alpha: usize,
    probe: ProbeVerdict,
    levels: Vec<IndexLevel>,
) -> IndexReport {
    let idx: Vec<i64> = levels
        .iter()
        .map(|l| l.interior_kernel as i64 - l.interior_cokernel as i64)
        .collect();
    let index = match (probe, idx.as_slice()) {
        (ProbeVerdict::FredholmLike, [.., a, b]) if a == b => Some(*b),
        _ => None,
    };
    IndexReport {
        model: model.to_string(),
        alpha,
        probe,
        levels,
        index,
    }
}

/// The index on the α-isotype read off near-kernels localized away from the
/// truncation edge. Square truncations always have index 0; the kernel and
/// cokernel they gain at the edge are discarded.
pub fn numerical_index(
    model: &CircleOperatorModel,
    alpha: usize,
    opts: &ProbeOptions,
) -> Result<IndexReport> {
    let probe = fredholm_probe(model, alpha, opts)?;
    index_after_probe(model, alpha, opts, &probe)
}

/// [`numerical_index`] reusing a probe already run with the same options.
pub fn index_after_probe(
    model: &CircleOperatorModel,
    alpha: usize,
    opts: &ProbeOptions,
    probe: &ProbeReport,
) -> Result<IndexReport> {
    let mut levels = Vec::new();
    if probe.verdict == ProbeVerdict::FredholmLike {
        for &radius in &opts.radii {
            let op = model.truncate(alpha, radius, opts.compression)?;
            levels.push(index_level(&op, opts.eps));
        }
    }
    Ok(index_from(model.name(), alpha, probe.verdict, levels))
}

/// A Γ-invariant operator of finite rank supported on modes `|m| ≤ support`.
#[derive(Clone, Debug)]
pub struct Perturbation {
    pub support: usize,
    /// Dense matrix on modes `−support..support`.
    pub matrix: CMat,
}

impl Perturbation {
    /// Random finite-rank operator, averaged over Γ and scaled to norm `size`.
    pub fn random(model: &CircleOperatorModel, support: usize, seed: u64, size: f64) -> Self {
        let n = (2 * support + 1) * model.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = CMat::from_fn(n, n, |_, _| {
            C64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        });
        let mut avg = CMat::zeros(n, n);
        for g in model.group().elements() {
            let u = model.group_matrix(g, support);
            avg += &u * &raw * u.adjoint();
        }
        let norm = power_norm(&avg);
        let matrix = if norm > 0.0 {
            avg * c(size / norm, 0.0)
        } else {
            avg
        };
        Perturbation { support, matrix }
    }

    fn block(&self, dim: usize, k: i64, m: i64) -> Option<CMat> {
        let s = self.support as i64;
        if k.abs() > s || m.abs() > s {
            return None;
        }
        let r = (k + s) as usize * dim;
        let q = (m + s) as usize * dim;
        Some(self.matrix.view((r, q), (dim, dim)).into_owned())
    }
}

fn perturbed_truncation(
    model: &CircleOperatorModel,
    pert: &Perturbation,
    alpha: usize,
    radius: usize,
    compression: Compression,
) -> Result<TruncatedOperator> {
    let mut op = model.truncate(alpha, radius, compression)?;
    let n = model.dim();
    let extra = model.compress_blocks(&op.basis, 2 * pert.support, |k, m| {
        pert.block(n, k, m).unwrap_or_else(|| CMat::zeros(n, n))
    });
    op.matrix += extra;
    Ok(op)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub model: String,
    pub alpha: usize,
    pub support: usize,
    pub seed: u64,
    pub before: IndexReport,
    pub after: IndexReport,
    /// Same verdict and same index before and after.
    pub stable: bool,
}

/// Add an invariant finite-rank operator and compare verdicts and indices.
pub fn compact_perturbation_test(
    model: &CircleOperatorModel,
    alpha: usize,
    opts: &ProbeOptions,
    support: usize,
    seed: u64,
) -> Result<PerturbationReport> {
    opts.validate()?;
    if opts.radii[0] < 2 * support + model.symbol().bandwidth() + 2 {
        return Err(Error::validation(
            "perturbation support does not fit the smallest radius",
        ));
    }
    let before = numerical_index(model, alpha, opts)?;
    let pert = Perturbation::random(model, support, seed, 0.5 * model.symbol().norm_bound());
    let mut probe_levels = Vec::new();
    let mut ops = Vec::new();
    for &radius in &opts.radii {
        let op = perturbed_truncation(model, &pert, alpha, radius, opts.compression)?;
        probe_levels.push(level(&op, opts.eps));
        ops.push(op);
    }
    let verdict = classify(&probe_levels, opts.eps);
    let levels = if verdict == ProbeVerdict::FredholmLike {
        ops.iter().map(|op| index_level(op, opts.eps)).collect()
    } else {
        Vec::new()
    };
    let after = index_from(model.name(), alpha, verdict, levels);
    let stable = before.probe == after.probe && before.index == after.index;
    Ok(PerturbationReport {
        model: model.name().to_string(),
        alpha,
        support,
        seed,
        before,
        after,
        stable,
    })
}

/// A smooth invariant cut-off `φ(x)` given by its Fourier series.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub label: String,
    pub series: Vec<(i64, C64)>,
}

impl Window {
    pub fn eval(&self, x: f64) -> f64 {
        self.series
            .iter()
            .map(|(j, v)| (v * C64::from_polar(1.0, *j as f64 * x)).re)
            .sum()
    }
}

fn poly_mul(a: &[(i64, C64)], b: &[(i64, C64)]) -> Vec<(i64, C64)> {
    let mut out: Vec<(i64, C64)> = Vec::new();
    for (i, x) in a {
        for (j, y) in b {
            match out.iter_mut().find(|(k, _)| *k == i + j) {
                Some((_, acc)) => *acc += x * y,
                None => out.push((i + j, x * y)),
            }
        }
    }
    out.retain(|(_, v)| v.norm() > 1e-15);
    out.sort_by_key(|(k, _)| *k);
    out
}

/// The four cubic Bernstein polynomials in `u = (1 + cos(n x))/2`. They
/// are invariant under rotations by `2π/n` and under `x ↦ −x`, and sum to 1.
pub fn window_bank(n: usize) -> Vec<Window> {
    let n = n as i64;
    let u = vec![(-n, c(0.25, 0.0)), (0, c(0.5, 0.0)), (n, c(0.25, 0.0))];
    let v = vec![(-n, c(-0.25, 0.0)), (0, c(0.5, 0.0)), (n, c(-0.25, 0.0))];
    let pow = |base: &Vec<(i64, C64)>, e: usize| {
        let mut out = vec![(0, c(1.0, 0.0))];
        for _ in 0..e {
            out = poly_mul(&out, base);
        }
        out
    };
    (0..4)
        .map(|i| {
            let binom = [1.0, 3.0, 3.0, 1.0][i];
            let series = poly_mul(&pow(&u, i), &pow(&v, 3 - i))
                .into_iter()
                .map(|(k, x)| (k, x * binom))
                .collect();
            Window {
                label: format!("b{i}"),
                series,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowResult {
    pub window: String,
    /// Singular value of the left residual just past the allowance,
    /// relative to `‖Φ‖`.
    pub left_residual: f64,
    pub right_residual: f64,
    pub left: bool,
    pub right: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalReport {
    pub model: String,
    pub alpha: usize,
    pub radius: usize,
    pub windows: Vec<WindowResult>,
    pub all_windows: bool,
}

const RIDGE: f64 = 1e-12;
const LOCAL_GATE: f64 = 1e-6;

/// `λ/(s² + λ)`, with the zero operator leaving everything unresolved.
fn ridge_weight(s2: f64, lambda: f64) -> f64 {
    let s2 = s2.max(0.0);
    if lambda > 0.0 {
        lambda / (s2 + lambda)
    } else if s2 > 0.0 {
        0.0
    } else {
        1.0
    }
}

fn residual_after_allowance(r: &CMat, phi_norm: f64) -> f64 {
    let sv = singular_values(r);
    sv.get(COMPACT_ALLOWANCE).copied().unwrap_or(0.0) / phi_norm.max(1e-300)
}

/// Ridge residual `Φ − L T Φ` of the best left inverse on the window.
fn left_residual(t: &CMat, phi: &CMat, scale: f64) -> CMat {
    let a = t * phi;
    let (vals, v) = hermitian_eigen(&(a.adjoint() * &a));
    let lambda = RIDGE * scale * scale;
    let w = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&s| c(ridge_weight(s, lambda), 0.0)),
    ));
    phi * &v * w * v.adjoint()
}

fn right_residual(t: &CMat, phi: &CMat, scale: f64) -> CMat {
    let b = phi * t;
    let (vals, u) = hermitian_eigen(&(&b * b.adjoint()));
    let lambda = RIDGE * scale * scale;
    let w = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&s| c(ridge_weight(s, lambda), 0.0)),
    ));
    &u * w * u.adjoint() * phi
}

/// For each window `φ`, whether the α-part of the operator has a left and
/// a right inverse near `φ` up to an operator of rank at most
/// [`COMPACT_ALLOWANCE`].
pub fn local_alpha_invertible(
    model: &CircleOperatorModel,
    alpha: usize,
    radius: usize,
    compression: Compression,
) -> Result<LocalReport> {
    let windows = window_bank(model.action().n);
    let band = 3 * model.action().n;
    if radius < 4 * band {
        return Err(Error::validation(format!(
            "N = {radius} is below 4x the window bandwidth {band}"
        )));
    }
    if radius < 4 * COMPACT_ALLOWANCE {
        return Err(Error::validation(format!(
            "N = {radius} is too small for the allowance of {COMPACT_ALLOWANCE} singular values"
        )));
    }
    let op = model.truncate(alpha, radius, compression)?;
    let mut out = Vec::with_capacity(windows.len());
    for w in &windows {
        let phi = model.multiplication(&op.basis, &w.series);
        let phi_norm = power_norm(&phi);
        let scale = op.reference_norm.max(1e-300) * phi_norm;
        let l = residual_after_allowance(&left_residual(&op.matrix, &phi, scale), phi_norm);
        let r = residual_after_allowance(&right_residual(&op.matrix, &phi, scale), phi_norm);
        out.push(WindowResult {
            window: w.label.clone(),
            left_residual: l,
            right_residual: r,
            left: l <= LOCAL_GATE,
            right: r <= LOCAL_GATE,
        });
    }
    let all_windows = out.iter().all(|w| w.left && w.right);
    Ok(LocalReport {
        model: model.name().to_string(),
        alpha,
        radius,
        windows: out,
        all_windows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_sum_to_one_and_are_invariant() {
        let bank = window_bank(3);
        for j in 0..50 {
            let x = j as f64 * 0.37;
            let total: f64 = bank.iter().map(|w| w.eval(x)).sum();
            assert!((total - 1.0).abs() < 1e-14);
            for w in &bank {
                let v = w.eval(x);
                assert!(v >= -1e-14);
                assert!((w.eval(-x) - v).abs() < 1e-14);
                assert!((w.eval(x + 2.0 * std::f64::consts::PI / 3.0) - v).abs() < 1e-12);
            }
        }
        assert!(bank
            .iter()
            .all(|w| w.series.iter().all(|(j, _)| j.abs() <= 9)));
    }

    #[test]
    fn power_norm_matches_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = CMat::from_fn(20, 20, |_, _| {
            C64::new(StandardNormal.sample(&mut rng), 0.0)
        });
        let top = singular_values(&m)[0];
        assert!((power_norm(&m) - top).abs() < 1e-3 * top);
    }

    #[test]
    fn ladder_classification() {
        let lvl = |count, next: Option<f64>| ProbeLevel {
            radius: 0,
            dim: 0,
            norm: 1.0,
            count,
            next_singular_value: next,
            profile: vec![],
        };
        assert_eq!(
            classify(
                &[lvl(1, Some(0.3)), lvl(1, Some(0.3)), lvl(1, Some(0.2))],
                1e-6
            ),
            ProbeVerdict::FredholmLike
        );
        assert_eq!(
            classify(&[lvl(1, Some(0.3)), lvl(1, Some(1e-7))], 1e-6),
            ProbeVerdict::Inconclusive
        );
        assert_eq!(
            classify(&[lvl(3, None), lvl(5, None)], 1e-6),
            ProbeVerdict::NonFredholmLike
        );
        assert_eq!(
            classify(&[lvl(3, Some(0.1)), lvl(2, Some(0.1))], 1e-6),
            ProbeVerdict::Inconclusive
        );
    }
}
