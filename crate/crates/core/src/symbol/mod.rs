//! Equivariant bundles, sampled symbols and the α-ellipticity decision.
//!
//! A symbol is known on the finite [`SampleSet`] of a model. The
//! Γ-principal symbol at a sample `ξ` is the family of compressions of
//! `σ(ξ)` to the isotypical components of `E_x` under `Γ_ξ`; α-ellipticity
//! asks for invertibility of those blocks whose irreducible is
//! `Γ₀`-associated to `α`. Verdicts certify the sample set only.

mod families;

pub use families::{standard_families, standard_families_seeded, SymbolFamily};

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::action::{ActionModel, Sample, SampleSet};
use crate::error::{Error, Result};
use crate::grp::{
    hom_dimension, isotypical_projector, Embedding, FiniteGroup, MatrixRep, Subgroup,
};
use crate::linalg::{
    is_unitary, operator_norm, projector_basis, smallest_singular_value, CMat, C64,
};

/// Tolerance on bundle cocycle and unitarity checks.
pub const BUNDLE_TOL: f64 = 1e-9;
/// Default relative tolerance of the symbol invariance check.
pub const INVARIANCE_TOL: f64 = 1e-8;
/// Default relative invertibility threshold.
pub const DEFAULT_THRESHOLD: f64 = 1e-8;

/// A Γ-equivariant vector bundle over a model, given by unitary fiber maps
/// `E_x → E_{g·x}` for every group element and point.
#[derive(Clone, Debug)]
pub struct EquivariantBundle {
    model: Arc<ActionModel>,
    rank: usize,
    transport: Vec<Vec<CMat>>,
    global: Option<MatrixRep>,
    samples: Arc<SampleSet>,
}

impl EquivariantBundle {
    /// `transport[g][x]` is the fiber map `E_x → E_{g·x}`.
    pub fn new(model: Arc<ActionModel>, transport: Vec<Vec<CMat>>) -> Result<Self> {
        let rank = transport
            .first()
            .and_then(|row| row.first())
            .map(|m| m.nrows())
            .ok_or_else(|| Error::validation("bundle transport is empty"))?;
        let samples = Arc::new(model.sample_set()?);
        let bundle = EquivariantBundle {
            model,
            rank,
            transport,
            global: None,
            samples,
        };
        bundle.validate()?;
        Ok(bundle)
    }

    /// The product bundle `M × Cⁿ` with Γ acting on every fiber through `rep`.
    pub fn constant(model: Arc<ActionModel>, rep: &MatrixRep) -> Result<Self> {
        if rep.group_order() != model.group().order() {
            return Err(Error::validation(
                "fiber representation lives on a different group",
            ));
        }
        rep.validate(model.group())?;
        let transport = model
            .group()
            .elements()
            .map(|g| vec![rep.matrix(g).clone(); model.num_points()])
            .collect();
        let mut bundle = Self::new(model, transport)?;
        bundle.global = Some(rep.clone());
        Ok(bundle)
    }

    /// The bundle `Γ ×_{Γ_x} V_x` over each orbit, from a representation of
    /// the stabilizer (local ids) at one point per orbit. Points of an orbit
    /// are reached by the smallest transporter.
    pub fn induced(model: Arc<ActionModel>, fibers: &[(usize, MatrixRep)]) -> Result<Self> {
        let g = model.group().clone();
        let n = model.num_points();
        let mut base: Vec<Option<(usize, usize)>> = vec![None; n];
        for (i, (x0, rep)) in fibers.iter().enumerate() {
            if *x0 >= n {
                return Err(Error::validation(format!("no point with id {x0}")));
            }
            let stab = &model.points()[*x0].stabilizer;
            if rep.group_order() != stab.order() {
                return Err(Error::validation(format!(
                    "fiber at point {x0} is not a representation of its stabilizer"
                )));
            }
            rep.validate(&g.subgroup_as_group(stab))?;
            for y in model.orbit(*x0) {
                if base[y].is_some() {
                    return Err(Error::validation(format!(
                        "orbit of point {x0} is given twice"
                    )));
                }
                base[y] = Some((i, *x0));
            }
        }
        if let Some(y) = base.iter().position(|b| b.is_none()) {
            return Err(Error::validation(format!(
                "no fiber given over the orbit of point {y}"
            )));
        }
        let transport = g
            .elements()
            .map(|a| {
                (0..n)
                    .map(|y| {
                        let (i, x0) = base[y].expect("checked");
                        let r = model.transporter(x0, y).expect("same orbit");
                        let r2 = model.transporter(x0, model.act(a, y)).expect("same orbit");
                        let h = g.mul(g.inv(r2), g.mul(a, r));
                        let stab = &model.points()[x0].stabilizer;
                        fibers[i]
                            .1
                            .matrix(stab.local_index(h).expect("h fixes x0"))
                            .clone()
                    })
                    .collect()
            })
            .collect();
        Self::new(model, transport)
    }

    /// The trivial line bundle.
    pub fn trivial_line(model: Arc<ActionModel>) -> Result<Self> {
        let order = model.group().order();
        Self::constant(model, &MatrixRep::trivial(order, 1))
    }

    /// Unitarity, identity and cocycle rule `T(gh, x) = T(g, h·x) T(h, x)`.
    pub fn validate(&self) -> Result<()> {
        let g = self.model.group();
        let n = self.model.num_points();
        if self.transport.len() != g.order() || self.transport.iter().any(|row| row.len() != n) {
            return Err(Error::validation(format!(
                "bundle transport must be {} x {n}",
                g.order()
            )));
        }
        if self.rank == 0 {
            return Err(Error::validation("bundle rank must be positive"));
        }
        let tol = BUNDLE_TOL * self.rank as f64;
        for (a, row) in self.transport.iter().enumerate() {
            for (x, m) in row.iter().enumerate() {
                if m.nrows() != self.rank || m.ncols() != self.rank {
                    return Err(Error::validation(format!(
                        "fiber map of {a} at {x} has the wrong size"
                    )));
                }
                if !is_unitary(m, tol) {
                    return Err(Error::validation(format!(
                        "fiber map of {} at point {x} is not unitary",
                        g.element_label(a)
                    )));
                }
            }
        }
        let id = CMat::identity(self.rank, self.rank);
        for x in 0..n {
            if (&self.transport[0][x] - &id).norm() > tol {
                return Err(Error::validation(format!(
                    "identity acts nontrivially on the fiber at {x}"
                )));
            }
        }
        for a in g.elements() {
            for b in g.elements() {
                for x in 0..n {
                    let lhs = &self.transport[g.mul(a, b)][x];
                    let rhs = &self.transport[a][self.model.act(b, x)] * &self.transport[b][x];
                    if (lhs - rhs).norm() > tol {
                        return Err(Error::validation(format!(
                            "fiber maps of {} and {} violate the cocycle rule at point {x}",
                            g.element_label(a),
                            g.element_label(b)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn model(&self) -> &Arc<ActionModel> {
        &self.model
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.model.group()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn samples(&self) -> &Arc<SampleSet> {
        &self.samples
    }

    /// The global representation when the bundle was built by [`Self::constant`].
    pub fn global_rep(&self) -> Option<&MatrixRep> {
        self.global.as_ref()
    }

    /// Fiber map `E_x → E_{g·x}`.
    pub fn transport(&self, g: usize, x: usize) -> &CMat {
        &self.transport[g][x]
    }

    /// Representation of a subgroup of `Γ_x` on `E_x`, in local ids.
    pub fn restricted_rep(&self, x: usize, k: &Subgroup) -> Result<MatrixRep> {
        if !k.is_subset_of(&self.model.points()[x].stabilizer) {
            return Err(Error::validation(format!(
                "subgroup does not fix point {x}"
            )));
        }
        MatrixRep::from_matrices(
            k.elements()
                .iter()
                .map(|&a| self.transport[a][x].clone())
                .collect(),
        )
    }

    /// `E_x` as a representation of `Γ_x`.
    pub fn fiber_rep(&self, x: usize) -> MatrixRep {
        let k = self.model.points()[x].stabilizer.clone();
        self.restricted_rep(x, &k)
            .expect("stabilizer fixes its point")
    }

    /// Multiplicities of the irreducibles of `Γ_x` in `E_x`, in the order of
    /// the stabilizer's character table.
    pub fn fiber_decomposition(&self, x: usize) -> Result<Vec<usize>> {
        let k = &self.model.points()[x].stabilizer;
        let kg = self.group().subgroup_as_group(k);
        kg.character_table()?
            .decompose(&self.fiber_rep(x).character())
    }
}

/// Values of an order-0 symbol on every sample of a bundle's sample set.
#[derive(Clone, Debug)]
pub struct SymbolSample {
    bundle: Arc<EquivariantBundle>,
    values: Vec<CMat>,
    order: i32,
    scale: f64,
}

impl SymbolSample {
    /// Check sizes and Γ-invariance `σ(g·ξ) = T(g) σ(ξ) T(g)⁻¹` with the
    /// default tolerance.
    pub fn new(bundle: Arc<EquivariantBundle>, values: Vec<CMat>) -> Result<Self> {
        Self::with_tolerance(bundle, values, INVARIANCE_TOL)
    }

    pub fn with_tolerance(
        bundle: Arc<EquivariantBundle>,
        values: Vec<CMat>,
        tol: f64,
    ) -> Result<Self> {
        let ns = bundle.samples().len();
        if values.len() != ns {
            return Err(Error::validation(format!(
                "symbol has {} values, the sample set has {ns} covectors",
                values.len()
            )));
        }
        let r = bundle.rank();
        if let Some(s) = values.iter().position(|m| m.nrows() != r || m.ncols() != r) {
            return Err(Error::validation(format!(
                "symbol value at sample {s} is not {r}x{r}"
            )));
        }
        let scale = values.iter().map(operator_norm).fold(0.0, f64::max);
        let sym = SymbolSample {
            bundle,
            values,
            order: 0,
            scale,
        };
        sym.check_invariance(tol)?;
        Ok(sym)
    }

    /// Evaluate `f` on every sample.
    pub fn from_fn(
        bundle: Arc<EquivariantBundle>,
        f: impl Fn(usize, &Sample) -> CMat,
    ) -> Result<Self> {
        let values = bundle
            .samples()
            .samples()
            .iter()
            .enumerate()
            .map(|(s, x)| f(s, x))
            .collect();
        Self::new(bundle, values)
    }

    /// Evaluate `f` on orbit representatives only and transport the value
    /// along each orbit. `f` must return a matrix commuting with the
    /// stabilizer of the representative.
    pub fn from_orbit_representatives(
        bundle: Arc<EquivariantBundle>,
        f: impl Fn(usize, &Sample) -> CMat,
    ) -> Result<Self> {
        let set = bundle.samples().clone();
        let g = bundle.group().clone();
        let mut values: Vec<Option<CMat>> = vec![None; set.len()];
        for orbit in set.orbits() {
            let s0 = orbit[0];
            let x0 = set.samples()[s0].point;
            let v = f(s0, &set.samples()[s0]);
            for a in g.elements() {
                let s = set.act(a, s0);
                if values[s].is_none() {
                    let t = bundle.transport(a, x0);
                    values[s] = Some(t * &v * t.adjoint());
                }
            }
        }
        Self::new(
            bundle,
            values
                .into_iter()
                .map(|v| v.expect("orbits cover the sample set"))
                .collect(),
        )
    }

    /// Declare the order of the operator; all checks run at order 0.
    pub fn with_order(mut self, m: i32) -> Self {
        self.order = m;
        self
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn bundle(&self) -> &Arc<EquivariantBundle> {
        &self.bundle
    }

    pub fn values(&self) -> &[CMat] {
        &self.values
    }

    pub fn value(&self, s: usize) -> &CMat {
        &self.values[s]
    }

    /// Largest operator norm over the samples.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Pointwise linear combination `(1 − t) self + t other`.
    pub fn interpolate(&self, other: &SymbolSample, t: f64) -> Result<SymbolSample> {
        if !Arc::ptr_eq(&self.bundle, &other.bundle) {
            return Err(Error::validation(
                "interpolated symbols live on different bundles",
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * C64::new(1.0 - t, 0.0) + b * C64::new(t, 0.0))
            .collect();
        SymbolSample::new(self.bundle.clone(), values)
    }

    fn check_invariance(&self, tol: f64) -> Result<()> {
        let set = self.bundle.samples();
        let g = self.bundle.group();
        let bound = tol * self.scale.max(1.0);
        for (s, sample) in set.samples().iter().enumerate() {
            for a in g.elements() {
                let t = self.bundle.transport(a, sample.point);
                let moved = t * &self.values[s] * t.adjoint();
                let defect = operator_norm(&(moved - &self.values[set.act(a, s)]));
                if defect > bound {
                    return Err(Error::Invariance(format!(
                        "symbol is not invariant under {} at sample {s} (defect {defect:.3e})",
                        g.element_label(a)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `π_ρ(σ(ξ))`: the compression of `σ(ξ)` to the `ρ`-isotype of `E_x` under
/// `Γ_ξ`. `rho` indexes the character table of the sample's stabilizer.
pub fn gamma_symbol(sigma: &SymbolSample, s: usize, rho: usize) -> Result<CMat> {
    let bundle = sigma.bundle();
    let sample = bundle
        .samples()
        .samples()
        .get(s)
        .ok_or_else(|| Error::validation(format!("no sample with id {s}")))?;
    let k = &sample.stabilizer;
    let kg = bundle.group().subgroup_as_group(k);
    let table = kg.character_table()?;
    if rho >= table.num_irreps() {
        return Err(Error::validation(format!(
            "stabilizer has no irreducible {rho}"
        )));
    }
    let rep = bundle.restricted_rep(sample.point, k)?;
    let value = sigma.value(s);
    let defect = rep.commutator_defect(value);
    if defect > INVARIANCE_TOL * sigma.scale().max(1.0) {
        return Err(Error::Invariance(format!(
            "symbol at sample {s} does not commute with its stabilizer (defect {defect:.3e})"
        )));
    }
    let q = projector_basis(&isotypical_projector(&rep, table, rho));
    Ok(q.adjoint() * value * q)
}

/// Outcome of the membership test for `X^α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// First `γ` in id order with `γΓ₀γ⁻¹ ⊆ K` and `Hom_{γΓ₀γ⁻¹}(ρ, α) ≠ 0`.
    pub witness: Option<usize>,
}

/// Is the irreducible `rho` of `k` `Γ₀`-associated to the irreducible
/// `alpha` of Γ? Searches `γ` so that `γΓ₀γ⁻¹ ⊆ k` and the restrictions of
/// `ρ` and `α` to `γΓ₀γ⁻¹` share an irreducible.
pub fn in_x_alpha(
    g: &FiniteGroup,
    k: &Subgroup,
    rho: usize,
    alpha: usize,
    gamma0: &Subgroup,
) -> Result<Membership> {
    let kg = g.subgroup_as_group(k);
    let kt = kg.character_table()?;
    let gt = g.character_table()?;
    if rho >= kt.num_irreps() || alpha >= gt.num_irreps() {
        return Err(Error::validation("irreducible index out of range"));
    }
    let chi_rho = kt.character(rho);
    let chi_alpha = gt.character(alpha);
    for gamma in g.elements() {
        let l = gamma0.conjugate(g, gamma);
        if !l.is_subset_of(k) {
            continue;
        }
        let lg = g.subgroup_as_group(&l);
        let local: Vec<usize> = l
            .elements()
            .iter()
            .map(|&x| k.local_index(x).expect("inside k"))
            .collect();
        let into_k = Embedding::new(&lg, &kg, local)?;
        let into_g = Embedding::of_subgroup(&l);
        if hom_dimension(&chi_rho, Some(&into_k), &chi_alpha, Some(&into_g))? > 0 {
            return Ok(Membership {
                member: true,
                witness: Some(gamma),
            });
        }
    }
    Ok(Membership {
        member: false,
        witness: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    AlphaElliptic,
    NotAlphaElliptic,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::AlphaElliptic
        } else {
            Verdict::NotAlphaElliptic
        }
    }

    pub fn is_elliptic(self) -> bool {
        self == Verdict::AlphaElliptic
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Blocks `π_ρ(σ(ξ))` over `X^α`.
    Definition,
    /// `σ ⊗ id` on the `Γ₀`-invariants of `E_x ⊗ α` over the fixed locus.
    FixedPoint,
    /// Scalar symbols on the trivial line bundle.
    Scalar,
    /// Plain invertibility of `σ(ξ)`.
    Plain,
}

/// One inspected block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRecord {
    pub component: usize,
    pub sample: usize,
    pub point: usize,
    pub covector: Vec<f64>,
    pub stabilizer: Subgroup,
    /// Irreducible of the stabilizer (definition and scalar methods).
    pub rho: Option<usize>,
    /// Conjugate of `Γ₀` inside the stabilizer (fixed-point method) or the
    /// membership witness `γ`.
    pub gamma: Option<usize>,
    pub block_dim: usize,
    /// `None` for an empty block, which counts as invertible.
    pub smallest_singular_value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EllipticityReport {
    pub method: Method,
    pub alpha: Option<usize>,
    pub verdict: Verdict,
    pub threshold: f64,
    pub scale: f64,
    /// Components covered by this report.
    pub components: Vec<usize>,
    /// Nonempty blocks inspected.
    pub checked_pairs: usize,
    /// Orbit-reduced pairs in `X^α`, including those with an empty block.
    pub raw_pairs: usize,
    /// Orbit-reduced pairs in `X^α` with a nonempty block.
    pub refined_pairs: usize,
    /// Components on which every block is empty.
    pub vanishing_components: Vec<usize>,
    pub min_singular_value: Option<f64>,
    /// Failing blocks.
    pub witnesses: Vec<PairRecord>,
    pub pairs: Vec<PairRecord>,
    /// Verdicts certify the finite sample set only.
    pub sampled: usize,
}

impl EllipticityReport {
    pub fn is_elliptic(&self) -> bool {
        self.verdict.is_elliptic()
    }

    fn empty(
        method: Method,
        alpha: Option<usize>,
        threshold: f64,
        scale: f64,
        sampled: usize,
    ) -> Self {
        EllipticityReport {
            method,
            alpha,
            verdict: Verdict::AlphaElliptic,
            threshold,
            scale,
            components: Vec::new(),
            checked_pairs: 0,
            raw_pairs: 0,
            refined_pairs: 0,
            vanishing_components: Vec::new(),
            min_singular_value: None,
            witnesses: Vec::new(),
            pairs: Vec::new(),
            sampled,
        }
    }

    fn record(&mut self, pair: PairRecord) {
        self.raw_pairs += 1;
        if let Some(sv) = pair.smallest_singular_value {
            self.refined_pairs += 1;
            self.checked_pairs += 1;
            self.min_singular_value = Some(self.min_singular_value.map_or(sv, |m| m.min(sv)));
            if !(sv >= self.threshold && sv > 0.0) {
                self.verdict = Verdict::NotAlphaElliptic;
                self.witnesses.push(pair.clone());
            }
        }
        self.pairs.push(pair);
    }

    /// Conjunction of reports over disjoint components.
    pub fn merge(mut self, other: EllipticityReport) -> EllipticityReport {
        if !other.is_elliptic() {
            self.verdict = Verdict::NotAlphaElliptic;
        }
        self.components.extend(other.components);
        self.checked_pairs += other.checked_pairs;
        self.raw_pairs += other.raw_pairs;
        self.refined_pairs += other.refined_pairs;
        self.vanishing_components.extend(other.vanishing_components);
        self.min_singular_value = match (self.min_singular_value, other.min_singular_value) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.witnesses.extend(other.witnesses);
        self.pairs.extend(other.pairs);
        self
    }
}

/// Per-component reports and their conjunction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentSplit {
    pub verdict: Verdict,
    pub reports: Vec<EllipticityReport>,
}

/// Options shared by the checkers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    /// Blocks are invertible when their smallest singular value is at least
    /// this times the largest norm of the symbol.
    pub relative_threshold: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            relative_threshold: DEFAULT_THRESHOLD,
        }
    }
}

struct Context<'a> {
    sigma: &'a SymbolSample,
    threshold: f64,
    gamma0: BTreeMap<usize, Subgroup>,
}

impl<'a> Context<'a> {
    fn new(sigma: &'a SymbolSample, opts: CheckOptions) -> Result<Self> {
        let model = sigma.bundle().model();
        let gamma0 = (0..model.components().len())
            .map(|c| Ok((c, model.minimal_isotropy(c)?)))
            .collect::<Result<_>>()?;
        Ok(Context {
            sigma,
            threshold: opts.relative_threshold * sigma.scale(),
            gamma0,
        })
    }

    fn report(&self, method: Method, alpha: Option<usize>) -> EllipticityReport {
        EllipticityReport::empty(
            method,
            alpha,
            self.threshold,
            self.sigma.scale(),
            self.sigma.bundle().samples().len(),
        )
    }

    /// Orbit representatives lying over the component.
    fn representatives(&self, component: usize) -> Vec<usize> {
        let bundle = self.sigma.bundle();
        let model = bundle.model();
        bundle
            .samples()
            .orbit_representatives()
            .into_iter()
            .filter(|&s| model.points()[bundle.samples().samples()[s].point].component == component)
            .collect()
    }

    fn pair(
        &self,
        component: usize,
        s: usize,
        rho: Option<usize>,
        gamma: Option<usize>,
        block: &CMat,
    ) -> PairRecord {
        let sample = &self.sigma.bundle().samples().samples()[s];
        PairRecord {
            component,
            sample: s,
            point: sample.point,
            covector: sample.covector.clone(),
            stabilizer: sample.stabilizer.clone(),
            rho,
            gamma,
            block_dim: block.nrows(),
            smallest_singular_value: (block.nrows() > 0).then(|| smallest_singular_value(block)),
        }
    }

    fn definition(&self, alpha: usize, component: usize) -> Result<EllipticityReport> {
        let bundle = self.sigma.bundle();
        let g = bundle.group();
        let gamma0 = &self.gamma0[&component];
        let mut report = self.report(Method::Definition, Some(alpha));
        report.components.push(component);
        for s in self.representatives(component) {
            let k = &bundle.samples().samples()[s].stabilizer;
            let nk = g.subgroup_as_group(k).character_table()?.num_irreps();
            for rho in 0..nk {
                let m = in_x_alpha(g, k, rho, alpha, gamma0)?;
                if !m.member {
                    continue;
                }
                let block = gamma_symbol(self.sigma, s, rho)?;
                report.record(self.pair(component, s, Some(rho), m.witness, &block));
            }
        }
        if report.refined_pairs == 0 {
            report.vanishing_components.push(component);
        }
        Ok(report)
    }

    fn fixed_point(&self, alpha: usize, component: usize) -> Result<EllipticityReport> {
        let bundle = self.sigma.bundle();
        let g = bundle.group();
        let gamma0 = &self.gamma0[&component];
        let alpha_rep = g
            .irrep_matrices()?
            .get(alpha)
            .ok_or_else(|| Error::validation(format!("group has no irreducible {alpha}")))?
            .conj();
        let da = alpha_rep.dim();
        let mut report = self.report(Method::FixedPoint, Some(alpha));
        report.components.push(component);
        for s in self.representatives(component) {
            let sample = &bundle.samples().samples()[s];
            let k = &sample.stabilizer;
            let mut seen: Vec<Subgroup> = Vec::new();
            for gamma in g.elements() {
                let l = gamma0.conjugate(g, gamma);
                if !l.is_subset_of(k) || seen.contains(&l) {
                    continue;
                }
                seen.push(l.clone());
                let fiber = bundle.restricted_rep(sample.point, &l)?;
                let tensor = fiber.tensor(&alpha_rep.restrict(&l));
                let q = projector_basis(&tensor.fixed_projector());
                let lifted = self.sigma.value(s).kronecker(&CMat::identity(da, da));
                let block = q.adjoint() * lifted * &q;
                report.record(self.pair(component, s, None, Some(gamma), &block));
            }
        }
        if report.refined_pairs == 0 {
            report.vanishing_components.push(component);
        }
        Ok(report)
    }

    fn scalar(&self, alpha: usize, component: usize) -> Result<EllipticityReport> {
        let bundle = self.sigma.bundle();
        let g = bundle.group();
        let gamma0 = &self.gamma0[&component];
        let mut report = self.report(Method::Scalar, Some(alpha));
        report.components.push(component);
        for s in self.representatives(component) {
            let k = &bundle.samples().samples()[s].stabilizer;
            let m = in_x_alpha(g, k, 0, alpha, gamma0)?;
            if m.member {
                report.record(self.pair(component, s, Some(0), m.witness, self.sigma.value(s)));
            }
        }
        if report.refined_pairs == 0 {
            report.vanishing_components.push(component);
        }
        Ok(report)
    }

    fn plain(&self, component: usize) -> EllipticityReport {
        let mut report = self.report(Method::Plain, None);
        report.components.push(component);
        for s in self.representatives(component) {
            report.record(self.pair(component, s, None, None, self.sigma.value(s)));
        }
        report
    }

    fn check(
        &self,
        method: Method,
        alpha: Option<usize>,
        component: usize,
    ) -> Result<EllipticityReport> {
        let need = || alpha.ok_or_else(|| Error::validation("an irreducible α is required"));
        match method {
            Method::Definition => self.definition(need()?, component),
            Method::FixedPoint => self.fixed_point(need()?, component),
            Method::Scalar => self.scalar(need()?, component),
            Method::Plain => Ok(self.plain(component)),
        }
    }
}

fn check_alpha(sigma: &SymbolSample, alpha: usize) -> Result<()> {
    let n = sigma.bundle().group().character_table()?.num_irreps();
    if alpha >= n {
        return Err(Error::validation(format!(
            "α = {alpha} but the group has {n} irreducibles"
        )));
    }
    Ok(())
}

fn run(
    sigma: &SymbolSample,
    method: Method,
    alpha: Option<usize>,
    opts: CheckOptions,
) -> Result<ComponentSplit> {
    if let Some(a) = alpha {
        check_alpha(sigma, a)?;
    }
    if method == Method::Scalar {
        let bundle = sigma.bundle();
        let trivial_fibers = bundle
            .transport
            .iter()
            .flatten()
            .all(|m| (m[(0, 0)] - C64::new(1.0, 0.0)).norm() <= BUNDLE_TOL);
        if bundle.rank() != 1 || !trivial_fibers {
            return Err(Error::validation(
                "scalar check needs the trivial line bundle",
            ));
        }
    }
    let ctx = Context::new(sigma, opts)?;
    let reports = (0..sigma.bundle().model().components().len())
        .map(|c| ctx.check(method, alpha, c))
        .collect::<Result<Vec<_>>>()?;
    let verdict = Verdict::from_bool(reports.iter().all(|r| r.is_elliptic()));
    Ok(ComponentSplit { verdict, reports })
}

fn combined(split: ComponentSplit) -> EllipticityReport {
    let mut it = split.reports.into_iter();
    let first = it.next().expect("models have at least one component");
    it.fold(first, EllipticityReport::merge)
}

/// α-ellipticity from the definition: every block `π_ρ(σ(ξ))` with
/// `(ξ, ρ) ∈ X^α` is invertible.
pub fn alpha_elliptic(sigma: &SymbolSample, alpha: usize) -> Result<EllipticityReport> {
    alpha_elliptic_with(sigma, alpha, CheckOptions::default())
}

pub fn alpha_elliptic_with(
    sigma: &SymbolSample,
    alpha: usize,
    opts: CheckOptions,
) -> Result<EllipticityReport> {
    Ok(combined(run(sigma, Method::Definition, Some(alpha), opts)?))
}

/// α-ellipticity through `σ ⊗ id` restricted to the invariants of each
/// conjugate `L` of `Γ₀` fixing the covector. The tensor factor is the
/// conjugate of α, which puts `Hom_L(ρ, α)` and `(E ⊗ ᾱ)^L` on the same
/// isotypes.
pub fn alpha_elliptic_fixed_point(sigma: &SymbolSample, alpha: usize) -> Result<EllipticityReport> {
    alpha_elliptic_fixed_point_with(sigma, alpha, CheckOptions::default())
}

pub fn alpha_elliptic_fixed_point_with(
    sigma: &SymbolSample,
    alpha: usize,
    opts: CheckOptions,
) -> Result<EllipticityReport> {
    Ok(combined(run(sigma, Method::FixedPoint, Some(alpha), opts)?))
}

/// Scalar symbols: `σ(ξ) ≠ 0` wherever the trivial representation of
/// `Γ_ξ` is `Γ₀`-associated to α.
pub fn scalar_alpha_elliptic(sigma: &SymbolSample, alpha: usize) -> Result<EllipticityReport> {
    Ok(combined(run(
        sigma,
        Method::Scalar,
        Some(alpha),
        CheckOptions::default(),
    )?))
}

/// Plain ellipticity: `σ(ξ)` invertible on every sample.
pub fn elliptic(sigma: &SymbolSample) -> Result<EllipticityReport> {
    Ok(combined(run(
        sigma,
        Method::Plain,
        None,
        CheckOptions::default(),
    )?))
}

/// Per-component definition reports with their conjunction.
pub fn component_split(sigma: &SymbolSample, alpha: usize) -> Result<ComponentSplit> {
    run(
        sigma,
        Method::Definition,
        Some(alpha),
        CheckOptions::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{
        builtin_model, disjoint_union, free_dense, s3_through_z2_circle, trivial_action,
        ModelParams,
    };
    use crate::linalg::{c, ONE, ZERO};

    fn z2_bundle() -> Arc<EquivariantBundle> {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let model = Arc::new(trivial_action(g.clone(), 4, 1).unwrap());
        let table = g.character_table().unwrap();
        let rep = MatrixRep::direct_sum_all(&[
            MatrixRep::linear(&table.character(0)),
            MatrixRep::linear(&table.character(1)),
        ])
        .unwrap();
        Arc::new(EquivariantBundle::constant(model, &rep).unwrap())
    }

    fn diag(a: C64, b: C64) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![a, b]))
    }

    #[test]
    fn sign_block_of_diagonal_symbol() {
        let b = z2_bundle();
        let sigma =
            SymbolSample::from_fn(b.clone(), |_, _| diag(c(2.0, 0.0), c(3.0, 0.0))).unwrap();
        let sign = gamma_symbol(&sigma, 0, 1).unwrap();
        assert_eq!(sign.nrows(), 1);
        assert!((sign[(0, 0)] - c(3.0, 0.0)).norm() < 1e-12);
        let id = SymbolSample::from_fn(b, |_, _| CMat::identity(2, 2)).unwrap();
        for rho in 0..2 {
            let block = gamma_symbol(&id, 0, rho).unwrap();
            assert!((block.clone() - CMat::identity(block.nrows(), block.ncols())).norm() < 1e-12);
        }
    }

    #[test]
    fn empty_block_is_invertible() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let model = Arc::new(trivial_action(g.clone(), 4, 1).unwrap());
        let b = Arc::new(EquivariantBundle::trivial_line(model).unwrap());
        let sigma = SymbolSample::from_fn(b, |_, _| CMat::from_element(1, 1, ONE)).unwrap();
        assert_eq!(gamma_symbol(&sigma, 0, 1).unwrap().nrows(), 0);
        let r = alpha_elliptic(&sigma, 1).unwrap();
        assert!(r.is_elliptic());
        assert_eq!(r.refined_pairs, 0);
        assert!(r.raw_pairs > 0);
        assert_eq!(r.vanishing_components, vec![0]);
    }

    #[test]
    fn non_commuting_value_is_rejected() {
        let b = z2_bundle();
        let off = CMat::from_row_slice(2, 2, &[ONE, ONE, ONE, ONE]);
        assert!(matches!(
            SymbolSample::from_fn(b, |_, _| off.clone()),
            Err(Error::Invariance(_))
        ));
    }

    #[test]
    fn trivial_action_inspects_only_alpha() {
        let b = z2_bundle();
        let sigma = SymbolSample::from_fn(b, |_, _| diag(ONE, ZERO)).unwrap();
        let triv = alpha_elliptic(&sigma, 0).unwrap();
        assert!(triv.is_elliptic());
        let sign = alpha_elliptic(&sigma, 1).unwrap();
        assert!(!sign.is_elliptic());
        assert!(!sign.witnesses.is_empty());
        assert_eq!(sign.witnesses[0].rho, Some(1));
        for a in 0..2 {
            assert_eq!(
                alpha_elliptic_fixed_point(&sigma, a).unwrap().verdict,
                alpha_elliptic(&sigma, a).unwrap().verdict
            );
        }
        let fp = alpha_elliptic_fixed_point(&sigma, 1).unwrap();
        assert!(fp.pairs.iter().all(|p| p.block_dim == 1));
    }

    #[test]
    fn membership_examples() {
        let g = FiniteGroup::cyclic(3);
        let whole = Subgroup::whole(&g);
        for rho in 0..3 {
            let m = in_x_alpha(&g, &whole, rho, 1, &Subgroup::trivial()).unwrap();
            assert!(m.member);
            assert_eq!(m.witness, Some(0));
            assert_eq!(
                in_x_alpha(&g, &whole, rho, 1, &whole).unwrap().member,
                rho == 1
            );
        }
        let s3 = FiniteGroup::symmetric(3);
        let a3 = s3.generated(&[s3
            .find_permutation(&crate::grp::Permutation::parse_cycles("(0 1 2)", 3).unwrap())
            .unwrap()]);
        let at = s3.subgroup_as_group(&a3);
        let at = at.character_table().unwrap();
        let std = (0..3)
            .find(|&i| s3.character_table().unwrap().degree(i) == 2)
            .unwrap();
        for rho in 0..3 {
            let trivial = (0..3).all(|k| (at.value(rho, k) - ONE).norm() < 1e-9);
            let m = in_x_alpha(&s3, &a3, rho, std, &a3).unwrap();
            assert_eq!(m.member, !trivial);
        }
    }

    #[test]
    fn free_model_collapses_to_plain() {
        let model = Arc::new(free_dense(3, 12).unwrap());
        let g = model.group().clone();
        let b = Arc::new(EquivariantBundle::constant(model, &MatrixRep::regular(&g)).unwrap());
        let sigma = SymbolSample::from_fn(b.clone(), |_, x| {
            if x.covector[0] > 0.0 {
                CMat::identity(3, 3)
            } else {
                CMat::zeros(3, 3)
            }
        })
        .unwrap();
        let plain = elliptic(&sigma).unwrap();
        assert!(!plain.is_elliptic());
        for a in 0..3 {
            assert_eq!(alpha_elliptic(&sigma, a).unwrap().verdict, plain.verdict);
        }
    }

    #[test]
    fn s3_scalar_multiple_on_fixed_locus() {
        let model = Arc::new(s3_through_z2_circle(12).unwrap());
        let g = model.group().clone();
        let std = (0..3)
            .find(|&i| g.character_table().unwrap().degree(i) == 2)
            .unwrap();
        let b = Arc::new(EquivariantBundle::constant(model, &MatrixRep::regular(&g)).unwrap());
        let good =
            SymbolSample::from_fn(b.clone(), |_, _| CMat::identity(6, 6) * c(2.0, 0.0)).unwrap();
        let bad = SymbolSample::from_fn(b, |_, x| {
            let a = if x.point == 0 { 0.0 } else { 1.0 };
            CMat::identity(6, 6) * c(a, 0.0)
        })
        .unwrap();
        for s in [&good, &bad] {
            let d = alpha_elliptic(s, std).unwrap();
            let f = alpha_elliptic_fixed_point(s, std).unwrap();
            assert_eq!(d.verdict, f.verdict);
        }
        assert!(alpha_elliptic(&good, std).unwrap().is_elliptic());
        assert!(!alpha_elliptic(&bad, std).unwrap().is_elliptic());
    }

    #[test]
    fn scalar_check() {
        let model = Arc::new(builtin_model("reflection_circle", &ModelParams::samples(8)).unwrap());
        let b = Arc::new(EquivariantBundle::trivial_line(model).unwrap());
        let one = SymbolSample::from_fn(b.clone(), |_, _| CMat::from_element(1, 1, ONE)).unwrap();
        for a in 0..2 {
            assert!(scalar_alpha_elliptic(&one, a).unwrap().is_elliptic());
        }
        // vanishes on the covectors fixed by the reflection
        let fixed_zero = SymbolSample::from_fn(b, |_, x| {
            let z = if x.stabilizer.order() == 2 { ZERO } else { ONE };
            CMat::from_element(1, 1, z)
        })
        .unwrap();
        for a in 0..2 {
            let s = scalar_alpha_elliptic(&fixed_zero, a).unwrap();
            assert_eq!(s.verdict, alpha_elliptic(&fixed_zero, a).unwrap().verdict);
        }
        let bundle = z2_bundle();
        let two = SymbolSample::from_fn(bundle, |_, _| CMat::identity(2, 2)).unwrap();
        assert!(matches!(
            scalar_alpha_elliptic(&two, 0),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn components_use_their_own_isotropy() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let a = trivial_action(g.clone(), 4, 1).unwrap();
        let f = free_dense(2, 8).unwrap();
        let model = Arc::new(disjoint_union(&a, &f).unwrap());
        assert_eq!(model.minimal_isotropy(0).unwrap().order(), 2);
        assert_eq!(model.minimal_isotropy(1).unwrap().order(), 1);
        let rep = MatrixRep::regular(&g);
        let b = Arc::new(EquivariantBundle::constant(model.clone(), &rep).unwrap());
        let proj = isotypical_projector(&rep, g.character_table().unwrap(), 1);
        let kill = CMat::identity(2, 2) - proj;
        let sigma = SymbolSample::from_fn(b, |_, x| {
            if model.points()[x.point].component == 0 {
                kill.clone()
            } else {
                CMat::identity(2, 2)
            }
        })
        .unwrap();
        let split = component_split(&sigma, 1).unwrap();
        assert_eq!(split.reports.len(), 2);
        assert!(!split.reports[0].is_elliptic());
        assert!(split.reports[1].is_elliptic());
        assert_eq!(split.verdict, Verdict::NotAlphaElliptic);
        assert!(split.reports[0].witnesses.iter().all(|w| w.component == 0));
        let split = component_split(&sigma, 0).unwrap();
        assert_eq!(split.verdict, Verdict::AlphaElliptic);
        assert_eq!(
            alpha_elliptic(&sigma, 1).unwrap().verdict,
            Verdict::NotAlphaElliptic
        );
    }

    #[test]
    fn missing_values_are_rejected() {
        let b = z2_bundle();
        assert!(matches!(
            SymbolSample::new(b, vec![]),
            Err(Error::Validation(_))
        ));
    }
}
