//! Finite stratified models of Γ-manifolds.
//!
//! A model is a finite set of base points with a Γ-action, a real cotangent
//! fiber at each point, and fiber isometries for every group element. Each
//! point stands for a tube around its orbit; the quotient components and the
//! principal stratum are declared by the model and checked for consistency.

mod builtin;

pub use builtin::{
    builtin_model, circle_model, disjoint_union, free_dense, product, reflection_circle,
    s3_through_z2_circle, trivial_action, CircleAction, ModelParams, BUILTIN_MODELS,
};

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grp::{all_subgroups, FiniteGroup, MatrixRep, Subgroup};
use crate::linalg::{complexify, projector_basis};

/// Tolerance on fiber isometries and covector fixedness.
pub const FIBER_TOL: f64 = 1e-9;
const COVECTOR_ATTEMPTS: usize = 64;

/// A base point of a model.
#[derive(Clone, Debug)]
pub struct Point {
    pub label: String,
    pub component: usize,
    pub principal: bool,
    pub stabilizer: Subgroup,
}

/// A finite model of a Γ-manifold.
#[derive(Clone, Debug)]
pub struct ActionModel {
    name: String,
    group: Arc<FiniteGroup>,
    fiber_dim: usize,
    points: Vec<Point>,
    components: Vec<String>,
    /// `transport[g][x] = (g·x, fiber isometry T*_x → T*_{g·x})`
    transport: Vec<Vec<(usize, DMatrix<f64>)>>,
    circle: Option<CircleAction>,
}

/// Specification of one point for [`ActionModel::new`].
#[derive(Clone, Debug)]
pub struct PointSpec {
    pub label: String,
    pub component: usize,
    pub principal: bool,
}

impl ActionModel {
    /// Build and validate a model. Stabilizers are read off the transport
    /// table.
    pub fn new(
        name: impl Into<String>,
        group: Arc<FiniteGroup>,
        fiber_dim: usize,
        points: Vec<PointSpec>,
        components: Vec<String>,
        transport: Vec<Vec<(usize, DMatrix<f64>)>>,
    ) -> Result<Self> {
        if fiber_dim == 0 {
            return Err(Error::validation(
                "cotangent fiber must have positive dimension",
            ));
        }
        if points.is_empty() {
            return Err(Error::validation("model has no points"));
        }
        let n = points.len();
        if transport.len() != group.order() || transport.iter().any(|row| row.len() != n) {
            return Err(Error::validation(format!(
                "transport table must be {} x {}",
                group.order(),
                n
            )));
        }
        for (g, row) in transport.iter().enumerate() {
            for (x, (y, m)) in row.iter().enumerate() {
                if *y >= n {
                    return Err(Error::validation(format!(
                        "transport of point {x} by {g} out of range"
                    )));
                }
                if m.nrows() != fiber_dim || m.ncols() != fiber_dim {
                    return Err(Error::validation(format!(
                        "fiber map of {} at point {x} is {}x{}, expected {fiber_dim}x{fiber_dim}",
                        group.element_label(g),
                        m.nrows(),
                        m.ncols()
                    )));
                }
                let defect = (m.transpose() * m - DMatrix::identity(fiber_dim, fiber_dim)).norm();
                if defect > FIBER_TOL * fiber_dim as f64 {
                    return Err(Error::validation(format!(
                        "fiber map of {} at point {x} is not orthogonal",
                        group.element_label(g)
                    )));
                }
            }
        }
        for comp in points.iter().map(|p| p.component) {
            if comp >= components.len() {
                return Err(Error::validation(format!(
                    "component id {comp} is not declared"
                )));
            }
        }
        let stabilizers: Vec<Subgroup> = (0..n)
            .map(|x| {
                let elems = group
                    .elements()
                    .filter(|&g| transport[g][x].0 == x)
                    .collect();
                Subgroup::new(&group, elems)
            })
            .collect::<Result<_>>()?;
        let model = ActionModel {
            name: name.into(),
            points: points
                .into_iter()
                .zip(stabilizers)
                .map(|(p, s)| Point {
                    label: p.label,
                    component: p.component,
                    principal: p.principal,
                    stabilizer: s,
                })
                .collect(),
            group,
            fiber_dim,
            components,
            transport,
            circle: None,
        };
        model.validate()?;
        Ok(model)
    }

    pub(crate) fn with_circle(mut self, circle: CircleAction) -> Self {
        self.circle = Some(circle);
        self
    }

    /// Cocycle rule, stabilizer equivariance and component closure.
    pub fn validate(&self) -> Result<()> {
        let g = &self.group;
        let n = self.points.len();
        for x in 0..n {
            let (y, m) = &self.transport[0][x];
            if *y != x || (m - DMatrix::identity(self.fiber_dim, self.fiber_dim)).norm() > FIBER_TOL
            {
                return Err(Error::validation(format!(
                    "identity does not fix point {x}"
                )));
            }
        }
        for a in g.elements() {
            for b in g.elements() {
                let ab = g.mul(a, b);
                for x in 0..n {
                    let (bx, mb) = &self.transport[b][x];
                    let (abx, ma) = &self.transport[a][*bx];
                    let (want, mab) = &self.transport[ab][x];
                    if abx != want {
                        return Err(Error::validation(format!(
                            "cocycle rule fails on points: ({})·(({})·{x}) != ({})·{x}",
                            g.element_label(a),
                            g.element_label(b),
                            g.element_label(ab)
                        )));
                    }
                    if (ma * mb - mab).norm() > FIBER_TOL * self.fiber_dim as f64 {
                        return Err(Error::validation(format!(
                            "cocycle rule fails on fiber maps at point {x}"
                        )));
                    }
                }
            }
        }
        for x in 0..n {
            for a in g.elements() {
                let y = self.transport[a][x].0;
                let want = self.points[x].stabilizer.conjugate(g, a);
                if self.points[y].stabilizer != want {
                    return Err(Error::validation(format!(
                        "stabilizer of point {y} is not the conjugate of the stabilizer of point {x}"
                    )));
                }
                if self.points[y].component != self.points[x].component {
                    return Err(Error::validation(format!(
                        "component {} is not closed under the group action",
                        self.components[self.points[x].component]
                    )));
                }
            }
        }
        for c in 0..self.components.len() {
            if !self.points.iter().any(|p| p.component == c && p.principal) {
                return Err(Error::validation(format!(
                    "component {} declares no principal points",
                    self.components[c]
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn components(&self) -> &[String] {
        &self.components
    }

    pub fn circle(&self) -> Option<&CircleAction> {
        self.circle.as_ref()
    }

    /// `g·x`
    pub fn act(&self, g: usize, x: usize) -> usize {
        self.transport[g][x].0
    }

    /// Fiber isometry `T*_x → T*_{g·x}`.
    pub fn fiber_map(&self, g: usize, x: usize) -> &DMatrix<f64> {
        &self.transport[g][x].1
    }

    /// Cotangent representation of `Γ_x`, indexed by local ids.
    pub fn cotangent_rep(&self, x: usize) -> MatrixRep {
        let mats = self.points[x]
            .stabilizer
            .elements()
            .iter()
            .map(|&k| complexify(self.fiber_map(k, x)))
            .collect();
        MatrixRep::from_matrices(mats).expect("nonempty stabilizer")
    }

    /// Orbit of a point, sorted.
    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let mut o: Vec<usize> = self.group.elements().map(|g| self.act(g, x)).collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    /// Smallest element id moving `x` to `y`.
    pub fn transporter(&self, x: usize, y: usize) -> Option<usize> {
        self.group.elements().find(|&g| self.act(g, x) == y)
    }

    /// Points grouped by the conjugacy class of their stabilizer.
    pub fn orbit_types(&self) -> Vec<OrbitType> {
        let mut map: BTreeMap<(usize, Subgroup), Vec<usize>> = BTreeMap::new();
        for (x, p) in self.points.iter().enumerate() {
            let canon = p.stabilizer.canonical_conjugate(&self.group);
            map.entry((canon.order(), canon)).or_default().push(x);
        }
        map.into_iter()
            .map(|((_, subgroup), points)| OrbitType { subgroup, points })
            .collect()
    }

    /// `Γ₀` of a component: the unique minimal stabilizer class among its
    /// principal points, which every stabilizer in the component must
    /// subconjugate-contain. Returned as the canonical representative.
    pub fn minimal_isotropy(&self, component: usize) -> Result<Subgroup> {
        if component >= self.components.len() {
            return Err(Error::validation(format!(
                "no component with id {component}"
            )));
        }
        let g = &self.group;
        let mut classes: Vec<Subgroup> = self
            .points
            .iter()
            .filter(|p| p.component == component && p.principal)
            .map(|p| p.stabilizer.canonical_conjugate(g))
            .collect();
        classes.sort();
        classes.dedup();
        let minimal: Vec<&Subgroup> = classes
            .iter()
            .filter(|h| {
                !classes
                    .iter()
                    .any(|k| k != *h && k.order() < h.order() && k.subconjugate_to(h, g))
            })
            .collect();
        if minimal.len() != 1 {
            return Err(Error::validation(format!(
                "component {} has {} incomparable minimal stabilizer classes",
                self.components[component],
                minimal.len()
            )));
        }
        let gamma0 = minimal[0].clone();
        for (x, p) in self.points.iter().enumerate() {
            if p.component == component && !gamma0.subconjugate_to(&p.stabilizer, g) {
                return Err(Error::validation(format!(
                    "stabilizer of point {x} ({}) contains no conjugate of the minimal isotropy",
                    p.label
                )));
            }
        }
        Ok(gamma0)
    }

    /// Realized covector stabilizers at a point: `K ≤ Γ_x` with
    /// `dim Fix(K) > dim Fix(K')` for every `K' ⊋ K` inside `Γ_x`.
    /// Representatives are computed on the orbit representative and
    /// transported, so that the classes at `g·x` are the transported
    /// classes at `x`.
    pub fn cotangent_stabilizers(&self, x: usize) -> Result<Vec<CovectorClass>> {
        let x0 = *self.orbit(x).first().expect("orbit contains x");
        let g = self.transporter(x0, x).expect("same orbit");
        let base = self.cotangent_stabilizers_at_rep(x0)?;
        let m = self.fiber_map(g, x0);
        let mut out: Vec<CovectorClass> = base
            .into_iter()
            .map(|cv| CovectorClass {
                point: x,
                stabilizer: cv.stabilizer.conjugate(&self.group, g),
                covector: (m * DMatrix::from_column_slice(self.fiber_dim, 1, &cv.covector))
                    .iter()
                    .copied()
                    .collect(),
            })
            .collect();
        out.sort_by(|a, b| {
            (a.stabilizer.order(), &a.stabilizer).cmp(&(b.stabilizer.order(), &b.stabilizer))
        });
        Ok(out)
    }

    fn cotangent_stabilizers_at_rep(&self, x: usize) -> Result<Vec<CovectorClass>> {
        let g = &self.group;
        let stab = &self.points[x].stabilizer;
        let local = g.subgroup_as_group(stab);
        let subs: Vec<Subgroup> = all_subgroups(&local)?
            .into_iter()
            .map(|h| {
                let elems = h.elements().iter().map(|&i| stab.elements()[i]).collect();
                Subgroup::new(g, elems).expect("image of a subgroup")
            })
            .collect();
        let d = self.fiber_dim;
        let fix_basis = |k: &Subgroup| -> DMatrix<f64> {
            let mut p = DMatrix::<f64>::zeros(d, d);
            for &e in k.elements() {
                p += self.fiber_map(e, x);
            }
            p /= k.order() as f64;
            projector_basis(&complexify(&p)).map(|z| z.re)
        };
        let dims: Vec<usize> = subs.iter().map(|k| fix_basis(k).ncols()).collect();
        let realized: Vec<usize> = (0..subs.len())
            .filter(|&i| {
                dims[i] > 0
                    && subs
                        .iter()
                        .enumerate()
                        .all(|(j, k2)| j == i || !subs[i].is_subset_of(k2) || dims[j] < dims[i])
            })
            .collect();

        // One representative per Γ_x-conjugacy class of realized subgroups,
        // transported by the smallest conjugating element to the others.
        let mut classes: Vec<CovectorClass> = Vec::new();
        let mut done = vec![false; subs.len()];
        for &i in &realized {
            if done[i] {
                continue;
            }
            let k = &subs[i];
            let xi = self.random_covector(x, k, &fix_basis(k), i as u64)?;
            for &j in &realized {
                if done[j] {
                    continue;
                }
                if let Some(c) = stab
                    .elements()
                    .iter()
                    .copied()
                    .find(|&c| k.conjugate(g, c) == subs[j])
                {
                    let m = self.fiber_map(c, x);
                    let v = m * DMatrix::from_column_slice(d, 1, &xi);
                    classes.push(CovectorClass {
                        point: x,
                        stabilizer: subs[j].clone(),
                        covector: v.iter().copied().collect(),
                    });
                    done[j] = true;
                }
            }
        }
        Ok(classes)
    }

    fn random_covector(
        &self,
        x: usize,
        k: &Subgroup,
        basis: &DMatrix<f64>,
        salt: u64,
    ) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(0xc07a_u64 ^ ((x as u64) << 20) ^ salt);
        for _ in 0..COVECTOR_ATTEMPTS {
            let coeffs: Vec<f64> = (0..basis.ncols())
                .map(|_| rng.sample(StandardNormal))
                .collect();
            let v = basis * nalgebra::DVector::from_vec(coeffs);
            let norm = v.norm();
            if norm < 1e-6 {
                continue;
            }
            let v = v / norm;
            let achieved = self.covector_stabilizer(x, v.as_slice());
            if &achieved == k {
                return Ok(v.iter().copied().collect());
            }
        }
        Err(Error::numerical(format!(
            "no covector with stabilizer of order {} found at point {x} after {COVECTOR_ATTEMPTS} attempts",
            k.order()
        )))
    }

    /// Elements of `Γ_x` fixing a covector at `x`.
    pub fn covector_stabilizer(&self, x: usize, xi: &[f64]) -> Subgroup {
        let v = DMatrix::from_column_slice(self.fiber_dim, 1, xi);
        let elems = self.points[x]
            .stabilizer
            .elements()
            .iter()
            .copied()
            .filter(|&k| (self.fiber_map(k, x) * &v - &v).norm() <= 1e-9)
            .collect();
        Subgroup::new(&self.group, elems).expect("stabilizer of a vector is a subgroup")
    }

    /// Finite cosphere sample: the group-orbit closure of every class
    /// representative and its negative.
    pub fn sample_set(&self) -> Result<SampleSet> {
        let mut seeds: Vec<(usize, Vec<f64>)> = Vec::new();
        for x in 0..self.num_points() {
            for cv in self.cotangent_stabilizers(x)? {
                let neg: Vec<f64> = cv.covector.iter().map(|v| -v).collect();
                seeds.push((x, cv.covector));
                seeds.push((x, neg));
            }
        }
        SampleSet::closure(self, seeds)
    }
}

/// One orbit type: a subgroup class with the points carrying it.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitType {
    pub subgroup: Subgroup,
    pub points: Vec<usize>,
}

/// A stratum of covectors at a point with exact stabilizer `K`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovectorClass {
    pub point: usize,
    pub stabilizer: Subgroup,
    pub covector: Vec<f64>,
}

/// A sampled unit covector.
#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    pub point: usize,
    pub covector: Vec<f64>,
    pub stabilizer: Subgroup,
    pub orbit: usize,
}

/// A Γ-invariant finite set of unit covectors with the induced action.
#[derive(Clone, Debug)]
pub struct SampleSet {
    samples: Vec<Sample>,
    act: Vec<Vec<usize>>,
    orbits: Vec<Vec<usize>>,
}

fn same_covector(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9)
}

impl SampleSet {
    /// Close seed covectors under the group action and deduplicate.
    pub fn closure(model: &ActionModel, seeds: Vec<(usize, Vec<f64>)>) -> Result<Self> {
        let g = model.group();
        let d = model.fiber_dim();
        let mut pts: Vec<(usize, Vec<f64>)> = Vec::new();
        let find = |pts: &Vec<(usize, Vec<f64>)>, x: usize, v: &[f64]| {
            pts.iter().position(|(y, w)| *y == x && same_covector(w, v))
        };
        for (x, v) in seeds {
            if v.len() != d {
                return Err(Error::validation("sample covector has the wrong dimension"));
            }
            if find(&pts, x, &v).is_some() {
                continue;
            }
            for a in g.elements() {
                let y = model.act(a, x);
                let w: Vec<f64> = (model.fiber_map(a, x) * DMatrix::from_column_slice(d, 1, &v))
                    .iter()
                    .copied()
                    .collect();
                if find(&pts, y, &w).is_none() {
                    pts.push((y, w));
                }
            }
        }
        let mut act = vec![vec![0; pts.len()]; g.order()];
        for a in g.elements() {
            for (s, (x, v)) in pts.iter().enumerate() {
                let y = model.act(a, *x);
                let w: Vec<f64> = (model.fiber_map(a, *x) * DMatrix::from_column_slice(d, 1, v))
                    .iter()
                    .copied()
                    .collect();
                act[a][s] = find(&pts, y, &w)
                    .ok_or_else(|| Error::Integrity("sample set is not closed".into()))?;
            }
        }
        let mut orbit_of = vec![usize::MAX; pts.len()];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for s in 0..pts.len() {
            if orbit_of[s] != usize::MAX {
                continue;
            }
            let mut members: Vec<usize> = g.elements().map(|a| act[a][s]).collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                orbit_of[m] = orbits.len();
            }
            orbits.push(members);
        }
        let samples = pts
            .into_iter()
            .enumerate()
            .map(|(s, (x, v))| {
                let elems = g.elements().filter(|&a| act[a][s] == s).collect();
                Sample {
                    point: x,
                    covector: v,
                    stabilizer: Subgroup::new(g, elems).expect("stabilizer"),
                    orbit: orbit_of[s],
                }
            })
            .collect();
        Ok(SampleSet {
            samples,
            act,
            orbits,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample id of `g·s`.
    pub fn act(&self, g: usize, s: usize) -> usize {
        self.act[g][s]
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    /// Smallest sample id of each orbit.
    pub fn orbit_representatives(&self) -> Vec<usize> {
        self.orbits.iter().map(|o| o[0]).collect()
    }
}
