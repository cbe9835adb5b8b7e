//! Primitive spectrum of the invariant symbol algebra of a finite model.
//!
//! Over a sample orbit with representative `ξ` the invariant algebra is
//! `End(E_x)^{Γ_ξ} ≅ ⊕_ρ M_{k_ρ}(C)`, one simple block per irreducible `ρ`
//! of `Γ_ξ` occurring in `E_x`. These blocks are the Prim points.
//!
//! Covectors near a non-principal `ξ` have stabilizer `L`, the kernel of
//! `Γ_ξ` on the cotangent fiber. They are not sampled. Instead the summand
//! over `ξ` is enlarged to `End(E_x)^{Γ_ξ} ⊕ End(E_x)^L`, the second factor
//! standing for values near `ξ`, and each irreducible `τ` of `L` occurring
//! in `E_x` gives a germ node. A germ sees the `τ`-isotype both near `ξ` and
//! in the limit at `ξ`, so its closure contains the blocks at `ξ` lying over
//! `τ`. The hull-kernel closure is computed on Prim points and germs
//! together.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::action::SampleSet;
use crate::error::{Error, Result};
use crate::grp::{isotypical_projector, FiniteGroup, MatrixRep, Subgroup};
use crate::linalg::{block_diagonal, null_space_abs, projector_basis, CMat};
use crate::rep::commutant_basis;
use crate::symbol::{in_x_alpha, EquivariantBundle};

/// Absolute rank threshold of kernel intersections, on unit-norm bases.
pub const KERNEL_TOL: f64 = 1e-8;

/// A Γ-orbit of admissible pairs `(ξ, ρ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimPoint {
    /// Representative sample of the covector orbit.
    pub sample: usize,
    pub point: usize,
    /// Index of the covector orbit in the sample set.
    pub orbit: usize,
    pub component: usize,
    /// Irreducible of the stabilizer of the representative.
    pub rho: usize,
    pub degree: usize,
    pub multiplicity: usize,
    /// The covector stabilizer is conjugate to `Γ₀`.
    pub principal: bool,
}

/// Principal covectors accumulating at a non-principal sample, labelled by
/// an irreducible `τ` of their stabilizer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Germ {
    pub sample: usize,
    pub orbit: usize,
    pub component: usize,
    pub subgroup: Subgroup,
    pub tau: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Prim(usize),
    Germ(usize),
}

pub type NodeSet = BTreeSet<Node>;

struct OrbitData {
    sample: usize,
    point: usize,
    stabilizer: Subgroup,
    /// Basis of `End(E_x)^{Γ_ξ}` from random averaging.
    algebra: Vec<CMat>,
    /// Basis of `End(E_x)^{Γ_ξ} ⊕ End(E_x)^L` as block-diagonal matrices,
    /// the second summand holding the values near `ξ`; equal to `algebra`
    /// at principal samples.
    extended: Vec<CMat>,
}

/// The invariant symbol algebra of a bundle, one summand per covector orbit.
pub struct FiniteSymbolAlgebra {
    bundle: Arc<EquivariantBundle>,
    orbits: Vec<OrbitData>,
    gamma0: Vec<Subgroup>,
    prim: Vec<PrimPoint>,
    germs: Vec<Germ>,
    /// Orthonormal basis of the isotype seen by each node.
    prim_bases: Vec<CMat>,
    germ_bases: Vec<CMat>,
}

fn kernel_of_action(bundle: &EquivariantBundle, x: usize, k: &Subgroup) -> Subgroup {
    let model = bundle.model();
    let d = model.fiber_dim();
    let id = nalgebra::DMatrix::<f64>::identity(d, d);
    let elems = k
        .elements()
        .iter()
        .copied()
        .filter(|&a| (model.fiber_map(a, x) - &id).norm() <= 1e-9)
        .collect();
    Subgroup::new(model.group(), elems).expect("kernel of a representation is a subgroup")
}

fn isotypes(rep: &MatrixRep, grp: &FiniteGroup) -> Result<Vec<(usize, usize, usize, CMat)>> {
    let table = grp.character_table()?;
    let mults = table.decompose(&rep.character())?;
    let mut out = Vec::new();
    for (j, &k) in mults.iter().enumerate() {
        if k > 0 {
            let q = projector_basis(&isotypical_projector(rep, table, j));
            if q.ncols() != k * table.degree(j) {
                return Err(Error::numerical(format!(
                    "isotype {j} has unexpected rank {}",
                    q.ncols()
                )));
            }
            out.push((j, table.degree(j), k, q));
        }
    }
    Ok(out)
}

impl FiniteSymbolAlgebra {
    pub fn new(bundle: Arc<EquivariantBundle>) -> Result<Self> {
        let model = bundle.model().clone();
        let g = model.group().clone();
        let set: Arc<SampleSet> = bundle.samples().clone();
        let gamma0 = (0..model.components().len())
            .map(|c| model.minimal_isotropy(c))
            .collect::<Result<Vec<_>>>()?;
        let mut orbits = Vec::new();
        let mut prim = Vec::new();
        let mut germs = Vec::new();
        let mut prim_bases = Vec::new();
        let mut germ_bases = Vec::new();
        for (o, orbit) in set.orbits().iter().enumerate() {
            let s = orbit[0];
            let sample = &set.samples()[s];
            let x = sample.point;
            let component = model.points()[x].component;
            let k = sample.stabilizer.clone();
            let rep = bundle.restricted_rep(x, &k)?;
            let principal = k.is_conjugate_to(&gamma0[component], &g);
            let first_prim = prim_bases.len();
            for (rho, degree, multiplicity, q) in isotypes(&rep, &g.subgroup_as_group(&k))? {
                prim.push(PrimPoint {
                    sample: s,
                    point: x,
                    orbit: o,
                    component,
                    rho,
                    degree,
                    multiplicity,
                    principal,
                });
                prim_bases.push(q);
            }
            let algebra = commutant_basis(&rep, 0x5eed_a1 + o as u64);
            let mut extended = algebra.clone();
            if !principal {
                let l = kernel_of_action(&bundle, x, &k);
                if !l.is_conjugate_to(&gamma0[component], &g) {
                    return Err(Error::validation(format!(
                        "covectors near sample {s} have stabilizer of order {}, not conjugate to the minimal isotropy",
                        l.order()
                    )));
                }
                let r = rep.dim();
                let lrep = bundle.restricted_rep(x, &l)?;
                let near = commutant_basis(&lrep, 0x5eed_b2 + o as u64);
                extended = algebra
                    .iter()
                    .map(|a| block_diagonal(&[a.clone(), CMat::zeros(r, r)]))
                    .chain(
                        near.iter()
                            .map(|b| block_diagonal(&[CMat::zeros(r, r), b.clone()])),
                    )
                    .collect();
                for q in prim_bases.iter_mut().skip(first_prim) {
                    *q = pad_rows(q, 2 * r, 0);
                }
                for (tau, _, multiplicity, q) in isotypes(&lrep, &g.subgroup_as_group(&l))? {
                    germs.push(Germ {
                        sample: s,
                        orbit: o,
                        component,
                        subgroup: l.clone(),
                        tau,
                        multiplicity,
                    });
                    germ_bases.push(block_diagonal(&[q.clone(), q]));
                }
            }
            orbits.push(OrbitData {
                sample: s,
                point: x,
                stabilizer: k,
                algebra,
                extended,
            });
        }
        Ok(FiniteSymbolAlgebra {
            bundle,
            orbits,
            gamma0,
            prim,
            germs,
            prim_bases,
            germ_bases,
        })
    }

    pub fn bundle(&self) -> &Arc<EquivariantBundle> {
        &self.bundle
    }

    pub fn prim(&self) -> &[PrimPoint] {
        &self.prim
    }

    pub fn germs(&self) -> &[Germ] {
        &self.germs
    }

    pub fn gamma0(&self, component: usize) -> &Subgroup {
        &self.gamma0[component]
    }

    /// Every node: Prim points first, then germs.
    pub fn nodes(&self) -> NodeSet {
        (0..self.prim.len())
            .map(Node::Prim)
            .chain((0..self.germs.len()).map(Node::Germ))
            .collect()
    }

    /// Index of the covector orbit under a Prim point.
    pub fn central_character(&self, p: usize) -> usize {
        self.prim[p].orbit
    }

    /// Prim points over a covector orbit.
    pub fn fiber(&self, orbit: usize) -> Vec<usize> {
        (0..self.prim.len())
            .filter(|&p| self.prim[p].orbit == orbit)
            .collect()
    }

    pub fn num_orbits(&self) -> usize {
        self.orbits.len()
    }

    /// `Σ_ρ k_ρ²` over all orbits.
    pub fn invariant_dimension(&self) -> usize {
        self.prim
            .iter()
            .map(|p| p.multiplicity * p.multiplicity)
            .sum()
    }

    /// Dimension of the brute-force invariant algebra.
    pub fn brute_force_dimension(&self) -> usize {
        self.orbits.iter().map(|o| o.algebra.len()).sum()
    }

    /// Number of simple blocks of the brute-force invariant algebra, read off
    /// as the dimension of its center.
    pub fn brute_force_block_count(&self) -> usize {
        self.orbits
            .iter()
            .map(|o| center_dimension(&o.algebra))
            .sum()
    }

    fn node_orbit(&self, n: Node) -> usize {
        match n {
            Node::Prim(p) => self.prim[p].orbit,
            Node::Germ(j) => self.germs[j].orbit,
        }
    }

    fn node_basis(&self, n: Node) -> &CMat {
        match n {
            Node::Prim(p) => &self.prim_bases[p],
            Node::Germ(j) => &self.germ_bases[j],
        }
    }

    fn represent(&self, n: Node, f: &CMat) -> CMat {
        let q = self.node_basis(n);
        q.adjoint() * f * q
    }

    /// Hull-kernel closure: `n ∈ closure(S)` iff every invariant element
    /// killed by all of `S` is killed by `n`.
    pub fn closure(&self, set: &NodeSet) -> Result<NodeSet> {
        for &n in set {
            let ok = match n {
                Node::Prim(p) => p < self.prim.len(),
                Node::Germ(j) => j < self.germs.len(),
            };
            if !ok {
                return Err(Error::validation(format!("unknown node {n:?}")));
            }
        }
        let mut out = NodeSet::new();
        for (o, data) in self.orbits.iter().enumerate() {
            let here: Vec<Node> = set
                .iter()
                .copied()
                .filter(|&n| self.node_orbit(n) == o)
                .collect();
            let kernel = self.joint_kernel(data, &here);
            for n in self
                .nodes()
                .into_iter()
                .filter(|&n| self.node_orbit(n) == o)
            {
                if set.contains(&n) {
                    out.insert(n);
                    continue;
                }
                let kills = kernel.iter().all(|f| {
                    let image = self.represent(n, f);
                    image.norm() <= KERNEL_TOL * f.norm().max(1.0)
                });
                if kills {
                    out.insert(n);
                }
            }
        }
        Ok(out)
    }

    /// Basis of the elements of the extended orbit algebra killed by every
    /// node in `nodes`.
    fn joint_kernel(&self, data: &OrbitData, nodes: &[Node]) -> Vec<CMat> {
        let basis = &data.extended;
        if nodes.is_empty() {
            return basis.clone();
        }
        let rows: usize = nodes
            .iter()
            .map(|&n| self.node_basis(n).ncols().pow(2))
            .sum();
        let mut m = CMat::zeros(rows.max(1), basis.len());
        for (i, b) in basis.iter().enumerate() {
            let mut r = 0;
            for &n in nodes {
                for z in self.represent(n, b).iter() {
                    m[(r, i)] = *z;
                    r += 1;
                }
            }
        }
        let ns = null_space_abs(&m, KERNEL_TOL);
        (0..ns.ncols())
            .map(|j| {
                let mut f = CMat::zeros(basis[0].nrows(), basis[0].ncols());
                for (i, b) in basis.iter().enumerate() {
                    f += b * ns[(i, j)];
                }
                f
            })
            .collect()
    }

    /// `Ξ₀`: principal Prim points and germs whose label is
    /// `Γ₀`-associated to α.
    pub fn xi_zero(&self, alpha: usize) -> Result<NodeSet> {
        let g = self.bundle.group();
        let mut out = NodeSet::new();
        for (p, pt) in self.prim.iter().enumerate() {
            if pt.principal
                && in_x_alpha(
                    g,
                    &self.orbits[pt.orbit].stabilizer,
                    pt.rho,
                    alpha,
                    &self.gamma0[pt.component],
                )?
                .member
            {
                out.insert(Node::Prim(p));
            }
        }
        for (j, germ) in self.germs.iter().enumerate() {
            if in_x_alpha(
                g,
                &germ.subgroup,
                germ.tau,
                alpha,
                &self.gamma0[germ.component],
            )?
            .member
            {
                out.insert(Node::Germ(j));
            }
        }
        Ok(out)
    }

    /// Nodes passing the direct criterion: some conjugate of `Γ₀` inside the
    /// stabilizer on which the label and α share an irreducible.
    pub fn xi_direct(&self, alpha: usize) -> Result<NodeSet> {
        let g = self.bundle.group();
        let mut out = NodeSet::new();
        for (p, pt) in self.prim.iter().enumerate() {
            let k = &self.orbits[pt.orbit].stabilizer;
            if in_x_alpha(g, k, pt.rho, alpha, &self.gamma0[pt.component])?.member {
                out.insert(Node::Prim(p));
            }
        }
        for (j, germ) in self.germs.iter().enumerate() {
            if in_x_alpha(
                g,
                &germ.subgroup,
                germ.tau,
                alpha,
                &self.gamma0[germ.component],
            )?
            .member
            {
                out.insert(Node::Germ(j));
            }
        }
        Ok(out)
    }

    /// `Ξ` as the closure of `Ξ₀` and by the direct criterion; the two
    /// must agree.
    pub fn xi(&self, alpha: usize) -> Result<XiReport> {
        let n = self.bundle.group().character_table()?.num_irreps();
        if alpha >= n {
            return Err(Error::validation(format!(
                "α = {alpha} but the group has {n} irreducibles"
            )));
        }
        let xi0 = self.xi_zero(alpha)?;
        let closure = self.closure(&xi0)?;
        let direct = self.xi_direct(alpha)?;
        if closure != direct {
            let diff: Vec<Node> = closure.symmetric_difference(&direct).copied().collect();
            return Err(Error::Integrity(format!(
                "closure of Ξ₀ and the direct criterion differ on {diff:?}"
            )));
        }
        let prim = only_prim(&closure);
        Ok(XiReport {
            alpha,
            xi_zero: only_prim(&xi0),
            xi_zero_germs: only_germs(&xi0),
            prim,
            germs: only_germs(&closure),
        })
    }

    /// Blocks outside `Ξ`: the kernel of restriction to the α-part.
    pub fn kernel_of_restriction(&self, alpha: usize) -> Result<KernelReport> {
        let xi = self.xi(alpha)?;
        let kept: BTreeSet<usize> = xi.prim.iter().copied().collect();
        let blocks: Vec<usize> = (0..self.prim.len()).filter(|p| !kept.contains(p)).collect();
        let sq = |p: &usize| self.prim[*p].multiplicity.pow(2);
        let dimension = blocks.iter().map(sq).sum();
        let complement_dimension = kept.iter().map(sq).sum();
        let report = KernelReport {
            alpha,
            blocks,
            dimension,
            complement_dimension,
            total_dimension: self.invariant_dimension(),
        };
        if report.dimension + report.complement_dimension != self.brute_force_dimension() {
            return Err(Error::Integrity(format!(
                "kernel and image dimensions {} + {} do not add up to {}",
                report.dimension,
                report.complement_dimension,
                self.brute_force_dimension()
            )));
        }
        Ok(report)
    }

    /// Prim count equals the number of simple blocks of the brute-force
    /// algebra, and the algebra dimensions agree.
    pub fn check_bijectivity(&self) -> Result<()> {
        let blocks = self.brute_force_block_count();
        if blocks != self.prim.len() {
            return Err(Error::Integrity(format!(
                "{} Prim points but {blocks} simple blocks",
                self.prim.len()
            )));
        }
        if self.brute_force_dimension() != self.invariant_dimension() {
            return Err(Error::Integrity(format!(
                "invariant algebra has dimension {} by averaging and {} by characters",
                self.brute_force_dimension(),
                self.invariant_dimension()
            )));
        }
        Ok(())
    }

    /// Human-readable label of a node.
    pub fn label(&self, n: Node) -> String {
        match n {
            Node::Prim(p) => {
                let pt = &self.prim[p];
                format!("({}, rho{})", self.orbit_label(pt.orbit), pt.rho)
            }
            Node::Germ(j) => {
                let germ = &self.germs[j];
                format!("(near {}, tau{})", self.orbit_label(germ.orbit), germ.tau)
            }
        }
    }

    fn orbit_label(&self, o: usize) -> String {
        let data = &self.orbits[o];
        let model = self.bundle.model();
        let cv = &self.bundle.samples().samples()[data.sample].covector;
        let cv: Vec<String> = cv.iter().map(|v| format!("{v:.3}")).collect();
        format!("{}[{}]", model.points()[data.point].label, cv.join(","))
    }
}

/// `q` placed in rows `offset..` of a matrix with `rows` rows.
fn pad_rows(q: &CMat, rows: usize, offset: usize) -> CMat {
    let mut out = CMat::zeros(rows, q.ncols());
    out.view_mut((offset, 0), (q.nrows(), q.ncols()))
        .copy_from(q);
    out
}

fn only_prim(set: &NodeSet) -> Vec<usize> {
    set.iter()
        .filter_map(|n| match n {
            Node::Prim(p) => Some(*p),
            Node::Germ(_) => None,
        })
        .collect()
}

fn only_germs(set: &NodeSet) -> Vec<usize> {
    set.iter()
        .filter_map(|n| match n {
            Node::Germ(j) => Some(*j),
            Node::Prim(_) => None,
        })
        .collect()
}

/// `dim Z(A)` for the algebra spanned by `basis`.
fn center_dimension(basis: &[CMat]) -> usize {
    if basis.is_empty() {
        return 0;
    }
    let n = basis[0].nrows();
    let rows = basis.len() * n * n;
    let mut m = CMat::zeros(rows, basis.len());
    for (i, b) in basis.iter().enumerate() {
        for (j, a) in basis.iter().enumerate() {
            let comm = b * a - a * b;
            for (r, z) in comm.iter().enumerate() {
                m[(j * n * n + r, i)] = *z;
            }
        }
    }
    null_space_abs(&m, KERNEL_TOL).ncols()
}

/// `Ξ` restricted to Prim points, with the principal part it closes up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XiReport {
    pub alpha: usize,
    pub xi_zero: Vec<usize>,
    pub xi_zero_germs: Vec<usize>,
    /// Prim points of `Ξ` (closure and direct criterion agree).
    pub prim: Vec<usize>,
    pub germs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub alpha: usize,
    /// Prim points outside `Ξ`.
    pub blocks: Vec<usize>,
    pub dimension: usize,
    pub complement_dimension: usize,
    pub total_dimension: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{
        builtin_model, s3_through_z2_circle, trivial_action, ActionModel, ModelParams, PointSpec,
    };
    use crate::grp::Permutation;
    use crate::linalg::C64;
    use crate::rep::pi_alpha_on_induced;

    fn algebra(model: ActionModel, rep: &MatrixRep) -> FiniteSymbolAlgebra {
        let b = EquivariantBundle::constant(Arc::new(model), rep).unwrap();
        let a = FiniteSymbolAlgebra::new(Arc::new(b)).unwrap();
        a.check_bijectivity().unwrap();
        a
    }

    fn z2_sum() -> MatrixRep {
        let g = FiniteGroup::cyclic(2);
        let t = g.character_table().unwrap();
        MatrixRep::linear(&t.character(0)).direct_sum(&MatrixRep::linear(&t.character(1)))
    }

    #[test]
    fn trivial_group_single_block() {
        let g = Arc::new(FiniteGroup::builtin("trivial").unwrap());
        let a = algebra(trivial_action(g, 1, 2).unwrap(), &MatrixRep::trivial(1, 3));
        // one point, covector classes ± are separate orbits
        assert_eq!(a.prim().len(), a.num_orbits());
        for o in 0..a.num_orbits() {
            assert_eq!(a.fiber(o).len(), 1);
        }
    }

    #[test]
    fn fixed_point_splits_into_isotypes() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let a = algebra(trivial_action(g, 1, 2).unwrap(), &z2_sum());
        for o in 0..a.num_orbits() {
            assert_eq!(a.fiber(o).len(), 2);
        }
        let xi0 = a.xi_zero(1).unwrap();
        assert!(xi0
            .iter()
            .all(|n| matches!(n, Node::Prim(p) if a.prim()[*p].rho == 1)));
        let k = a.kernel_of_restriction(0).unwrap();
        assert_eq!(k.dimension, a.num_orbits());
        assert!(k.blocks.iter().all(|&p| a.prim()[p].rho == 1));
    }

    #[test]
    fn free_orbit_single_block() {
        let m = builtin_model("free_dense", &ModelParams::samples(6)).unwrap();
        let g = m.group().clone();
        let a = algebra(m, &MatrixRep::trivial(g.order(), 2));
        assert_eq!(a.prim().len(), a.num_orbits());
        for alpha in 0..3 {
            let xi = a.xi(alpha).unwrap();
            assert_eq!(xi.prim.len(), a.prim().len());
            assert_eq!(a.kernel_of_restriction(alpha).unwrap().dimension, 0);
        }
    }

    #[test]
    fn s3_sheets() {
        let m = s3_through_z2_circle(6).unwrap();
        let g = m.group().clone();
        let t = g.character_table().unwrap();
        let std = (0..3).find(|&i| t.degree(i) == 2).unwrap();
        let a = algebra(m, &MatrixRep::regular(&g));
        let a3 = a.gamma0(0).clone();
        let at = g.subgroup_as_group(&a3);
        let at = at.character_table().unwrap();
        let trivial_rho = (0..3)
            .find(|&r| (0..3).all(|k| (at.value(r, k) - C64::new(1.0, 0.0)).norm() < 1e-9))
            .unwrap();
        let xi0 = a.xi_zero(std).unwrap();
        assert!(!xi0.is_empty());
        for n in &xi0 {
            let Node::Prim(p) = n else {
                panic!("no germs here")
            };
            assert_ne!(a.prim()[*p].rho, trivial_rho);
        }
        let xi = a.xi(0).unwrap();
        assert!(xi.prim.iter().all(|&p| a.prim()[p].rho == trivial_rho));
        assert_eq!(xi.prim.len(), a.num_orbits());
    }

    #[test]
    fn corner_is_in_the_closure_of_its_germ() {
        let m = builtin_model("product", &ModelParams::samples(4)).unwrap();
        let g = m.group().clone();
        let a = algebra(m, &MatrixRep::regular(&g));
        assert!(!a.germs().is_empty());
        for alpha in 0..4 {
            let xi = a.xi(alpha).unwrap();
            assert_eq!(xi.prim.len(), a.prim().len());
        }
        // closure of a germ contains the singular points over it
        let germ = Node::Germ(0);
        let cl = a.closure(&NodeSet::from([germ])).unwrap();
        let o = a.germs()[0].orbit;
        for p in a.fiber(o) {
            assert!(cl.contains(&Node::Prim(p)));
        }
    }

    /// A reflection fixing one point of the plane's cotangent, plus a free
    /// orbit carrying the principal stratum.
    fn fold_model() -> ActionModel {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let flip = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0]));
        let id = nalgebra::DMatrix::<f64>::identity(2, 2);
        let transport = vec![
            vec![(0, id.clone()), (1, id.clone()), (2, id.clone())],
            vec![(0, flip), (2, id.clone()), (1, id)],
        ];
        let points = vec![
            PointSpec {
                label: "p".into(),
                component: 0,
                principal: false,
            },
            PointSpec {
                label: "q".into(),
                component: 0,
                principal: true,
            },
            PointSpec {
                label: "q'".into(),
                component: 0,
                principal: true,
            },
        ];
        ActionModel::new("fold", g, 2, points, vec!["M".into()], transport).unwrap()
    }

    #[test]
    fn closure_axioms_small() {
        let m = fold_model();
        let g = m.group().clone();
        let a = algebra(m, &MatrixRep::regular(&g));
        assert!(!a.germs().is_empty());
        let nodes: Vec<Node> = a.nodes().into_iter().collect();
        assert!(nodes.len() <= 12, "{}", nodes.len());
        let n = nodes.len();
        let sets: Vec<NodeSet> = (0u32..1 << n)
            .map(|mask| {
                (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| nodes[i])
                    .collect()
            })
            .collect();
        let cls: Vec<NodeSet> = sets.iter().map(|s| a.closure(s).unwrap()).collect();
        assert!(cls[0].is_empty());
        assert_eq!(cls[sets.len() - 1], a.nodes());
        for (s, c) in sets.iter().zip(&cls) {
            assert!(s.is_subset(c));
            assert_eq!(&a.closure(c).unwrap(), c);
        }
        let index = |s: &NodeSet| sets.iter().position(|t| t == s).unwrap();
        for i in 0..sets.len() {
            for j in 0..sets.len() {
                if sets[i].is_subset(&sets[j]) {
                    assert!(cls[i].is_subset(&cls[j]));
                }
                let u: NodeSet = sets[i].union(&sets[j]).copied().collect();
                let cu: NodeSet = cls[i].union(&cls[j]).copied().collect();
                assert_eq!(cls[index(&u)], cu);
            }
        }
        for alpha in 0..2 {
            a.xi(alpha).unwrap();
        }
    }

    #[test]
    fn induced_fixture_kernel() {
        let g = Arc::new(FiniteGroup::symmetric(3));
        let r = g
            .find_permutation(&Permutation::parse_cycles("(0 1 2)", 3).unwrap())
            .unwrap();
        let a3 = g.generated(&[r]);
        let x0_side = |a: usize| if a3.contains(a) { 0 } else { 1 };
        let transport = g
            .elements()
            .map(|a| {
                (0..2)
                    .map(|x| {
                        let y = if x0_side(a) == 0 { x } else { 1 - x };
                        (y, nalgebra::DMatrix::identity(1, 1))
                    })
                    .collect()
            })
            .collect();
        let points = (0..2)
            .map(|x| PointSpec {
                label: format!("p{x}"),
                component: 0,
                principal: true,
            })
            .collect();
        let model = Arc::new(
            ActionModel::new(
                "two_points",
                g.clone(),
                1,
                points,
                vec!["M".into()],
                transport,
            )
            .unwrap(),
        );
        let ag = g.subgroup_as_group(&a3);
        let at = ag.character_table().unwrap();
        let omega = (1..3).next().unwrap();
        let beta = MatrixRep::linear(&at.character(0))
            .direct_sum(&MatrixRep::linear(&at.character(omega)));
        let bundle = Arc::new(EquivariantBundle::induced(model, &[(0, beta.clone())]).unwrap());
        let a = FiniteSymbolAlgebra::new(bundle).unwrap();
        a.check_bijectivity().unwrap();
        let std = (0..3)
            .find(|&i| g.character_table().unwrap().degree(i) == 2)
            .unwrap();
        let k = a.kernel_of_restriction(std).unwrap();
        let brute = pi_alpha_on_induced(&beta, &a3, &g, std, true).unwrap();
        assert_eq!(brute.kernel_dim, 1);
        // both covector directions carry the same fixture
        assert_eq!(k.dimension, brute.kernel_dim * a.num_orbits());
    }
}
