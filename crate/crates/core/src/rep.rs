//! Induced modules, Frobenius maps and the kernel of `π_α` on induced
//! endomorphism algebras.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grp::{
    induce_character, isotypical_projector, multiplicity, restrict_character, FiniteGroup,
    MatrixRep, Subgroup,
};
use crate::linalg::{c, frobenius, projector_basis, rank, vectorize, CMat, CVec, C64};

/// Rank threshold relative to the largest singular value.
pub const RANK_TOL: f64 = 1e-8;

/// `Ind_H^G(V)` in the basis `r_i ⊗ e_a`, block `i` for the `i`-th coset
/// representative.
#[derive(Clone, Debug)]
pub struct InducedModule {
    base: MatrixRep,
    subgroup: Subgroup,
    cosets: Vec<usize>,
    coset_of: Vec<usize>,
    action: MatrixRep,
}

/// `g r_i = r_j h`: returns `(j, h)`.
fn coset_step(
    g: &FiniteGroup,
    h: &Subgroup,
    cosets: &[usize],
    coset_of: &[usize],
    x: usize,
    i: usize,
) -> (usize, usize) {
    let y = g.mul(x, cosets[i]);
    let j = coset_of[y];
    let hh = g.mul(g.inv(cosets[j]), y);
    debug_assert!(h.contains(hh));
    (j, hh)
}

impl InducedModule {
    /// Induce `base` (a representation of `h`, indexed by local ids) up to `g`.
    pub fn new(base: &MatrixRep, h: &Subgroup, g: &FiniteGroup) -> Result<Self> {
        if base.group_order() != h.order() {
            return Err(Error::validation(format!(
                "base representation has {} matrices, subgroup has order {}",
                base.group_order(),
                h.order()
            )));
        }
        Subgroup::new(g, h.elements().to_vec())?;
        let cosets = h.left_coset_representatives(g);
        let mut coset_of = vec![0; g.order()];
        for (j, &r) in cosets.iter().enumerate() {
            for &x in h.elements() {
                coset_of[g.mul(r, x)] = j;
            }
        }
        let n = base.dim();
        let m = cosets.len();
        let matrices = g
            .elements()
            .map(|x| {
                let mut a = CMat::zeros(m * n, m * n);
                for i in 0..m {
                    let (j, hh) = coset_step(g, h, &cosets, &coset_of, x, i);
                    let local = h.local_index(hh).expect("coset step lands in H");
                    a.view_mut((j * n, i * n), (n, n))
                        .copy_from(base.matrix(local));
                }
                a
            })
            .collect();
        let action = MatrixRep::from_matrices(matrices)?;
        Ok(InducedModule {
            base: base.clone(),
            subgroup: h.clone(),
            cosets,
            coset_of,
            action,
        })
    }

    pub fn base(&self) -> &MatrixRep {
        &self.base
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn cosets(&self) -> &[usize] {
        &self.cosets
    }

    /// Index of the coset containing an element.
    pub fn coset_of(&self, x: usize) -> usize {
        self.coset_of[x]
    }

    pub fn action(&self) -> &MatrixRep {
        &self.action
    }

    pub fn total_dim(&self) -> usize {
        self.cosets.len() * self.base.dim()
    }

    pub fn index(&self) -> usize {
        self.cosets.len()
    }

    /// `Φ(f) = (1/|H|) Σ_g g ⊗ f(g⁻¹ ·)`; block `j` equals `f W(r_j⁻¹)`.
    /// `f` maps `W` (restricted to `H`) into the base module.
    pub fn frobenius_hom(&self, g: &FiniteGroup, w: &MatrixRep, f: &CMat) -> Result<CMat> {
        let n = self.base.dim();
        if f.nrows() != n || f.ncols() != w.dim() {
            return Err(Error::validation(format!(
                "map is {}x{}, expected {}x{}",
                f.nrows(),
                f.ncols(),
                n,
                w.dim()
            )));
        }
        let res = w.restrict(&self.subgroup);
        let dev = MatrixRep::intertwining_defect(&res, &self.base, f);
        if dev > 1e-8 * (1.0 + frobenius(f)) {
            return Err(Error::validation(format!(
                "map is not H-equivariant (deviation {dev:.3e})"
            )));
        }
        let mut out = CMat::zeros(self.total_dim(), w.dim());
        for (j, &r) in self.cosets.iter().enumerate() {
            out.view_mut((j * n, 0), (n, w.dim()))
                .copy_from(&(f * w.matrix(g.inv(r))));
        }
        Ok(out)
    }

    /// An `H`-fixed vector `v` goes to `Σ_x x ⊗ v`.
    pub fn invariant_vector(&self, v: &CVec) -> Result<CVec> {
        let n = self.base.dim();
        if v.len() != n {
            return Err(Error::validation("vector has the wrong length"));
        }
        let dev = self
            .base
            .matrices()
            .iter()
            .map(|m| (m * v - v).norm())
            .fold(0.0, f64::max);
        if dev > 1e-8 * (1.0 + v.norm()) {
            return Err(Error::validation(format!(
                "vector is not H-fixed (deviation {dev:.3e})"
            )));
        }
        let mut out = CVec::zeros(self.total_dim());
        for j in 0..self.index() {
            out.rows_mut(j * n, n).copy_from(v);
        }
        Ok(out)
    }

    /// An `H`-invariant endomorphism `T` goes to the `G`-invariant
    /// endomorphism acting as `T` on every coset block.
    pub fn invariant_endomorphism(&self, t: &CMat) -> Result<CMat> {
        let n = self.base.dim();
        if t.nrows() != n || t.ncols() != n {
            return Err(Error::validation("endomorphism has the wrong shape"));
        }
        let dev = self.base.commutator_defect(t);
        if dev > 1e-8 * (1.0 + frobenius(t)) {
            return Err(Error::validation(format!(
                "endomorphism is not H-invariant (deviation {dev:.3e})"
            )));
        }
        Ok(crate::linalg::block_diagonal(&vec![
            t.clone();
            self.index()
        ]))
    }
}

/// One isotypic block of an `H`-module: `β_j^{k_j}`.
#[derive(Clone, Debug)]
pub struct Block {
    pub irrep: usize,
    pub multiplicity: usize,
    pub degree: usize,
    /// Orthonormal columns spanning the block.
    pub basis: CMat,
}

/// `β = ⊕_j β_j^{k_j}` with `End(β)^H ≅ ⊕_j M_{k_j}(C)`.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
}

impl BlockDecomposition {
    pub fn algebra_dims(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .map(|b| b.multiplicity * b.multiplicity)
            .collect()
    }

    pub fn algebra_dim(&self) -> usize {
        self.algebra_dims().iter().sum()
    }
}

/// Isotypic blocks of `rep` (a representation of `h`), bases taken from the
/// isotypical projectors by pivoted Gram-Schmidt.
pub fn decompose_end_h(rep: &MatrixRep, h: &FiniteGroup) -> Result<BlockDecomposition> {
    rep.validate(h)?;
    let table = h.character_table()?;
    let mults = table.decompose(&rep.character())?;
    let mut blocks = Vec::new();
    for (j, &k) in mults.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let p = isotypical_projector(rep, table, j);
        let basis = projector_basis(&p);
        let degree = table.degree(j);
        if basis.ncols() != k * degree {
            return Err(Error::numerical(format!(
                "isotype {j} has rank {}, expected {}",
                basis.ncols(),
                k * degree
            )));
        }
        blocks.push(Block {
            irrep: j,
            multiplicity: k,
            degree,
            basis,
        });
    }
    Ok(BlockDecomposition { blocks })
}

/// `(1/|G|) Σ_g ρ(g) X ρ(g)⁻¹`
pub fn average_conjugation(rep: &MatrixRep, x: &CMat) -> CMat {
    let mut acc = CMat::zeros(x.nrows(), x.ncols());
    for m in rep.matrices() {
        acc += m * x * m.adjoint();
    }
    acc / C64::new(rep.group_order() as f64, 0.0)
}

/// A basis of the image of a linear map on matrices, found by feeding random
/// inputs until the rank stops growing for several consecutive draws.
fn random_span<F, S>(seed: u64, mut sample: S, map: F) -> Vec<CMat>
where
    S: FnMut(&mut ChaCha8Rng) -> CMat,
    F: Fn(&CMat) -> CMat,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<CVec> = Vec::new();
    let mut mats: Vec<CMat> = Vec::new();
    let mut stale = 0;
    while stale < 3 {
        let y = map(&sample(&mut rng));
        let mut v = vectorize(&y);
        let scale = v.norm();
        for _ in 0..2 {
            for b in &basis {
                let p = b.dotc(&v);
                v -= b * p;
            }
        }
        let n = v.norm();
        if scale > 0.0 && n > 1e-8 * scale {
            basis.push(&v / C64::new(n, 0.0));
            mats.push(
                CMat::from_column_slice(y.nrows(), y.ncols(), v.as_slice()) / C64::new(n, 0.0),
            );
            stale = 0;
        } else {
            stale += 1;
        }
    }
    mats
}

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, cols: usize) -> CMat {
    CMat::from_fn(r, cols, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Basis of the commutant `End(ρ)^G`, by averaging random matrices.
pub fn commutant_basis(rep: &MatrixRep, seed: u64) -> Vec<CMat> {
    let n = rep.dim();
    random_span(
        seed,
        |rng| random_matrix(rng, n, n),
        |x| average_conjugation(rep, x),
    )
}

/// Dimension of the `G`-invariant part of the induced algebra
/// `Ind_H^G(End V)`, realized as block-diagonal endomorphisms of the induced
/// module, computed by brute-force averaging.
pub fn induced_algebra_invariant_dim(ind: &InducedModule, seed: u64) -> usize {
    let n = ind.base().dim();
    let m = ind.index();
    random_span(
        seed,
        |rng| {
            let blocks: Vec<CMat> = (0..m).map(|_| random_matrix(rng, n, n)).collect();
            crate::linalg::block_diagonal(&blocks)
        },
        |x| average_conjugation(ind.action(), x),
    )
    .len()
}

/// Kernel/image analysis of `π_α` on `Ind_H^G(End β)^G`.
#[derive(Clone, Debug, Serialize)]
pub struct PiAlphaReport {
    /// H-irrep indices `j` of blocks with `α` and `β_j` H-disjoint.
    pub disjoint: Vec<usize>,
    /// H-irrep indices of the remaining blocks.
    pub image_blocks: Vec<usize>,
    pub kernel_dim: usize,
    pub image_dim: usize,
    /// Ranks from the explicit construction, when requested.
    pub brute_force: Option<(usize, usize)>,
}

/// `J = {j : mult(Res_H α, β_j) = 0}` and `ker π_α = ⊕_{j∈J} M_{k_j}`.
/// With `verify`, the explicit restriction map is built and its rank must
/// match.
pub fn pi_alpha_on_induced(
    beta: &MatrixRep,
    h: &Subgroup,
    g: &FiniteGroup,
    alpha: usize,
    verify: bool,
) -> Result<PiAlphaReport> {
    let hg = g.subgroup_as_group(h);
    let table = g.character_table()?;
    let htable = hg.character_table()?;
    let decomposition = decompose_end_h(beta, &hg)?;
    let res = restrict_character(&table.character(alpha), h)?;
    let mut report = PiAlphaReport {
        disjoint: Vec::new(),
        image_blocks: Vec::new(),
        kernel_dim: 0,
        image_dim: 0,
        brute_force: None,
    };
    for b in &decomposition.blocks {
        let k2 = b.multiplicity * b.multiplicity;
        if multiplicity(&res, &htable.character(b.irrep))? == 0 {
            report.disjoint.push(b.irrep);
            report.kernel_dim += k2;
        } else {
            report.image_blocks.push(b.irrep);
            report.image_dim += k2;
        }
    }
    if verify {
        let (kernel, image) = brute_force_pi_alpha(beta, h, g, alpha)?;
        report.brute_force = Some((kernel, image));
        if (kernel, image) != (report.kernel_dim, report.image_dim) {
            return Err(Error::Integrity(format!(
                "block formula gives kernel {} / image {}, explicit ranks give {kernel} / {image}",
                report.kernel_dim, report.image_dim
            )));
        }
    }
    Ok(report)
}

/// Explicit `(kernel_dim, image_dim)` of `T ↦ p_α Φ(T) p_α` over a basis of
/// `End(β)^H`.
pub fn brute_force_pi_alpha(
    beta: &MatrixRep,
    h: &Subgroup,
    g: &FiniteGroup,
    alpha: usize,
) -> Result<(usize, usize)> {
    let ind = InducedModule::new(beta, h, g)?;
    let table = g.character_table()?;
    let p = isotypical_projector(ind.action(), table, alpha);
    let q = projector_basis(&p);
    let basis = commutant_basis(beta, 0xb10c);
    if q.ncols() == 0 {
        return Ok((basis.len(), 0));
    }
    let cols: Vec<CVec> = basis
        .iter()
        .map(|t| {
            let phi = ind
                .invariant_endomorphism(t)
                .expect("averaged matrix is invariant");
            vectorize(&(q.adjoint() * phi * &q))
        })
        .collect();
    let stacked = CMat::from_columns(&cols);
    let r = rank(&stacked, RANK_TOL);
    Ok((basis.len() - r, r))
}

/// Degree and character checks of an induced module against
/// [`induce_character`].
pub fn check_induced(ind: &InducedModule, g: &FiniteGroup) -> Result<f64> {
    let want = induce_character(&ind.base().character(), ind.subgroup(), g)?;
    Ok(ind.action().character().max_deviation(&want))
}
