use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grp::character::{CharacterTable, ClassFunction};
use crate::grp::group::{FiniteGroup, Subgroup};
use crate::linalg::{
    c, frobenius, hermitian_eigen, orthonormal_columns, projector_basis, trace, CMat, C64, ONE,
};

const IRREP_SEED: u64 = 0x1_77e9;

/// A matrix representation: one `dim × dim` matrix per element id.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixRep {
    dim: usize,
    matrices: Vec<CMat>,
}

impl MatrixRep {
    /// Wrap per-element matrices, checking shapes only.
    pub fn from_matrices(matrices: Vec<CMat>) -> Result<Self> {
        let dim = matrices
            .first()
            .map(|m| m.nrows())
            .ok_or_else(|| Error::validation("representation needs at least one matrix"))?;
        if matrices
            .iter()
            .any(|m| m.nrows() != dim || m.ncols() != dim)
        {
            return Err(Error::validation(
                "representation matrices have inconsistent shapes",
            ));
        }
        Ok(MatrixRep { dim, matrices })
    }

    /// Extend images of generating elements to the whole group and validate
    /// the result.
    pub fn from_generators(g: &FiniteGroup, images: &[(usize, CMat)]) -> Result<Self> {
        let dim = match images.first() {
            Some((_, m)) => m.nrows(),
            None if g.order() == 1 => return Ok(MatrixRep::trivial(1, 1)),
            None => return Err(Error::validation("no generator images given")),
        };
        for (e, m) in images {
            if *e >= g.order() {
                return Err(Error::validation(format!("generator id {e} out of range")));
            }
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::validation(format!(
                    "generator {} image is {}x{}, expected {dim}x{dim}",
                    g.element_label(*e),
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let mut mats: Vec<Option<CMat>> = vec![None; g.order()];
        mats[0] = Some(CMat::identity(dim, dim));
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (s, m) in images {
                let y = g.mul(x, *s);
                let my = mats[x].as_ref().unwrap() * m;
                match &mats[y] {
                    None => {
                        mats[y] = Some(my);
                        queue.push_back(y);
                    }
                    Some(existing) => {
                        let dev = frobenius(&(existing - &my));
                        if dev > 1e-9 * (dim as f64).sqrt() {
                            return Err(Error::validation(format!(
                                "generator images violate a group relation at {} (deviation {dev:.2e})",
                                g.element_label(y)
                            )));
                        }
                    }
                }
            }
        }
        if mats.iter().any(|m| m.is_none()) {
            return Err(Error::validation("generator images do not cover the group"));
        }
        let rep = MatrixRep {
            dim,
            matrices: mats.into_iter().map(|m| m.unwrap()).collect(),
        };
        rep.validate(g)?;
        Ok(rep)
    }

    /// `dim` copies of the trivial representation.
    pub fn trivial(order: usize, dim: usize) -> Self {
        MatrixRep {
            dim,
            matrices: vec![CMat::identity(dim, dim); order],
        }
    }

    /// One-dimensional representation from a linear character.
    pub fn linear(chi: &ClassFunction) -> Self {
        MatrixRep {
            dim: 1,
            matrices: chi
                .values()
                .iter()
                .map(|&z| CMat::from_element(1, 1, z))
                .collect(),
        }
    }

    /// Left regular representation: `g · e_x = e_{gx}`.
    pub fn regular(g: &FiniteGroup) -> Self {
        let n = g.order();
        let matrices = g
            .elements()
            .map(|a| {
                let mut m = CMat::zeros(n, n);
                for x in 0..n {
                    m[(g.mul(a, x), x)] = ONE;
                }
                m
            })
            .collect();
        MatrixRep { dim: n, matrices }
    }

    /// Right regular representation: `g · e_x = e_{x g⁻¹}`.
    pub fn right_regular(g: &FiniteGroup) -> Self {
        let n = g.order();
        let matrices = g
            .elements()
            .map(|a| {
                let ai = g.inv(a);
                let mut m = CMat::zeros(n, n);
                for x in 0..n {
                    m[(g.mul(x, ai), x)] = ONE;
                }
                m
            })
            .collect();
        MatrixRep { dim: n, matrices }
    }

    /// Permutation representation of a permutation group on its points.
    pub fn permutation(g: &FiniteGroup) -> Option<Self> {
        let n = g.permutation(0)?.degree();
        let matrices = g
            .elements()
            .map(|a| {
                let p = g.permutation(a).unwrap();
                let mut m = CMat::zeros(n, n);
                for i in 0..n {
                    m[(p.apply(i), i)] = ONE;
                }
                m
            })
            .collect();
        Some(MatrixRep { dim: n, matrices })
    }

    /// A unitary realization of irrep `i`, cut out of the regular
    /// representation.
    pub fn irreducible(g: &FiniteGroup, table: &CharacterTable, i: usize) -> Result<Self> {
        let chi = table.character(i);
        let d = table.degree(i);
        if d == 1 {
            return Ok(MatrixRep::linear(&chi));
        }
        let reg = MatrixRep::regular(g);
        let right = MatrixRep::right_regular(g);
        let p = crate::grp::isotypical_projector(&reg, table, i);
        let q = projector_basis(&p);
        if q.ncols() != d * d {
            return Err(Error::numerical(format!(
                "isotype of irrep {i} in the regular representation has dimension {}, expected {}",
                q.ncols(),
                d * d
            )));
        }
        let mut last_err = None;
        for attempt in 0..8u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(IRREP_SEED + 31 * i as u64 + attempt);
            let mut a = CMat::zeros(g.order(), g.order());
            for x in g.elements() {
                let w = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                a += right.matrix(x) * w;
            }
            let h = &a + a.adjoint();
            let hq = q.adjoint() * h * &q;
            let (vals, vecs) = hermitian_eigen(&hq);
            let scale = vals.iter().map(|v| v.abs()).fold(1e-300, f64::max);
            let cluster_ok = (1..d).all(|k| (vals[k] - vals[0]).abs() <= 1e-8 * scale);
            let gap_ok = vals.len() == d || vals[d] - vals[0] > 1e-6 * scale;
            if !cluster_ok || !gap_ok {
                last_err = Some(Error::numerical(format!(
                    "irrep {i}: commutant eigenvalues not separated on attempt {attempt}"
                )));
                continue;
            }
            let b = &q * vecs.columns(0, d);
            let b = orthonormal_columns(&b, 1e-10);
            if b.ncols() != d {
                last_err = Some(Error::numerical("irrep basis lost rank"));
                continue;
            }
            let matrices = g
                .elements()
                .map(|x| b.adjoint() * reg.matrix(x) * &b)
                .collect();
            let rep = MatrixRep { dim: d, matrices };
            let dev = rep.character().max_deviation(&chi);
            if dev > 1e-8 {
                last_err = Some(Error::numerical(format!(
                    "irrep {i}: realized character deviates by {dev:.2e}"
                )));
                continue;
            }
            rep.validate(g)?;
            return Ok(rep);
        }
        Err(last_err.unwrap())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn group_order(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrix(&self, g: usize) -> &CMat {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn character(&self) -> ClassFunction {
        ClassFunction::new(self.matrices.iter().map(trace).collect())
    }

    /// Homomorphism, identity and unitarity checks at tolerance 1e-9
    /// (scaled by the dimension).
    pub fn validate(&self, g: &FiniteGroup) -> Result<()> {
        if self.matrices.len() != g.order() {
            return Err(Error::validation(format!(
                "representation has {} matrices for a group of order {}",
                self.matrices.len(),
                g.order()
            )));
        }
        let tol = 1e-9 * (self.dim.max(1) as f64);
        let id = CMat::identity(self.dim, self.dim);
        if frobenius(&(&self.matrices[0] - &id)) > tol {
            return Err(Error::validation(
                "identity element is not represented by the identity",
            ));
        }
        for (x, m) in self.matrices.iter().enumerate() {
            if frobenius(&(m.adjoint() * m - &id)) > tol {
                return Err(Error::validation(format!(
                    "matrix of {} is not unitary",
                    g.element_label(x)
                )));
            }
        }
        for a in g.elements() {
            for b in g.elements() {
                let lhs = &self.matrices[g.mul(a, b)];
                let rhs = &self.matrices[a] * &self.matrices[b];
                if frobenius(&(lhs - rhs)) > tol {
                    return Err(Error::validation(format!(
                        "homomorphism property fails at ({}, {})",
                        g.element_label(a),
                        g.element_label(b)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &MatrixRep) -> MatrixRep {
        assert_eq!(self.group_order(), other.group_order());
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| crate::linalg::block_diagonal(&[a.clone(), b.clone()]))
            .collect();
        MatrixRep {
            dim: self.dim + other.dim,
            matrices,
        }
    }

    pub fn direct_sum_all(parts: &[MatrixRep]) -> Result<MatrixRep> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| Error::validation("empty direct sum"))?;
        Ok(rest.iter().fold(first.clone(), |acc, r| acc.direct_sum(r)))
    }

    pub fn tensor(&self, other: &MatrixRep) -> MatrixRep {
        assert_eq!(self.group_order(), other.group_order());
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| a.kronecker(b))
            .collect();
        MatrixRep {
            dim: self.dim * other.dim,
            matrices,
        }
    }

    /// Complex conjugate representation (the dual, for unitary reps).
    pub fn conj(&self) -> MatrixRep {
        MatrixRep {
            dim: self.dim,
            matrices: self.matrices.iter().map(|m| m.map(|z| z.conj())).collect(),
        }
    }

    /// Restriction to a subgroup, indexed by local ids of
    /// [`FiniteGroup::subgroup_as_group`].
    pub fn restrict(&self, h: &Subgroup) -> MatrixRep {
        MatrixRep {
            dim: self.dim,
            matrices: h
                .elements()
                .iter()
                .map(|&x| self.matrices[x].clone())
                .collect(),
        }
    }

    /// Change of basis `U⁻¹ ρ(g) U` for unitary `U`.
    pub fn conjugated_by(&self, u: &CMat) -> MatrixRep {
        MatrixRep {
            dim: self.dim,
            matrices: self.matrices.iter().map(|m| u.adjoint() * m * u).collect(),
        }
    }

    /// Sum of `conj(f(g)) ρ(g)` over the group, weighted by `1/|G|`.
    pub fn average_weighted(&self, f: &ClassFunction) -> CMat {
        let mut acc = CMat::zeros(self.dim, self.dim);
        for (m, w) in self.matrices.iter().zip(f.values()) {
            acc += m * w.conj();
        }
        acc / C64::new(self.matrices.len() as f64, 0.0)
    }

    /// Averaging projector onto the fixed vectors.
    pub fn fixed_projector(&self) -> CMat {
        let mut acc = CMat::zeros(self.dim, self.dim);
        for m in &self.matrices {
            acc += m;
        }
        acc / C64::new(self.matrices.len() as f64, 0.0)
    }

    /// Largest commutator norm `‖ρ(g) A − A ρ(g)‖_F` over the group.
    pub fn commutator_defect(&self, a: &CMat) -> f64 {
        self.matrices
            .iter()
            .map(|m| frobenius(&(m * a - a * m)))
            .fold(0.0, f64::max)
    }

    /// Largest `‖σ(g) f − f ρ(g)‖_F` for `f: ρ → σ`.
    pub fn intertwining_defect(source: &MatrixRep, target: &MatrixRep, f: &CMat) -> f64 {
        source
            .matrices
            .iter()
            .zip(&target.matrices)
            .map(|(s, t)| frobenius(&(t * f - f * s)))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreps_are_unitary_homomorphisms() {
        for g in [
            FiniteGroup::symmetric(3),
            FiniteGroup::dihedral(4),
            FiniteGroup::symmetric(4),
        ] {
            let reps = g.irrep_matrices().unwrap();
            let t = g.character_table().unwrap();
            for (i, r) in reps.iter().enumerate() {
                r.validate(&g).unwrap();
                assert!(r.character().max_deviation(&t.character(i)) < 1e-8);
            }
        }
    }

    #[test]
    fn from_generators_detects_bad_relations() {
        let g = FiniteGroup::cyclic(3);
        let gen = g.generators()[0];
        let m = CMat::from_element(1, 1, c(-1.0, 0.0));
        assert!(MatrixRep::from_generators(&g, &[(gen, m)]).is_err());
        let w = c(-0.5, 3f64.sqrt() / 2.0);
        let m = CMat::from_element(1, 1, w);
        assert!(MatrixRep::from_generators(&g, &[(gen, m)]).is_ok());
    }

    #[test]
    fn regular_character() {
        let g = FiniteGroup::symmetric(3);
        let chi = MatrixRep::regular(&g).character();
        assert_eq!(chi.at(0).re, 6.0);
        assert!(g.elements().skip(1).all(|x| chi.at(x).norm() < 1e-12));
    }
}
