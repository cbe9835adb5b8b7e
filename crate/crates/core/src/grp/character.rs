use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grp::group::FiniteGroup;
use crate::linalg::{c, hermitian_eigen, CMat, C64, ZERO};

const MAX_ATTEMPTS: u64 = 8;
const TABLE_SEED: u64 = 0x5eed_c1a5;

/// A complex-valued function on the elements of a group, stored per
/// element id.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassFunction {
    values: Vec<C64>,
}

impl ClassFunction {
    pub fn new(values: Vec<C64>) -> Self {
        ClassFunction { values }
    }

    pub fn zero(order: usize) -> Self {
        ClassFunction {
            values: vec![ZERO; order],
        }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn at(&self, g: usize) -> C64 {
        self.values[g]
    }

    pub fn degree(&self) -> f64 {
        self.values[0].re
    }

    /// `(1/|G|) Σ_g self(g) conj(other(g))`
    pub fn inner(&self, other: &ClassFunction) -> C64 {
        assert_eq!(
            self.values.len(),
            other.values.len(),
            "class functions on different groups"
        );
        let s: C64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        s / self.values.len() as f64
    }

    pub fn add(&self, other: &ClassFunction) -> ClassFunction {
        ClassFunction::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> ClassFunction {
        ClassFunction::new(self.values.iter().map(|a| a * k).collect())
    }

    pub fn conj(&self) -> ClassFunction {
        ClassFunction::new(self.values.iter().map(|a| a.conj()).collect())
    }

    /// Pointwise product (the character of a tensor product).
    pub fn product(&self, other: &ClassFunction) -> ClassFunction {
        ClassFunction::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        )
    }

    pub fn max_deviation(&self, other: &ClassFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Class data as exported in a character table.
#[derive(Clone, Debug, Serialize)]
pub struct ClassInfo {
    pub representative: usize,
    pub size: usize,
}

/// The irreducible characters of a finite group, one row per irrep and one
/// column per conjugacy class.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    order: usize,
    classes: Vec<ClassInfo>,
    class_of: Vec<usize>,
    inverse_class: Vec<usize>,
    rows: Vec<Vec<C64>>,
    degrees: Vec<usize>,
}

impl CharacterTable {
    /// Diagonalize a random Hermitian combination of the class-sum operators.
    pub fn compute(g: &FiniteGroup) -> Result<Self> {
        let classes = g.conjugacy_classes();
        let r = classes.len();
        let order = g.order();
        let class_of: Vec<usize> = g.elements().map(|x| g.class_of(x)).collect();
        let inverse_class: Vec<usize> = classes
            .iter()
            .map(|cl| class_of[g.inv(cl.representative)])
            .collect();

        // m[i][(b, c)] = #{x ∈ C_i : x⁻¹ z_c ∈ C_b}
        let mut mats = vec![CMat::zeros(r, r); r];
        for (ci, cl) in classes.iter().enumerate() {
            for (cc, target) in classes.iter().enumerate() {
                let z = target.representative;
                for &x in &cl.elements {
                    let b = class_of[g.mul(g.inv(x), z)];
                    mats[ci][(b, cc)] += c(1.0, 0.0);
                }
            }
        }
        let sizes: Vec<f64> = classes.iter().map(|cl| cl.size() as f64).collect();
        // Symmetrize: S_i = D^{-1/2} M_i D^{1/2} is normal with S_i* = S_{i*}.
        let normal: Vec<CMat> = mats
            .iter()
            .map(|m| CMat::from_fn(r, r, |b, cc| m[(b, cc)] * (sizes[cc] / sizes[b]).sqrt()))
            .collect();

        let mut last_err = None;
        for attempt in 0..MAX_ATTEMPTS {
            let mut rng = ChaCha8Rng::seed_from_u64(TABLE_SEED + attempt);
            let mut h = CMat::zeros(r, r);
            for i in 0..r {
                let a: f64 = rng.random_range(-1.0..1.0);
                let b: f64 = rng.random_range(-1.0..1.0);
                let s = &normal[i];
                let t = &normal[inverse_class[i]];
                h += (s + t) * c(a, 0.0) + (s - t) * c(0.0, b);
            }
            let (vals, vecs) = hermitian_eigen(&h);
            let spread = vals.last().unwrap() - vals.first().unwrap();
            let min_gap = vals
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min);
            if r > 1 && min_gap <= 1e-6 * spread.max(1.0) {
                last_err = Some(Error::numerical(format!(
                    "class-sum eigenvalues cluster (gap {min_gap:.2e}) on attempt {attempt}"
                )));
                continue;
            }
            match Self::from_eigenvectors(order, &sizes, &vecs) {
                Ok((rows, degrees)) => {
                    let table = CharacterTable {
                        order,
                        classes: classes
                            .iter()
                            .map(|cl| ClassInfo {
                                representative: cl.representative,
                                size: cl.size(),
                            })
                            .collect(),
                        class_of,
                        inverse_class,
                        rows,
                        degrees,
                    };
                    table.check()?;
                    return Ok(table);
                }
                Err(e) => last_err = Some(e),
            }
        }
        Err(last_err.unwrap_or_else(|| Error::numerical("character table failed")))
    }

    fn from_eigenvectors(
        order: usize,
        sizes: &[f64],
        vecs: &CMat,
    ) -> Result<(Vec<Vec<C64>>, Vec<usize>)> {
        let r = sizes.len();
        let mut rows: Vec<(usize, Vec<C64>)> = Vec::with_capacity(r);
        for j in 0..r {
            let v = vecs.column(j);
            let lead = v[0];
            if lead.norm() < 1e-9 {
                return Err(Error::numerical(
                    "eigenvector vanishes at the identity class",
                ));
            }
            let kappa = lead.conj() / lead.norm() * (order as f64).sqrt();
            let row: Vec<C64> = (0..r).map(|a| kappa * v[a] / sizes[a].sqrt()).collect();
            let d = row[0].re;
            let rounded = d.round();
            if (d - rounded).abs() > 1e-6 || rounded < 1.0 {
                return Err(Error::numerical(format!("non-integral degree {d}")));
            }
            rows.push((rounded as usize, row));
        }
        rows.sort_by(|(da, ra), (db, rb)| {
            da.cmp(db).then_with(|| {
                for (x, y) in ra.iter().zip(rb) {
                    if (x.re - y.re).abs() > 1e-9 {
                        return y.re.partial_cmp(&x.re).unwrap();
                    }
                    if (x.im - y.im).abs() > 1e-9 {
                        return y.im.partial_cmp(&x.im).unwrap();
                    }
                }
                std::cmp::Ordering::Equal
            })
        });
        let degrees = rows.iter().map(|(d, _)| *d).collect();
        Ok((rows.into_iter().map(|(_, r)| r).collect(), degrees))
    }

    /// Row and column orthogonality plus Σ deg² = |G|.
    pub fn check(&self) -> Result<()> {
        let r = self.rows.len();
        if r != self.classes.len() {
            return Err(Error::Integrity(
                "irrep count differs from class count".into(),
            ));
        }
        let sq: usize = self.degrees.iter().map(|d| d * d).sum();
        if sq != self.order {
            return Err(Error::Integrity(format!(
                "sum of squared degrees {sq} differs from group order {}",
                self.order
            )));
        }
        let (row_dev, col_dev) = self.orthogonality_defects();
        if row_dev > 1e-8 || col_dev > 1e-8 {
            return Err(Error::numerical(format!(
                "orthogonality defect: rows {row_dev:.2e}, columns {col_dev:.2e}"
            )));
        }
        Ok(())
    }

    /// Largest deviation from row and from column orthogonality.
    pub fn orthogonality_defects(&self) -> (f64, f64) {
        let r = self.rows.len();
        let mut row_dev: f64 = 0.0;
        for i in 0..r {
            for j in 0..r {
                let s: C64 = (0..r)
                    .map(|a| self.rows[i][a] * self.rows[j][a].conj() * self.classes[a].size as f64)
                    .sum::<C64>()
                    / self.order as f64;
                let want = if i == j { 1.0 } else { 0.0 };
                row_dev = row_dev.max((s - c(want, 0.0)).norm());
            }
        }
        let mut col_dev: f64 = 0.0;
        for a in 0..r {
            for b in 0..r {
                let s: C64 = (0..r)
                    .map(|i| self.rows[i][a] * self.rows[i][b].conj())
                    .sum();
                let want = if a == b {
                    self.order as f64 / self.classes[a].size as f64
                } else {
                    0.0
                };
                col_dev = col_dev.max((s - c(want, 0.0)).norm());
            }
        }
        (row_dev, col_dev)
    }

    pub fn group_order(&self) -> usize {
        self.order
    }

    pub fn num_irreps(&self) -> usize {
        self.rows.len()
    }

    pub fn classes(&self) -> &[ClassInfo] {
        &self.classes
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn inverse_class(&self, class: usize) -> usize {
        self.inverse_class[class]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn degree(&self, irrep: usize) -> usize {
        self.degrees[irrep]
    }

    /// Row of character values indexed by class.
    pub fn row(&self, irrep: usize) -> &[C64] {
        &self.rows[irrep]
    }

    pub fn value(&self, irrep: usize, g: usize) -> C64 {
        self.rows[irrep][self.class_of[g]]
    }

    /// The irreducible character as a per-element class function.
    pub fn character(&self, irrep: usize) -> ClassFunction {
        ClassFunction::new((0..self.order).map(|g| self.value(irrep, g)).collect())
    }

    /// Index of the irrep with the conjugate character.
    pub fn dual(&self, irrep: usize) -> usize {
        let target: Vec<C64> = self.rows[irrep].iter().map(|z| z.conj()).collect();
        (0..self.num_irreps())
            .find(|&j| {
                self.rows[j]
                    .iter()
                    .zip(&target)
                    .all(|(a, b)| (a - b).norm() < 1e-8)
            })
            .expect("conjugate of an irreducible character is irreducible")
    }

    /// Multiplicities of every irrep in a class function, with the integer
    /// gate applied.
    pub fn decompose(&self, chi: &ClassFunction) -> Result<Vec<usize>> {
        (0..self.num_irreps())
            .map(|i| crate::grp::multiplicity(chi, &self.character(i)))
            .collect()
    }

    /// Identify an irreducible character; `None` if `chi` is not one.
    pub fn find(&self, chi: &ClassFunction) -> Option<usize> {
        (0..self.num_irreps()).find(|&i| chi.max_deviation(&self.character(i)) < 1e-6)
    }

    /// Short display label: `chi<i>` with its degree.
    pub fn label(&self, irrep: usize) -> String {
        format!("chi{irrep}(dim {})", self.degrees[irrep])
    }

    /// Plain-text table with entries to 6 decimal places.
    pub fn render(&self, g: &FiniteGroup) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<12}", "class");
        for cl in &self.classes {
            let _ = write!(out, " {:>22}", g.element_label(cl.representative));
        }
        out.push('\n');
        let _ = write!(out, "{:<12}", "size");
        for cl in &self.classes {
            let _ = write!(out, " {:>22}", cl.size);
        }
        out.push('\n');
        for i in 0..self.num_irreps() {
            let _ = write!(out, "{:<12}", format!("chi{i}"));
            for z in &self.rows[i] {
                let _ = write!(out, " {:>22}", format_complex(*z));
            }
            out.push('\n');
        }
        out
    }
}

/// Round to 6 decimals and drop negligible parts.
pub fn format_complex(z: C64) -> String {
    let clean = |x: f64| {
        let r = (x * 1e6).round() / 1e6;
        if r == 0.0 {
            0.0
        } else {
            r
        }
    };
    let (re, im) = (clean(z.re), clean(z.im));
    if im == 0.0 {
        format!("{re:.6}")
    } else if re == 0.0 {
        format!("{im:.6}i")
    } else if im < 0.0 {
        format!("{re:.6}-{:.6}i", -im)
    } else {
        format!("{re:.6}+{im:.6}i")
    }
}

/// Rounded `[re, im]` pair for structured reports.
pub fn rounded_pair(z: C64) -> [f64; 2] {
    let clean = |x: f64| {
        let r = (x * 1e6).round() / 1e6;
        if r == 0.0 {
            0.0
        } else {
            r
        }
    };
    [clean(z.re), clean(z.im)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_rows() {
        let g = FiniteGroup::cyclic(2);
        let t = g.character_table().unwrap();
        assert_eq!(t.num_irreps(), 2);
        assert!((t.row(0)[1] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((t.row(1)[1] - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn s3_and_d4_degrees() {
        let s3 = FiniteGroup::symmetric(3);
        let t = s3.character_table().unwrap();
        assert_eq!(t.degrees(), &[1, 1, 2]);
        let mut sizes: Vec<usize> = t.classes().iter().map(|c| c.size).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);
        let d4 = FiniteGroup::dihedral(4);
        assert_eq!(d4.character_table().unwrap().degrees(), &[1, 1, 1, 1, 2]);
    }

    #[test]
    fn cyclic_characters_are_roots_of_unity() {
        let g = FiniteGroup::cyclic(7);
        let t = g.character_table().unwrap();
        for i in 0..7 {
            for x in g.elements() {
                assert!((t.value(i, x).norm() - 1.0).abs() < 1e-9);
            }
        }
        assert_eq!(t.dual(0), 0);
    }

    #[test]
    fn trivial_first() {
        let g = FiniteGroup::symmetric(4);
        let t = g.character_table().unwrap();
        assert!(t.row(0).iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-9));
    }

    #[test]
    fn formatting() {
        assert_eq!(
            format_complex(c(-0.5, 0.8660254037844386)),
            "-0.500000+0.866025i"
        );
        assert_eq!(format_complex(c(1.0, -1e-12)), "1.000000");
    }
}
