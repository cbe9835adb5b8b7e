//! Finite groups, characters, multiplicities and isotypical projectors.

mod character;
mod group;
mod matrep;
mod perm;

pub use character::{format_complex, rounded_pair, CharacterTable, ClassFunction, ClassInfo};
pub use group::{
    all_subgroups, subgroups, ConjugacyClass, FiniteGroup, Subgroup, SubgroupClass,
    DEFAULT_ORDER_CAP, SUBGROUP_ENUMERATION_CAP,
};
pub use matrep::MatrixRep;
pub use perm::Permutation;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

/// Residual allowed when rounding an inner product to an integer.
pub const MULTIPLICITY_GATE: f64 = 1e-6;

/// Values of `chi` on the elements of `h`, indexed by local ids.
pub fn restrict_character(chi: &ClassFunction, h: &Subgroup) -> Result<ClassFunction> {
    if h.elements().iter().any(|&x| x >= chi.values().len()) {
        return Err(Error::validation(
            "subgroup does not live in the character's group",
        ));
    }
    Ok(ClassFunction::new(
        h.elements().iter().map(|&x| chi.at(x)).collect(),
    ))
}

/// `Ind χ(g) = (1/|H|) Σ_{x ∈ G} χ°(x⁻¹ g x)` where `χ°` extends `χ` by zero.
/// `chi` is indexed by the local ids of `h`.
pub fn induce_character(
    chi: &ClassFunction,
    h: &Subgroup,
    g: &FiniteGroup,
) -> Result<ClassFunction> {
    if chi.values().len() != h.order() {
        return Err(Error::validation(
            "character length differs from subgroup order",
        ));
    }
    if h.elements().iter().any(|&x| x >= g.order()) {
        return Err(Error::validation("subgroup element outside the group"));
    }
    let hn = h.order() as f64;
    let values = g
        .elements()
        .map(|y| {
            let s: C64 = g
                .elements()
                .filter_map(|x| h.local_index(g.mul(g.mul(g.inv(x), y), x)))
                .map(|i| chi.at(i))
                .sum();
            s / hn
        })
        .collect();
    Ok(ClassFunction::new(values))
}

/// `⟨χ₁, χ₂⟩` rounded to a non-negative integer behind the residual gate.
pub fn multiplicity(chi1: &ClassFunction, chi2: &ClassFunction) -> Result<usize> {
    if chi1.values().len() != chi2.values().len() {
        return Err(Error::validation(
            "class functions live on different groups",
        ));
    }
    let z = chi1.inner(chi2);
    let r = z.re.round();
    let residual = (z - C64::new(r, 0.0)).norm();
    if residual >= MULTIPLICITY_GATE || r < 0.0 {
        return Err(Error::Integrity(format!(
            "inner product {:.9}{:+.9}i is not a non-negative integer",
            z.re, z.im
        )));
    }
    Ok(r as usize)
}

/// An injective homomorphism from a small group into a parent group, given
/// by the image of each element id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    image: Vec<usize>,
}

impl Embedding {
    /// The inclusion of `h` as seen through [`FiniteGroup::subgroup_as_group`].
    pub fn of_subgroup(h: &Subgroup) -> Self {
        Embedding {
            image: h.elements().to_vec(),
        }
    }

    pub fn new(source: &FiniteGroup, target: &FiniteGroup, image: Vec<usize>) -> Result<Self> {
        if image.len() != source.order() {
            return Err(Error::validation(
                "embedding must list one image per element",
            ));
        }
        if image.iter().any(|&x| x >= target.order()) {
            return Err(Error::validation("embedding image out of range"));
        }
        let mut sorted = image.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != image.len() {
            return Err(Error::validation("embedding is not injective"));
        }
        for a in source.elements() {
            for b in source.elements() {
                if image[source.mul(a, b)] != target.mul(image[a], image[b]) {
                    return Err(Error::validation("embedding is not a homomorphism"));
                }
            }
        }
        Ok(Embedding { image })
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// Pull a class function on the parent back along the embedding.
    pub fn pull_back(&self, chi: &ClassFunction) -> Result<ClassFunction> {
        if self.image.iter().any(|&x| x >= chi.values().len()) {
            return Err(Error::validation(
                "embedding does not land in the character's group",
            ));
        }
        Ok(ClassFunction::new(
            self.image.iter().map(|&x| chi.at(x)).collect(),
        ))
    }
}

/// `dim Hom_H(α, β)` for characters of two overgroups sharing `H`, each
/// embedding given explicitly.
pub fn hom_dimension(
    alpha: &ClassFunction,
    into_first: Option<&Embedding>,
    beta: &ClassFunction,
    into_second: Option<&Embedding>,
) -> Result<usize> {
    let (e1, e2) = match (into_first, into_second) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::validation(
                "identification of H in both groups is required",
            ))
        }
    };
    if e1.image.len() != e2.image.len() {
        return Err(Error::validation(
            "the two identifications have different orders",
        ));
    }
    let a = e1.pull_back(alpha)?;
    let b = e2.pull_back(beta)?;
    multiplicity(&a, &b)
}

/// Are `α` and `β` `H`-associated, i.e. is `Hom_H(α, β) ≠ 0`?
pub fn associated(
    alpha: &ClassFunction,
    into_first: Option<&Embedding>,
    beta: &ClassFunction,
    into_second: Option<&Embedding>,
) -> Result<bool> {
    Ok(hom_dimension(alpha, into_first, beta, into_second)? > 0)
}

/// `p_α = (deg α/|G|) Σ_g conj(χ_α(g)) ρ(g)`
pub fn isotypical_projector(rep: &MatrixRep, table: &CharacterTable, alpha: usize) -> CMat {
    let d = table.degree(alpha) as f64;
    rep.average_weighted(&table.character(alpha)) * C64::new(d, 0.0)
}

/// Multiplicity of each irrep of `g` in `rep`.
pub fn decompose_rep(rep: &MatrixRep, g: &FiniteGroup) -> Result<Vec<usize>> {
    g.character_table()?.decompose(&rep.character())
}
