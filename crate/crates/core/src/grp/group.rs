use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::grp::character::CharacterTable;
use crate::grp::matrep::MatrixRep;
use crate::grp::perm::Permutation;

/// Default cap on the order of a generated group.
pub const DEFAULT_ORDER_CAP: usize = 1024;
/// Cap on the order of groups whose full subgroup lattice is enumerated.
pub const SUBGROUP_ENUMERATION_CAP: usize = 48;

/// A conjugacy class: its smallest element id and all members (sorted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub representative: usize,
    pub elements: Vec<usize>,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        self.elements.len()
    }
}

/// A finite group given by its multiplication table over element ids
/// `0..order`. Element `0` is always the identity.
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    inverse: Vec<usize>,
    perms: Option<Vec<Permutation>>,
    generators: Vec<usize>,
    name: Option<String>,
    classes: OnceLock<(Vec<ConjugacyClass>, Vec<usize>)>,
    char_table: OnceLock<CharacterTable>,
    irreps: OnceLock<Vec<MatrixRep>>,
    sub_cache: Mutex<HashMap<Vec<usize>, Arc<FiniteGroup>>>,
}

impl Clone for FiniteGroup {
    fn clone(&self) -> Self {
        FiniteGroup {
            order: self.order,
            table: self.table.clone(),
            inverse: self.inverse.clone(),
            perms: self.perms.clone(),
            generators: self.generators.clone(),
            name: self.name.clone(),
            classes: OnceLock::new(),
            char_table: OnceLock::new(),
            irreps: OnceLock::new(),
            sub_cache: Mutex::new(HashMap::new()),
        }
    }
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("order", &self.order)
            .field("generators", &self.generators)
            .finish()
    }
}

impl FiniteGroup {
    /// Close the given permutations under composition. Element ids are
    /// assigned breadth-first over the sorted, deduplicated generator list,
    /// so identical input always yields identical ids.
    pub fn from_permutations(generators: &[Permutation], cap: usize) -> Result<Self> {
        let n = generators.iter().map(|p| p.degree()).max().unwrap_or(0);
        let mut gens: Vec<Permutation> = generators
            .iter()
            .map(|p| p.padded(n))
            .filter(|p| !p.is_identity())
            .collect();
        gens.sort();
        gens.dedup();

        let mut elems = vec![Permutation::identity(n)];
        let mut index: HashMap<Permutation, usize> = HashMap::new();
        index.insert(elems[0].clone(), 0);
        let mut i = 0;
        while i < elems.len() {
            for s in &gens {
                let p = elems[i].compose(s);
                if !index.contains_key(&p) {
                    if elems.len() >= cap {
                        return Err(Error::Size {
                            what: "generated group order".into(),
                            cap,
                        });
                    }
                    index.insert(p.clone(), elems.len());
                    elems.push(p);
                }
            }
            i += 1;
        }
        let order = elems.len();
        let mut table = vec![0u32; order * order];
        for a in 0..order {
            for b in 0..order {
                table[a * order + b] = index[&elems[a].compose(&elems[b])] as u32;
            }
        }
        let inverse = (0..order).map(|a| index[&elems[a].inverse()]).collect();
        let generator_ids = gens.iter().map(|g| index[g]).collect();
        Ok(FiniteGroup::assemble(
            order,
            table,
            inverse,
            Some(elems),
            generator_ids,
        ))
    }

    /// Build from an explicit table; validates the group axioms.
    pub fn from_table(order: usize, table: Vec<u32>) -> Result<Self> {
        if order == 0 || table.len() != order * order {
            return Err(Error::validation("multiplication table has wrong shape"));
        }
        if table.iter().any(|&x| x as usize >= order) {
            return Err(Error::validation("table entry out of range"));
        }
        for a in 0..order {
            if table[a] as usize != a || table[a * order] as usize != a {
                return Err(Error::validation(
                    "element 0 must be the two-sided identity",
                ));
            }
        }
        let mut inverse = vec![usize::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if table[a * order + b] == 0 {
                    inverse[a] = b;
                    break;
                }
            }
            if inverse[a] == usize::MAX {
                return Err(Error::validation(format!("element {a} has no inverse")));
            }
        }
        let g = FiniteGroup::assemble(order, table, inverse, None, (1..order).collect());
        g.check_associative()?;
        let gens = g.minimal_generators();
        Ok(FiniteGroup {
            generators: gens,
            ..g
        })
    }

    fn assemble(
        order: usize,
        table: Vec<u32>,
        inverse: Vec<usize>,
        perms: Option<Vec<Permutation>>,
        generators: Vec<usize>,
    ) -> Self {
        FiniteGroup {
            order,
            table,
            inverse,
            perms,
            generators,
            name: None,
            classes: OnceLock::new(),
            char_table: OnceLock::new(),
            irreps: OnceLock::new(),
            sub_cache: Mutex::new(HashMap::new()),
        }
    }

    fn minimal_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = Subgroup::trivial();
        for g in 0..self.order {
            if !span.contains(g) {
                gens.push(g);
                span = self.generated(&gens);
            }
        }
        gens
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `g h g⁻¹`
    #[inline]
    pub fn conj(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn permutation(&self, g: usize) -> Option<&Permutation> {
        self.perms.as_ref().map(|p| &p[g])
    }

    pub fn find_permutation(&self, p: &Permutation) -> Option<usize> {
        let perms = self.perms.as_ref()?;
        let n = perms.first().map(|q| q.degree()).unwrap_or(0);
        if p.degree() > n {
            return None;
        }
        let p = p.padded(n);
        perms.iter().position(|q| *q == p)
    }

    /// Display label for an element: cycle notation when available.
    pub fn element_label(&self, g: usize) -> String {
        match self.permutation(g) {
            Some(p) => p.to_string(),
            None => format!("g{g}"),
        }
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Exhaustive associativity check.
    pub fn check_associative(&self) -> Result<()> {
        for a in 0..self.order {
            for b in 0..self.order {
                let ab = self.mul(a, b);
                for c in 0..self.order {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::validation(format!(
                            "multiplication not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Check the group axioms and that the generators generate.
    pub fn validate(&self) -> Result<()> {
        if self.order <= 48 {
            self.check_associative()?;
        }
        for a in 0..self.order {
            if self.mul(a, 0) != a || self.mul(0, a) != a {
                return Err(Error::validation("identity is not two-sided"));
            }
            if self.mul(a, self.inv(a)) != 0 {
                return Err(Error::validation(format!("bad inverse for {a}")));
            }
        }
        if !self.generators.is_empty() || self.order == 1 {
            if self.generated(&self.generators).order() != self.order {
                return Err(Error::validation("generators do not generate the group"));
            }
        }
        Ok(())
    }

    /// Conjugacy classes ordered by smallest member (the identity class is
    /// first) together with the element-to-class map.
    pub fn conjugacy_classes(&self) -> &[ConjugacyClass] {
        &self.class_data().0
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_data().1[g]
    }

    fn class_data(&self) -> &(Vec<ConjugacyClass>, Vec<usize>) {
        self.classes.get_or_init(|| {
            let mut class_of = vec![usize::MAX; self.order];
            let mut classes = Vec::new();
            for g in 0..self.order {
                if class_of[g] != usize::MAX {
                    continue;
                }
                let members: BTreeSet<usize> = (0..self.order).map(|x| self.conj(x, g)).collect();
                for &m in &members {
                    class_of[m] = classes.len();
                }
                classes.push(ConjugacyClass {
                    representative: g,
                    elements: members.into_iter().collect(),
                });
            }
            (classes, class_of)
        })
    }

    /// Character table, computed once and cached.
    pub fn character_table(&self) -> Result<&CharacterTable> {
        if let Some(t) = self.char_table.get() {
            return Ok(t);
        }
        let t = CharacterTable::compute(self)?;
        let _ = self.char_table.set(t);
        Ok(self.char_table.get().expect("just set"))
    }

    /// Unitary matrix realizations of every irreducible, in character-table
    /// order, computed once and cached.
    pub fn irrep_matrices(&self) -> Result<&[MatrixRep]> {
        if let Some(r) = self.irreps.get() {
            return Ok(r);
        }
        let table = self.character_table()?;
        let reps = (0..table.num_irreps())
            .map(|i| MatrixRep::irreducible(self, table, i))
            .collect::<Result<Vec<_>>>()?;
        let _ = self.irreps.set(reps);
        Ok(self.irreps.get().expect("just set"))
    }

    /// Subgroup generated by the given elements.
    pub fn generated(&self, gens: &[usize]) -> Subgroup {
        let mut inside = vec![false; self.order];
        inside[0] = true;
        let mut elems = vec![0usize];
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !inside[y] {
                    inside[y] = true;
                    elems.push(y);
                    queue.push_back(y);
                }
            }
        }
        elems.sort_unstable();
        Subgroup { elements: elems }
    }

    /// The subgroup as a group in its own right: local id `i` is the
    /// `i`-th smallest element of `h`. Cached per element set.
    pub fn subgroup_as_group(&self, h: &Subgroup) -> Arc<FiniteGroup> {
        let mut cache = self.sub_cache.lock().expect("subgroup cache poisoned");
        if let Some(g) = cache.get(&h.elements) {
            return g.clone();
        }
        let n = h.order();
        let mut table = vec![0u32; n * n];
        for (i, &a) in h.elements.iter().enumerate() {
            for (j, &b) in h.elements.iter().enumerate() {
                table[i * n + j] = h.local_index(self.mul(a, b)).expect("closed") as u32;
            }
        }
        let inverse = h
            .elements
            .iter()
            .map(|&a| h.local_index(self.inv(a)).expect("closed"))
            .collect();
        let perms = self
            .perms
            .as_ref()
            .map(|p| h.elements.iter().map(|&a| p[a].clone()).collect());
        let mut sub = FiniteGroup::assemble(n, table, inverse, perms, Vec::new());
        sub.generators = sub.minimal_generators();
        let sub = Arc::new(sub);
        cache.insert(h.elements.clone(), sub.clone());
        sub
    }

    // ---- builtin groups ----

    /// Cyclic group of order `n` acting on `n` points.
    pub fn cyclic(n: usize) -> Self {
        let gen = if n <= 1 {
            Permutation::identity(1)
        } else {
            Permutation::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap()
        };
        FiniteGroup::from_permutations(&[gen], DEFAULT_ORDER_CAP)
            .unwrap()
            .with_name(format!("Z{n}"))
    }

    /// Dihedral group of order `2n` (symmetries of the regular `n`-gon).
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 3, "dihedral groups need n >= 3");
        let r = Permutation::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap();
        let s = Permutation::from_images((0..n).map(|i| (n - i) % n).collect()).unwrap();
        FiniteGroup::from_permutations(&[r, s], DEFAULT_ORDER_CAP)
            .unwrap()
            .with_name(format!("D{n}"))
    }

    pub fn symmetric(n: usize) -> Self {
        let mut gens = Vec::new();
        if n >= 2 {
            gens.push(Permutation::parse_cycles("(0 1)", n).unwrap());
        }
        if n >= 3 {
            gens.push(Permutation::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap());
        }
        if gens.is_empty() {
            gens.push(Permutation::identity(1));
        }
        FiniteGroup::from_permutations(&gens, DEFAULT_ORDER_CAP)
            .unwrap()
            .with_name(format!("S{n}"))
    }

    pub fn klein_four() -> Self {
        let a = Permutation::parse_cycles("(0 1)", 4).unwrap();
        let b = Permutation::parse_cycles("(2 3)", 4).unwrap();
        FiniteGroup::from_permutations(&[a, b], DEFAULT_ORDER_CAP)
            .unwrap()
            .with_name("Z2xZ2")
    }

    /// Direct product of two permutation groups acting on disjoint points.
    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<Self> {
        let (pa, pb) = match (&a.perms, &b.perms) {
            (Some(pa), Some(pb)) => (pa, pb),
            _ => return Err(Error::validation("direct product needs permutation groups")),
        };
        let na = pa[0].degree();
        let nb = pb[0].degree();
        let mut gens = Vec::new();
        for &g in a.generators() {
            gens.push(pa[g].padded(na + nb));
        }
        for &g in b.generators() {
            let mut img: Vec<usize> = (0..na).collect();
            img.extend(pb[g].images().iter().map(|&x| x + na));
            gens.push(Permutation::from_images(img)?);
        }
        let name = format!("{}x{}", a.name().unwrap_or("G"), b.name().unwrap_or("H"));
        Ok(FiniteGroup::from_permutations(&gens, DEFAULT_ORDER_CAP)?.with_name(name))
    }

    /// Builtin groups by name: `Z<n>`, `D<n>`, `S<n>` (n ≤ 5), `Z2xZ2`,
    /// `S3xZ2`, `trivial`.
    pub fn builtin(name: &str) -> Result<Self> {
        let unknown = || Error::Unknown {
            kind: "group",
            name: name.to_string(),
        };
        let key = name.trim().replace("/", "").replace(' ', "");
        match key.as_str() {
            "trivial" | "Z1" | "1" => return Ok(FiniteGroup::cyclic(1)),
            "Z2xZ2" | "V4" | "K4" => return Ok(FiniteGroup::klein_four()),
            "S3xZ2" => {
                return FiniteGroup::direct_product(
                    &FiniteGroup::symmetric(3),
                    &FiniteGroup::cyclic(2),
                )
            }
            _ => {}
        }
        let (head, tail) = key.split_at(1);
        let n: usize = tail.parse().map_err(|_| unknown())?;
        match head {
            "Z" | "C" if (1..=64).contains(&n) => Ok(FiniteGroup::cyclic(n)),
            "D" if (3..=24).contains(&n) => Ok(FiniteGroup::dihedral(n)),
            "S" if (1..=5).contains(&n) => Ok(FiniteGroup::symmetric(n)),
            _ => Err(unknown()),
        }
    }
}

/// A subgroup of some ambient [`FiniteGroup`], as a sorted element-id set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Subgroup {
    pub fn trivial() -> Self {
        Subgroup { elements: vec![0] }
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        Subgroup {
            elements: g.elements().collect(),
        }
    }

    /// Validated constructor: the set must contain the identity and be
    /// closed under multiplication and inverses.
    pub fn new(g: &FiniteGroup, mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if elements.iter().any(|&e| e >= g.order()) {
            return Err(Error::validation("subgroup element id out of range"));
        }
        let h = Subgroup { elements };
        if !h.contains(0) {
            return Err(Error::validation("subgroup must contain the identity"));
        }
        for &a in &h.elements {
            if !h.contains(g.inv(a)) {
                return Err(Error::validation("subgroup not closed under inverses"));
            }
            for &b in &h.elements {
                if !h.contains(g.mul(a, b)) {
                    return Err(Error::validation(format!(
                        "subset {:?} is not closed under multiplication",
                        h.elements
                    )));
                }
            }
        }
        Ok(h)
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    /// Position of an ambient element id in the sorted element list.
    pub fn local_index(&self, g: usize) -> Option<usize> {
        self.elements.binary_search(&g).ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    /// `g H g⁻¹`
    pub fn conjugate(&self, grp: &FiniteGroup, g: usize) -> Subgroup {
        let mut elements: Vec<usize> = self.elements.iter().map(|&h| grp.conj(g, h)).collect();
        elements.sort_unstable();
        Subgroup { elements }
    }

    /// Lexicographically smallest conjugate; equal for conjugate subgroups.
    pub fn canonical_conjugate(&self, grp: &FiniteGroup) -> Subgroup {
        grp.elements()
            .map(|g| self.conjugate(grp, g))
            .min()
            .expect("nonempty group")
    }

    pub fn is_conjugate_to(&self, other: &Subgroup, grp: &FiniteGroup) -> bool {
        self.order() == other.order() && grp.elements().any(|g| self.conjugate(grp, g) == *other)
    }

    /// Is some conjugate of `self` contained in `other`?
    pub fn subconjugate_to(&self, other: &Subgroup, grp: &FiniteGroup) -> bool {
        self.order() <= other.order()
            && other.order() % self.order() == 0
            && grp
                .elements()
                .any(|g| self.conjugate(grp, g).is_subset_of(other))
    }

    /// Intersection with another subgroup.
    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        Subgroup {
            elements: self
                .elements
                .iter()
                .copied()
                .filter(|&x| other.contains(x))
                .collect(),
        }
    }

    /// Left coset representatives: the smallest element id of each coset
    /// `gH`, listed in increasing order.
    pub fn left_coset_representatives(&self, grp: &FiniteGroup) -> Vec<usize> {
        let mut covered = vec![false; grp.order()];
        let mut reps = Vec::new();
        for g in grp.elements() {
            if covered[g] {
                continue;
            }
            reps.push(g);
            for &h in &self.elements {
                covered[grp.mul(g, h)] = true;
            }
        }
        reps
    }
}

/// A conjugacy class of subgroups with its canonical representative (the
/// lexicographically smallest member).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupClass {
    pub representative: Subgroup,
    pub members: Vec<Subgroup>,
}

/// All subgroups of `grp`, grouped into conjugacy classes and sorted by
/// (order, representative).
pub fn subgroups(grp: &FiniteGroup) -> Result<Vec<SubgroupClass>> {
    if grp.order() > SUBGROUP_ENUMERATION_CAP {
        return Err(Error::Size {
            what: format!("subgroup enumeration for order {}", grp.order()),
            cap: SUBGROUP_ENUMERATION_CAP,
        });
    }
    let mut found: BTreeSet<Subgroup> = BTreeSet::new();
    let mut list: Vec<(Subgroup, Vec<usize>)> = Vec::new();
    for g in grp.elements() {
        let h = grp.generated(&[g]);
        if found.insert(h.clone()) {
            list.push((h, vec![g]));
        }
    }
    let mut i = 0;
    while i < list.len() {
        let (h, gens) = list[i].clone();
        for g in grp.elements() {
            if h.contains(g) {
                continue;
            }
            let mut more = gens.clone();
            more.push(g);
            let k = grp.generated(&more);
            if found.insert(k.clone()) {
                list.push((k, more));
            }
        }
        i += 1;
    }
    let mut classes: Vec<SubgroupClass> = Vec::new();
    let mut assigned: BTreeSet<Subgroup> = BTreeSet::new();
    for h in &found {
        if assigned.contains(h) {
            continue;
        }
        let members: BTreeSet<Subgroup> = grp.elements().map(|g| h.conjugate(grp, g)).collect();
        for m in &members {
            assigned.insert(m.clone());
        }
        let members: Vec<Subgroup> = members.into_iter().collect();
        classes.push(SubgroupClass {
            representative: members[0].clone(),
            members,
        });
    }
    classes.sort_by(|a, b| {
        (a.representative.order(), &a.representative)
            .cmp(&(b.representative.order(), &b.representative))
    });
    Ok(classes)
}

/// Every subgroup of `grp` (not up to conjugacy), sorted.
pub fn all_subgroups(grp: &FiniteGroup) -> Result<Vec<Subgroup>> {
    let mut out: Vec<Subgroup> = subgroups(grp)?
        .into_iter()
        .flat_map(|c| c.members)
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(s: &str) -> Permutation {
        Permutation::parse_cycles(s, 0).unwrap()
    }

    #[test]
    fn generated_orders() {
        assert_eq!(
            FiniteGroup::from_permutations(&[perm("(0 1)")], 1024)
                .unwrap()
                .order(),
            2
        );
        let s3 = FiniteGroup::from_permutations(&[perm("(0 1)"), perm("(0 1 2)")], 1024).unwrap();
        assert_eq!(s3.order(), 6);
        s3.validate().unwrap();
    }

    #[test]
    fn d4_order_by_word_enumeration() {
        // Independent check: enumerate words in the generators up to length 8
        // and count distinct permutations.
        let gens = [perm("(0 1 2 3)"), perm("(0 2)")];
        let mut seen: BTreeSet<Permutation> = BTreeSet::new();
        let mut frontier = vec![Permutation::identity(4)];
        seen.insert(frontier[0].clone());
        for _ in 0..8 {
            let mut next = Vec::new();
            for w in &frontier {
                for g in &gens {
                    let p = g.compose(w);
                    if seen.insert(p.clone()) {
                        next.push(p);
                    }
                }
            }
            frontier = next;
        }
        let d4 = FiniteGroup::from_permutations(&gens, 1024).unwrap();
        assert_eq!(d4.order(), seen.len());
        assert_eq!(d4.order(), 8);
    }

    #[test]
    fn deterministic_ids() {
        let a = FiniteGroup::from_permutations(&[perm("(0 1 2)"), perm("(0 1)")], 1024).unwrap();
        let b = FiniteGroup::from_permutations(&[perm("(0 1)"), perm("(0 1 2)")], 1024).unwrap();
        for g in a.elements() {
            assert_eq!(a.permutation(g), b.permutation(g));
        }
    }

    #[test]
    fn cap_exceeded() {
        let err =
            FiniteGroup::from_permutations(&[perm("(0 1)"), perm("(0 1 2 3 4)")], 100).unwrap_err();
        assert!(matches!(err, Error::Size { .. }));
    }

    #[test]
    fn subgroup_counts() {
        let z2 = FiniteGroup::cyclic(2);
        assert_eq!(subgroups(&z2).unwrap().len(), 2);
        let z4 = FiniteGroup::cyclic(4);
        let cl = subgroups(&z4).unwrap();
        let orders: Vec<usize> = cl.iter().map(|c| c.representative.order()).collect();
        assert_eq!(orders, vec![1, 2, 4]);
        let s3 = FiniteGroup::symmetric(3);
        let cl = subgroups(&s3).unwrap();
        let orders: Vec<usize> = cl.iter().map(|c| c.representative.order()).collect();
        assert_eq!(orders, vec![1, 2, 3, 6]);
        assert_eq!(cl[1].members.len(), 3);
        assert_eq!(all_subgroups(&FiniteGroup::symmetric(4)).unwrap().len(), 30);
    }

    #[test]
    fn s3_subgroups_match_subset_closure() {
        // Oracle: every subset generated by at most two elements.
        let s3 = FiniteGroup::symmetric(3);
        let mut by_pairs: BTreeSet<Vec<usize>> = BTreeSet::new();
        for a in s3.elements() {
            for b in s3.elements() {
                by_pairs.insert(s3.generated(&[a, b]).elements().to_vec());
            }
        }
        let all: BTreeSet<Vec<usize>> = all_subgroups(&s3)
            .unwrap()
            .into_iter()
            .map(|h| h.elements().to_vec())
            .collect();
        assert_eq!(all, by_pairs);
    }

    #[test]
    fn subgroup_validation() {
        let s3 = FiniteGroup::symmetric(3);
        assert!(Subgroup::new(&s3, vec![0, 1, 2]).is_err() || s3.generated(&[1, 2]).order() == 3);
        let t = s3.find_permutation(&perm("(0 1)")).unwrap();
        assert!(Subgroup::new(&s3, vec![0, t]).is_ok());
        assert!(Subgroup::new(&s3, vec![t]).is_err());
    }

    #[test]
    fn subgroup_as_group_is_a_group() {
        let s4 = FiniteGroup::symmetric(4);
        for h in all_subgroups(&s4).unwrap() {
            let hg = s4.subgroup_as_group(&h);
            assert_eq!(hg.order(), h.order());
            hg.validate().unwrap();
        }
    }

    #[test]
    fn builtin_names() {
        for (name, order) in [
            ("Z5", 5),
            ("S4", 24),
            ("D4", 8),
            ("Z2xZ2", 4),
            ("S3xZ2", 12),
        ] {
            assert_eq!(FiniteGroup::builtin(name).unwrap().order(), order);
        }
        assert!(FiniteGroup::builtin("Q8").is_err());
    }

    #[test]
    fn from_table_roundtrip() {
        let s3 = FiniteGroup::symmetric(3);
        let table: Vec<u32> = (0..36).map(|i| s3.mul(i / 6, i % 6) as u32).collect();
        let g = FiniteGroup::from_table(6, table).unwrap();
        assert_eq!(g.conjugacy_classes().len(), 3);
        let mut bad: Vec<u32> = (0..36).map(|i| s3.mul(i / 6, i % 6) as u32).collect();
        bad[7] = 3;
        assert!(FiniteGroup::from_table(6, bad).is_err());
    }
}
