//! TOML run configurations. Complex entries are `[re, im]` pairs and
//! matrices are lists of rows.

use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::action::{
    builtin_model, trivial_action, ActionModel, CircleAction, ModelParams, PointSpec,
};
use crate::error::{Error, Result};
use crate::fredholm::{
    builtin_scenario, CircleFamily, CircleSymbol, Compression, ProbeOptions, Scenario,
};
use crate::grp::{FiniteGroup, MatrixRep, Permutation, DEFAULT_ORDER_CAP};
use crate::linalg::{c, CMat};
use crate::symbol::SymbolFamily;

pub type ComplexMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    /// `Z<n>`, `D<n>`, `S<n>`, `Z2xZ2`, `S3xZ2`, `trivial`.
    Builtin(String),
    Permutations {
        generators: Vec<String>,
        degree: usize,
        #[serde(default)]
        name: Option<String>,
    },
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Builtin(name) => FiniteGroup::builtin(name),
            GroupSpec::Permutations {
                generators,
                degree,
                name,
            } => {
                let perms = generators
                    .iter()
                    .map(|s| Permutation::parse_cycles(s, *degree))
                    .collect::<Result<Vec<_>>>()?;
                let g = FiniteGroup::from_permutations(&perms, DEFAULT_ORDER_CAP)?;
                Ok(match name {
                    Some(n) => g.with_name(n.clone()),
                    None => g,
                })
            }
        }
    }
}

/// Look up a group element by its label or, for permutation groups, by
/// cycle notation.
pub fn find_element(g: &FiniteGroup, label: &str) -> Result<usize> {
    if let Some(x) = g.elements().find(|&x| g.element_label(x) == label) {
        return Ok(x);
    }
    if let Some(p) = g.permutation(0) {
        if let Ok(q) = Permutation::parse_cycles(label, p.degree()) {
            if let Some(x) = g.find_permutation(&q) {
                return Ok(x);
            }
        }
    }
    Err(Error::validation(format!("no group element `{label}`")))
}

/// Extend values on generators to the whole group breadth-first, with
/// `compose(v(x), v(s)) = v(x·s)`. Relations are left to the caller's
/// validation.
fn extend<T: Clone>(
    g: &FiniteGroup,
    gens: &[(usize, T)],
    identity: T,
    compose: impl Fn(&T, &T) -> T,
) -> Result<Vec<T>> {
    let mut vals: Vec<Option<T>> = vec![None; g.order()];
    vals[0] = Some(identity);
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (s, v) in gens {
            let y = g.mul(x, *s);
            if vals[y].is_none() {
                vals[y] = Some(compose(vals[x].as_ref().expect("visited"), v));
                queue.push_back(y);
            }
        }
    }
    vals.into_iter()
        .map(|v| v.ok_or_else(|| Error::validation("generators do not generate the group")))
        .collect()
}

pub fn complex_matrix(rows: &ComplexMatrix, what: &str) -> Result<CMat> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if n == 0 || rows.iter().any(|r| r.len() != m) {
        return Err(Error::validation(format!(
            "{what}: matrix rows are empty or ragged"
        )));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::validation(format!(
            "{what}: matrix has non-finite entries"
        )));
    }
    Ok(CMat::from_fn(n, m, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn real_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if n == 0 || rows.iter().any(|r| r.len() != m) {
        return Err(Error::validation(format!(
            "{what}: matrix rows are empty or ragged"
        )));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorMatrix {
    pub element: String,
    pub matrix: ComplexMatrix,
}

/// A representation: `"regular"`, `"trivial"`, `"sum_of_irreps"`,
/// `"permutation"`, `{ irreps = [..] }`, `{ trivial = d }` or generator
/// images.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RepSpec {
    Named(String),
    Irreps { irreps: Vec<usize> },
    Trivial { trivial: usize },
    Generators { generators: Vec<GeneratorMatrix> },
}

impl Default for RepSpec {
    fn default() -> Self {
        RepSpec::Named("regular".into())
    }
}

impl RepSpec {
    pub fn build(&self, g: &FiniteGroup) -> Result<MatrixRep> {
        match self {
            RepSpec::Named(name) => match name.as_str() {
                "regular" => Ok(MatrixRep::regular(g)),
                "trivial" => Ok(MatrixRep::trivial(g.order(), 1)),
                "sum_of_irreps" => MatrixRep::direct_sum_all(g.irrep_matrices()?),
                "permutation" => MatrixRep::permutation(g)
                    .ok_or_else(|| Error::validation("group has no permutation realization")),
                _ => Err(Error::Unknown {
                    kind: "representation",
                    name: name.clone(),
                }),
            },
            RepSpec::Irreps { irreps } => {
                let all = g.irrep_matrices()?;
                let parts = irreps
                    .iter()
                    .map(|&i| {
                        all.get(i).cloned().ok_or_else(|| {
                            Error::validation(format!("group has no irreducible {i}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                MatrixRep::direct_sum_all(&parts)
            }
            RepSpec::Trivial { trivial } => {
                if *trivial == 0 {
                    return Err(Error::validation(
                        "trivial representation needs positive dimension",
                    ));
                }
                Ok(MatrixRep::trivial(g.order(), *trivial))
            }
            RepSpec::Generators { generators } => {
                let images = generators
                    .iter()
                    .map(|gm| {
                        let e = find_element(g, &gm.element)?;
                        let m = complex_matrix(&gm.matrix, &format!("image of {}", gm.element))?;
                        Ok((e, m))
                    })
                    .collect::<Result<Vec<_>>>()?;
                MatrixRep::from_generators(g, &images)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub label: String,
    #[serde(default)]
    pub component: usize,
    #[serde(default = "yes")]
    pub principal: bool,
}

fn yes() -> bool {
    true
}

/// Action of one generator: point images and cotangent fiber maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorAction {
    pub element: String,
    pub images: Vec<usize>,
    /// One real `fiber_dim × fiber_dim` matrix per point; identity when
    /// omitted.
    #[serde(default)]
    pub fiber: Option<Vec<Vec<Vec<f64>>>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// A builtin model name; the remaining builtin fields are its
    /// parameters.
    pub builtin: Option<String>,
    pub n: Option<usize>,
    pub n_samples: Option<usize>,
    pub fiber_dim: Option<usize>,
    pub name: Option<String>,
    #[serde(default)]
    pub components: Vec<String>,
    #[serde(default)]
    pub points: Vec<PointConfig>,
    #[serde(default)]
    pub generators: Vec<GeneratorAction>,
}

impl ModelConfig {
    pub fn build(&self, group: Option<&GroupSpec>) -> Result<ActionModel> {
        if let Some(name) = &self.builtin {
            if !self.points.is_empty() || !self.generators.is_empty() {
                return Err(Error::validation(
                    "a builtin model takes no points or generators",
                ));
            }
            if name == "trivial_action" {
                if let Some(spec) = group {
                    return trivial_action(
                        Arc::new(spec.build()?),
                        self.n_samples.unwrap_or(24),
                        self.fiber_dim.unwrap_or(1),
                    );
                }
            } else if group.is_some() {
                return Err(Error::validation(format!(
                    "builtin model {name} fixes its own group"
                )));
            }
            let params = ModelParams {
                group: None,
                n: self.n,
                n_samples: self.n_samples,
                fiber_dim: self.fiber_dim,
            };
            return builtin_model(name, &params);
        }
        let spec = group.ok_or_else(|| Error::validation("an explicit model needs a [group]"))?;
        let g = Arc::new(spec.build()?);
        let fiber_dim = self.fiber_dim.unwrap_or(1);
        let npts = self.points.len();
        let components = if self.components.is_empty() {
            vec!["main".to_string()]
        } else {
            self.components.clone()
        };
        type Transport = Vec<(usize, DMatrix<f64>)>;
        let mut gens: Vec<(usize, Transport)> = Vec::new();
        for ga in &self.generators {
            let e = find_element(&g, &ga.element)?;
            if ga.images.len() != npts {
                return Err(Error::validation(format!(
                    "generator {} lists {} images for {npts} points",
                    ga.element,
                    ga.images.len()
                )));
            }
            let maps = match &ga.fiber {
                Some(ms) => {
                    if ms.len() != npts {
                        return Err(Error::validation(format!(
                            "generator {} needs one fiber map per point",
                            ga.element
                        )));
                    }
                    ms.iter()
                        .enumerate()
                        .map(|(x, m)| {
                            real_matrix(m, &format!("fiber map of {} at point {x}", ga.element))
                        })
                        .collect::<Result<Vec<_>>>()?
                }
                None => vec![DMatrix::identity(fiber_dim, fiber_dim); npts],
            };
            gens.push((e, ga.images.iter().copied().zip(maps).collect()));
        }
        for (_, t) in &gens {
            if t.iter().any(|(y, _)| *y >= npts) {
                return Err(Error::validation("point image out of range"));
            }
        }
        let identity: Transport = (0..npts)
            .map(|x| (x, DMatrix::identity(fiber_dim, fiber_dim)))
            .collect();
        let transport = extend(&g, &gens, identity, |tx, ts| {
            ts.iter()
                .map(|(y, ms)| {
                    let (z, mx) = &tx[*y];
                    (*z, mx * ms)
                })
                .collect()
        })?;
        let points = self
            .points
            .iter()
            .map(|p| PointSpec {
                label: p.label.clone(),
                component: p.component,
                principal: p.principal,
            })
            .collect();
        ActionModel::new(
            self.name.clone().unwrap_or_else(|| "explicit".into()),
            g,
            fiber_dim,
            points,
            components,
            transport,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleConfig {
    #[serde(default)]
    pub rep: RepSpec,
}

/// `"all"` or a list of irreducible indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSelection {
    Keyword(String),
    List(Vec<usize>),
}

impl Default for AlphaSelection {
    fn default() -> Self {
        AlphaSelection::Keyword("all".into())
    }
}

impl AlphaSelection {
    pub fn resolve(&self, num_irreps: usize) -> Result<Vec<usize>> {
        match self {
            AlphaSelection::Keyword(k) if k == "all" => Ok((0..num_irreps).collect()),
            AlphaSelection::Keyword(k) => Err(Error::validation(format!(
                "alpha selection `{k}` is not `all` or a list"
            ))),
            AlphaSelection::List(v) => {
                if let Some(a) = v.iter().find(|&&a| a >= num_irreps) {
                    return Err(Error::validation(format!("group has no irreducible {a}")));
                }
                let mut out = v.clone();
                out.sort_unstable();
                out.dedup();
                Ok(out)
            }
        }
    }
}

/// `"standard"` or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Families<T> {
    Keyword(String),
    List(Vec<T>),
}

impl<T> Default for Families<T> {
    fn default() -> Self {
        Families::Keyword("standard".into())
    }
}

impl<T: Clone> Families<T> {
    pub fn resolve(&self, standard: impl FnOnce() -> Result<Vec<T>>) -> Result<Vec<T>> {
        match self {
            Families::Keyword(k) if k == "standard" => standard(),
            Families::Keyword(k) => Err(Error::validation(format!(
                "family selection `{k}` is not `standard` or a list"
            ))),
            Families::List(v) => Ok(v.clone()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolsConfig {
    #[serde(default)]
    pub families: Families<SymbolFamily>,
    /// Relative threshold for block invertibility.
    pub threshold: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierCoefficient {
    pub freq: i64,
    pub matrix: ComplexMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleSymbolConfig {
    pub name: String,
    pub plus: Vec<FourierCoefficient>,
    pub minus: Vec<FourierCoefficient>,
    #[serde(default)]
    pub lower: Vec<FourierCoefficient>,
    #[serde(default)]
    pub order: i32,
}

impl CircleSymbolConfig {
    pub fn build(&self, dim: usize) -> Result<CircleSymbol> {
        let conv = |cs: &[FourierCoefficient], side: &str| {
            cs.iter()
                .map(|fc| {
                    Ok((
                        fc.freq,
                        complex_matrix(
                            &fc.matrix,
                            &format!("symbol {} ({side}, frequency {})", self.name, fc.freq),
                        )?,
                    ))
                })
                .collect::<Result<Vec<_>>>()
        };
        CircleSymbol::new(
            dim,
            conv(&self.plus, "+")?,
            conv(&self.minus, "-")?,
            conv(&self.lower, "lower")?,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleGenerator {
    pub element: String,
    pub rotation: usize,
    #[serde(default = "plus_one")]
    pub reflection: i8,
}

fn plus_one() -> i8 {
    1
}

fn default_radii() -> Vec<usize> {
    ProbeOptions::default().radii
}

fn default_eps() -> f64 {
    ProbeOptions::default().eps
}

fn default_local_radius() -> usize {
    64
}

fn default_compression() -> Compression {
    Compression::Multiplicity
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleConfig {
    /// A builtin scenario; otherwise `n`, `generators` and `fiber` describe
    /// one over the run's `[group]`.
    pub scenario: Option<String>,
    pub n: Option<usize>,
    #[serde(default)]
    pub generators: Vec<CircleGenerator>,
    pub fiber: Option<RepSpec>,
    pub name: Option<String>,
    pub regime: Option<String>,
    #[serde(default)]
    pub families: Families<CircleFamily>,
    #[serde(default)]
    pub symbols: Vec<CircleSymbolConfig>,
    #[serde(default = "default_radii")]
    pub radii: Vec<usize>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_local_radius")]
    pub local_radius: usize,
    #[serde(default = "default_compression")]
    pub compression: Compression,
    /// Skip the local invertibility check.
    #[serde(default)]
    pub skip_local: bool,
}

impl CircleConfig {
    pub fn for_scenario(name: &str) -> Self {
        CircleConfig {
            scenario: Some(name.to_string()),
            n: None,
            generators: Vec::new(),
            fiber: None,
            name: None,
            regime: None,
            families: Families::default(),
            symbols: Vec::new(),
            radii: default_radii(),
            eps: default_eps(),
            local_radius: default_local_radius(),
            compression: default_compression(),
            skip_local: false,
        }
    }

    pub fn probe_options(&self) -> ProbeOptions {
        ProbeOptions {
            radii: self.radii.clone(),
            eps: self.eps,
            compression: self.compression,
        }
    }

    pub fn scenario(&self, group: Option<&GroupSpec>) -> Result<Scenario> {
        if let Some(name) = &self.scenario {
            if self.n.is_some() || !self.generators.is_empty() || self.fiber.is_some() {
                return Err(Error::validation(
                    "a builtin scenario takes no n, generators or fiber",
                ));
            }
            return builtin_scenario(name);
        }
        let spec = group
            .ok_or_else(|| Error::validation("an explicit circle scenario needs a [group]"))?;
        let g = Arc::new(spec.build()?);
        let n = self
            .n
            .ok_or_else(|| Error::validation("an explicit circle scenario needs n"))?;
        if n == 0 {
            return Err(Error::validation("rotation order n must be positive"));
        }
        let gens = self
            .generators
            .iter()
            .map(|cg| {
                if cg.reflection != 1 && cg.reflection != -1 {
                    return Err(Error::validation(format!(
                        "reflection of {} must be 1 or -1",
                        cg.element
                    )));
                }
                Ok((
                    find_element(&g, &cg.element)?,
                    (cg.rotation % n, cg.reflection),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let elements = extend(&g, &gens, (0usize, 1i8), |&(kx, ex), &(ks, es)| {
            let k = (kx as i64 + ex as i64 * ks as i64).rem_euclid(n as i64) as usize;
            (k, ex * es)
        })?;
        let action = CircleAction { n, elements };
        let fiber = self.fiber.clone().unwrap_or_default().build(&g)?;
        Scenario::new(
            self.name.clone().unwrap_or_else(|| "circle".into()),
            self.regime.clone().unwrap_or_else(|| "explicit".into()),
            g,
            action,
            fiber,
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub alphas: AlphaSelection,
    pub group: Option<GroupSpec>,
    pub model: Option<ModelConfig>,
    pub bundle: Option<BundleConfig>,
    pub symbols: Option<SymbolsConfig>,
    /// Compute the primitive spectrum of the model's symbol algebra.
    #[serde(default = "yes")]
    pub spectrum: bool,
    pub circle: Option<CircleConfig>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.model.is_none() && self.circle.is_none() {
            return Err(Error::validation(
                "config needs a [model] or a [circle] section",
            ));
        }
        if self.model.is_none() && (self.bundle.is_some() || self.symbols.is_some()) {
            return Err(Error::validation("[bundle] and [symbols] need a [model]"));
        }
        if let Some(circle) = &self.circle {
            circle.probe_options().validate()?;
        }
        if let Some(t) = self.symbols.as_ref().and_then(|s| s.threshold) {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::validation(format!(
                    "threshold {t} is outside (0, 1)"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_builtin_run() {
        let cfg = RunConfig::from_toml(
            r#"
            name = "demo"
            seed = 3
            alphas = [1, 0]
            [model]
            builtin = "reflection_circle"
            n_samples = 12
            [symbols]
            families = [{ kind = "identity" }, { kind = "random", seed = 9 }]
            [circle]
            scenario = "reflection"
            radii = [16, 24, 32]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.alphas.resolve(2).unwrap(), vec![0, 1]);
        let m = cfg.model.as_ref().unwrap().build(None).unwrap();
        assert_eq!(m.num_points(), 12);
        let fams = cfg
            .symbols
            .unwrap()
            .families
            .resolve(|| Ok(vec![]))
            .unwrap();
        assert_eq!(fams[1], SymbolFamily::Random { seed: 9 });
        assert_eq!(cfg.circle.unwrap().radii, vec![16, 24, 32]);
    }

    #[test]
    fn explicit_model_from_generators() {
        let cfg = RunConfig::from_toml(
            r#"
            group = { generators = ["(0 1)"], degree = 2 }
            [model]
            name = "fold"
            points = [{ label = "p", principal = false }, { label = "q" }, { label = "q'" }]
            generators = [{ element = "(0 1)", images = [0, 2, 1], fiber = [[[-1.0]], [[1.0]], [[1.0]]] }]
            "#,
        )
        .unwrap();
        let m = cfg
            .model
            .as_ref()
            .unwrap()
            .build(cfg.group.as_ref())
            .unwrap();
        assert_eq!(m.points()[0].stabilizer.order(), 2);
        assert_eq!(m.points()[1].stabilizer.order(), 1);
    }

    #[test]
    fn explicit_circle_scenario() {
        let cfg = RunConfig::from_toml(
            r#"
            group = "Z4"
            [circle]
            n = 4
            generators = [{ element = "(0 1 2 3)", rotation = 1 }]
            fiber = "trivial"
            "#,
        )
        .unwrap();
        let sc = cfg
            .circle
            .as_ref()
            .unwrap()
            .scenario(cfg.group.as_ref())
            .unwrap();
        assert_eq!(sc.action.elements.iter().filter(|e| e.0 == 0).count(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::from_toml("name = 'x'").is_err());
        assert!(RunConfig::from_toml("[model]\nbuiltin = 'product'\ncolour = 1").is_err());
        let bad = RunConfig::from_toml(
            r#"
            group = "Z2"
            [model]
            builtin = "trivial_action"
            [bundle]
            rep = { generators = [{ element = "(0 1)", matrix = [[[1.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]] }] }
            "#,
        )
        .unwrap();
        let g = bad.group.as_ref().unwrap().build().unwrap();
        let err = bad.bundle.unwrap().rep.build(&g).unwrap_err();
        assert!(
            matches!(err, Error::Validation(ref m) if m.contains("image of (0 1)")),
            "{err}"
        );
    }
}
