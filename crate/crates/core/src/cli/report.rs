//! Run orchestration and the versioned JSON report.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use super::config::RunConfig;
use crate::action::ActionModel;
use crate::error::{Error, Result};
use crate::fredholm::{
    fredholm_probe, index_after_probe, local_alpha_invertible, CircleFamily, CircleOperatorModel,
    Compression, IndexLevel, ProbeLevel, ProbeVerdict, Scenario,
};
use crate::grp::{isotypical_projector, rounded_pair, FiniteGroup, Subgroup};
use crate::linalg::smallest_singular_value;
use crate::spectrum::FiniteSymbolAlgebra;
use crate::symbol::{
    alpha_elliptic_fixed_point_with, alpha_elliptic_with, elliptic, standard_families_seeded,
    CheckOptions, EllipticityReport, EquivariantBundle, SymbolSample, Verdict, DEFAULT_THRESHOLD,
};

pub const REPORT_FORMAT: &str = "isotypic-report/1";

/// Round to six significant digits so reports stay readable and diffable.
pub fn sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

pub fn subgroup_label(g: &FiniteGroup, h: &Subgroup) -> String {
    if h.order() == 1 {
        return "1".into();
    }
    if h.order() == g.order() {
        return "G".into();
    }
    let elems: Vec<String> = h.elements().iter().map(|&x| g.element_label(x)).collect();
    format!("{{{}}}", elems.join(", "))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Consistent,
    Inconclusive,
    Inconsistent,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Consistent => 0,
            Status::Inconclusive => 2,
            Status::Inconsistent => 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassSummary {
    pub representative: String,
    pub size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupSummary {
    pub name: String,
    pub order: usize,
    pub classes: Vec<ClassSummary>,
    pub degrees: Vec<usize>,
    /// Rows of the character table, entries as `[re, im]`.
    pub characters: Vec<Vec<[f64; 2]>>,
}

impl GroupSummary {
    pub fn new(g: &FiniteGroup) -> Result<Self> {
        let t = g.character_table()?;
        Ok(GroupSummary {
            name: g.name().unwrap_or("G").to_string(),
            order: g.order(),
            classes: t
                .classes()
                .iter()
                .map(|cl| ClassSummary {
                    representative: g.element_label(cl.representative),
                    size: cl.size,
                })
                .collect(),
            degrees: t.degrees().to_vec(),
            characters: (0..t.num_irreps())
                .map(|i| t.row(i).iter().map(|&z| rounded_pair(z)).collect())
                .collect(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitTypeSummary {
    pub stabilizer: String,
    pub order: usize,
    pub points: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentSummary {
    pub name: String,
    pub minimal_isotropy: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelSummary {
    pub name: String,
    pub points: usize,
    pub fiber_dim: usize,
    pub components: Vec<ComponentSummary>,
    pub orbit_types: Vec<OrbitTypeSummary>,
    pub samples: usize,
    pub sample_orbits: usize,
}

impl ModelSummary {
    pub fn new(m: &ActionModel) -> Result<Self> {
        let g = m.group();
        let set = m.sample_set()?;
        Ok(ModelSummary {
            name: m.name().to_string(),
            points: m.num_points(),
            fiber_dim: m.fiber_dim(),
            components: (0..m.components().len())
                .map(|c| {
                    Ok(ComponentSummary {
                        name: m.components()[c].clone(),
                        minimal_isotropy: subgroup_label(g, &m.minimal_isotropy(c)?),
                    })
                })
                .collect::<Result<_>>()?,
            orbit_types: m
                .orbit_types()
                .into_iter()
                .map(|ot| OrbitTypeSummary {
                    stabilizer: subgroup_label(g, &ot.subgroup),
                    order: ot.subgroup.order(),
                    points: ot
                        .points
                        .iter()
                        .map(|&x| m.points()[x].label.clone())
                        .collect(),
                })
                .collect(),
            samples: set.len(),
            sample_orbits: set.orbits().len(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessSummary {
    pub point: String,
    pub covector: Vec<f64>,
    pub stabilizer: String,
    pub rho: Option<usize>,
    pub block_dim: usize,
    pub smallest_singular_value: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EllipticitySummary {
    pub verdict: Verdict,
    pub threshold: f64,
    pub min_singular_value: Option<f64>,
    pub checked_pairs: usize,
    pub raw_pairs: usize,
    pub refined_pairs: usize,
    pub vanishing_components: Vec<usize>,
    pub witnesses: Vec<WitnessSummary>,
}

impl EllipticitySummary {
    fn new(m: &ActionModel, r: &EllipticityReport) -> Self {
        let g = m.group();
        EllipticitySummary {
            verdict: r.verdict,
            threshold: sig(r.threshold),
            min_singular_value: r.min_singular_value.map(sig),
            checked_pairs: r.checked_pairs,
            raw_pairs: r.raw_pairs,
            refined_pairs: r.refined_pairs,
            vanishing_components: r.vanishing_components.clone(),
            witnesses: r
                .witnesses
                .iter()
                .map(|w| WitnessSummary {
                    point: m.points()[w.point].label.clone(),
                    covector: w.covector.iter().map(|&x| sig(x)).collect(),
                    stabilizer: subgroup_label(g, &w.stabilizer),
                    rho: w.rho,
                    block_dim: w.block_dim,
                    smallest_singular_value: w.smallest_singular_value.map(sig),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolCheck {
    pub family: String,
    pub plain: Verdict,
    pub definition: EllipticitySummary,
    pub fixed_point: EllipticitySummary,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSummary {
    pub xi_zero: Vec<String>,
    pub xi: Vec<String>,
    pub kernel_blocks: Vec<String>,
    pub kernel_dimension: usize,
    pub complement_dimension: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaSection {
    pub alpha: usize,
    pub label: String,
    pub degree: usize,
    pub symbols: Vec<SymbolCheck>,
    pub spectrum: Option<SpectrumSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumOverview {
    pub prim: Vec<String>,
    pub germs: Vec<String>,
    pub invariant_dimension: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalSummary {
    pub radius: usize,
    pub all_windows: bool,
    /// `[left, right]` residual per window, relative to `‖Φ‖`.
    pub residuals: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CircleEntry {
    pub family: String,
    pub alpha: usize,
    pub alpha_elliptic: Verdict,
    pub fixed_point: Verdict,
    pub probe: ProbeVerdict,
    pub levels: Vec<ProbeLevel>,
    pub index: Option<i64>,
    pub index_levels: Vec<IndexLevel>,
    pub local: Option<LocalSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CircleSection {
    pub scenario: String,
    pub regime: String,
    pub group: String,
    pub fiber_dim: usize,
    pub radii: Vec<usize>,
    pub eps: f64,
    pub compression: Compression,
    pub entries: Vec<CircleEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyCheck {
    pub name: String,
    pub statement: String,
    pub passed: bool,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl ConsistencyCheck {
    fn new(name: &str, statement: &str) -> Self {
        ConsistencyCheck {
            name: name.into(),
            statement: statement.into(),
            passed: true,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn case(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.passed = false;
            self.failures.push(what());
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub format: &'static str,
    pub version: &'static str,
    pub name: String,
    pub seed: u64,
    pub group: GroupSummary,
    pub model: Option<ModelSummary>,
    pub spectrum: Option<SpectrumOverview>,
    pub alphas: Vec<AlphaSection>,
    pub circle: Option<CircleSection>,
    pub consistency: Vec<ConsistencyCheck>,
    pub status: Status,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

fn character_check(g: &FiniteGroup) -> Result<ConsistencyCheck> {
    let t = g.character_table()?;
    let mut c = ConsistencyCheck::new(
        "character_orthogonality",
        "irreducible characters are orthonormal, classes are orthogonal and the squared degrees sum to the group order",
    );
    let (row, col) = t.orthogonality_defects();
    c.case(row <= 1e-8 && col <= 1e-8, || {
        format!("row defect {row:.2e}, column defect {col:.2e}")
    });
    let sum: usize = t.degrees().iter().map(|d| d * d).sum();
    c.case(sum == g.order(), || {
        format!("sum of squared degrees {sum} != {}", g.order())
    });
    Ok(c)
}

/// With Γ acting trivially, α-ellipticity is invertibility of the symbol on
/// the α-isotype of each fiber.
fn trivial_action_verdict(sigma: &SymbolSample, alpha: usize, rel: f64) -> Result<bool> {
    let bundle = sigma.bundle();
    let g = bundle.group();
    let table = g.character_table()?;
    let threshold = rel * sigma.scale();
    for (s, sample) in bundle.samples().samples().iter().enumerate() {
        let rep = bundle.fiber_rep(sample.point);
        let p = isotypical_projector(&rep, table, alpha);
        let q = crate::linalg::projector_basis(&p);
        if q.ncols() == 0 {
            continue;
        }
        let block = q.adjoint() * sigma.value(s) * &q;
        let sv = smallest_singular_value(&block);
        if !(sv >= threshold && sv > 0.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

struct ModelPart {
    summary: ModelSummary,
    spectrum: Option<SpectrumOverview>,
    alphas: Vec<AlphaSection>,
    checks: Vec<ConsistencyCheck>,
}

fn run_model(cfg: &RunConfig, model: ActionModel, alphas: &[usize]) -> Result<ModelPart> {
    let model = Arc::new(model);
    let g = model.group().clone();
    let table = g.character_table()?;
    let summary = ModelSummary::new(&model)?;
    let rep = cfg
        .bundle
        .as_ref()
        .map(|b| b.rep.clone())
        .unwrap_or_default()
        .build(&g)?;
    let bundle = Arc::new(EquivariantBundle::constant(model.clone(), &rep)?);

    let mut sections: Vec<AlphaSection> = alphas
        .iter()
        .map(|&a| AlphaSection {
            alpha: a,
            label: table.label(a),
            degree: table.degree(a),
            symbols: Vec::new(),
            spectrum: None,
        })
        .collect();
    let mut checks = Vec::new();

    if let Some(sym) = &cfg.symbols {
        let opts = CheckOptions {
            relative_threshold: sym.threshold.unwrap_or(DEFAULT_THRESHOLD),
        };
        let families = sym
            .families
            .resolve(|| standard_families_seeded(&bundle, cfg.seed))?;
        let mut agree = ConsistencyCheck::new(
            "methods_agree",
            "the definition of alpha-ellipticity and the fixed-point reformulation give the same verdict",
        );
        let mut plain_implies = ConsistencyCheck::new(
            "plain_implies_alpha",
            "an elliptic symbol is alpha-elliptic for every alpha",
        );
        let free = model.points().iter().all(|p| p.stabilizer.order() == 1);
        let trivial = model
            .points()
            .iter()
            .all(|p| p.stabilizer.order() == g.order());
        let mut free_check = ConsistencyCheck::new(
            "free_action_collapse",
            "for a free action alpha-ellipticity coincides with ellipticity for every alpha",
        );
        let mut trivial_check = ConsistencyCheck::new(
            "trivial_action_rule",
            "for a trivial action alpha-ellipticity is invertibility on the alpha-isotype of every fiber",
        );
        for fam in &families {
            let sigma = fam.build(&bundle)?;
            let plain = elliptic(&sigma)?.verdict;
            for (i, &a) in alphas.iter().enumerate() {
                let def = alpha_elliptic_with(&sigma, a, opts)?;
                let fp = alpha_elliptic_fixed_point_with(&sigma, a, opts)?;
                let name = fam.name();
                agree.case(def.verdict == fp.verdict, || format!("{name}, alpha {a}"));
                plain_implies.case(!plain.is_elliptic() || def.is_elliptic(), || {
                    format!("{name}, alpha {a}")
                });
                if free {
                    free_check.case(def.verdict == plain, || format!("{name}, alpha {a}"));
                }
                if trivial {
                    let direct = trivial_action_verdict(&sigma, a, opts.relative_threshold)?;
                    trivial_check
                        .case(direct == def.is_elliptic(), || format!("{name}, alpha {a}"));
                }
                sections[i].symbols.push(SymbolCheck {
                    family: name,
                    plain,
                    definition: EllipticitySummary::new(&model, &def),
                    fixed_point: EllipticitySummary::new(&model, &fp),
                });
            }
        }
        checks.push(agree);
        checks.push(plain_implies);
        if free {
            checks.push(free_check);
        }
        if trivial {
            checks.push(trivial_check);
        }
    }

    let mut overview = None;
    if cfg.spectrum {
        let alg = FiniteSymbolAlgebra::new(bundle.clone())?;
        let mut bij = ConsistencyCheck::new(
            "spectrum_blocks",
            "Prim points correspond to the simple blocks of the invariant symbol algebra",
        );
        let res = alg.check_bijectivity();
        bij.case(res.is_ok(), || {
            res.as_ref()
                .err()
                .map(|e| e.to_string())
                .unwrap_or_default()
        });
        checks.push(bij);
        let mut closure = ConsistencyCheck::new(
            "closure_equals_direct",
            "the closure of the principal part of Xi equals the set given by the direct association criterion",
        );
        for (i, &a) in alphas.iter().enumerate() {
            match alg.kernel_of_restriction(a) {
                Ok(k) => {
                    let xi = alg.xi(a)?;
                    closure.case(true, String::new);
                    let lab = |ps: &[usize]| -> Vec<String> {
                        ps.iter()
                            .map(|&p| alg.label(crate::spectrum::Node::Prim(p)))
                            .collect()
                    };
                    sections[i].spectrum = Some(SpectrumSummary {
                        xi_zero: lab(&xi.xi_zero),
                        xi: lab(&xi.prim),
                        kernel_blocks: lab(&k.blocks),
                        kernel_dimension: k.dimension,
                        complement_dimension: k.complement_dimension,
                    });
                }
                Err(Error::Integrity(msg)) => closure.case(false, || format!("alpha {a}: {msg}")),
                Err(e) => return Err(e),
            }
        }
        checks.push(closure);
        overview = Some(SpectrumOverview {
            prim: (0..alg.prim().len())
                .map(|p| alg.label(crate::spectrum::Node::Prim(p)))
                .collect(),
            germs: (0..alg.germs().len())
                .map(|j| alg.label(crate::spectrum::Node::Germ(j)))
                .collect(),
            invariant_dimension: alg.invariant_dimension(),
        });
    }
    Ok(ModelPart {
        summary,
        spectrum: overview,
        alphas: sections,
        checks,
    })
}

struct CirclePart {
    section: CircleSection,
    checks: Vec<ConsistencyCheck>,
    inconclusive: bool,
}

fn run_circle(cfg: &RunConfig, scenario: &Scenario, alphas: &[usize]) -> Result<CirclePart> {
    let circle = cfg.circle.as_ref().expect("circle section present");
    let opts = circle.probe_options();
    let families = circle.families.resolve(|| scenario.families())?;
    let mut models: Vec<(String, CircleOperatorModel)> = families
        .iter()
        .map(|f: &CircleFamily| Ok((f.name(), scenario.model(f)?)))
        .collect::<Result<_>>()?;
    for sc in &circle.symbols {
        let sym = sc.build(scenario.fiber.dim())?;
        let m = CircleOperatorModel::new(
            format!("{}/{}", scenario.name, sc.name),
            scenario.group.clone(),
            scenario.action.clone(),
            scenario.fiber.clone(),
            sym,
        )?
        .with_order(sc.order);
        models.push((sc.name.clone(), m));
    }

    let mut fill = ConsistencyCheck::new(
        "isotypes_fill_truncation",
        "the isotypical subspaces of the truncated space add up to its full dimension",
    );
    if let Some((_, m)) = models.first() {
        let r = opts.radii[0];
        let n_irreps = scenario.num_irreps()?;
        let total: usize = (0..n_irreps)
            .map(|a| m.alpha_basis(a, r, Compression::Isotype).map(|b| b.len()))
            .sum::<Result<usize>>()?;
        let want = (2 * r + 1) * scenario.fiber.dim();
        fill.case(total == want, || format!("{total} != {want} at N = {r}"));
    }
    let mut matches = ConsistencyCheck::new(
        "probe_matches_alpha_ellipticity",
        "the truncation probe reads the alpha-part as Fredholm exactly when the symbol is alpha-elliptic",
    );
    let mut local_check = ConsistencyCheck::new(
        "local_matches_probe",
        "local alpha-invertibility on every window holds exactly when the alpha-part is Fredholm",
    );
    let mut agree = ConsistencyCheck::new(
        "methods_agree",
        "the definition of alpha-ellipticity and the fixed-point reformulation give the same verdict",
    );
    let mut inconclusive = false;
    let mut entries = Vec::new();
    for (name, m) in &models {
        let sigma = m.symbol_sample(m.default_grid())?;
        for &a in alphas {
            let def = crate::symbol::alpha_elliptic(&sigma, a)?;
            let fp = crate::symbol::alpha_elliptic_fixed_point(&sigma, a)?;
            agree.case(def.verdict == fp.verdict, || format!("{name}, alpha {a}"));
            let probe = fredholm_probe(m, a, &opts)?;
            let idx = index_after_probe(m, a, &opts, &probe)?;
            match probe.verdict {
                ProbeVerdict::Inconclusive => inconclusive = true,
                v => matches.case(
                    (v == ProbeVerdict::FredholmLike) == def.is_elliptic(),
                    || format!("{name}, alpha {a}: probe {v:?}, symbol {:?}", def.verdict),
                ),
            }
            let local = if circle.skip_local {
                None
            } else {
                let l = local_alpha_invertible(m, a, circle.local_radius, circle.compression)?;
                if probe.verdict != ProbeVerdict::Inconclusive {
                    local_check.case(
                        l.all_windows == (probe.verdict == ProbeVerdict::FredholmLike),
                        || {
                            format!(
                                "{name}, alpha {a}: local {}, probe {:?}",
                                l.all_windows, probe.verdict
                            )
                        },
                    );
                }
                Some(LocalSummary {
                    radius: l.radius,
                    all_windows: l.all_windows,
                    residuals: l
                        .windows
                        .iter()
                        .map(|w| [sig(w.left_residual), sig(w.right_residual)])
                        .collect(),
                })
            };
            entries.push(CircleEntry {
                family: name.clone(),
                alpha: a,
                alpha_elliptic: def.verdict,
                fixed_point: fp.verdict,
                probe: probe.verdict,
                levels: probe
                    .levels
                    .into_iter()
                    .map(|mut l| {
                        l.norm = sig(l.norm);
                        l.next_singular_value = l.next_singular_value.map(sig);
                        l.profile = l.profile.into_iter().map(sig).collect();
                        l
                    })
                    .collect(),
                index: idx.index,
                index_levels: idx.levels,
                local,
            });
        }
    }
    let mut checks = vec![fill, agree, matches];
    if !circle.skip_local {
        checks.push(local_check);
    }
    Ok(CirclePart {
        section: CircleSection {
            scenario: scenario.name.clone(),
            regime: scenario.regime.clone(),
            group: scenario.group.name().unwrap_or("G").to_string(),
            fiber_dim: scenario.fiber.dim(),
            radii: opts.radii.clone(),
            eps: opts.eps,
            compression: opts.compression,
            entries,
        },
        checks,
        inconclusive,
    })
}

/// Run everything a configuration asks for. Deterministic in the config.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    // Resolve every input before any computation.
    let model = cfg
        .model
        .as_ref()
        .map(|m| m.build(cfg.group.as_ref()))
        .transpose()?;
    let scenario = cfg
        .circle
        .as_ref()
        .map(|c| c.scenario(cfg.group.as_ref()))
        .transpose()?;
    if let (Some(m), Some(s)) = (&model, &scenario) {
        if m.group().order() != s.group.order() {
            return Err(Error::validation(
                "the model and the circle scenario use different groups",
            ));
        }
    }
    let group: Arc<FiniteGroup> = match (&model, &scenario) {
        (Some(m), _) => m.group().clone(),
        (None, Some(s)) => s.group.clone(),
        (None, None) => unreachable!("config shape is checked on load"),
    };
    let alphas = cfg.alphas.resolve(group.character_table()?.num_irreps())?;

    let mut checks = vec![character_check(&group)?];
    let mut report = RunReport {
        format: REPORT_FORMAT,
        version: env!("CARGO_PKG_VERSION"),
        name: cfg.name.clone().unwrap_or_else(|| "run".into()),
        seed: cfg.seed,
        group: GroupSummary::new(&group)?,
        model: None,
        spectrum: None,
        alphas: Vec::new(),
        circle: None,
        consistency: Vec::new(),
        status: Status::Consistent,
    };
    if let Some(m) = model {
        let part = run_model(cfg, m, &alphas)?;
        report.model = Some(part.summary);
        report.spectrum = part.spectrum;
        report.alphas = part.alphas;
        checks.extend(part.checks);
    }
    let mut inconclusive = false;
    if let Some(s) = &scenario {
        let part = run_circle(cfg, s, &alphas)?;
        report.circle = Some(part.section);
        checks.extend(part.checks);
        inconclusive = part.inconclusive;
    }
    report.status = if checks.iter().any(|c| !c.passed) {
        Status::Inconsistent
    } else if inconclusive {
        Status::Inconclusive
    } else {
        Status::Consistent
    };
    report.consistency = checks;
    Ok(report)
}

fn verdict_word(v: Verdict) -> &'static str {
    if v.is_elliptic() {
        "elliptic"
    } else {
        "not elliptic"
    }
}

/// Plain-text summary of a report.
pub fn render_text(r: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} ({}), group {} of order {}",
        r.name, r.format, r.group.name, r.group.order
    );
    if let Some(m) = &r.model {
        let _ = writeln!(
            out,
            "model {}: {} points, {} samples in {} orbits",
            m.name, m.points, m.samples, m.sample_orbits
        );
        for c in &m.components {
            let _ = writeln!(
                out,
                "  component {}: minimal isotropy {}",
                c.name, c.minimal_isotropy
            );
        }
    }
    if let Some(s) = &r.spectrum {
        let _ = writeln!(
            out,
            "spectrum: {} Prim points, {} germs, invariant algebra of dimension {}",
            s.prim.len(),
            s.germs.len(),
            s.invariant_dimension
        );
    }
    for a in &r.alphas {
        let _ = writeln!(out, "alpha {} {}", a.alpha, a.label);
        for s in &a.symbols {
            let _ = writeln!(
                out,
                "  {:<40} {:<13} fixed point {:<13} plain {}",
                s.family,
                verdict_word(s.definition.verdict),
                verdict_word(s.fixed_point.verdict),
                verdict_word(s.plain)
            );
        }
        if let Some(sp) = &a.spectrum {
            let _ = writeln!(
                out,
                "  Xi: {} Prim points, {} principal; kernel dimension {}",
                sp.xi.len(),
                sp.xi_zero.len(),
                sp.kernel_dimension
            );
        }
    }
    if let Some(c) = &r.circle {
        let _ = writeln!(
            out,
            "circle scenario {} ({}), N = {:?}, eps = {}",
            c.scenario, c.regime, c.radii, c.eps
        );
        for e in &c.entries {
            let counts: Vec<String> = e.levels.iter().map(|l| l.count.to_string()).collect();
            let index = e.index.map_or("-".to_string(), |i| i.to_string());
            let local = e
                .local
                .as_ref()
                .map_or("-", |l| if l.all_windows { "ok" } else { "fails" });
            let _ = writeln!(
                out,
                "  {:<24} alpha {} {:<13} probe {:<17} counts [{}] index {:>3} local {}",
                e.family,
                e.alpha,
                verdict_word(e.alpha_elliptic),
                format!("{:?}", e.probe),
                counts.join(","),
                index,
                local
            );
        }
    }
    for c in &r.consistency {
        let _ = writeln!(
            out,
            "check {:<32} {} ({} cases)",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.cases
        );
        for f in c.failures.iter().take(5) {
            let _ = writeln!(out, "    {f}");
        }
    }
    let _ = writeln!(out, "status: {:?}", r.status);
    out
}
