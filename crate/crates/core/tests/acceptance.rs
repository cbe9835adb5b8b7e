//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isotypic::action::{builtin_model, free_dense, ModelParams, BUILTIN_MODELS};
use isotypic::cli::{run, RunConfig};
use isotypic::fredholm::{
    builtin_scenario, fredholm_probe, local_alpha_invertible, numerical_index, CircleFamily,
    Compression, ProbeOptions, ProbeVerdict, Scenario,
};
use isotypic::grp::{
    all_subgroups, induce_character, multiplicity, restrict_character, FiniteGroup, MatrixRep,
    Subgroup,
};
use isotypic::rep::pi_alpha_on_induced;
use isotypic::spectrum::FiniteSymbolAlgebra;
use isotypic::symbol::{
    alpha_elliptic, alpha_elliptic_fixed_point, elliptic, standard_families, EquivariantBundle,
};
use isotypic::{CMat, C64};

type Outcome = Result<String, String>;

const GROUPS: &[&str] = &[
    "Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "D4", "S3", "S4", "Z2xZ2", "S3xZ2",
];

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let e = t.elapsed();
    check(e <= limit, || {
        format!("{what} took {e:.1?}, limit {limit:?}")
    })?;
    Ok(e)
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for name in GROUPS {
        let g = FiniteGroup::builtin(name).map_err(|e| e.to_string())?;
        let table = g.character_table().map_err(|e| e.to_string())?;
        // Orthogonality recomputed from the raw rows and class sizes.
        let k = table.num_irreps();
        let order = g.order() as f64;
        for i in 0..k {
            for j in 0..k {
                let ip: C64 = g
                    .elements()
                    .map(|x| table.value(i, x) * table.value(j, x).conj())
                    .sum::<C64>()
                    / order;
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - C64::new(want, 0.0)).norm());
            }
        }
        let classes = table.classes();
        for a in 0..classes.len() {
            for b in 0..classes.len() {
                let (x, y) = (classes[a].representative, classes[b].representative);
                let s: C64 = (0..k)
                    .map(|i| table.value(i, x) * table.value(i, y).conj())
                    .sum();
                let want = if a == b {
                    order / classes[a].size as f64
                } else {
                    0.0
                };
                worst = worst.max((s - C64::new(want, 0.0)).norm());
            }
        }
        let sum: usize = table.degrees().iter().map(|d| d * d).sum();
        check(sum == g.order(), || {
            format!("{name}: sum of squared degrees {sum} != {}", g.order())
        })?;
    }
    check(worst <= 1e-8, || {
        format!("orthogonality defect {worst:.2e}")
    })?;
    let e = within(t, Duration::from_secs(5), "character tables")?;
    Ok(format!(
        "{} groups, max defect {worst:.1e}, {e:.2?}",
        GROUPS.len()
    ))
}

/// `Ind χ(g) = (1/|H|) Σ_{x ∈ G, x⁻¹gx ∈ H} χ(x⁻¹gx)`.
fn induced_by_definition(g: &FiniteGroup, h: &Subgroup, chi: &[C64]) -> Vec<C64> {
    g.elements()
        .map(|y| {
            let s: C64 = g
                .elements()
                .filter_map(|x| h.local_index(g.mul(g.inv(x), g.mul(y, x))).map(|i| chi[i]))
                .sum();
            s / h.order() as f64
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let mut cases = 0;
    for name in GROUPS {
        let g = FiniteGroup::builtin(name).map_err(|e| e.to_string())?;
        let table = g.character_table().map_err(|e| e.to_string())?;
        for h in all_subgroups(&g).map_err(|e| e.to_string())? {
            let hg = g.subgroup_as_group(&h);
            let htable = hg.character_table().map_err(|e| e.to_string())?;
            for c in 0..htable.num_irreps() {
                let chi = htable.character(c);
                let ind = induce_character(&chi, &h, &g).map_err(|e| e.to_string())?;
                let direct = induced_by_definition(&g, &h, chi.values());
                let dev = ind
                    .values()
                    .iter()
                    .zip(&direct)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                check(dev < 1e-9, || {
                    format!("{name}: induced character deviates by {dev:.2e}")
                })?;
                for p in 0..table.num_irreps() {
                    let psi = table.character(p);
                    let left = multiplicity(&ind, &psi).map_err(|e| e.to_string())?;
                    let res = restrict_character(&psi, &h).map_err(|e| e.to_string())?;
                    let right = multiplicity(&res, &chi).map_err(|e| e.to_string())?;
                    check(left == right, || {
                        format!("{name}, |H| = {}: <Ind chi{c}, psi{p}> = {left} but <chi{c}, Res psi{p}> = {right}", h.order())
                    })?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} (G, H, chi, psi) cases, zero failures"))
}

fn rank(m: &CMat) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > 1e-8 * top.max(1e-300)).count()
}

/// Kernel and image dimension of `T ↦ p_α (1 ⊗ T) p_α` on `End(β)^H`,
/// with the induced module written out coset by coset.
fn pi_alpha_oracle(g: &FiniteGroup, h: &Subgroup, beta: &[CMat], alpha: usize) -> (usize, usize) {
    let d = beta[0].nrows();
    let cosets = h.left_coset_representatives(g);
    let m = cosets.len();
    let coset_of = |x: usize| -> (usize, usize) {
        for (j, &c) in cosets.iter().enumerate() {
            if let Some(l) = h.local_index(g.mul(g.inv(c), x)) {
                return (j, l);
            }
        }
        unreachable!("cosets cover the group")
    };
    let induced: Vec<CMat> = g
        .elements()
        .map(|x| {
            let mut u = CMat::zeros(m * d, m * d);
            for (i, &c) in cosets.iter().enumerate() {
                let (j, l) = coset_of(g.mul(x, c));
                u.view_mut((j * d, i * d), (d, d)).copy_from(&beta[l]);
            }
            u
        })
        .collect();
    let table = g.character_table().unwrap();
    let deg = table.degree(alpha) as f64;
    let mut p = CMat::zeros(m * d, m * d);
    for x in g.elements() {
        p += &induced[x] * (table.value(alpha, x).conj() * deg / g.order() as f64);
    }
    // Orthonormal basis of the isotype.
    let svd = p.clone().svd(true, false);
    let u = svd.u.unwrap();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 0.5)
        .collect();
    let q = u.select_columns(&keep);
    // Commutant of β by averaging matrix units, reduced to a basis.
    let mut span = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let mut t = CMat::zeros(d, d);
            for bh in beta {
                t += bh.column(a) * bh.column(b).adjoint();
            }
            span.push(t * C64::new(1.0 / beta.len() as f64, 0.0));
        }
    }
    let stacked = CMat::from_fn(d * d, span.len(), |r, c| span[c][(r % d, r / d)]);
    let svd = stacked.svd(true, false);
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let basis_cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-8 * top)
        .collect();
    let basis = svd.u.unwrap().select_columns(&basis_cols);
    let dim = basis.ncols();
    if q.ncols() == 0 {
        return (dim, 0);
    }
    let r = q.ncols();
    let images = CMat::from_fn(r * r, dim, |row, col| {
        let t = CMat::from_fn(d, d, |i, j| basis[(i + d * j, col)]);
        let mut big = CMat::zeros(m * d, m * d);
        for i in 0..m {
            big.view_mut((i * d, i * d), (d, d)).copy_from(&t);
        }
        let c = q.adjoint() * big * &q;
        c[(row % r, row / r)]
    });
    let im = rank(&images);
    (dim - im, im)
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x2_7);
    let pool: Vec<FiniteGroup> = GROUPS
        .iter()
        .map(|n| FiniteGroup::builtin(n).unwrap())
        .filter(|g| g.order() <= 24)
        .collect();
    let subgroups: Vec<Vec<Subgroup>> = pool.iter().map(|g| all_subgroups(g).unwrap()).collect();
    let mut fixtures = 0;
    while fixtures < 200 {
        let gi = rng.random_range(0..pool.len());
        let g = &pool[gi];
        let h = &subgroups[gi][rng.random_range(0..subgroups[gi].len())];
        let hg = g.subgroup_as_group(h);
        let htable = hg.character_table().unwrap();
        let blocks = rng.random_range(1..=3.min(htable.num_irreps()));
        let mut irreps: Vec<usize> = (0..htable.num_irreps()).collect();
        let mut parts = Vec::new();
        for _ in 0..blocks {
            let j = irreps.remove(rng.random_range(0..irreps.len()));
            let k = rng.random_range(1..=3);
            let rep = MatrixRep::irreducible(&hg, htable, j).unwrap();
            parts.extend(std::iter::repeat_n(rep, k));
        }
        let beta = MatrixRep::direct_sum_all(&parts).unwrap();
        let alpha = rng.random_range(0..g.character_table().unwrap().num_irreps());
        let report = pi_alpha_on_induced(&beta, h, g, alpha, false).map_err(|e| e.to_string())?;
        let oracle = pi_alpha_oracle(g, h, beta.matrices(), alpha);
        check((report.kernel_dim, report.image_dim) == oracle, || {
            format!(
                "{} over |H| = {}, alpha {alpha}: formula {}/{}, oracle {}/{}",
                g.name().unwrap_or("G"),
                h.order(),
                report.kernel_dim,
                report.image_dim,
                oracle.0,
                oracle.1
            )
        })?;
        fixtures += 1;
    }
    let e = within(t, Duration::from_secs(60), "fixtures")?;
    Ok(format!(
        "{fixtures} random fixtures match the explicit ranks, {e:.1?}"
    ))
}

fn regular_bundle(name: &str) -> Arc<EquivariantBundle> {
    let m = Arc::new(builtin_model(name, &ModelParams::default()).unwrap());
    let g = m.group().clone();
    Arc::new(EquivariantBundle::constant(m, &MatrixRep::regular(&g)).unwrap())
}

fn criterion_4() -> Outcome {
    let mut cases = 0;
    for name in BUILTIN_MODELS {
        let alg = FiniteSymbolAlgebra::new(regular_bundle(name)).map_err(|e| e.to_string())?;
        let n = alg.bundle().group().character_table().unwrap().num_irreps();
        for a in 0..n {
            let xi = alg.xi(a).map_err(|e| format!("{name}, alpha {a}: {e}"))?;
            check(xi.xi_zero.iter().all(|p| xi.prim.contains(p)), || {
                format!("{name}, alpha {a}: Xi_0 not inside its closure")
            })?;
            cases += 1;
        }
    }
    Ok(format!(
        "{cases} (model, alpha) pairs, closure equals the direct criterion"
    ))
}

fn criterion_5() -> Outcome {
    let mut triples = 0;
    let mut elliptic_count = 0;
    for name in BUILTIN_MODELS {
        let b = regular_bundle(name);
        let n = b.group().character_table().unwrap().num_irreps();
        for fam in standard_families(&b).map_err(|e| e.to_string())? {
            let sigma = fam.build(&b).map_err(|e| e.to_string())?;
            for a in 0..n {
                let d = alpha_elliptic(&sigma, a).map_err(|e| e.to_string())?;
                let f = alpha_elliptic_fixed_point(&sigma, a).map_err(|e| e.to_string())?;
                check(d.verdict == f.verdict, || {
                    format!("{name}, {}, alpha {a}", fam.name())
                })?;
                elliptic_count += d.is_elliptic() as usize;
                triples += 1;
            }
        }
    }
    check(triples >= 100, || format!("only {triples} triples"))?;
    Ok(format!(
        "{triples} triples agree ({elliptic_count} elliptic)"
    ))
}

#[derive(Clone, Copy)]
struct CircleCase {
    elliptic: bool,
    probe: ProbeVerdict,
}

type Sweep = BTreeMap<(String, String, usize), CircleCase>;

fn sweep(names: &[&str], sweep: &mut Sweep) -> Result<usize, String> {
    let opts = ProbeOptions::default();
    let mut inconclusive = 0;
    for name in names {
        let sc = builtin_scenario(name).map_err(|e| e.to_string())?;
        for fam in sc.families().map_err(|e| e.to_string())? {
            let m = sc.model(&fam).map_err(|e| e.to_string())?;
            let sigma = m
                .symbol_sample(m.default_grid())
                .map_err(|e| e.to_string())?;
            for a in 0..sc.num_irreps().unwrap() {
                let elliptic = alpha_elliptic(&sigma, a)
                    .map_err(|e| e.to_string())?
                    .is_elliptic();
                let probe = fredholm_probe(&m, a, &opts)
                    .map_err(|e| e.to_string())?
                    .verdict;
                inconclusive += (probe == ProbeVerdict::Inconclusive) as usize;
                sweep.insert(
                    (name.to_string(), fam.name(), a),
                    CircleCase { elliptic, probe },
                );
            }
        }
    }
    Ok(inconclusive)
}

fn criterion_6(cache: &mut Sweep) -> Outcome {
    let t = Instant::now();
    let names = ["trivial_z2", "trivial_s3", "reflection", "s3_through_z2"];
    let inconclusive = sweep(&names, cache)?;
    check(inconclusive == 0, || {
        format!("{inconclusive} inconclusive probes")
    })?;
    let mut kinds = BTreeMap::new();
    for ((_, fam, a), case) in cache.iter() {
        let kind = fam.split('[').next().unwrap().to_string();
        *kinds.entry(kind).or_insert(0) += 1;
        check(
            (case.probe == ProbeVerdict::FredholmLike) == case.elliptic,
            || {
                format!(
                    "{fam}, alpha {a}: probe {:?}, alpha-elliptic {}",
                    case.probe, case.elliptic
                )
            },
        )?;
    }
    for k in ["identity", "vanish", "winding"] {
        check(kinds.contains_key(k), || format!("no {k} family"))?;
    }
    let e = within(t, Duration::from_secs(180), "circle probes")?;
    Ok(format!(
        "{} cases at N = 64, 128, 256, zero inconclusive, {e:.1?}",
        cache.len()
    ))
}

fn index_of(sc: &Scenario, fam: &CircleFamily, alpha: usize) -> Result<Option<i64>, String> {
    let m = sc.model(fam).map_err(|e| e.to_string())?;
    let opts = ProbeOptions {
        radii: vec![32, 48, 64],
        ..ProbeOptions::default()
    };
    Ok(numerical_index(&m, alpha, &opts)
        .map_err(|e| e.to_string())?
        .index)
}

fn doubled(sc: &Scenario) -> Scenario {
    Scenario::new(
        format!("{}_doubled", sc.name),
        sc.regime.clone(),
        sc.group.clone(),
        sc.action.clone(),
        sc.fiber.direct_sum(&sc.fiber),
    )
    .unwrap()
}

fn criterion_7() -> Outcome {
    let mut cases = 0;
    for name in ["trivial_z2", "trivial_s3"] {
        let sc = builtin_scenario(name).map_err(|e| e.to_string())?;
        let table = sc.group.character_table().unwrap();
        let n = table.num_irreps();
        for b in 0..n {
            let fam = CircleFamily::Winding { irrep: b, k: 1 };
            for a in 0..n {
                let want = if a == b { -(table.degree(b) as i64) } else { 0 };
                let got = index_of(&sc, &fam, a)?;
                check(got == Some(want), || {
                    format!(
                        "{name}, {}, alpha {a}: index {got:?}, want {want}",
                        fam.name()
                    )
                })?;
                cases += 1;
            }
        }
    }
    for name in ["trivial_z2", "trivial_s3", "reflection"] {
        let sc = builtin_scenario(name).map_err(|e| e.to_string())?;
        let twice = doubled(&sc);
        let n = sc.num_irreps().unwrap();
        for b in 0..n {
            let fam = CircleFamily::Winding { irrep: b, k: 1 };
            for a in 0..n {
                let one = index_of(&sc, &fam, a)?;
                let two = index_of(&twice, &fam, a)?;
                check(one.is_some() && two == one.map(|i| 2 * i), || {
                    format!(
                        "{name}, {}, alpha {a}: E gives {one:?}, E+E gives {two:?}",
                        fam.name()
                    )
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!(
        "{cases} winding indices: -1 per degree on the isotype, 0 off it, doubled on E+E"
    ))
}

fn criterion_8() -> Outcome {
    let mut cases = 0;
    for n in [2, 3, 4, 5, 6] {
        let m = Arc::new(free_dense(n, 4 * n).map_err(|e| e.to_string())?);
        let g = m.group().clone();
        for rep in [MatrixRep::regular(&g), MatrixRep::trivial(g.order(), 2)] {
            let b = Arc::new(EquivariantBundle::constant(m.clone(), &rep).unwrap());
            for fam in standard_families(&b).map_err(|e| e.to_string())? {
                let sigma = fam.build(&b).map_err(|e| e.to_string())?;
                let plain = elliptic(&sigma).map_err(|e| e.to_string())?.verdict;
                for a in 0..g.character_table().unwrap().num_irreps() {
                    let v = alpha_elliptic(&sigma, a)
                        .map_err(|e| e.to_string())?
                        .verdict;
                    check(v == plain, || {
                        format!("Z{n}, {}, alpha {a}: {v:?} vs plain {plain:?}", fam.name())
                    })?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!(
        "{cases} (n, family, alpha) cases equal plain ellipticity"
    ))
}

fn criterion_9(cache: &mut Sweep) -> Outcome {
    let extra: Vec<&str> = isotypic::fredholm::SCENARIO_NAMES
        .iter()
        .copied()
        .filter(|n| !cache.keys().any(|k| k.0 == *n))
        .collect();
    let inconclusive = sweep(&extra, cache)?;
    check(inconclusive == 0, || {
        format!("{inconclusive} inconclusive probes")
    })?;
    let mut agree = 0;
    for name in isotypic::fredholm::SCENARIO_NAMES {
        let sc = builtin_scenario(name).map_err(|e| e.to_string())?;
        for fam in sc.families().map_err(|e| e.to_string())? {
            let m = sc.model(&fam).map_err(|e| e.to_string())?;
            for a in 0..sc.num_irreps().unwrap() {
                let local = local_alpha_invertible(&m, a, 64, Compression::Multiplicity)
                    .map_err(|e| e.to_string())?;
                let probe = cache[&(name.to_string(), fam.name(), a)].probe;
                check(
                    local.all_windows == (probe == ProbeVerdict::FredholmLike),
                    || {
                        format!(
                            "{name}, {}, alpha {a}: local {}, probe {probe:?}",
                            fam.name(),
                            local.all_windows
                        )
                    },
                )?;
                agree += 1;
            }
        }
    }
    Ok(format!(
        "{agree} cases on all {} scenarios agree",
        isotypic::fredholm::SCENARIO_NAMES.len()
    ))
}

fn replay_configs() -> Vec<String> {
    let mut out: Vec<String> = BUILTIN_MODELS
        .iter()
        .map(|m| {
            format!("name = \"replay-{m}\"\nseed = 11\n[model]\nbuiltin = \"{m}\"\n[symbols]\n")
        })
        .collect();
    out.push(
        "name = \"replay-circle\"\nseed = 11\n[circle]\nscenario = \"trivial_s3\"\nradii = [24, 32, 48]\nlocal_radius = 64\n"
            .into(),
    );
    out
}

fn criterion_10() -> Outcome {
    let mut bytes = 0;
    let configs = replay_configs();
    for text in &configs {
        let cfg = RunConfig::from_toml(text).map_err(|e| e.to_string())?;
        let a = run(&cfg).map_err(|e| e.to_string())?.to_json();
        let b = run(&cfg).map_err(|e| e.to_string())?.to_json();
        check(a == b, || format!("{:?} differs between runs", cfg.name))?;
        bytes += a.len();
    }
    let dir = std::env::temp_dir().join(format!("isotypic-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, &configs[0]).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for i in 0..2 {
        let path = dir.join(format!("report{i}.json"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_isotypic"))
            .arg("run")
            .arg(&cfg)
            .arg("-o")
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        check(status.success(), || format!("binary exited with {status}"))?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    check(outputs[0] == outputs[1], || "binary reports differ".into())?;
    Ok(format!(
        "{} configurations replay byte-identically ({bytes} bytes), binary too",
        configs.len()
    ))
}

fn run_one(failed: &mut usize, i: usize, name: &str, f: impl FnOnce() -> Outcome) {
    let t = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let tag = if outcome.is_ok() { "PASS" } else { "FAIL" };
    *failed += outcome.is_err() as usize;
    let detail = outcome.unwrap_or_else(|e| e);
    println!(
        "criterion {i:>2} {tag} {name}: {detail} [{:.1?}]",
        t.elapsed()
    );
}

fn main() {
    let mut failed = 0;
    let mut cache = Sweep::new();
    run_one(&mut failed, 1, "character tables", criterion_1);
    run_one(&mut failed, 2, "Frobenius reciprocity", criterion_2);
    run_one(&mut failed, 3, "induced block kernels", criterion_3);
    run_one(
        &mut failed,
        4,
        "closure equals direct criterion",
        criterion_4,
    );
    run_one(
        &mut failed,
        5,
        "definition and fixed-point methods",
        criterion_5,
    );
    run_one(&mut failed, 6, "probe matches alpha-ellipticity", || {
        criterion_6(&mut cache)
    });
    run_one(&mut failed, 7, "winding index scaling", criterion_7);
    run_one(&mut failed, 8, "free action collapse", criterion_8);
    run_one(&mut failed, 9, "local invertibility on windows", || {
        criterion_9(&mut cache)
    });
    run_one(&mut failed, 10, "replay", criterion_10);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
