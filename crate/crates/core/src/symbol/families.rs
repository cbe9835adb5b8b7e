use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grp::isotypical_projector;
use crate::linalg::{CMat, C64};
use crate::symbol::{EquivariantBundle, SymbolSample};

/// Builtin symbol factories on the sample set of a bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolFamily {
    Identity,
    /// `1 − p_β` for an irreducible `β` of Γ; needs a constant bundle.
    KillIsotype {
        irrep: usize,
    },
    /// A random element of the commutant of each stabilizer.
    Random {
        seed: u64,
    },
    /// [`SymbolFamily::Random`] with the `rho`-isotype killed on sample
    /// orbits whose stabilizer has the given order.
    StratumDrop {
        seed: u64,
        stabilizer_order: usize,
        rho: usize,
    },
}

impl SymbolFamily {
    pub fn name(&self) -> String {
        match self {
            SymbolFamily::Identity => "identity".into(),
            SymbolFamily::KillIsotype { irrep } => format!("kill_isotype[{irrep}]"),
            SymbolFamily::Random { seed } => format!("random[{seed}]"),
            SymbolFamily::StratumDrop {
                seed,
                stabilizer_order,
                rho,
            } => format!("stratum_drop[{seed},|K|={stabilizer_order},rho={rho}]"),
        }
    }

    pub fn build(&self, bundle: &Arc<EquivariantBundle>) -> Result<SymbolSample> {
        let r = bundle.rank();
        match *self {
            SymbolFamily::Identity => {
                SymbolSample::from_fn(bundle.clone(), |_, _| CMat::identity(r, r))
            }
            SymbolFamily::KillIsotype { irrep } => {
                let rep = bundle
                    .global_rep()
                    .ok_or_else(|| Error::validation("kill_isotype needs a constant bundle"))?;
                let table = bundle.group().character_table()?;
                if irrep >= table.num_irreps() {
                    return Err(Error::validation(format!(
                        "group has no irreducible {irrep}"
                    )));
                }
                let value = CMat::identity(r, r) - isotypical_projector(rep, table, irrep);
                SymbolSample::from_fn(bundle.clone(), |_, _| value.clone())
            }
            SymbolFamily::Random { seed } => random(bundle, seed, None),
            SymbolFamily::StratumDrop {
                seed,
                stabilizer_order,
                rho,
            } => random(bundle, seed, Some((stabilizer_order, rho))),
        }
    }
}

fn random(
    bundle: &Arc<EquivariantBundle>,
    seed: u64,
    drop: Option<(usize, usize)>,
) -> Result<SymbolSample> {
    let r = bundle.rank();
    let g = bundle.group().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let set = bundle.samples().clone();
    let mut draws: Vec<CMat> = Vec::with_capacity(set.orbits().len());
    for _ in set.orbits() {
        draws.push(CMat::from_fn(r, r, |_, _| {
            C64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        }));
    }
    let mut values: Vec<Option<CMat>> = vec![None; set.len()];
    for (o, orbit) in set.orbits().iter().enumerate() {
        let s0 = orbit[0];
        let sample = &set.samples()[s0];
        let k = &sample.stabilizer;
        let rep = bundle.restricted_rep(sample.point, k)?;
        let mut v = CMat::zeros(r, r);
        for m in rep.matrices() {
            v += m * &draws[o] * m.adjoint();
        }
        v /= C64::new(k.order() as f64, 0.0);
        if let Some((order, rho)) = drop {
            if k.order() == order {
                let table = g.subgroup_as_group(k);
                let table = table.character_table()?;
                if rho < table.num_irreps() {
                    v = v * (CMat::identity(r, r) - isotypical_projector(&rep, table, rho));
                }
            }
        }
        values[s0] = Some(v);
    }
    SymbolSample::from_orbit_representatives(bundle.clone(), |s, _| {
        values[s]
            .clone()
            .expect("value at every orbit representative")
    })
}

/// The families used for cross-checks on a bundle: identity, every
/// kill-isotype (constant bundles), two random symbols and a stratum drop
/// for each stabilizer order and irreducible seen on orbit representatives.
pub fn standard_families(bundle: &EquivariantBundle) -> Result<Vec<SymbolFamily>> {
    standard_families_seeded(bundle, 0)
}

/// [`standard_families`] with random seeds `seed + 1`, `seed + 2` and
/// `seed + 3`.
pub fn standard_families_seeded(
    bundle: &EquivariantBundle,
    seed: u64,
) -> Result<Vec<SymbolFamily>> {
    let mut out = vec![SymbolFamily::Identity];
    if bundle.global_rep().is_some() {
        let n = bundle.group().character_table()?.num_irreps();
        out.extend((0..n).map(|irrep| SymbolFamily::KillIsotype { irrep }));
    }
    out.push(SymbolFamily::Random { seed: seed + 1 });
    out.push(SymbolFamily::Random { seed: seed + 2 });
    let set = bundle.samples();
    let mut orders: Vec<(usize, usize)> = Vec::new();
    for s in set.orbit_representatives() {
        let k = &set.samples()[s].stabilizer;
        let n = bundle
            .group()
            .subgroup_as_group(k)
            .character_table()?
            .num_irreps();
        for rho in 0..n {
            if !orders.contains(&(k.order(), rho)) {
                orders.push((k.order(), rho));
            }
        }
    }
    orders.sort_unstable();
    out.extend(
        orders
            .into_iter()
            .map(|(stabilizer_order, rho)| SymbolFamily::StratumDrop {
                seed: seed + 3,
                stabilizer_order,
                rho,
            }),
    );
    Ok(out)
}
