use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{CircleOperatorModel, CircleSymbol};
use crate::action::CircleAction;
use crate::error::{Error, Result};
use crate::grp::{isotypical_projector, FiniteGroup, MatrixRep};
use crate::linalg::CMat;

pub const SCENARIO_NAMES: &[&str] = &[
    "trivial_z2",
    "trivial_s3",
    "reflection",
    "s3_through_z2",
    "free_z3",
];

/// Invariant symbols built from the isotypical projectors `p_β` of the fiber.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CircleFamily {
    Identity,
    /// `a(x, ±) = 1 − p_β`.
    Vanish {
        irrep: usize,
    },
    /// `a(x, +) = 1 − p_β`, `a(x, −) = 1`. Not invariant under reflections.
    HalfVanish {
        irrep: usize,
    },
    /// `a(x, +) = 1 − p_β + e^{ik n x} p_β` with `n` the rotation order of
    /// the action; `a(x, −)` is `1`, or the mirror image when Γ reflects.
    Winding {
        irrep: usize,
        k: i64,
    },
}

impl CircleFamily {
    pub fn name(&self) -> String {
        match self {
            CircleFamily::Identity => "identity".into(),
            CircleFamily::Vanish { irrep } => format!("vanish[{irrep}]"),
            CircleFamily::HalfVanish { irrep } => format!("half_vanish[{irrep}]"),
            CircleFamily::Winding { irrep, k } => format!("winding[{irrep},{k}]"),
        }
    }
}

/// A circle model with a fiber representation, ready to take symbols.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    /// Short description of the regime the scenario exercises.
    pub regime: String,
    pub group: Arc<FiniteGroup>,
    pub action: CircleAction,
    pub fiber: MatrixRep,
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        regime: impl Into<String>,
        group: Arc<FiniteGroup>,
        action: CircleAction,
        fiber: MatrixRep,
    ) -> Result<Self> {
        action.validate(&group)?;
        fiber.validate(&group)?;
        Ok(Scenario {
            name: name.into(),
            regime: regime.into(),
            group,
            action,
            fiber,
        })
    }

    pub fn reflects(&self) -> bool {
        self.action.elements.iter().any(|&(_, e)| e < 0)
    }

    pub fn num_irreps(&self) -> Result<usize> {
        Ok(self.group.character_table()?.num_irreps())
    }

    /// `p_β` on the fiber.
    pub fn projector(&self, irrep: usize) -> Result<CMat> {
        let table = self.group.character_table()?;
        if irrep >= table.num_irreps() {
            return Err(Error::validation(format!(
                "group has no irreducible {irrep}"
            )));
        }
        let mut p = isotypical_projector(&self.fiber, table, irrep);
        for z in p.iter_mut() {
            z.re = chop(z.re);
            z.im = chop(z.im);
        }
        Ok(p)
    }

    /// Irreducibles occurring in the fiber.
    pub fn fiber_irreps(&self) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for b in 0..self.num_irreps()? {
            if self.projector(b)?.norm() > 1e-9 {
                out.push(b);
            }
        }
        Ok(out)
    }

    pub fn symbol(&self, family: &CircleFamily) -> Result<CircleSymbol> {
        let n = self.fiber.dim();
        let id = CMat::identity(n, n);
        match *family {
            CircleFamily::Identity => Ok(CircleSymbol::identity(n)),
            CircleFamily::Vanish { irrep } => {
                Ok(CircleSymbol::constant(&id - self.projector(irrep)?))
            }
            CircleFamily::HalfVanish { irrep } => {
                if self.reflects() {
                    return Err(Error::validation(
                        "half_vanish is not invariant under reflections",
                    ));
                }
                CircleSymbol::new(
                    n,
                    vec![(0, &id - self.projector(irrep)?)],
                    vec![(0, id)],
                    vec![],
                )
            }
            CircleFamily::Winding { irrep, k } => {
                let p = self.projector(irrep)?;
                let j = k * self.action.n as i64;
                let rest = &id - &p;
                let plus = vec![(0, rest.clone()), (j, p.clone())];
                let minus = if self.reflects() {
                    vec![(0, rest), (-j, p)]
                } else {
                    vec![(0, id)]
                };
                CircleSymbol::new(n, plus, minus, vec![])
            }
        }
    }

    pub fn model(&self, family: &CircleFamily) -> Result<CircleOperatorModel> {
        CircleOperatorModel::new(
            format!("{}/{}", self.name, family.name()),
            self.group.clone(),
            self.action.clone(),
            self.fiber.clone(),
            self.symbol(family)?,
        )
    }

    /// Identity, then vanishing and winding families for each irreducible
    /// in the fiber.
    pub fn families(&self) -> Result<Vec<CircleFamily>> {
        let mut out = vec![CircleFamily::Identity];
        let present = self.fiber_irreps()?;
        out.extend(present.iter().map(|&irrep| CircleFamily::Vanish { irrep }));
        if !self.reflects() {
            out.extend(
                present
                    .iter()
                    .map(|&irrep| CircleFamily::HalfVanish { irrep }),
            );
        }
        out.extend(
            present
                .iter()
                .map(|&irrep| CircleFamily::Winding { irrep, k: 1 }),
        );
        Ok(out)
    }
}

fn chop(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-12 {
        r
    } else {
        x
    }
}

fn sum_of_irreps(g: &FiniteGroup) -> Result<MatrixRep> {
    MatrixRep::direct_sum_all(g.irrep_matrices()?)
}

fn sign_action(g: &FiniteGroup) -> Result<CircleAction> {
    let table = g.character_table()?;
    let sign = (0..table.num_irreps())
        .find(|&i| {
            table.degree(i) == 1
                && i != 0
                && g.elements().all(|x| table.value(i, x).im.abs() < 1e-9)
        })
        .ok_or_else(|| Error::validation("group has no real nontrivial linear character"))?;
    let elements = g
        .elements()
        .map(|x| (0, if table.value(sign, x).re > 0.0 { 1 } else { -1 }))
        .collect();
    Ok(CircleAction { n: 1, elements })
}

/// The builtin circle scenarios.
pub fn builtin_scenario(name: &str) -> Result<Scenario> {
    match name {
        "trivial_z2" => {
            let g = Arc::new(FiniteGroup::cyclic(2));
            let fiber = sum_of_irreps(&g)?;
            Scenario::new(
                name,
                "trivial action, abelian",
                g.clone(),
                CircleAction::trivial(2),
                fiber,
            )
        }
        "trivial_s3" => {
            let g = Arc::new(FiniteGroup::symmetric(3));
            let fiber = sum_of_irreps(&g)?;
            Scenario::new(
                name,
                "trivial action, nonabelian",
                g.clone(),
                CircleAction::trivial(6),
                fiber,
            )
        }
        "reflection" => {
            let g = Arc::new(FiniteGroup::cyclic(2));
            let action = sign_action(&g)?;
            let fiber = sum_of_irreps(&g)?;
            Scenario::new(name, "reflection with two fixed points", g, action, fiber)
        }
        "s3_through_z2" => {
            let g = Arc::new(FiniteGroup::symmetric(3));
            let action = sign_action(&g)?;
            let fiber = sum_of_irreps(&g)?;
            Scenario::new(name, "non-faithful action, isotropy A3", g, action, fiber)
        }
        "free_z3" => {
            let g = Arc::new(FiniteGroup::cyclic(3));
            let elements = g
                .elements()
                .map(|x| (g.permutation(x).map_or(0, |p| p.apply(0)), 1))
                .collect();
            let action = CircleAction { n: 3, elements };
            let fiber = MatrixRep::trivial(3, 1);
            Scenario::new(name, "free rotation", g, action, fiber)
        }
        _ => Err(Error::Unknown {
            kind: "scenario",
            name: name.to_string(),
        }),
    }
}

pub fn scenarios() -> Result<Vec<Scenario>> {
    SCENARIO_NAMES.iter().map(|n| builtin_scenario(n)).collect()
}
