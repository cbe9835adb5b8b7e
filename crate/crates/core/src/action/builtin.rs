use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::action::{ActionModel, PointSpec};
use crate::error::{Error, Result};
use crate::grp::FiniteGroup;

/// Names accepted by [`builtin_model`].
pub const BUILTIN_MODELS: &[&str] = &[
    "trivial_action",
    "free_dense",
    "reflection_circle",
    "s3_through_z2_circle",
    "product",
];

/// Parameters of builtin models; unused fields are ignored.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub group: Option<String>,
    pub n: Option<usize>,
    pub n_samples: Option<usize>,
    pub fiber_dim: Option<usize>,
}

impl ModelParams {
    pub fn samples(n_samples: usize) -> Self {
        ModelParams {
            n_samples: Some(n_samples),
            ..Default::default()
        }
    }
}

/// A group acting on the circle `R/2πZ` by `x ↦ ε_g x + 2π k_g / n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircleAction {
    pub n: usize,
    /// `(k_g, ε_g)` per element id.
    pub elements: Vec<(usize, i8)>,
}

impl CircleAction {
    pub fn trivial(order: usize) -> Self {
        CircleAction {
            n: 1,
            elements: vec![(0, 1); order],
        }
    }

    pub fn rotation(&self, g: usize) -> usize {
        self.elements[g].0
    }

    pub fn reflection(&self, g: usize) -> i8 {
        self.elements[g].1
    }

    /// Image of grid point `j` on a grid of `m` points.
    pub fn act_grid(&self, g: usize, j: usize, m: usize) -> usize {
        let (k, eps) = self.elements[g];
        let base = if eps > 0 { j } else { (m - j) % m };
        (base + k * m / self.n) % m
    }

    /// Check the homomorphism property on the level of circle maps.
    pub fn validate(&self, g: &FiniteGroup) -> Result<()> {
        if self.elements.len() != g.order() {
            return Err(Error::validation(
                "circle action needs one entry per element",
            ));
        }
        for a in g.elements() {
            for b in g.elements() {
                let (ka, ea) = self.elements[a];
                let (kb, eb) = self.elements[b];
                let (kab, eab) = self.elements[g.mul(a, b)];
                let k = (ka as i64 + ea as i64 * kb as i64).rem_euclid(self.n as i64) as usize;
                if eab != ea * eb || kab % self.n != k {
                    return Err(Error::validation(format!(
                        "circle action is not a homomorphism at ({}, {})",
                        g.element_label(a),
                        g.element_label(b)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A circle grid of `m` points with the given action. Points with the
/// smallest stabilizer are principal.
pub fn circle_model(
    name: &str,
    group: Arc<FiniteGroup>,
    circle: CircleAction,
    m: usize,
) -> Result<ActionModel> {
    circle.validate(&group)?;
    let reflects = circle.elements.iter().any(|&(_, e)| e < 0);
    let step = if reflects { 2 * circle.n } else { circle.n };
    if m == 0 || m % step != 0 {
        return Err(Error::validation(format!(
            "n_samples must be a positive multiple of {step}"
        )));
    }
    let transport: Vec<Vec<(usize, DMatrix<f64>)>> = group
        .elements()
        .map(|g| {
            let eps = circle.reflection(g) as f64;
            (0..m)
                .map(|j| (circle.act_grid(g, j, m), DMatrix::from_element(1, 1, eps)))
                .collect()
        })
        .collect();
    let min_stab = (0..m)
        .map(|j| {
            group
                .elements()
                .filter(|&g| circle.act_grid(g, j, m) == j)
                .count()
        })
        .min()
        .unwrap_or(1);
    let points = (0..m)
        .map(|j| {
            let stab = group
                .elements()
                .filter(|&g| circle.act_grid(g, j, m) == j)
                .count();
            PointSpec {
                label: format!("x{j}"),
                component: 0,
                principal: stab == min_stab,
            }
        })
        .collect();
    Ok(
        ActionModel::new(name, group, 1, points, vec!["circle".into()], transport)?
            .with_circle(circle),
    )
}

/// Γ acting trivially on `n_points` points with a `fiber_dim`-dimensional
/// cotangent fiber. For `fiber_dim = 1` the points are a circle grid.
pub fn trivial_action(
    group: Arc<FiniteGroup>,
    n_points: usize,
    fiber_dim: usize,
) -> Result<ActionModel> {
    if fiber_dim == 1 && n_points % 2 == 0 {
        let order = group.order();
        return circle_model(
            "trivial_action",
            group,
            CircleAction::trivial(order),
            n_points,
        );
    }
    if n_points == 0 {
        return Err(Error::validation("n_points must be positive"));
    }
    let transport = group
        .elements()
        .map(|_| {
            (0..n_points)
                .map(|j| (j, DMatrix::identity(fiber_dim, fiber_dim)))
                .collect()
        })
        .collect();
    let points = (0..n_points)
        .map(|j| PointSpec {
            label: format!("x{j}"),
            component: 0,
            principal: true,
        })
        .collect();
    ActionModel::new(
        "trivial_action",
        group,
        fiber_dim,
        points,
        vec!["M".into()],
        transport,
    )
}

/// `Z/n` rotating the circle by `2π/n`: a free action.
pub fn free_dense(n: usize, n_samples: usize) -> Result<ActionModel> {
    let group = Arc::new(FiniteGroup::cyclic(n));
    let elements = group
        .elements()
        .map(|g| (group.permutation(g).map(|p| p.apply(0)).unwrap_or(0), 1))
        .collect();
    circle_model("free_dense", group, CircleAction { n, elements }, n_samples)
}

/// `Z/2` acting on the circle by `x ↦ −x`, with fixed points `0` and `π`.
pub fn reflection_circle(n_samples: usize) -> Result<ActionModel> {
    let group = Arc::new(FiniteGroup::cyclic(2));
    let circle = CircleAction {
        n: 1,
        elements: vec![(0, 1), (0, -1)],
    };
    circle_model("reflection_circle", group, circle, n_samples)
}

fn parity(p: &crate::grp::Permutation) -> i8 {
    let n = p.degree();
    let mut seen = vec![false; n];
    let mut sign = 1i8;
    for s in 0..n {
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = p.apply(i);
            len += 1;
        }
        if len > 0 && len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// `S₃` acting on the circle through its sign character: transpositions
/// reflect, `A₃` acts trivially.
pub fn s3_through_z2_circle(n_samples: usize) -> Result<ActionModel> {
    let group = Arc::new(FiniteGroup::symmetric(3));
    let elements = group
        .elements()
        .map(|g| (0, parity(group.permutation(g).unwrap())))
        .collect();
    circle_model(
        "s3_through_z2_circle",
        group,
        CircleAction { n: 1, elements },
        n_samples,
    )
}

/// `Z/2 × Z/2` acting on an `m × m` torus grid, the factors reflecting one
/// coordinate each.
pub fn product(m: usize) -> Result<ActionModel> {
    if m < 2 || m % 2 != 0 {
        return Err(Error::validation(
            "product grid size must be even and at least 2",
        ));
    }
    let group = Arc::new(FiniteGroup::klein_four());
    let signs: Vec<(i8, i8)> = group
        .elements()
        .map(|g| {
            let p = group.permutation(g).unwrap();
            (
                if p.apply(0) != 0 { -1 } else { 1 },
                if p.apply(2) != 2 { -1 } else { 1 },
            )
        })
        .collect();
    let reflect = |eps: i8, i: usize| if eps > 0 { i } else { (m - i) % m };
    let transport = group
        .elements()
        .map(|g| {
            let (ea, eb) = signs[g];
            let fiber =
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ea as f64, eb as f64]));
            (0..m * m)
                .map(|id| {
                    let (i, j) = (id / m, id % m);
                    (reflect(ea, i) * m + reflect(eb, j), fiber.clone())
                })
                .collect()
        })
        .collect();
    let special = |i: usize| i == 0 || i == m / 2;
    let points = (0..m * m)
        .map(|id| {
            let (i, j) = (id / m, id % m);
            PointSpec {
                label: format!("({i},{j})"),
                component: 0,
                principal: !special(i) && !special(j),
            }
        })
        .collect();
    ActionModel::new("product", group, 2, points, vec!["torus".into()], transport)
}

/// Disjoint union of two models of the same group; components are kept
/// apart.
pub fn disjoint_union(a: &ActionModel, b: &ActionModel) -> Result<ActionModel> {
    if a.group().order() != b.group().order() || a.fiber_dim() != b.fiber_dim() {
        return Err(Error::validation(
            "disjoint union needs the same group and fiber dimension",
        ));
    }
    for x in a.group().elements() {
        for y in a.group().elements() {
            if a.group().mul(x, y) != b.group().mul(x, y) {
                return Err(Error::validation("disjoint union needs identical groups"));
            }
        }
    }
    let na = a.num_points();
    let nc = a.components().len();
    let mut points: Vec<PointSpec> = a
        .points()
        .iter()
        .map(|p| PointSpec {
            label: p.label.clone(),
            component: p.component,
            principal: p.principal,
        })
        .collect();
    points.extend(b.points().iter().map(|p| PointSpec {
        label: format!("{}'", p.label),
        component: p.component + nc,
        principal: p.principal,
    }));
    let transport = a
        .group()
        .elements()
        .map(|g| {
            let mut row: Vec<(usize, DMatrix<f64>)> = (0..na)
                .map(|x| (a.act(g, x), a.fiber_map(g, x).clone()))
                .collect();
            row.extend((0..b.num_points()).map(|x| (b.act(g, x) + na, b.fiber_map(g, x).clone())));
            row
        })
        .collect();
    let mut components = a.components().to_vec();
    components.extend(b.components().iter().map(|c| format!("{c}'")));
    ActionModel::new(
        format!("{}+{}", a.name(), b.name()),
        a.group().clone(),
        a.fiber_dim(),
        points,
        components,
        transport,
    )
}

/// Builtin models by name.
pub fn builtin_model(name: &str, params: &ModelParams) -> Result<ActionModel> {
    let samples = params.n_samples.unwrap_or(24);
    match name {
        "trivial_action" => {
            let g = FiniteGroup::builtin(params.group.as_deref().unwrap_or("Z2"))?;
            trivial_action(Arc::new(g), samples, params.fiber_dim.unwrap_or(1))
        }
        "free_dense" => free_dense(params.n.unwrap_or(3), samples),
        "reflection_circle" => reflection_circle(samples),
        "s3_through_z2_circle" => s3_through_z2_circle(samples),
        "product" => product(params.n_samples.unwrap_or(4)),
        _ => Err(Error::Unknown {
            kind: "model",
            name: name.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_build() {
        for name in BUILTIN_MODELS {
            let m = builtin_model(name, &ModelParams::default()).unwrap();
            m.validate().unwrap();
        }
        assert!(matches!(
            builtin_model("torus", &ModelParams::default()),
            Err(Error::Unknown { .. })
        ));
    }

    #[test]
    fn reflection_has_two_fixed_points() {
        let m = reflection_circle(16).unwrap();
        let fixed: Vec<usize> = (0..16)
            .filter(|&x| m.points()[x].stabilizer.order() == 2)
            .collect();
        assert_eq!(fixed, vec![0, 8]);
    }

    #[test]
    fn trivial_points() {
        let m = trivial_action(Arc::new(FiniteGroup::cyclic(2)), 8, 1).unwrap();
        assert_eq!(m.num_points(), 8);
        let m = trivial_action(Arc::new(FiniteGroup::cyclic(2)), 3, 2).unwrap();
        assert_eq!(m.fiber_dim(), 2);
    }

    #[test]
    fn union_components() {
        let a = trivial_action(Arc::new(FiniteGroup::cyclic(2)), 4, 1).unwrap();
        let b = reflection_circle(8).unwrap();
        let u = disjoint_union(&a, &b).unwrap();
        assert_eq!(u.components().len(), 2);
        assert_eq!(u.minimal_isotropy(0).unwrap().order(), 2);
        assert_eq!(u.minimal_isotropy(1).unwrap().order(), 1);
    }

    #[test]
    fn bad_circle_action_rejected() {
        let g = FiniteGroup::cyclic(3);
        let c = CircleAction {
            n: 3,
            elements: vec![(0, 1), (1, 1), (1, 1)],
        };
        assert!(c.validate(&g).is_err());
    }
}
