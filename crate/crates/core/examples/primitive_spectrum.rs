//! Primitive spectrum of the invariant symbol algebra and the closed sets
//! Ξ cut out by each isotype.
use std::sync::Arc;

use isotypic::action::{product, s3_through_z2_circle, ActionModel};
use isotypic::spectrum::{FiniteSymbolAlgebra, Node};
use isotypic::symbol::EquivariantBundle;
use isotypic::MatrixRep;

fn main() -> isotypic::Result<()> {
    for model in [s3_through_z2_circle(12)?, product(4)?] {
        show(model)?;
    }
    Ok(())
}

fn show(model: ActionModel) -> isotypic::Result<()> {
    println!("{}", model.name());
    let model = Arc::new(model);
    let g = model.group().clone();
    let bundle = Arc::new(EquivariantBundle::constant(model, &MatrixRep::regular(&g))?);
    let alg = FiniteSymbolAlgebra::new(bundle)?;
    alg.check_bijectivity()?;
    println!(
        "  {} Prim points, {} germs, invariant algebra of dimension {}",
        alg.prim().len(),
        alg.germs().len(),
        alg.invariant_dimension()
    );
    let table = g.character_table()?;
    for a in 0..table.num_irreps() {
        let xi = alg.xi(a)?;
        let k = alg.kernel_of_restriction(a)?;
        println!(
            "  {}: Xi0 has {} points, its closure {}, kernel of the restriction has dimension {}",
            table.label(a),
            xi.xi_zero.len(),
            xi.prim.len(),
            k.dimension
        );
        if let Some(&p) = k.blocks.first() {
            println!("    first point outside Xi: {}", alg.label(Node::Prim(p)));
        }
    }
    Ok(())
}
