//! Decide α-ellipticity of the standard symbol families by the definition
//! and by the fixed-point reformulation.
use std::sync::Arc;

use isotypic::action::s3_through_z2_circle;
use isotypic::symbol::{
    alpha_elliptic, alpha_elliptic_fixed_point, elliptic, standard_families, EquivariantBundle,
};
use isotypic::MatrixRep;

fn main() -> isotypic::Result<()> {
    let model = Arc::new(s3_through_z2_circle(24)?);
    let g = model.group().clone();
    let table = g.character_table()?;
    let bundle = Arc::new(EquivariantBundle::constant(model, &MatrixRep::regular(&g))?);
    for family in standard_families(&bundle)? {
        let sigma = family.build(&bundle)?;
        let plain = elliptic(&sigma)?;
        print!("{:<32} plain {:<5}", family.name(), plain.is_elliptic());
        for a in 0..table.num_irreps() {
            let d = alpha_elliptic(&sigma, a)?;
            let f = alpha_elliptic_fixed_point(&sigma, a)?;
            assert_eq!(d.verdict, f.verdict);
            print!("  {} {:<5}", table.label(a), d.is_elliptic());
        }
        println!();
    }
    Ok(())
}
