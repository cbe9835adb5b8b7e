//! Kernel of the restriction to an isotype on an induced endomorphism
//! algebra, by the block formula and by explicit ranks.
use isotypic::grp::{all_subgroups, MatrixRep};
use isotypic::rep::pi_alpha_on_induced;
use isotypic::FiniteGroup;

fn main() -> isotypic::Result<()> {
    let g = FiniteGroup::symmetric(3);
    let table = g.character_table()?;
    for h in all_subgroups(&g)? {
        let hg = g.subgroup_as_group(&h);
        let ht = hg.character_table()?;
        // β = every irreducible of H once, the first one twice.
        let mut parts = vec![MatrixRep::irreducible(&hg, ht, 0)?];
        for j in 0..ht.num_irreps() {
            parts.push(MatrixRep::irreducible(&hg, ht, j)?);
        }
        let beta = MatrixRep::direct_sum_all(&parts)?;
        for alpha in 0..table.num_irreps() {
            let r = pi_alpha_on_induced(&beta, &h, &g, alpha, true)?;
            println!(
                "|H| = {}  alpha {}  kernel {:>2}  image {:>2}  H-disjoint blocks {:?}",
                h.order(),
                table.label(alpha),
                r.kernel_dim,
                r.image_dim,
                r.disjoint
            );
        }
    }
    Ok(())
}
