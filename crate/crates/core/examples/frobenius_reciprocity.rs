//! Induce the characters of A3 up to S3 and check reciprocity, then build
//! the induced module explicitly.
use isotypic::grp::{induce_character, multiplicity, restrict_character, Permutation};
use isotypic::rep::{check_induced, InducedModule};
use isotypic::{FiniteGroup, MatrixRep};

fn main() -> isotypic::Result<()> {
    let s3 = FiniteGroup::symmetric(3);
    let r = s3
        .find_permutation(&Permutation::parse_cycles("(0 1 2)", 3)?)
        .expect("3-cycle in S3");
    let a3 = s3.generated(&[r]);
    let ha = s3.subgroup_as_group(&a3);
    let (table, htable) = (s3.character_table()?, ha.character_table()?);

    for c in 0..htable.num_irreps() {
        let ind = induce_character(&htable.character(c), &a3, &s3)?;
        for p in 0..table.num_irreps() {
            let up = multiplicity(&ind, &table.character(p))?;
            let down = multiplicity(
                &restrict_character(&table.character(p), &a3)?,
                &htable.character(c),
            )?;
            println!(
                "<Ind {}, {}> = {up}   <{}, Res {}> = {down}",
                htable.label(c),
                table.label(p),
                htable.label(c),
                table.label(p)
            );
        }
    }

    // The nontrivial A3 character induces the two-dimensional irreducible.
    let omega = MatrixRep::irreducible(&ha, htable, 1)?;
    let ind = InducedModule::new(&omega, &a3, &s3)?;
    println!(
        "Ind omega: dimension {}, character deviation {:.1e}, decomposition {:?}",
        ind.total_dim(),
        check_induced(&ind, &s3)?,
        isotypic::grp::decompose_rep(ind.action(), &s3)?
    );
    Ok(())
}
