//! Character tables of the builtin groups.
use isotypic::FiniteGroup;

fn main() -> isotypic::Result<()> {
    for name in ["Z4", "S3", "D4", "S4", "S3xZ2"] {
        let g = FiniteGroup::builtin(name)?;
        let table = g.character_table()?;
        let (row, col) = table.orthogonality_defects();
        println!(
            "{name} (order {}), degrees {:?}",
            g.order(),
            table.degrees()
        );
        print!("{}", table.render(&g));
        println!("orthogonality defects {row:.1e} / {col:.1e}\n");
    }
    Ok(())
}
