//! Stabilizers, orbit types and minimal isotropy of the builtin models.
use isotypic::action::{builtin_model, ModelParams, BUILTIN_MODELS};
use isotypic::cli::ModelSummary;

fn main() -> isotypic::Result<()> {
    for name in BUILTIN_MODELS {
        let m = builtin_model(name, &ModelParams::default())?;
        let s = ModelSummary::new(&m)?;
        println!(
            "{name}: group {}, {} points, {} covector samples",
            m.group().name().unwrap_or("G"),
            s.points,
            s.samples
        );
        for c in &s.components {
            println!(
                "  component {}: minimal isotropy {}",
                c.name, c.minimal_isotropy
            );
        }
        for ot in &s.orbit_types {
            println!(
                "  stabilizer {} on {} points",
                ot.stabilizer,
                ot.points.len()
            );
        }
    }
    Ok(())
}
