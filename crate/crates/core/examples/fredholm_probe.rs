//! Truncation probe and numerical index on the circle scenarios.
use isotypic::fredholm::{numerical_index, scenarios, ProbeOptions};

fn main() -> isotypic::Result<()> {
    let opts = ProbeOptions {
        radii: vec![32, 64, 128],
        ..ProbeOptions::default()
    };
    for sc in scenarios()? {
        println!("{} ({})", sc.name, sc.regime);
        for family in sc.families()? {
            let m = sc.model(&family)?;
            for a in 0..sc.num_irreps()? {
                let r = numerical_index(&m, a, &opts)?;
                let index = r.index.map_or("-".into(), |i| i.to_string());
                println!(
                    "  {:<16} alpha {a}  {:<17} index {index}",
                    family.name(),
                    format!("{:?}", r.probe)
                );
            }
        }
    }
    Ok(())
}
