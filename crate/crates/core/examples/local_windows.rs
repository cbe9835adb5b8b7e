//! Local α-invertibility over the four windows covering the quotient.
use isotypic::fredholm::{builtin_scenario, local_alpha_invertible, CircleFamily, Compression};

fn main() -> isotypic::Result<()> {
    let sc = builtin_scenario("s3_through_z2")?;
    for family in [
        CircleFamily::Identity,
        CircleFamily::Vanish { irrep: 2 },
        CircleFamily::Winding { irrep: 2, k: 1 },
    ] {
        let m = sc.model(&family)?;
        for a in 0..sc.num_irreps()? {
            let r = local_alpha_invertible(&m, a, 64, Compression::Multiplicity)?;
            let res: Vec<String> = r
                .windows
                .iter()
                .map(|w| format!("{:.0e}/{:.0e}", w.left_residual, w.right_residual))
                .collect();
            println!(
                "{:<14} alpha {a}  all windows {:<5}  residuals {}",
                family.name(),
                r.all_windows,
                res.join(" ")
            );
        }
    }
    Ok(())
}
