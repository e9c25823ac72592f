//! Checks the ZH rewrite identities behind the decomposition on small diagrams.
use std::f64::consts::PI;

use mczcut::zhcalc::{self, check_fusion_rule, check_mcz_representation, phase_identity_residual};

fn main() -> Result<(), zhcalc::ZhError> {
    for n in 1..=5 {
        let fusion = (0..=n).map(|a| check_fusion_rule(a, n - a)).collect::<Result<Vec<_>, _>>()?;
        let phase = [0.0, PI / 2.0, -PI / 2.0, PI, 0.3]
            .iter()
            .map(|&t| phase_identity_residual(n, t))
            .collect::<Result<Vec<_>, _>>()?;
        println!(
            "n = {n}: mcz diagram {:.1e}, fusion {:.1e}, phase vector {:.1e}, difference vector {:.1e}",
            check_mcz_representation(n)?,
            fusion.iter().cloned().fold(0.0, f64::max),
            phase.iter().cloned().fold(0.0, f64::max),
            zhcalc::projector_identity_residual(n)?,
        );
    }
    let q = zhcalc::check_q_expansion()?;
    println!("two-leg H-box expansion: max residual {:.1e}", q.max());
    Ok(())
}
