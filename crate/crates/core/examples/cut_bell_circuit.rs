//! Cuts the CZ of a Bell-state preparation and rebuilds `⟨ZZ⟩` from local pieces.
use mczcut::cutter::{self, Directive};
use mczcut::{Circuit, Gate, Observable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let circuit = Circuit::with_gates(2, vec![Gate::h(0), Gate::h(1), Gate::cz(0, 1), Gate::h(1)]).with_split(1);
    let cut = circuit.find_cut()?;
    let d = cutter::decompose_mcz(cut.k, cut.m)?;
    let pairs = cutter::embed(&d, &cut)?;

    let describe = |dir: &Directive| match dir {
        Directive::Gates(g) if g.is_empty() => "identity".to_string(),
        Directive::Gates(g) => g.iter().map(|g| g.kind.to_string()).collect::<Vec<_>>().join(" "),
        Directive::ZMix { include_identity, .. } => format!("random Z layer (identity included: {include_identity})"),
        Directive::Measure { signed, .. } => format!("mid-circuit measurement (signed: {signed})"),
    };
    for p in &pairs {
        println!("{:+.3}  A: {:<36} B: {}", p.coefficient, describe(&p.a.directive), describe(&p.b.directive));
    }
    let obs = Observable::ZString;
    let (za, zb) = (Observable::ZString, Observable::ZString);
    println!("reconstructed ⟨ZZ⟩ = {:.12}", cutter::reconstruct_exact(&pairs, &za, &zb)?);
    println!("direct ⟨ZZ⟩        = {:.12}", cutter::uncut_expectation(&cut, &obs)?);
    Ok(())
}
