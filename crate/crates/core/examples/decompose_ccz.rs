//! The CCZ decomposition written out by hand, next to the generated one.
use mczcut::cutter::{self, CutError};

fn main() -> Result<(), CutError> {
    let hand = cutter::decompose_ccz_handwritten();
    let generated = cutter::decompose_mcz(1, 2)?;
    print!("{generated}");
    println!("hand form: {} terms, residual {:.2e}", hand.len(), cutter::verify(&hand)?.residual);
    println!("canonical forms agree: {}", cutter::canonicalize(&hand) == generated);
    println!("{}", serde_json::to_string_pretty(&generated.to_document()).unwrap());
    Ok(())
}
