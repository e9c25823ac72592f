use mczcut::harness;

fn main() -> Result<(), harness::HarnessError> {
    print!("{}", harness::format_kappa_table(&harness::cmd_kappa_table()?));
    for order in 7..=12 {
        let d = mczcut::decompose_mcz(1, order - 1)?;
        println!("order {order:>2}, one qubit removed: kappa = {}", d.kappa);
    }
    Ok(())
}
