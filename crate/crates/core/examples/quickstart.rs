use ous_core::{run_and_score, PolicyKind, ProblemSpec, RngStream};

fn main() -> ous_core::Result<()> {
    let spec = ProblemSpec::new(22, 3.0)?;
    let mut policy = PolicyKind::ALG1.build(&spec, None, RngStream::new(7))?;
    let report = run_and_score(&mut policy, 12, &spec)?;
    println!("CR = {:.4}", report.competitive_ratio);
    Ok(())
}
