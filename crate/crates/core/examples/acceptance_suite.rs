//! The ten single-run acceptance criteria, without writing anything.

fn main() -> condensate_linear::Result<()> {
    for c in condensate_linear::acceptance::run_criteria(7, None)? {
        println!("{}", c.line());
    }
    Ok(())
}
