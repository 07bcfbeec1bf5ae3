//! Exact per-region mass audit of the simplified DRS sampler on u = [0.5, 0.25, 1].

use drsc::tiling::{TilingAudit, DEFAULT_DEPTH};

fn main() -> drsc::Result<()> {
    let depth = std::env::args().nth(1).map_or(Ok(DEFAULT_DEPTH), |s| s.parse()).expect("depth");
    let audit = TilingAudit::run(&[0.5, 0.25, 1.0], depth)?;
    let r = &audit.report;
    println!("depth {depth}: {} tiles, {} unique projected shapes", r.tiles, r.unique_shapes);
    println!("{:>6} {:>9} {:>9} {:>7}", "region", "realised", "target", "delta");
    for row in &r.rows {
        println!("{:>6} {:>9.2} {:>9.2} {:>7.2}", row.region, row.realised, row.target, row.delta);
    }
    println!("{:>6} {:>9.2} {:>9.2}", "total", r.total_realised, r.total_target);
    println!("{:>6} {:>9.2}", "resid", r.residual);
    println!("sum |delta| = {:.2}, max |delta| = {:.2}", r.sum_abs_delta, r.max_abs_delta);
    Ok(())
}
