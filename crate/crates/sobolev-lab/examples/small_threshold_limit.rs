//! Small thresholds: `lambda^p` times the measure of
//! `{|f(x)-f(y)| >= lambda ||x-y||_K^{n/p}}` approaches
//! `2 |K| ||f||_p^p` as `lambda -> 0`. For the unit step on `[0,1]` the
//! whole curve is known: `lambda * mu = 4 - 2 lambda` below `lambda = 1`.
//! A second instance runs in the plane with a square gauge body.
//!
//! ```bash
//! cargo run --release --example small_threshold_limit
//! ```

use sobolev_lab::convex_body::ConvexBody;
use sobolev_lab::estimate::McConfig;
use sobolev_lab::level_set::{levelset_measure, levelset_measure_bruteforce, LevelSetQuery, SetKind};
use sobolev_lab::test_functions::TestFunction;

fn main() -> sobolev_lab::Result<()> {
    let f = TestFunction::indicator_interval(0.0, 1.0, 1.0)?;
    let k = ConvexBody::interval(1.0)?;
    let view = f.view();
    let mc = McConfig::new(200_000, 3);

    println!("unit step, K = [-1,1], p = 1: lambda*mu vs the exact 4 - 2*lambda");
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>14}",
        "lambda", "lambda*mu", "stderr", "exact", "grid oracle"
    );
    for lambda in [0.5, 0.1, 0.01] {
        let est = levelset_measure(&LevelSetQuery::new(
            &view,
            &k,
            1.0,
            SetKind::PartB,
            lambda,
            mc,
        )?)?;
        let exact = 4.0 - 2.0 * lambda;
        let window = (-(1.0 / lambda) - 0.5, 1.0 / lambda + 1.5);
        let grid = levelset_measure_bruteforce(
            &view,
            &k,
            1.0,
            SetKind::PartB,
            lambda,
            window,
            4000,
        )?;
        println!(
            "{:>8} {:>12.6} {:>12.2e} {:>12.6} {:>14.6}",
            lambda,
            lambda * est.value,
            lambda * est.stderr,
            exact,
            lambda * grid
        );
    }

    // Planar instance: indicator of the unit square, K = [-1,1]^2, p = 2.
    // The limit is 2 |K| ||f||_2^2 = 2 * 4 * 1 = 8.
    let square = TestFunction::indicator(
        ConvexBody::cuboid(vec![0.5, 0.5])?,
        vec![0.5, 0.5],
        1.0,
    )?;
    let k2 = ConvexBody::cuboid(vec![1.0, 1.0])?;
    let view2 = square.view();
    println!("\nunit-square indicator, K = [-1,1]^2, p = 2: limit 8");
    for lambda in [0.5, 0.1, 0.02] {
        let est = levelset_measure(&LevelSetQuery::new(
            &view2,
            &k2,
            2.0,
            SetKind::PartB,
            lambda,
            mc,
        )?)?;
        let scaled = lambda * lambda * est.value;
        println!(
            "  lambda = {lambda}: lambda^2 mu = {scaled:.5} +- {:.2e}",
            lambda * lambda * est.stderr
        );
    }
    Ok(())
}
