//! Large thresholds: `lambda^p` times the measure of
//! `{|f(x)-f(y)| >= lambda ||x-y||_K^{n/p+1}}` approaches
//! `(2/n) int ||grad f||^p_{Z_p^* K}` as `lambda` grows. Exact reference
//! for the cubic bump on `[-1,1]` at `p = 2`: `18432/3465`.
//!
//! ```bash
//! cargo run --release --example large_threshold_limit
//! ```

use sobolev_lab::convex_body::ConvexBody;
use sobolev_lab::estimate::{log_grid, McConfig};
use sobolev_lab::level_set::limit_sweep_large_lambda;
use sobolev_lab::test_functions::TestFunction;

fn main() -> sobolev_lab::Result<()> {
    let f = TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0)?;
    let k = ConvexBody::interval(1.0)?;
    let a = f.smoothness_bounds()?.grad_sup;
    let lambdas = log_grid(1e2 * a, 1e4 * a, 2);
    let table = limit_sweep_large_lambda(&f, &k, 2.0, &lambdas, McConfig::new(100_000, 1))?;

    println!(
        "cubic bump, K = [-1,1], p = 2; reference 18432/3465 = {:.6}",
        18432.0 / 3465.0
    );
    println!(
        "{:>12} {:>14} {:>12} {:>14} {:>10}",
        "lambda", "lambda^p mu", "stderr", "reference", "rel err"
    );
    for row in &table.rows {
        println!(
            "{:>12.4e} {:>14.6} {:>12.2e} {:>14.6} {:>10.2e}",
            row.param, row.value, row.stderr, row.reference, row.rel_error
        );
    }
    println!("verdict: {:?}", table.verdict);
    Ok(())
}
