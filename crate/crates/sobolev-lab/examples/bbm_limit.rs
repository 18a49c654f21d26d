//! The `s -> 1` endpoint: `(1-s)` times the anisotropic Gagliardo
//! seminorm approaches the gradient moment energy `(2/p) int ||grad
//! f||^p_{Z_p^* K}`. Exact reference for the cubic bump on `[-1,1]`:
//! `9216/3465`.
//!
//! ```bash
//! cargo run --release --example bbm_limit
//! ```

use sobolev_lab::convex_body::ConvexBody;
use sobolev_lab::gagliardo::{bbm_sweep, SeminormMethod, DEFAULT_BBM_GRID};
use sobolev_lab::test_functions::TestFunction;

fn main() -> sobolev_lab::Result<()> {
    let f = TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0)?;
    let k = ConvexBody::interval(1.0)?;
    let method = SeminormMethod::RadialTensor {
        x_resolution: 2000,
        theta_resolution: 128,
    };
    let table = bbm_sweep(&f, &k, 2.0, &DEFAULT_BBM_GRID, method)?;

    println!("cubic bump, K = [-1,1], p = 2; reference 9216/3465 = {:.6}", 9216.0 / 3465.0);
    println!("{:>6} {:>14} {:>14} {:>10}", "s", "(1-s)*seminorm", "reference", "rel err");
    for row in &table.rows {
        println!(
            "{:>6} {:>14.6} {:>14.6} {:>10.2e}",
            row.param, row.value, row.reference, row.rel_error
        );
    }
    if let Some(ex) = table.extrapolated {
        println!("linear extrapolation in (1-s): {:.6}", ex.value);
    }
    println!("verdict: {:?}", table.verdict);
    Ok(())
}
