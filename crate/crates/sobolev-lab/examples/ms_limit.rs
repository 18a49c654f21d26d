//! The `s -> 0` endpoint: `s` times the seminorm approaches
//! `(2n/p) |K| ||f||_p^p`. For the unit-step indicator on `[0,1]` with
//! `K = [-1,1]`, `p = 1`, the seminorm is exactly `4/(s(1-s))` and the
//! limit is 4.
//!
//! ```bash
//! cargo run --release --example ms_limit
//! ```

use sobolev_lab::convex_body::ConvexBody;
use sobolev_lab::gagliardo::{ms_sweep, seminorm, SeminormMethod, SeminormQuery, DEFAULT_MS_GRID};
use sobolev_lab::test_functions::TestFunction;

fn main() -> sobolev_lab::Result<()> {
    let f = TestFunction::indicator_interval(0.0, 1.0, 1.0)?;
    let k = ConvexBody::interval(1.0)?;
    let method = SeminormMethod::RadialTensor {
        x_resolution: 2000,
        theta_resolution: 128,
    };

    println!("seminorm of the unit step vs the closed form 4/(s(1-s)):");
    for s in [0.25, 0.5, 0.75] {
        let est = seminorm(&SeminormQuery::new(&f, &k, 1.0, s, method)?)?;
        println!(
            "  s = {s}: estimate {:.6}, exact {:.6}",
            est.value,
            4.0 / (s * (1.0 - s))
        );
    }

    let table = ms_sweep(&f, &k, 1.0, &DEFAULT_MS_GRID, method)?;
    println!("\nsmall-s sweep; reference 2n/p |K| ||f||_1 = 4:");
    println!("{:>6} {:>12} {:>12} {:>10}", "s", "s*seminorm", "reference", "rel err");
    for row in &table.rows {
        println!(
            "{:>6} {:>12.6} {:>12.6} {:>10.2e}",
            row.param, row.value, row.reference, row.rel_error
        );
    }
    if let Some(ex) = table.extrapolated {
        println!("linear extrapolation in s: {:.6}", ex.value);
    }
    println!("verdict: {:?}", table.verdict);
    Ok(())
}
