//! The weak quasinorm `sup_lambda lambda^p mu(lambda)` against its
//! two-sided bounds `2|K| ||f||_p^p <= . <= 2^{p+1} |K| ||f||_p^p`
//! (small-threshold family), and the one-sided gradient-energy bound for
//! the large-threshold family with the empirical comparison constant.
//!
//! ```bash
//! cargo run --release --example quasinorm_sandwich
//! ```

use sobolev_lab::convex_body::ConvexBody;
use sobolev_lab::estimate::McConfig;
use sobolev_lab::level_set::{sandwich_check, SetKind};
use sobolev_lab::test_functions::TestFunction;

fn main() -> sobolev_lab::Result<()> {
    let k = ConvexBody::interval(1.0)?;

    let step = TestFunction::indicator_interval(0.0, 1.0, 1.0)?;
    let report = sandwich_check(&step, &k, 1.0, SetKind::PartB, McConfig::new(50_000, 5))?;
    println!("small-threshold sandwich, unit step, p = 1:");
    println!(
        "  {:.4} <= quasinorm {:.4} (+- {:.1e}, argmax lambda {:.2e}{}) <= {:.4}",
        report.lower,
        report.quasinorm.estimate.value,
        report.quasinorm.estimate.stderr,
        report.quasinorm.argmax_lambda,
        if report.quasinorm.at_grid_boundary {
            ", at grid boundary"
        } else {
            ""
        },
        report.upper.unwrap()
    );
    println!("  pass: {}", report.pass);

    let bump = TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0)?;
    let report = sandwich_check(&bump, &k, 2.0, SetKind::PartA, McConfig::new(20_000, 6))?;
    println!("\nlarge-threshold bound, cubic bump, p = 2:");
    println!(
        "  lower {:.4} <= quasinorm {:.4} (+- {:.1e})",
        report.lower, report.quasinorm.estimate.value, report.quasinorm.estimate.stderr
    );
    println!(
        "  empirical comparison constant (quasinorm / gradient energy): {:.4}",
        report.constant_ratio.unwrap()
    );
    println!("  pass: {}", report.pass);
    Ok(())
}
