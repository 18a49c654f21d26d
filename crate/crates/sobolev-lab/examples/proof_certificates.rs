//! The constructive certificates: inner/outer interval radii for the
//! large-threshold set, the compact-support measure sandwich, and the
//! segment Hoelder bound.
//!
//! ```bash
//! cargo run --release --example proof_certificates
//! ```

use sobolev_lab::certificates::{
    claim1_radius, claim1_suite, claim1_verify, claim2_radius, claim2_verify,
    holder_segment_bound, m1_sandwich, ClaimContext,
};
use sobolev_lab::convex_body::ConvexBody;
use sobolev_lab::estimate::McConfig;
use sobolev_lab::test_functions::TestFunction;

fn main() -> sobolev_lab::Result<()> {
    let f = TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0)?;
    let k = ConvexBody::interval(1.0)?;
    let a = f.smoothness_bounds()?.grad_sup;

    let ctx = ClaimContext::new(&f, &k, 2.0, 0.5, 50.0 * a)?;
    let x = [0.5];
    let omega = [1.0];
    let r = claim1_radius(&ctx, &x, &omega)?;
    let big_r = claim2_radius(&ctx, &x, &omega);
    println!("interval radii at x = 0.5, lambda = 50a:");
    println!("  inner (guaranteed membership)  r = {r:.6e}");
    println!("  outer (no members beyond)      R = {big_r:.6e}");
    let inner = claim1_verify(&ctx, &x, &omega, 1000)?;
    println!(
        "  inner interval check: {} samples, {} counterexamples",
        inner.checked,
        inner.counterexamples.len()
    );

    let suite = claim1_suite(&f, &k, 2.0, &[0.25, 0.5, 0.75], &[10.0, 100.0], 40, 25, 7)?;
    println!(
        "\ninner-interval suite over random rays: {} checks, {} counterexamples",
        suite.checked,
        suite.counterexamples.len()
    );
    let ctx2 = ClaimContext::new(&f, &k, 1.0, 0.5, 10.0 * a)?;
    let outer = claim2_verify(&ctx2, 500, 1_000_000, 8)?;
    println!(
        "outer-interval suite over sampled members: {} members, {} counterexamples ({:?})",
        outer.checked,
        outer.counterexamples.len(),
        outer.verdict
    );

    println!("\ncompact-support sandwich for the unit step (K = [-1,1], r = 1):");
    for lambda in [1.0, 0.1, 0.01] {
        let step = TestFunction::indicator_interval(0.0, 1.0, 1.0)?;
        let m1 = m1_sandwich(&step, &k, 1.0, lambda, 1.0, McConfig::new(30_000, 9))?;
        println!(
            "  lambda = {lambda}: {:.3} <= H+ = {:.3} (+- {:.1e}) <= {:.3}; full/half = {:.4}; pass {}",
            m1.lower,
            m1.half_measure.value,
            m1.half_measure.stderr,
            m1.upper,
            m1.full_measure.value / m1.half_measure.value,
            m1.pass()
        );
    }

    println!("\nsegment Hoelder bound on a random chord:");
    let (lhs, rhs) = holder_segment_bound(&f, &[-0.4], &[0.7], 2.0)?;
    println!("  |f(x)-f(y)| = {lhs:.6} <= {rhs:.6}");
    Ok(())
}
