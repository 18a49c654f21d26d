//! Integral geometry over lines: the decomposition of a double integral
//! into chord integrals weighted by `|x-y|^{n-1}`, the one-dimensional
//! averaged-integral set oracle, and the line-field set bound.
//!
//! ```bash
//! cargo run --release --example line_decomposition
//! ```

use sobolev_lab::convex_body::ConvexBody;
use sobolev_lab::estimate::McConfig;
use sobolev_lab::line_geometry::{
    bp_integrate, e_set_measure_1d, gradient_quotient_field, prop21_ratio, prop22_check,
};
use sobolev_lab::test_functions::TestFunction;

fn main() -> sobolev_lab::Result<()> {
    println!("line-decomposition identity on product indicators:");
    let disk = ConvexBody::ball(2, 1.0)?;
    let square = ConvexBody::cuboid(vec![1.0, 1.0])?;
    let cases: [(&ConvexBody, f64, f64, &str); 2] = [
        (&disk, 1.2, std::f64::consts::PI.powi(2), "disk^2  -> pi^2"),
        (&square, 1.6, 16.0, "square^2 -> 16"),
    ];
    for (i, (body, window, target, label)) in cases.iter().enumerate() {
        let est = bp_integrate(
            |x, y| {
                if body.contains(x) && body.contains(y) {
                    1.0
                } else {
                    0.0
                }
            },
            2,
            *window,
            &McConfig::new(40_000, i as u64),
            96,
        );
        println!(
            "  {label}: {:.5} +- {:.5} (target {:.5})",
            est.value, est.stderr, target
        );
    }

    println!("\naveraged-integral set measure for the unit step:");
    let step = |x: f64| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 };
    for (gamma, exact) in [(0.5, 10.0 / 3.0), (1.0, 5.0 / 3.0), (2.0, 13.0 / 15.0)] {
        let measure = e_set_measure_1d(step, gamma, (-2.5, 3.5), 4000)?;
        let ratio = prop21_ratio(step, gamma, (-2.5, 3.5), 4000)?;
        println!(
            "  gamma = {gamma}: measure {measure:.5} (hand value {exact:.5}), normalized ratio {ratio:.4}"
        );
    }

    println!("\nline-field set bound with the gradient quotient field:");
    let f = TestFunction::poly_bump(2, 3, 1.0, vec![0.0, 0.0], 1.0)?;
    let body = ConvexBody::ball(2, 1.0)?;
    let field = gradient_quotient_field(&f, &body, 2.0, 5.0);
    let report = prop22_check(field, 2, 1.3, &McConfig::new(2_000, 9), 128);
    println!(
        "  set side {:.4e}, field side {:.4e}, ratio {:.4} (envelope {:.1}) pass: {}",
        report.lhs.value, report.rhs.value, report.ratio, report.bound, report.pass
    );
    Ok(())
}
