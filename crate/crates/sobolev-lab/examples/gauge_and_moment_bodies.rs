//! Convex bodies: gauges, volumes, uniform samples, and polar moment-body
//! norms, with the directional constant `k(p,n)` cross-checked against a
//! Monte Carlo sphere integral.
//!
//! ```bash
//! cargo run --release --example gauge_and_moment_bodies
//! ```

use sobolev_lab::convex_body::{
    k_constant, moment_norm_p, sphere_surface_area, ConvexBody, MomentEstimator, MomentNormSpec,
};
use sobolev_lab::estimate::monte_carlo;
use sobolev_lab::rng::unit_vector;

fn main() -> sobolev_lab::Result<()> {
    let bodies = vec![
        ("ball(1.0)", ConvexBody::ball(2, 1.0)?),
        ("box(1, 0.5)", ConvexBody::cuboid(vec![1.0, 0.5])?),
        (
            "ellipsoid diag(1/4, 1)",
            ConvexBody::ellipsoid(vec![vec![0.25, 0.0], vec![0.0, 1.0]])?,
        ),
        ("cross-polytope", ConvexBody::lq_ball(2, 1.0, 1.0)?),
        (
            "hexagon",
            ConvexBody::polytope(vec![
                vec![1.0, 0.0],
                vec![0.5, 0.75f64.sqrt()],
                vec![0.5, -(0.75f64.sqrt())],
            ])?,
        ),
    ];

    println!("gauges at x = (0.6, 0.8) and volumes:");
    let x = [0.6, 0.8];
    for (name, body) in &bodies {
        let vol = body
            .volume_exact()
            .map(|v| format!("{v:.6} (exact)"))
            .unwrap_or_else(|| {
                let est = body.volume_mc(200_000, 7);
                format!("{:.6} +- {:.6} (mc)", est.value, est.stderr)
            });
        println!(
            "  {name:24} gauge {:.6}   |K| = {vol}",
            body.gauge(&x)?
        );
    }

    println!("\ndirectional constant k(p,n) vs sphere Monte Carlo:");
    for (p, n) in [(1.0, 2usize), (2.0, 2), (2.0, 3)] {
        let exact = k_constant(p, n);
        let est = monte_carlo(200_000, 1, |rng| {
            let w = unit_vector(rng, n);
            w[0].abs().powf(p)
        })
        .scaled(sphere_surface_area(n));
        println!(
            "  k({p},{n}) = {exact:.9}   mc {:.6} +- {:.6}",
            est.value, est.stderr
        );
    }

    println!("\npolar moment-body norms ||z||^p for z = (1, 0):");
    let z = [1.0, 0.0];
    let disk = ConvexBody::ball(2, 1.0)?;
    let square = ConvexBody::cuboid(vec![1.0, 1.0])?;
    for (name, body, p) in [("disk, p=2", &disk, 2.0), ("square, p=2", &square, 2.0)] {
        let closed = moment_norm_p(
            &MomentNormSpec::new(body, p, MomentEstimator::ClosedForm)?,
            &z,
        )?;
        let mc = moment_norm_p(
            &MomentNormSpec::new(
                body,
                p,
                MomentEstimator::MonteCarlo {
                    samples: 400_000,
                    seed: 2,
                },
            )?,
            &z,
        )?;
        println!(
            "  {name:14} closed {:.9}   mc {:.6} +- {:.6}",
            closed.value, mc.value, mc.stderr
        );
    }
    Ok(())
}
