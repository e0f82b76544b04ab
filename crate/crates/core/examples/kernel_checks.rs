//! Numerical checks of the kernel inequalities: monotonicity on a grid and the
//! equal-split extremality of two symmetric polynomials. A deliberately broken
//! kernel shows what a failure looks like.

use posted_price::factor_lp::checks::{esp_polynomial, truncation_polynomial};
use posted_price::factor_lp::{monotone_kernel_check, polynomial_extremal_check, KernelSet};
use posted_price::SeedTree;

fn main() {
    let good = monotone_kernel_check(20, KernelSet::default());
    println!(
        "monotone grid: {} points, {} violations",
        good.grid_points,
        good.violations.len()
    );

    let s = [0.7, 0.2, 0.1];
    for h in 1..=3 {
        println!(
            "E[(H - Z)^+] for H={h} at {s:?}: {:.6}",
            truncation_polynomial(&s, h)
        );
    }
    // 2 P[Z=0] + P[Z=1], which coincides with the H=2 case.
    println!("eager polynomial at {s:?}: {:.6}", esp_polynomial(&s));

    let mut rng = SeedTree::new(1).stream(0);
    let r = polynomial_extremal_check(4, 2, 1.5, 5000, &mut rng, KernelSet::default());
    println!(
        "n=4, H=2, sum 1.5: equal split {:.6}, best random {:.6}, passed {}",
        r.equal_value,
        r.max_random,
        r.passed()
    );

    let mut rng = SeedTree::new(1).stream(0);
    let bad = polynomial_extremal_check(4, 1, 2.0, 5000, &mut rng, KernelSet::sign_flipped_r());
    println!(
        "flipped kernel passed: {}, witness {:?}",
        bad.passed(),
        bad.witness
    );
}
