//! The large-market posted-price bound for H units, solved by quadrature and
//! root finding, next to the closed-form baseline it improves on.

use posted_price::factor_lp::solve_lp_spm_h;

fn main() -> posted_price::Result<()> {
    println!(
        "{:>3} {:>10} {:>10} {:>9} {:>9}",
        "H", "tau*", "LP value", "factor", "baseline"
    );
    for h in 1..=10 {
        let s = solve_lp_spm_h(h)?;
        println!(
            "{h:>3} {:>10.6} {:>10.6} {:>9.5} {:>9.5}",
            s.tau_star, s.lp_value, s.factor, s.baseline
        );
        assert!((s.tau_star - s.tau_star_newton).abs() < 1e-9);
    }
    Ok(())
}
