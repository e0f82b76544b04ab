//! Finite factor-revealing programs: a hand-written LP through the dense
//! simplex solver, then the posted-price and eager bounds for small markets.

use posted_price::factor_lp::kernels::spm_baseline;
use posted_price::factor_lp::{bound_table, solve_lp, LpInstance, TableConfig, TableKind};

fn main() -> posted_price::Result<()> {
    // max 3x + 2y subject to x + y <= 4, x + 3y <= 6, x <= 3.
    let lp = LpInstance::new(
        vec![3.0, 2.0],
        vec![vec![1.0, 1.0], vec![1.0, 3.0], vec![1.0, 0.0]],
        vec![4.0, 6.0, 3.0],
    )?;
    let sol = solve_lp(&lp)?;
    println!(
        "toy LP: {:?} objective {} at {:?}, duals {:?}",
        sol.status, sol.objective, sol.primal, sol.duals
    );
    println!("certificate {:?}", sol.certificate);

    let config = TableConfig {
        n: (1..=6).collect(),
        h: Vec::new(),
        k: vec![200],
    };
    let spm = bound_table(TableKind::SpmN, &config)?;
    let esp = bound_table(TableKind::EspN, &config)?;
    for n in 1..=6u64 {
        let s = spm.find("spm-n", Some(n), Some(200)).unwrap().value;
        let e = esp.find("esp-n", Some(n), Some(200)).unwrap().value;
        println!(
            "n={n}: eager {e:.5} >= posted {s:.5} >= baseline {:.5}",
            spm_baseline(n)
        );
    }
    print!("{}", esp.to_markdown());
    Ok(())
}
