//! Exact revenues by enumeration, the per-profile dominance check, and a full
//! certificate for one small instance.

use posted_price::cli::certify::{certify_instance, CertifyOptions};
use posted_price::exact::{dominance_check, exact_revenues, random_instance, EnumerationBudget};
use posted_price::Feasibility;

fn main() -> posted_price::Result<()> {
    let instance = random_instance(42, 3, 3, Feasibility::KUnit(1))?;
    for (i, d) in instance.bidders().iter().enumerate() {
        println!(
            "bidder {i}: support {:?}, probs {:?}",
            d.support(),
            d.probs()
        );
    }

    let budget = EnumerationBudget::default();
    let r = exact_revenues(&instance, budget)?;
    println!(
        "Opt {:.5}  MP {:.5}  UP {:.5}  ME {:.5}  UE {:.5}",
        r.opt,
        r.mp,
        r.up,
        r.me.unwrap(),
        r.ue.unwrap()
    );

    let dom = dominance_check(&instance, budget)?;
    println!(
        "{} comparisons, {} profiles where posted beats eager",
        dom.comparisons,
        dom.violations.len()
    );

    let cert = certify_instance("random-42", &instance, &CertifyOptions::default())?;
    println!(
        "ratio {:.4} against factor {:.4}: {}",
        cert.ratio,
        cert.factor,
        if cert.pass { "certified" } else { "FAILED" }
    );
    Ok(())
}
