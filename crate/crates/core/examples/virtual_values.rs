//! Raw and ironed virtual values of an irregular distribution, and its
//! monopoly price.

use posted_price::DiscreteDistribution;

fn main() -> posted_price::Result<()> {
    // Mass at both ends makes the raw virtual values non-monotone.
    let d = DiscreteDistribution::new(vec![1.0, 2.0, 10.0], vec![0.45, 0.1, 0.45])?;
    let ironed = d.iron();

    println!(
        "{:>6} {:>8} {:>10} {:>10}",
        "value", "prob", "raw phi", "ironed"
    );
    for (j, (v, phi)) in d.raw_virtual_values().into_iter().enumerate() {
        println!(
            "{v:>6.2} {:>8.3} {phi:>10.4} {:>10.4}",
            d.probs()[j],
            ironed.at(j)
        );
    }
    println!("ironed curve monotone: {}", ironed.is_monotone());

    let (price, revenue) = d.monopoly_price();
    println!(
        "monopoly price {price}, revenue {revenue:.4}, mean value {:.4}",
        d.mean()
    );
    Ok(())
}
