use serde::Serialize;

use super::{Estimate, MechanismOutcome, PriceLabel, PriceVector};
use crate::error::{Error, Result};
use crate::instance::{AuctionInstance, Feasibility};
use crate::myerson::MyersonAuction;
use crate::numeric::poisson_binomial_pmf;
use crate::parallel::trial_moments;
use crate::rng::SeedTree;

/// Greedy maximum-value feasible subset of `pool`: visit by decreasing value
/// (lower index first on ties) and keep whatever stays feasible. Exact for
/// matroid constraints.
fn greedy_max(instance: &AuctionInstance, pool: &[usize], values: &[f64]) -> (Vec<usize>, f64) {
    let mut order = pool.to_vec();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut chosen = Vec::new();
    let mut weight = 0.0;
    for i in order {
        if instance.can_add(&chosen, i) {
            chosen.push(i);
            weight += values[i];
        }
    }
    (chosen, weight)
}

pub(crate) fn esp_core(
    instance: &AuctionInstance,
    reserves: &[f64],
    values: &[f64],
) -> MechanismOutcome {
    let n = values.len();
    let survivors: Vec<usize> = (0..n).filter(|&i| values[i] >= reserves[i]).collect();
    let (winners, total) = greedy_max(instance, &survivors, values);
    let mut payments = vec![0.0; n];
    for &i in &winners {
        let without: Vec<usize> = survivors.iter().copied().filter(|&k| k != i).collect();
        let (_, alt) = greedy_max(instance, &without, values);
        let externality = alt - (total - values[i]);
        payments[i] = reserves[i].max(externality);
    }
    MechanismOutcome::new("esp", winners, payments)
}

/// One run of the eager second-price auction with per-bidder reserves.
pub fn run_esp(
    instance: &AuctionInstance,
    reserves: &PriceVector,
    values: &[f64],
) -> Result<MechanismOutcome> {
    if reserves.len() != instance.n() || values.len() != instance.n() {
        return Err(Error::InvalidArgument(format!(
            "need {} reserves and values, got {} and {}",
            instance.n(),
            reserves.len(),
            values.len()
        )));
    }
    if let Feasibility::Position { .. } = instance.feasibility() {
        return Err(Error::UnsupportedFeasibility {
            operation: "eager second-price auction",
            feasibility: "position",
        });
    }
    Ok(esp_core(instance, &reserves.prices, values))
}

fn require_single_item(instance: &AuctionInstance, operation: &'static str) -> Result<()> {
    match instance.units() {
        Some(1) => Ok(()),
        _ => Err(Error::UnsupportedFeasibility {
            operation,
            feasibility: instance.feasibility().kind(),
        }),
    }
}

/// Expected revenue of the single-item ESP with the same reserve `p` for
/// everyone: `p * P[max v >= p] + integral over x > p of P[second value >= x]`.
pub fn uniform_esp_revenue(instance: &AuctionInstance, p: f64) -> Result<f64> {
    require_single_item(instance, "uniform eager second-price revenue")?;
    let at = |x: f64| -> (f64, f64) {
        let pmf = poisson_binomial_pmf(
            &instance
                .bidders()
                .iter()
                .map(|d| d.survival(x))
                .collect::<Vec<_>>(),
        );
        let any = 1.0 - pmf[0];
        let two = (1.0 - pmf[0] - pmf.get(1).copied().unwrap_or(0.0)).max(0.0);
        (any, two)
    };
    let mut points: Vec<f64> = instance
        .bidders()
        .iter()
        .flat_map(|d| d.support().iter().copied())
        .filter(|&u| u > p)
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut integral = 0.0;
    let mut prev = p;
    for u in points {
        // P[second >= x] is constant on (prev, u]
        integral += (u - prev) * at(u).1;
        prev = u;
    }
    Ok(p * at(p).0 + integral)
}

/// Best common reserve for the single-item ESP over support points, lowest
/// on ties. On each gap between support points the objective grows with the
/// reserve, so the maximum sits on a support point.
pub fn esp_uniform_reserve(instance: &AuctionInstance) -> Result<(f64, f64)> {
    let mut candidates: Vec<f64> = instance
        .bidders()
        .iter()
        .flat_map(|d| d.support().iter().copied())
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let mut best = (candidates[0], uniform_esp_revenue(instance, candidates[0])?);
    for &p in &candidates[1..] {
        let rev = uniform_esp_revenue(instance, p)?;
        if rev > best.1 {
            best = (p, rev);
        }
    }
    Ok(best)
}

/// Myersonian and uniform ESP revenues (single item).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EspRevenues {
    pub myersonian: Estimate,
    pub uniform: f64,
    pub uniform_reserve: f64,
    pub chosen: PriceLabel,
    pub revenue: f64,
}

impl EspRevenues {
    pub(crate) fn pick(myersonian: Estimate, uniform_reserve: f64, uniform: f64) -> Self {
        let (chosen, revenue) = if myersonian.mean >= uniform {
            (PriceLabel::Myersonian, myersonian.mean)
        } else {
            (PriceLabel::Uniform, uniform)
        };
        Self {
            myersonian,
            uniform,
            uniform_reserve,
            chosen,
            revenue,
        }
    }
}

/// ME by Monte-Carlo over resampled-threshold reserves, UE exactly.
pub fn esp_revenues(
    instance: &AuctionInstance,
    trials: u64,
    seeds: SeedTree,
) -> Result<EspRevenues> {
    require_single_item(instance, "eager second-price revenues")?;
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    let auction = MyersonAuction::new(instance)?;
    let me = trial_moments(trials, |t| {
        let mut rng = seeds.stream(t);
        let values: Vec<f64> = instance
            .bidders()
            .iter()
            .map(|d| d.sample(&mut rng))
            .collect();
        let reserves = auction.resample_thresholds(&mut rng).thresholds;
        esp_core(instance, &reserves, &values).revenue
    });
    let (reserve, ue) = esp_uniform_reserve(instance)?;
    Ok(EspRevenues::pick(me.into(), reserve, ue))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DiscreteDistribution;
    use crate::mechanisms::spm::{spm_core, uniform_price_search};

    fn inst(n: usize) -> AuctionInstance {
        let d = DiscreteDistribution::new(vec![0.5, 2.0, 3.0], vec![0.3, 0.3, 0.4]).unwrap();
        AuctionInstance::single_item(vec![d; n]).unwrap()
    }

    #[test]
    fn second_price_with_reserve() {
        let i = inst(2);
        let r = PriceVector::custom(vec![1.0, 1.0]).unwrap();
        let out = run_esp(&i, &r, &[3.0, 2.0]).unwrap();
        assert_eq!((out.winners.clone(), out.revenue), (vec![0], 2.0));
        let out = run_esp(&i, &r, &[3.0, 0.5]).unwrap();
        assert_eq!((out.winners.clone(), out.revenue), (vec![0], 1.0));
    }

    #[test]
    fn common_reserve_revenue_is_second_value_or_reserve() {
        let i = inst(3);
        let vals = [0.5, 2.0, 3.0];
        for r in vals {
            let reserves = vec![r; 3];
            for &a in &vals {
                for &b in &vals {
                    for &c in &vals {
                        let v = [a, b, c];
                        let out = esp_core(&i, &reserves, &v);
                        let mut sorted = v.to_vec();
                        sorted.sort_by(|x, y| y.total_cmp(x));
                        let expect = if sorted[0] < r {
                            0.0
                        } else {
                            r.max(if sorted[1] >= r { sorted[1] } else { 0.0 })
                        };
                        assert_eq!(out.revenue, expect, "profile {v:?} reserve {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn esp_never_earns_less_than_spm_with_the_same_prices() {
        let i = inst(3);
        let vals = [0.5, 2.0, 3.0];
        let prices = [
            vec![2.0, 0.5, 3.0],
            vec![1.0, 1.0, 1.0],
            vec![3.0, 2.0, 2.0],
        ];
        for p in &prices {
            for &a in &vals {
                for &b in &vals {
                    for &c in &vals {
                        let v = [a, b, c];
                        let e = esp_core(&i, p, &v);
                        let s = spm_core(&i, p, &v, None);
                        assert!(e.revenue >= s.revenue, "{v:?} {p:?}");
                        for &w in &e.winners {
                            assert!(e.payments[w] >= p[w]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn uniform_esp_closed_form_matches_enumeration() {
        let i = inst(2);
        let d = i.bidder(0);
        for &r in d.support() {
            let mut direct = 0.0;
            for (a, &pa) in d.support().iter().zip(d.probs()) {
                for (b, &pb) in d.support().iter().zip(d.probs()) {
                    direct += pa * pb * esp_core(&i, &[r, r], &[*a, *b]).revenue;
                }
            }
            assert!((uniform_esp_revenue(&i, r).unwrap() - direct).abs() < 1e-12);
        }
        let (_, ue) = esp_uniform_reserve(&i).unwrap();
        let (_, up) = uniform_price_search(&i).unwrap();
        assert!(ue >= up);
    }

    #[test]
    fn single_bidder_esp_is_monopoly() {
        let i = inst(1);
        let (p, rev) = i.bidder(0).monopoly_price();
        assert_eq!(esp_uniform_reserve(&i).unwrap(), (p, rev));
        let r = esp_revenues(&i, 500, SeedTree::new(4)).unwrap();
        // Only the acceptance of the monopoly reserve is random.
        assert!(
            (r.myersonian.mean - rev).abs() <= 4.0 * r.myersonian.std_error,
            "{:?} {rev}",
            r
        );
    }

    #[test]
    fn multi_unit_esp_charges_externalities() {
        let d = DiscreteDistribution::new(vec![1.0, 5.0], vec![0.5, 0.5]).unwrap();
        let i = AuctionInstance::k_unit(vec![d.clone(), d.clone(), d], 2).unwrap();
        let out = esp_core(&i, &[0.0, 0.0, 0.0], &[5.0, 5.0, 1.0]);
        assert_eq!(out.winners, vec![0, 1]);
        assert_eq!(out.payments, vec![1.0, 1.0, 0.0]);
    }
}
