use proptest::prelude::*;

use flagella_sim::ballast::{neutral_ballast_mass, neutral_volume, trim_select, WeightInventory, WeightItem};

/// Best subset by error, then piece count, then ascending mass list, all in
/// integer milligrams.
fn exhaustive(residual_mg: i64, pieces: &[i64]) -> (Vec<i64>, i64) {
    let mut best: Option<(i64, usize, Vec<i64>)> = None;
    for mask in 0u32..(1 << pieces.len()) {
        let mut chosen: Vec<i64> = (0..pieces.len()).filter(|i| mask >> i & 1 == 1).map(|i| pieces[i]).collect();
        chosen.sort_unstable();
        let key = ((residual_mg - chosen.iter().sum::<i64>()).abs(), chosen.len(), chosen);
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }
    let (err, _, chosen) = best.unwrap();
    (chosen, err)
}

fn inventory() -> impl Strategy<Value = Vec<(i64, u32)>> {
    let mass = prop_oneof![(1i64..=12).prop_map(|k| k * 250_000), 1i64..=2_500_000];
    prop::collection::vec((mass, 0u32..=5), 0..=4).prop_filter("at most 16 pieces", |items| {
        items.iter().map(|(_, c)| c).sum::<u32>() <= 16
    })
}

fn to_inventory(items: &[(i64, u32)]) -> WeightInventory {
    WeightInventory {
        items: items.iter().map(|&(mg, count)| WeightItem { mass: mg as f64 / 1e6, count }).collect(),
    }
}

#[test]
fn tank_inventory_examples() {
    let inv = WeightInventory::tank_trial();
    let all = trim_select(5.0, &inv).unwrap();
    assert_eq!(all.weights, vec![0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 1.0, 1.0]);
    assert_eq!(all.error, 0.0);
    assert_eq!(trim_select(1.25, &inv).unwrap().weights, vec![1.0]);
    assert!(trim_select(0.0, &inv).unwrap().weights.is_empty());
}

#[test]
fn neutral_arithmetic() {
    assert!((neutral_ballast_mass(1000.0, 0.012, 10.0) - 2.0).abs() < 1e-12);
    let v = neutral_volume(11.25, 998.0);
    assert!((v - 0.011_272_545_090_180_36).abs() < 1e-15);
    assert!(neutral_ballast_mass(998.0, v, 12.0) < 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_exhaustive_search(items in inventory(), residual_mg in 0i64..10_000_000) {
        let inv = to_inventory(&items);
        let got = trim_select(residual_mg as f64 / 1e6, &inv).unwrap();
        let pieces: Vec<i64> = items.iter().flat_map(|&(m, c)| std::iter::repeat_n(m, c as usize)).collect();
        let (want, err) = exhaustive(residual_mg, &pieces);
        let got_mg: Vec<i64> = got.weights.iter().map(|w| (w * 1e6).round() as i64).collect();
        prop_assert_eq!(got_mg, want);
        prop_assert_eq!((got.error * 1e6).round() as i64, err);
    }

    #[test]
    fn more_residual_never_selects_less(items in inventory(), a in 0i64..10_000_000, b in 0i64..10_000_000) {
        let inv = to_inventory(&items);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let small = trim_select(lo as f64 / 1e6, &inv).unwrap();
        let large = trim_select(hi as f64 / 1e6, &inv).unwrap();
        prop_assert!(large.total >= small.total);
    }
}
