//! Neutral-buoyancy trim: how much ballast the hull needs, and which pieces
//! from a weight inventory come closest to it.
//!
//! Masses are resolved to the milligram before selection so that sums and
//! ties are exact.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::RobotParams;
use crate::error::{Result, SimError};

/// Largest inventory `trim_select` accepts.
pub const MAX_PIECES: u32 = 64;

const MG_PER_KG: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightItem {
    #[serde(rename = "mass_kg")]
    pub mass: f64,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WeightInventory {
    pub items: Vec<WeightItem>,
}

impl WeightInventory {
    /// Six 500 g and two 1 kg weights.
    pub fn tank_trial() -> Self {
        Self {
            items: vec![
                WeightItem { mass: 0.5, count: 6 },
                WeightItem { mass: 1.0, count: 2 },
            ],
        }
    }

    pub fn piece_count(&self) -> u32 {
        self.items.iter().map(|i| i.count).sum()
    }

    pub fn validate(&self) -> Result<()> {
        for item in &self.items {
            if !(item.mass > 0.0 && item.mass.is_finite()) {
                return Err(SimError::param("inventory.mass", "must be positive"));
            }
            if to_mg(item.mass) == 0 {
                return Err(SimError::param("inventory.mass", "below 1 mg resolution"));
            }
        }
        if self.piece_count() > MAX_PIECES {
            return Err(SimError::param(
                "inventory",
                format!("at most {MAX_PIECES} pieces supported"),
            ));
        }
        Ok(())
    }
}

/// Ballast that brings the hull to neutral buoyancy; negative means the hull
/// is already too heavy before any ballast.
pub fn neutral_ballast_mass(fluid_density: f64, displaced_volume: f64, dry_mass: f64) -> f64 {
    fluid_density * displaced_volume - dry_mass
}

/// Displaced volume at which a hull of `total_mass` is neutrally buoyant.
pub fn neutral_volume(total_mass: f64, fluid_density: f64) -> f64 {
    total_mass / fluid_density
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrimSelection {
    /// Selected pieces, ascending by mass.
    #[serde(rename = "weights_kg")]
    pub weights: Vec<f64>,
    #[serde(rename = "total_kg")]
    pub total: f64,
    /// `|residual - total|`.
    #[serde(rename = "error_kg")]
    pub error: f64,
    /// Set when ballast was needed but the inventory was empty.
    pub empty_inventory: bool,
}

fn to_mg(kg: f64) -> i64 {
    (kg * MG_PER_KG).round() as i64
}

/// Candidate counts, one entry per distinct mass in ascending order.
#[derive(Debug, Clone)]
struct Candidate {
    counts: Vec<u32>,
    pieces: u32,
}

/// Fewer pieces first; for equal piece counts the lexicographically smaller
/// sorted mass list wins, which is the one holding more copies of the
/// smallest mass at which the two differ.
fn preference(a: &Candidate, b: &Candidate) -> Ordering {
    a.pieces.cmp(&b.pieces).then_with(|| {
        a.counts
            .iter()
            .zip(&b.counts)
            .find(|(x, y)| x != y)
            .map_or(Ordering::Equal, |(x, y)| y.cmp(x))
    })
}

fn keep_better(slot: &mut Option<(i64, Candidate)>, sum: i64, cand: Candidate, residual: i64) {
    let better = match slot {
        None => true,
        Some((s, cur)) => {
            let (e_new, e_cur) = ((residual - sum).abs(), (residual - *s).abs());
            e_new < e_cur || (e_new == e_cur && preference(&cand, cur) == Ordering::Less)
        }
    };
    if better {
        *slot = Some((sum, cand));
    }
}

/// Picks the sub-multiset of `inventory` whose total is closest to
/// `residual`. Ties go to fewer pieces, then to the lexicographically smallest
/// ascending mass list.
pub fn trim_select(residual: f64, inventory: &WeightInventory) -> Result<TrimSelection> {
    if !(residual >= 0.0 && residual.is_finite()) {
        return Err(SimError::param("residual_mass", "must be non-negative"));
    }
    inventory.validate()?;

    let mut types: BTreeMap<i64, u32> = BTreeMap::new();
    for item in inventory.items.iter().filter(|i| i.count > 0) {
        *types.entry(to_mg(item.mass)).or_default() += item.count;
    }
    let masses: Vec<(i64, u32)> = types.into_iter().collect();
    let target = to_mg(residual);

    // Partial sums at or below the target, best candidate per sum. Anything
    // above the target only gets worse by adding mass, so it goes straight to
    // the overshoot slot.
    let empty = Candidate { counts: vec![0; masses.len()], pieces: 0 };
    let mut frontier: BTreeMap<i64, Candidate> = BTreeMap::from([(0, empty)]);
    let mut overshoot: Option<(i64, Candidate)> = None;

    for (k, &(mass, count)) in masses.iter().enumerate() {
        let mut next: BTreeMap<i64, Candidate> = BTreeMap::new();
        for (&sum, cand) in &frontier {
            for n in 0..=count {
                let s = sum + mass * i64::from(n);
                let mut c = cand.clone();
                c.counts[k] = n;
                c.pieces += n;
                if s > target {
                    keep_better(&mut overshoot, s, c, target);
                    break;
                }
                match next.get(&s) {
                    Some(existing) if preference(existing, &c) != Ordering::Greater => {}
                    _ => {
                        next.insert(s, c);
                    }
                }
            }
        }
        frontier = next;
    }

    let mut best = overshoot;
    if let Some((&sum, cand)) = frontier.iter().next_back() {
        keep_better(&mut best, sum, cand.clone(), target);
    }
    let (sum, cand) = best.expect("the empty selection is always a candidate");

    let weights: Vec<f64> = masses
        .iter()
        .zip(&cand.counts)
        .flat_map(|(&(mass, _), &n)| std::iter::repeat_n(mass as f64 / MG_PER_KG, n as usize))
        .collect();
    Ok(TrimSelection {
        weights,
        total: sum as f64 / MG_PER_KG,
        error: (target - sum).abs() as f64 / MG_PER_KG,
        empty_inventory: inventory.piece_count() == 0 && target > 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    #[serde(rename = "displaced_volume_m3")]
    pub displaced_volume: f64,
    #[serde(rename = "dry_mass_kg")]
    pub dry_mass: f64,
    /// Ballast for exact neutral buoyancy; negative if the dry hull already sinks.
    #[serde(rename = "neutral_ballast_kg")]
    pub neutral_ballast: f64,
    pub selection: TrimSelection,
    /// Net downward force left after fitting the selected pieces.
    #[serde(rename = "residual_weight_n")]
    pub residual_weight: f64,
}

/// Neutral ballast for `robot` and the closest pick from `inventory`.
pub fn calibrate(robot: &RobotParams, inventory: &WeightInventory) -> Result<CalibrationReport> {
    robot.validate()?;
    let neutral = neutral_ballast_mass(robot.fluid_density, robot.displaced_volume, robot.dry_mass);
    let selection = trim_select(neutral.max(0.0), inventory)?;
    let residual_weight =
        (robot.dry_mass + selection.total - robot.fluid_density * robot.displaced_volume) * robot.gravity;
    Ok(CalibrationReport {
        displaced_volume: robot.displaced_volume,
        dry_mass: robot.dry_mass,
        neutral_ballast: neutral,
        selection,
        residual_weight,
    })
}
