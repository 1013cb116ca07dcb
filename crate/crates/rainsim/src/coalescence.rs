//! Droplet coalescence: geometric contact detection on the torus, the
//! stochastic merge pass, the mean-field pair rates `T_N^delta`, and an
//! exact event-driven (Gillespie) runner for validating the collision
//! accounting.
//!
//! Total alive volume is conserved by every merge: the absorber's volume
//! becomes the floating-point sum of the pair, the absorbed particle is
//! zeroed and marked dead.

use std::sync::Arc;

use rand::Rng;

use crate::domain::{Domain, Particle};
use crate::error::{Result, SimError};
use crate::kernels::contact_scale;

/// Geometric contact rule; droplets touch when their minimal-image
/// distance is at most the sum of their radii (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContactRule {
    #[default]
    SumOfRadii,
}

/// Pass order over contacting pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairOrder {
    #[default]
    AscendingDistance,
}

/// Parameters of the stochastic merge pass.
///
/// A contacting pair merges when a uniform draw exceeds `p_mean`, so the
/// merge probability is `1 - p_mean`. With `p_mean = 0` every contact
/// merges and no draws are consumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoalescenceParams {
    pub p_mean: f64,
    pub contact_rule: ContactRule,
    pub pair_order: PairOrder,
}

impl CoalescenceParams {
    pub fn new(p_mean: f64) -> Self {
        assert!((0.0..=1.0).contains(&p_mean), "p_mean must be in [0, 1]");
        CoalescenceParams {
            p_mean,
            contact_rule: ContactRule::SumOfRadii,
            pair_order: PairOrder::AscendingDistance,
        }
    }
}

/// Bounded symmetric collision efficiency `k(v, w)`.
#[derive(Clone)]
pub enum Efficiency {
    Constant(f64),
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl Efficiency {
    pub fn eval(&self, v: f64, w: f64) -> f64 {
        match self {
            Efficiency::Constant(c) => *c,
            Efficiency::Custom(f) => f(v, w),
        }
    }
}

impl std::fmt::Debug for Efficiency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Efficiency::Constant(c) => write!(f, "Efficiency::Constant({c})"),
            Efficiency::Custom(_) => write!(f, "Efficiency::Custom(..)"),
        }
    }
}

/// Parameters of the mean-field pair rate
/// `T_N^delta(i, j) = (1/2) N^-1 delta^-3 I(|x_i - x_j| <= delta f(v_i, v_j)) k(v_i, v_j)`.
#[derive(Debug, Clone)]
pub struct KernelRateParams {
    /// Interaction range scale (> 0).
    pub delta: f64,
    /// Mean-field normalization N.
    pub n_scale: f64,
    pub efficiency: Efficiency,
}

impl KernelRateParams {
    pub fn new(delta: f64, n_scale: f64, efficiency: Efficiency) -> Self {
        assert!(delta > 0.0, "delta must be > 0");
        assert!(n_scale > 0.0, "n_scale must be > 0");
        KernelRateParams {
            delta,
            n_scale,
            efficiency,
        }
    }
}

/// One merge: the absorber keeps its id and position, the absorbed droplet
/// is removed; `volume_after` is the sum of the pair.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MergeEvent {
    pub time: f64,
    pub absorber_id: u64,
    pub absorbed_id: u64,
    pub volume_after: f64,
}

/// A contacting pair, by slice index, with its minimal-image distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactPair {
    pub i: usize,
    pub j: usize,
    pub dist: f64,
}

fn contact(particles: &[Particle], d: &Domain, i: usize, j: usize) -> Option<ContactPair> {
    let (a, b) = (&particles[i], &particles[j]);
    let dist = d.distance(a.pos, b.pos);
    if dist <= a.radius() + b.radius() {
        Some(ContactPair { i, j, dist })
    } else {
        None
    }
}

fn sort_pairs(pairs: &mut [ContactPair]) {
    pairs.sort_by(|p, q| {
        p.dist
            .partial_cmp(&q.dist)
            .expect("finite distances")
            .then(p.i.cmp(&q.i))
            .then(p.j.cmp(&q.j))
    });
}

/// All alive pairs whose minimal-image distance is at most the sum of
/// their radii (inclusive boundary), each unordered pair once, sorted by
/// ascending distance.
///
/// Backed by a uniform grid whose cell size is at least twice the largest
/// current radius, so a 3x3 neighborhood always covers the contact range.
/// Degenerate grids (fewer than 3 cells per axis) fall back to the plain
/// quadratic scan.
pub fn find_contact_pairs(particles: &[Particle], d: &Domain) -> Vec<ContactPair> {
    let alive: Vec<usize> = (0..particles.len()).filter(|&i| particles[i].alive).collect();
    let mut pairs = Vec::new();
    if alive.len() < 2 {
        return pairs;
    }
    let max_r = alive
        .iter()
        .map(|&i| particles[i].radius())
        .fold(0.0f64, f64::max);

    let side = d.side();
    // cell >= 2 max_r keeps contacts within one neighborhood; the sqrt cap
    // keeps the cell table near O(alive)
    let by_radius = if max_r > 0.0 {
        (side / (2.0 * max_r)).floor()
    } else {
        f64::INFINITY
    };
    let cap = 2.0 * (alive.len() as f64).sqrt().ceil();
    let n_axis = by_radius.min(cap).max(1.0) as usize;

    if n_axis < 3 {
        for (a, &i) in alive.iter().enumerate() {
            for &j in &alive[a + 1..] {
                if let Some(p) = contact(particles, d, i, j) {
                    pairs.push(p);
                }
            }
        }
        sort_pairs(&mut pairs);
        return pairs;
    }

    let cell_of = |x: f64| -> usize {
        let c = ((x + d.half_width()) / side * n_axis as f64).floor() as isize;
        (c.max(0) as usize).min(n_axis - 1)
    };
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); n_axis * n_axis];
    for &i in &alive {
        let p = &particles[i];
        cells[cell_of(p.pos.y) * n_axis + cell_of(p.pos.x)].push(i);
    }

    // half stencil so every unordered cell pair is visited once
    const STENCIL: [(isize, isize); 5] = [(0, 0), (1, 0), (0, 1), (1, 1), (-1, 1)];
    let wrap_idx = |c: isize| -> usize { c.rem_euclid(n_axis as isize) as usize };
    for cy in 0..n_axis {
        for cx in 0..n_axis {
            let here = &cells[cy * n_axis + cx];
            if here.is_empty() {
                continue;
            }
            for (dx, dy) in STENCIL {
                let ox = wrap_idx(cx as isize + dx);
                let oy = wrap_idx(cy as isize + dy);
                let there = &cells[oy * n_axis + ox];
                if (dx, dy) == (0, 0) {
                    for (a, &i) in here.iter().enumerate() {
                        for &j in &here[a + 1..] {
                            let (i, j) = (i.min(j), i.max(j));
                            if let Some(p) = contact(particles, d, i, j) {
                                pairs.push(p);
                            }
                        }
                    }
                } else {
                    for &i in here {
                        for &j in there {
                            let (i, j) = (i.min(j), i.max(j));
                            if let Some(p) = contact(particles, d, i, j) {
                                pairs.push(p);
                            }
                        }
                    }
                }
            }
        }
    }
    sort_pairs(&mut pairs);
    pairs
}

fn merge(particles: &mut [Particle], i: usize, j: usize, time: f64) -> MergeEvent {
    // I(v_i >= v_j): first-indexed wins ties; absorber keeps its position
    let (winner, loser) = if particles[i].volume >= particles[j].volume {
        (i, j)
    } else {
        (j, i)
    };
    let combined = particles[winner].volume + particles[loser].volume;
    particles[winner].volume = combined;
    particles[loser].volume = 0.0;
    particles[loser].alive = false;
    MergeEvent {
        time,
        absorber_id: particles[winner].id,
        absorbed_id: particles[loser].id,
        volume_after: combined,
    }
}

/// Run the stochastic merge pass over contacting pairs (assumed sorted by
/// ascending distance).
///
/// Pairs whose members died earlier in the pass are skipped; an absorber
/// participates in later pairs with its updated volume but its original
/// position. One uniform draw is consumed per examined live pair when
/// `p_mean > 0`; none when `p_mean = 0`.
pub fn coalesce_pass(
    particles: &mut [Particle],
    pairs: &[ContactPair],
    cp: &CoalescenceParams,
    rng: &mut impl Rng,
    time: f64,
) -> Vec<MergeEvent> {
    let mut events = Vec::new();
    for pair in pairs {
        if !particles[pair.i].alive || !particles[pair.j].alive {
            continue;
        }
        if cp.p_mean > 0.0 {
            let phi = rng.random::<f64>();
            if phi <= cp.p_mean {
                continue; // bounce
            }
        }
        events.push(merge(particles, pair.i, pair.j, time));
    }
    events
}

/// The mean-field pair rate `T_N^delta(i, j)`. Zero when the pair is out
/// of range; both particles are assumed alive.
pub fn tn_delta_rate(pi: &Particle, pj: &Particle, kp: &KernelRateParams, d: &Domain) -> f64 {
    debug_assert!(pi.alive && pj.alive);
    let reach = kp.delta * contact_scale(pi.volume, pj.volume);
    if d.distance(pi.pos, pj.pos) <= reach {
        0.5 / kp.n_scale / (kp.delta * kp.delta * kp.delta)
            * kp.efficiency.eval(pi.volume, pj.volume)
    } else {
        0.0
    }
}

fn pair_rates(
    particles: &[Particle],
    kp: &KernelRateParams,
    d: &Domain,
) -> Vec<(usize, usize, f64)> {
    let alive: Vec<usize> = (0..particles.len()).filter(|&i| particles[i].alive).collect();
    let mut rates = Vec::new();
    for (a, &i) in alive.iter().enumerate() {
        for &j in &alive[a + 1..] {
            let r = tn_delta_rate(&particles[i], &particles[j], kp, d);
            if r > 0.0 {
                rates.push((i, j, r));
            }
        }
    }
    rates
}

fn check_pair_budget(particles: &[Particle]) -> Result<()> {
    let n = particles.iter().filter(|p| p.alive).count();
    let pairs = n * n.saturating_sub(1) / 2;
    if pairs > 10_000 {
        return Err(SimError::Config(format!(
            "rate-based runners enumerate all pairs; got {pairs} (> 10000)"
        )));
    }
    Ok(())
}

/// Exact event-driven simulation of the pure-jump coalescence process with
/// rates `T_N^delta`, positions frozen.
///
/// Repeatedly draws an exponential waiting time from the total rate,
/// selects a pair proportionally to its rate, and applies the merge (the
/// heavier droplet absorbs; the absorber keeps its position). Stops at the
/// horizon or when the total rate vanishes.
pub fn gillespie_run(
    particles: &mut [Particle],
    kp: &KernelRateParams,
    d: &Domain,
    horizon: f64,
    rng: &mut impl Rng,
) -> Result<Vec<MergeEvent>> {
    check_pair_budget(particles)?;
    let mut events = Vec::new();
    let mut t = 0.0f64;
    loop {
        let rates = pair_rates(particles, kp, d);
        let total: f64 = rates.iter().map(|r| r.2).sum();
        if total <= 0.0 {
            break;
        }
        // u in (0, 1] so ln never sees zero
        let u = 1.0 - rng.random::<f64>();
        t += -u.ln() / total;
        if t > horizon {
            break;
        }
        let mut pick = rng.random::<f64>() * total;
        let mut chosen = rates.len() - 1;
        for (idx, r) in rates.iter().enumerate() {
            pick -= r.2;
            if pick < 0.0 {
                chosen = idx;
                break;
            }
        }
        let (i, j, _) = rates[chosen];
        events.push(merge(particles, i, j, t));
    }
    Ok(events)
}

/// Time-stepped counterpart of [`gillespie_run`]: positions frozen, each
/// step every alive pair merges independently with probability
/// `rate * dt`.
///
/// Guards that `rate * dt` stays at or below 0.01 so the Bernoulli
/// approximation of the exponential clock is faithful.
pub fn stepped_coalescence_run(
    particles: &mut [Particle],
    kp: &KernelRateParams,
    d: &Domain,
    horizon: f64,
    dt: f64,
    rng: &mut impl Rng,
) -> Result<Vec<MergeEvent>> {
    check_pair_budget(particles)?;
    if dt <= 0.0 {
        return Err(SimError::Config(format!("dt must be positive, got {dt}")));
    }
    let steps = (horizon / dt).floor() as u64;
    let mut events = Vec::new();
    for step in 1..=steps {
        let time = step as f64 * dt;
        let rates = pair_rates(particles, kp, d);
        for (i, j, rate) in rates {
            if !particles[i].alive || !particles[j].alive {
                continue;
            }
            let p = rate * dt;
            if p > 0.01 {
                return Err(SimError::Numerical(format!(
                    "per-step merge probability {p} exceeds 0.01; shrink dt ({dt})"
                )));
            }
            if rng.random::<f64>() < p {
                events.push(merge(particles, i, j, time));
            }
        }
    }
    Ok(events)
}
