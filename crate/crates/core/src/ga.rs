//! Elitist genetic algorithm over action sequences `{−1, 0, +1}^m`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::objective::Revenue;

/// A fitness value the GA can rank and test for convergence.
pub trait Fitness: Copy + PartialOrd {
    fn score(&self) -> f64;

    /// Whether `self` beats `old` by more than the relative tolerance `eps`.
    fn improves_on(&self, old: &Self, eps: f64) -> bool;
}

impl Fitness for f64 {
    fn score(&self) -> f64 {
        *self
    }

    fn improves_on(&self, old: &Self, eps: f64) -> bool {
        self - old > eps * old.abs()
    }
}

impl Fitness for Revenue {
    fn score(&self) -> f64 {
        Revenue::score(self)
    }

    fn improves_on(&self, old: &Self, eps: f64) -> bool {
        match (self, old) {
            (Revenue::Feasible(a), Revenue::Feasible(b)) => a.improves_on(b, eps),
            _ => self > old,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub max_generations: usize,
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    /// Relative improvement below which a generation counts as stalled.
    pub epsilon: f64,
    pub elite: usize,
    /// Consecutive stalled generations that end the run.
    pub stall_generations: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig::rotor()
    }
}

impl GaConfig {
    pub fn rotor() -> Self {
        GaConfig {
            population: 100,
            max_generations: 50,
            mutation_rate: 0.5,
            crossover_rate: 0.5,
            epsilon: 1e-3,
            elite: 2,
            stall_generations: 5,
        }
    }

    pub fn fixed_wing() -> Self {
        GaConfig {
            population: 300,
            mutation_rate: 0.9,
            crossover_rate: 0.9,
            ..GaConfig::rotor()
        }
    }

    /// Problems with this configuration, if any.
    pub fn problem(&self) -> Option<&'static str> {
        if self.population < 2 {
            Some("population must be at least 2")
        } else if self.max_generations < 1 {
            Some("max_generations must be at least 1")
        } else if !(0.0..=1.0).contains(&self.mutation_rate)
            || !(0.0..=1.0).contains(&self.crossover_rate)
        {
            Some("mutation and crossover rates must lie in [0, 1]")
        } else if self.elite < 1 || self.elite > self.population {
            Some("elite count must lie in 1..=population")
        } else if !(self.epsilon >= 0.0) {
            Some("epsilon must be non-negative")
        } else if self.stall_generations < 1 {
            Some("stall_generations must be at least 1")
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome<F> {
    pub best: Vec<i8>,
    pub best_fitness: F,
    /// Extremes of the scalar score over every evaluated sequence.
    pub min_score: f64,
    pub max_score: f64,
    pub generations: usize,
    /// Distinct sequences evaluated.
    pub evaluations: usize,
    /// Best-ever fitness after each generation.
    pub trace: Vec<F>,
}

/// Base-3 code of a genome, unique for `m ≤ 40`.
pub fn genome_code(genome: &[i8]) -> u64 {
    genome.iter().fold(0u64, |acc, &g| acc * 3 + (g + 1) as u64)
}

fn random_gene<R: Rng + ?Sized>(rng: &mut R) -> i8 {
    rng.gen_range(-1i8..=1)
}

fn cmp<F: PartialOrd>(a: &F, b: &F) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Maximize `fitness` over sequences of length `m`.
///
/// The initial random population is generation 1. Each later generation keeps
/// the `elite` best unchanged and fills the rest by size-2 tournaments,
/// single-point crossover and per-gene resampling. The run stops after
/// `max_generations` or once the best fitness has failed to improve by the
/// relative tolerance for `stall_generations` generations in a row. Fitness
/// values are memoized per genome, so the function is called at most once
/// per distinct sequence.
pub fn ga_optimize<F, R, E>(m: usize, cfg: &GaConfig, rng: &mut R, fitness: E) -> GaOutcome<F>
where
    F: Fitness,
    R: Rng + ?Sized,
    E: FnMut(&[i8]) -> F,
{
    ga_optimize_seeded(m, cfg, rng, &[], fitness)
}

/// [`ga_optimize`] with the first members of the initial population fixed to
/// `seeds` (each of length `m`); the rest stay uniformly random.
pub fn ga_optimize_seeded<F, R, E>(
    m: usize,
    cfg: &GaConfig,
    rng: &mut R,
    seeds: &[Vec<i8>],
    mut fitness: E,
) -> GaOutcome<F>
where
    F: Fitness,
    R: Rng + ?Sized,
    E: FnMut(&[i8]) -> F,
{
    assert!(m >= 1 && m <= 40, "horizon must lie in 1..=40");
    let mut memo: BTreeMap<u64, F> = BTreeMap::new();
    let mut min_score = f64::INFINITY;
    let mut max_score = f64::NEG_INFINITY;
    let mut eval = |genome: &[i8], memo: &mut BTreeMap<u64, F>| -> F {
        let code = genome_code(genome);
        if let Some(f) = memo.get(&code) {
            return *f;
        }
        let f = fitness(genome);
        let s = f.score();
        min_score = min_score.min(s);
        max_score = max_score.max(s);
        memo.insert(code, f);
        f
    };

    let mut pop: Vec<Vec<i8>> = seeds.iter().take(cfg.population).cloned().collect();
    assert!(
        pop.iter().all(|s| s.len() == m),
        "seed length must equal the horizon"
    );
    while pop.len() < cfg.population {
        pop.push((0..m).map(|_| random_gene(rng)).collect());
    }
    let mut fit: Vec<F> = pop.iter().map(|g| eval(g, &mut memo)).collect();

    let mut order: Vec<usize> = (0..pop.len()).collect();
    let rank = |order: &mut Vec<usize>, fit: &[F]| {
        order.sort_by(|&a, &b| cmp(&fit[b], &fit[a]).then(a.cmp(&b)));
    };
    rank(&mut order, &fit);
    let mut best = pop[order[0]].clone();
    let mut best_fit = fit[order[0]];
    let mut trace = alloc::vec![best_fit];
    let mut generations = 1;
    let mut stalled = 0;

    while generations < cfg.max_generations {
        let mut next: Vec<Vec<i8>> = Vec::with_capacity(cfg.population);
        for &i in order.iter().take(cfg.elite) {
            next.push(pop[i].clone());
        }
        let tournament = |rng: &mut R| -> usize {
            let a = rng.gen_range(0..pop.len());
            let b = rng.gen_range(0..pop.len());
            if cmp(&fit[b], &fit[a]) == Ordering::Greater {
                b
            } else {
                a
            }
        };
        while next.len() < cfg.population {
            let pa = tournament(rng);
            let pb = tournament(rng);
            let (mut c1, mut c2) = (pop[pa].clone(), pop[pb].clone());
            if m > 1 && rng.gen_bool(cfg.crossover_rate) {
                let cut = rng.gen_range(1..m);
                c1[cut..].copy_from_slice(&pop[pb][cut..]);
                c2[cut..].copy_from_slice(&pop[pa][cut..]);
            }
            for child in [&mut c1, &mut c2] {
                for gene in child.iter_mut() {
                    if rng.gen_bool(cfg.mutation_rate) {
                        *gene = random_gene(rng);
                    }
                }
            }
            next.push(c1);
            if next.len() < cfg.population {
                next.push(c2);
            }
        }
        pop = next;
        fit = pop.iter().map(|g| eval(g, &mut memo)).collect();
        rank(&mut order, &fit);
        generations += 1;

        let gen_best = fit[order[0]];
        if gen_best.improves_on(&best_fit, cfg.epsilon) {
            stalled = 0;
        } else {
            stalled += 1;
        }
        if cmp(&gen_best, &best_fit) == Ordering::Greater {
            best = pop[order[0]].clone();
            best_fit = gen_best;
        }
        trace.push(best_fit);
        if stalled >= cfg.stall_generations {
            break;
        }
    }

    GaOutcome {
        best,
        best_fitness: best_fit,
        min_score,
        max_score,
        generations,
        evaluations: memo.len(),
        trace,
    }
}

/// Best sequence by full `3^m` enumeration, ties going to the first in
/// base-3 order.
pub fn exhaustive_best<F: Fitness>(m: usize, mut fitness: impl FnMut(&[i8]) -> F) -> (Vec<i8>, F) {
    assert!(m >= 1 && m <= 12, "exhaustive search limited to m ≤ 12");
    let mut genome = alloc::vec![-1i8; m];
    let mut best = genome.clone();
    let mut best_fit = fitness(&genome);
    loop {
        let mut k = m;
        loop {
            if k == 0 {
                return (best, best_fit);
            }
            k -= 1;
            if genome[k] < 1 {
                genome[k] += 1;
                break;
            }
            genome[k] = -1;
        }
        let f = fitness(&genome);
        if cmp(&f, &best_fit) == Ordering::Greater {
            best = genome.clone();
            best_fit = f;
        }
    }
}
