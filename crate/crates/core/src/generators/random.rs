use std::ops::RangeInclusive;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GeneratorError;
use crate::arena::{GameArena, Player, Priority, Vertex};

/// Parameters of a random single-player arena.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSpec {
    pub vertices: usize,
    pub objectives: usize,
    /// Largest priority, shared by all objectives; must be even.
    pub max_priority: Priority,
    pub seed: u64,
    pub out_degree: RangeInclusive<usize>,
}

impl RandomSpec {
    pub fn new(vertices: usize, objectives: usize, max_priority: Priority, seed: u64) -> Self {
        RandomSpec { vertices, objectives, max_priority, seed, out_degree: 1..=4 }
    }
}

/// Draws an arena rooted at vertex 0. Each vertex picks its out-degree
/// uniformly from the range (capped at the vertex count) and that many
/// distinct targets; every priority, including the system's, is uniform
/// in `0..=max_priority`. Equal specs give equal arenas.
pub fn gen_random(spec: &RandomSpec) -> Result<GameArena, GeneratorError> {
    let RandomSpec { vertices: n, objectives: t, max_priority: d, seed, ref out_degree } = *spec;
    if n == 0 {
        return Err(GeneratorError::InvalidParameter("vertex count must be positive".into()));
    }
    if d % 2 != 0 {
        return Err(GeneratorError::InvalidParameter(format!("maximum priority {d} is odd")));
    }
    if *out_degree.start() == 0 || out_degree.is_empty() {
        return Err(GeneratorError::InvalidParameter(format!(
            "out-degree range {}..={} must be nonempty and start at 1 or more",
            out_degree.start(),
            out_degree.end()
        )));
    }
    if t > crate::lattice::MAX_OBJECTIVES {
        return Err(GeneratorError::InvalidParameter(format!("{t} objectives exceed the supported maximum")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successors = Vec::with_capacity(n);
    let mut priorities = Vec::with_capacity(n);
    for _ in 0..n {
        let degree = rng.gen_range(out_degree.clone()).min(n);
        let mut targets: Vec<Vertex> = sample(&mut rng, n, degree).into_vec();
        targets.sort_unstable();
        successors.push(targets);
        priorities.push((0..=t).map(|_| rng.gen_range(0..=d)).collect::<Vec<_>>());
    }
    Ok(GameArena::try_new(vec![Player::Environment; n], successors, 0, priorities, Some(vec![d; t + 1]))
        .expect("random arena is valid by construction"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex_loops() {
        let a = gen_random(&RandomSpec::new(1, 2, 4, 7)).unwrap();
        assert_eq!(a.successors(0), &[0]);
        assert!(a.validate().is_empty());
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = RandomSpec::new(30, 3, 4, 11);
        assert_eq!(gen_random(&spec).unwrap(), gen_random(&spec).unwrap());
        let other = RandomSpec { seed: 12, ..spec };
        assert_ne!(gen_random(&other).unwrap(), gen_random(&RandomSpec::new(30, 3, 4, 11)).unwrap());
    }

    #[test]
    fn degrees_and_priorities_in_range() {
        let spec = RandomSpec { out_degree: 2..=3, ..RandomSpec::new(50, 2, 6, 3) };
        let a = gen_random(&spec).unwrap();
        for v in a.vertices() {
            assert!((2..=3).contains(&a.successors(v).len()));
            assert!(a.priorities(v).iter().all(|&p| p <= 6));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gen_random(&RandomSpec::new(0, 1, 2, 0)).is_err());
        assert!(gen_random(&RandomSpec::new(3, 1, 3, 0)).is_err());
        assert!(gen_random(&RandomSpec { out_degree: 0..=2, ..RandomSpec::new(3, 1, 2, 0) }).is_err());
    }
}
