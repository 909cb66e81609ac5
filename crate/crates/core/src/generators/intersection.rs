use super::GeneratorError;
use crate::arena::{GameArena, Player, Priority, Vertex};

/// Vertices of one copy of the intersection arena.
pub const INTERSECTION_VERTICES: usize = 22;

/// Shape of the intersection arena: `(parent, won, payoff)` per vertex,
/// payoff bits listed for objectives 1 to 4. The root has no parent.
/// Every vertex carries a self-loop realizing its extended payoff.
const SHAPE: [(Option<usize>, bool, [bool; 4]); INTERSECTION_VERTICES] = {
    const F: bool = false;
    const T: bool = true;
    [
        (None, F, [F, F, F, F]),
        (Some(0), F, [F, F, F, T]),
        (Some(1), F, [T, F, F, T]),
        (Some(0), T, [F, F, T, T]),
        (Some(3), T, [T, F, T, T]),
        (Some(0), F, [F, F, F, T]),
        (Some(5), F, [F, F, F, T]),
        (Some(0), F, [F, F, T, F]),
        (Some(7), F, [F, F, T, F]),
        (Some(8), T, [T, F, T, F]),
        (Some(7), T, [F, F, T, F]),
        (Some(10), T, [T, F, T, F]),
        (Some(0), F, [F, T, F, F]),
        (Some(12), F, [F, T, F, F]),
        (Some(13), T, [T, T, F, F]),
        (Some(12), T, [F, T, F, F]),
        (Some(15), T, [T, T, F, F]),
        (Some(0), T, [F, F, F, F]),
        (Some(17), T, [F, F, T, F]),
        (Some(18), T, [T, F, T, F]),
        (Some(17), T, [F, T, F, F]),
        (Some(20), T, [T, T, F, F]),
    ]
};

/// Final loop of the last branch with payoff (1,1,0,0).
const NEGATIVE_TARGET: usize = 21;

fn bit(b: bool) -> Priority {
    if b {
        0
    } else {
        1
    }
}

/// Builds `copies` copies of the intersection arena.
///
/// With one copy the arena is exactly the 22-vertex base graph. With more,
/// a fresh initial vertex 0 leads to the roots of the copies, copy `c`
/// occupying vertices `1 + 22c ..`. Without `per_copy_objectives` all copies
/// share the four objectives. With it, objectives 1 and 4 stay shared while
/// objectives 2 and 3 are duplicated for each copy, giving `2 + 2k`
/// objectives ordered as `1, 2¹, 3¹, …, 2ᵏ, 3ᵏ, 4`. `negative` makes the
/// final (1,1,0,0) loop of every copy losing for the system.
pub fn gen_intersection(copies: usize, per_copy_objectives: bool, negative: bool) -> Result<GameArena, GeneratorError> {
    if copies == 0 {
        return Err(GeneratorError::InvalidParameter("at least one copy is required".into()));
    }
    let t = if per_copy_objectives { 2 + 2 * copies } else { 4 };
    let offset = usize::from(copies > 1);
    let n = offset + copies * INTERSECTION_VERTICES;

    let mut successors: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    let mut priorities: Vec<Vec<Priority>> = vec![vec![1; t + 1]; n];
    if copies > 1 {
        successors[0] = (0..copies).map(|c| offset + c * INTERSECTION_VERTICES).collect();
    }

    for c in 0..copies {
        let base = offset + c * INTERSECTION_VERTICES;
        for (v, &(parent, won, payoff)) in SHAPE.iter().enumerate() {
            successors[base + v].push(base + v);
            if let Some(parent) = parent {
                successors[base + parent].push(base + v);
            }
            let row = &mut priorities[base + v];
            row[0] = if negative && v == NEGATIVE_TARGET { 1 } else { bit(won) };
            let (second, third) = if per_copy_objectives { (2 + 2 * c, 3 + 2 * c) } else { (2, 3) };
            row[1] = bit(payoff[0]);
            row[second] = bit(payoff[1]);
            row[third] = bit(payoff[2]);
            row[t] = bit(payoff[3]);
        }
    }

    let arena = GameArena::try_new(vec![Player::Environment; n], successors, 0, priorities, Some(vec![2; t + 1]))
        .expect("intersection arena is valid by construction");
    Ok(arena)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emptiness::extended_payoff;

    #[test]
    fn base_arena_shape() {
        let a = gen_intersection(1, false, false).unwrap();
        assert_eq!(a.vertex_count(), 22);
        assert_eq!(a.objective_count(), 4);
        assert_eq!(a.successors(0), &[0, 1, 3, 5, 7, 12, 17]);
        assert_eq!(a.edge_count(), 22 + 21);
        assert_eq!(extended_payoff(&a, &[4]).to_string(), "1,(1,0,1,1)");
        assert_eq!(extended_payoff(&a, &[21]).to_string(), "1,(1,1,0,0)");
        assert_eq!(a.max_priorities(), &[2; 5]);
    }

    #[test]
    fn copies_and_objective_layout() {
        let a = gen_intersection(2, true, false).unwrap();
        assert_eq!(a.vertex_count(), 45);
        assert_eq!(a.objective_count(), 6);
        assert_eq!(a.successors(0), &[1, 23]);
        assert_eq!(a.priorities(0), &[1; 7]);
        // Second copy's vertex 14 realizes (1,1,0,0) on its own objectives.
        assert_eq!(extended_payoff(&a, &[23 + 14]).to_string(), "1,(1,0,0,1,0,0)");
        assert_eq!(extended_payoff(&a, &[1 + 14]).to_string(), "1,(1,1,0,0,0,0)");

        let shared = gen_intersection(3, false, false).unwrap();
        assert_eq!(shared.vertex_count(), 67);
        assert_eq!(shared.objective_count(), 4);
    }

    #[test]
    fn negative_flips_one_loop_per_copy() {
        let a = gen_intersection(2, false, true).unwrap();
        let lost: Vec<usize> = a.vertices().filter(|&v| v > 0 && (v - 1) % 22 == 21).collect();
        assert_eq!(lost, vec![22, 44]);
        for v in lost {
            assert_eq!(a.priority(v, 0), 1);
        }
        assert_eq!(gen_intersection(0, false, false), Err(GeneratorError::InvalidParameter("at least one copy is required".into())));
    }
}
