//! Ordered jump lists and the exhaustion rule: from `≤ 0` the chain uses
//! the next positive jump, from `≥ 1` the next negative one.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JumpLists {
    pub start: i64,
    /// Magnitudes of the upward jumps, in order.
    pub positive: Vec<u64>,
    /// Magnitudes of the downward jumps, in order.
    pub negative: Vec<u64>,
}

impl JumpLists {
    pub fn steps(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn endpoint(&self) -> i64 {
        self.start + self.positive.iter().sum::<u64>() as i64 - self.negative.iter().sum::<u64>() as i64
    }

    /// Conditions under which the lists come from a trajectory ending at `y`:
    /// the sums match, the last upward jump is at least `y` and the last
    /// downward jump reaches `y − 1` or below.
    pub fn admissible_for(&self, y: i64) -> bool {
        if self.endpoint() != y {
            return false;
        }
        let up = self.positive.last().is_none_or(|&l| l as i64 >= y);
        let down = self.negative.last().is_none_or(|&l| -(l as i64) <= y - 1);
        up && down
    }
}

/// Splits a chain path into its ordered jump lists.
pub fn decompose_trajectory(traj: &[i64]) -> Result<JumpLists> {
    let Some(&start) = traj.first() else {
        return Err(Error::Precondition("empty trajectory".into()));
    };
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for (i, w) in traj.windows(2).enumerate() {
        let (z, next) = (w[0], w[1]);
        let d = next - z;
        if z <= 0 && d >= 1 {
            positive.push(d as u64);
        } else if z >= 1 && d <= -1 {
            negative.push((-d) as u64);
        } else {
            return Err(Error::SideMismatch { index: i, from: z });
        }
    }
    Ok(JumpLists {
        start,
        positive,
        negative,
    })
}

/// The unique chain path that consumes both lists.
pub fn reconstruct_trajectory(lists: &JumpLists) -> Result<Vec<i64>> {
    let n = lists.steps();
    let mut out = Vec::with_capacity(n + 1);
    let mut z = lists.start;
    out.push(z);
    let (mut i, mut j) = (0, 0);
    for step in 0..n {
        if z <= 0 {
            let Some(&l) = lists.positive.get(i) else {
                return Err(Error::Inadmissible {
                    step,
                    reason: format!("at {z} an upward jump is required but the list is exhausted"),
                });
            };
            z += l as i64;
            i += 1;
        } else {
            let Some(&l) = lists.negative.get(j) else {
                return Err(Error::Inadmissible {
                    step,
                    reason: format!("at {z} a downward jump is required but the list is exhausted"),
                });
            };
            z -= l as i64;
            j += 1;
        }
        out.push(z);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lists(start: i64, p: &[u64], n: &[u64]) -> JumpLists {
        JumpLists {
            start,
            positive: p.to_vec(),
            negative: n.to_vec(),
        }
    }

    #[test]
    fn forced_paths() {
        assert_eq!(reconstruct_trajectory(&lists(0, &[2], &[1, 1])).unwrap(), vec![0, 2, 1, 0]);
        assert_eq!(reconstruct_trajectory(&lists(0, &[1, 1], &[2])).unwrap(), vec![0, 1, -1, 0]);
    }

    #[test]
    fn decompositions() {
        assert_eq!(decompose_trajectory(&[0, 2, 1, 0]).unwrap(), lists(0, &[2], &[1, 1]));
        assert_eq!(decompose_trajectory(&[0, 1, 0]).unwrap(), lists(0, &[1], &[1]));
        let l = decompose_trajectory(&[0, 3, 1, -2, 1]).unwrap();
        assert!(l.admissible_for(1));
    }

    #[test]
    fn side_mismatch_names_the_step() {
        assert_eq!(
            decompose_trajectory(&[0, 2, 3]).unwrap_err(),
            Error::SideMismatch { index: 1, from: 2 }
        );
        assert!(decompose_trajectory(&[0, -1]).is_err());
    }

    #[test]
    fn exhausted_list() {
        let e = reconstruct_trajectory(&lists(0, &[3], &[1, 1, 1, 1])).unwrap_err();
        assert!(matches!(e, Error::Inadmissible { step: 4, .. }), "{e:?}");
        // sums give −1, yet the path stalls at 0 with no upward jump left
        let l = lists(0, &[1], &[1, 1]);
        assert!(!l.admissible_for(-1));
        assert!(reconstruct_trajectory(&l).is_err());
    }
}
