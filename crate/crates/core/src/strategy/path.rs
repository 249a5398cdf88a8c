//! Winning moves in PathNim PN(n,k) with k >= ceil(n/2).

use crate::characterizations::path_holds;

/// Target of a winning window move, or `None` when `heights` is already P.
///
/// A P-position has k-1 zeros at `u+1..u+k-1` with equal sums on both
/// sides. A single window covers that run plus one neighbour, so the move
/// empties the run and trims either `p_u` or `p_{u+k}` to balance the sums.
pub fn path_target(heights: &[u64], k: usize) -> Option<Vec<u64>> {
    let n = heights.len();
    if path_holds(heights, k) {
        return None;
    }
    if n == k {
        return Some(vec![0; n]);
    }
    let total: u64 = heights.iter().sum();
    let mut prefix = 0u64;
    for u in 1..=n - k {
        prefix += heights[u - 1];
        let run: u64 = heights[u..u + k - 1].iter().sum();
        let suffix = total - prefix - run;
        let left = heights[u - 1];
        if prefix - left <= suffix && suffix <= prefix {
            let mut t = heights.to_vec();
            t[u..u + k - 1].fill(0);
            t[u - 1] -= prefix - suffix;
            return Some(t);
        }
        let right = heights[u + k - 1];
        if suffix - right <= prefix && prefix <= suffix {
            let mut t = heights.to_vec();
            t[u..u + k - 1].fill(0);
            t[u + k - 1] -= suffix - prefix;
            return Some(t);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balances_around_a_zero_run() {
        assert_eq!(path_target(&[3, 2, 0, 1], 2), Some(vec![1, 0, 0, 1]));
        assert_eq!(path_target(&[2, 1, 0, 0, 3], 3), None);
        assert_eq!(path_target(&[1, 1], 2), Some(vec![0, 0]));
        let t = path_target(&[2, 1, 0, 1, 3], 3).unwrap();
        assert!(path_holds(&t, 3));
    }
}
