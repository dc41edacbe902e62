//! Binary representation of a permutation and trajectory tracing.

use crate::error::{usage, Result};
use crate::permute::{riffle_permutation, BitWord, Permutation};

/// `g` columns of `2^g` bits each. Row `j` is the `g`-bit string formed by
/// bit `j` of every column, column 0 first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    g: u32,
    columns: Vec<BitWord>,
}

impl BitMatrix {
    pub fn new(g: u32, columns: Vec<BitWord>) -> Result<Self> {
        if g == 0 || g > 30 {
            return usage(format!("garlic {g} outside [1, 30]"));
        }
        if columns.len() != g as usize {
            return usage(format!("expected {g} columns, got {}", columns.len()));
        }
        let rows = 1usize << g;
        if let Some(c) = columns.iter().find(|c| c.len() != rows) {
            return usage(format!("column of length {} in a matrix with {rows} rows", c.len()));
        }
        Ok(BitMatrix { g, columns })
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn rows(&self) -> usize {
        1 << self.g
    }

    pub fn columns(&self) -> &[BitWord] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &BitWord {
        &self.columns[i]
    }

    /// Row `j` as bits, column 0 first.
    pub fn row(&self, j: usize) -> Vec<bool> {
        self.columns.iter().map(|c| c.get(j)).collect()
    }

    pub fn into_columns(self) -> Vec<BitWord> {
        self.columns
    }
}

/// Row `j` is `sigma(j)` written MSB-first in `g` bits.
pub fn binary_representation(sigma: &Permutation, g: u32) -> Result<BitMatrix> {
    if g == 0 || g > 30 {
        return usage(format!("garlic {g} outside [1, 30]"));
    }
    if sigma.len() != 1usize << g {
        return usage(format!(
            "permutation of length {} is not of length 2^{g}",
            sigma.len()
        ));
    }
    let columns = (0..g)
        .map(|i| {
            let shift = g - 1 - i;
            BitWord::from_bits((0..sigma.len()).map(|j| (sigma.image(j) >> shift) & 1 == 1))
        })
        .collect();
    BitMatrix::new(g, columns)
}

/// Traced column `i` is column `i` moved through the riffle permutation of
/// traced column `i - 1`; traced column 0 is column 0.
pub fn trace_trajectories(matrix: &BitMatrix) -> BitMatrix {
    let mut traced: Vec<BitWord> = Vec::with_capacity(matrix.columns.len());
    for (i, col) in matrix.columns.iter().enumerate() {
        let next = match traced.last() {
            None => col.clone(),
            Some(prev) => riffle_permutation(prev)
                .apply_to_word(col)
                .expect("all columns share one length"),
        };
        debug_assert!(i == traced.len());
        traced.push(next);
    }
    BitMatrix {
        g: matrix.g,
        columns: traced,
    }
}

/// Index whose MSB-first binary form is row `j` of `traj` reversed, i.e.
/// `sum_i traj[i][j] * 2^i`.
pub fn trajectory_endpoint(traj: &BitMatrix, j: usize) -> Result<usize> {
    if j >= traj.rows() {
        return usage(format!("row {j} out of range for {} rows", traj.rows()));
    }
    Ok(traj
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| (c.get(j) as usize) << i)
        .sum())
}

/// Follows only the `pi_B` edges (not the complement edges) of the upper
/// layers starting from input column `j`; returns the column reached in
/// row `g`.
pub fn walk_riffle_edges(traj: &BitMatrix, j: usize) -> Result<usize> {
    if j >= traj.rows() {
        return usage(format!("row {j} out of range for {} rows", traj.rows()));
    }
    Ok(traj
        .columns
        .iter()
        .fold(j, |pos, word| riffle_permutation(word).image(pos)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn example_sigma() -> Permutation {
        Permutation::from_vec(vec![5, 4, 6, 3, 2, 7, 0, 1]).unwrap()
    }

    #[test]
    fn binary_representation_examples() {
        let b = binary_representation(&example_sigma(), 3).unwrap();
        assert_eq!(b.column(0).to_string(), "11100100");
        assert_eq!(b.column(1).to_string(), "00111100");
        assert_eq!(b.column(2).to_string(), "10010101");

        let id = binary_representation(&Permutation::identity(4), 2).unwrap();
        assert_eq!(id.column(0).to_string(), "0011");
        assert_eq!(id.column(1).to_string(), "0101");
    }

    #[test]
    fn binary_representation_rejects_size_mismatch() {
        assert!(matches!(
            binary_representation(&Permutation::identity(6), 3),
            Err(Error::Usage(_))
        ));
        assert!(binary_representation(&Permutation::identity(8), 2).is_err());
    }

    #[test]
    fn trace_example() {
        let b = binary_representation(&example_sigma(), 3).unwrap();
        let t = trace_trajectories(&b);
        let cols: Vec<String> = t.columns().iter().map(|c| c.to_string()).collect();
        assert_eq!(cols, ["11100100", "11000011", "01011001"]);
        assert_eq!(t.column(0), b.column(0));
    }

    #[test]
    fn endpoint_by_row_reversal() {
        let t = trace_trajectories(&binary_representation(&example_sigma(), 3).unwrap());
        assert_eq!(t.row(0), vec![true, true, false]);
        assert_eq!(trajectory_endpoint(&t, 0).unwrap(), 3);
        assert_eq!(t.row(6), vec![false, true, false]);
        assert_eq!(trajectory_endpoint(&t, 6).unwrap(), 2);
        assert!(trajectory_endpoint(&t, 8).is_err());
    }

    #[test]
    fn riffle_edge_walk_on_example() {
        // 0 -> 4 -> 2 -> 1 through pi(11100100), pi(11000011), pi(01011001)
        let t = trace_trajectories(&binary_representation(&example_sigma(), 3).unwrap());
        let ends: Vec<usize> = (0..8).map(|j| walk_riffle_edges(&t, j).unwrap()).collect();
        assert_eq!(ends, [1, 5, 3, 6, 2, 7, 0, 4]);
    }

    #[test]
    fn traced_columns_are_rearrangements() {
        let b = binary_representation(&example_sigma(), 3).unwrap();
        let t = trace_trajectories(&b);
        for (x, y) in b.columns().iter().zip(t.columns()) {
            assert_eq!(x.hamming_weight(), y.hamming_weight());
        }
    }
}
