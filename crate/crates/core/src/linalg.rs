//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::numbers::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveError {
    /// The system has no solution.
    Inconsistent,
    /// The system has a solution but it is not unique.
    RankDeficient { rank: usize, unknowns: usize },
}

/// A system `A x = b_k` for several right-hand sides sharing one matrix.
#[derive(Debug, Clone)]
pub struct System {
    rows: Vec<Vec<Rat>>,
    cols: usize,
}

/// Result of reducing a system: pivot columns and the reduced right-hand sides.
struct Reduced {
    pivots: Vec<usize>,
    rhs: Vec<Vec<Rat>>,
}

impl System {
    pub fn new(cols: usize) -> Self {
        System { rows: Vec::new(), cols }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>, cols: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        System { rows, cols }
    }

    pub fn push_row(&mut self, row: Vec<Rat>) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows.push(row);
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    fn reduce(&self, rhs: &[Vec<Rat>]) -> Reduced {
        let mut rows = self.rows.clone();
        let mut rhs: Vec<Vec<Rat>> = rhs.to_vec();
        for r in &rhs {
            assert_eq!(r.len(), rows.len(), "rhs length mismatch");
        }
        let n = rows.len();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            if r == n {
                break;
            }
            let Some(p) = (r..n).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            for b in rhs.iter_mut() {
                b.swap(r, p);
            }
            let inv = Rat::one() / &rows[r][col];
            for x in rows[r][col..].iter_mut() {
                *x *= &inv;
            }
            for b in rhs.iter_mut() {
                b[r] *= &inv;
            }
            let pivot_row: Vec<(usize, Rat)> =
                (col..self.cols).filter(|&j| !rows[r][j].is_zero()).map(|j| (j, rows[r][j].clone())).collect();
            for i in 0..n {
                if i == r || rows[i][col].is_zero() {
                    continue;
                }
                let f = rows[i][col].clone();
                for (j, p) in &pivot_row {
                    rows[i][*j] -= &f * p;
                }
                for b in rhs.iter_mut() {
                    if !b[r].is_zero() {
                        let d = &f * &b[r];
                        b[i] -= d;
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        Reduced { pivots, rhs }
    }

    pub fn rank(&self) -> usize {
        self.reduce(&[]).pivots.len()
    }

    /// Solves for each right-hand side, requiring a unique solution.
    pub fn solve_unique(&self, rhs: &[Vec<Rat>]) -> Result<Vec<Vec<Rat>>, SolveError> {
        let red = self.reduce(rhs);
        check_consistent(&red)?;
        if red.pivots.len() < self.cols {
            return Err(SolveError::RankDeficient { rank: red.pivots.len(), unknowns: self.cols });
        }
        Ok(extract(&red, self.cols))
    }

    /// Solves for each right-hand side, setting free variables to zero.
    pub fn solve_particular(&self, rhs: &[Vec<Rat>]) -> Result<Vec<Vec<Rat>>, SolveError> {
        let red = self.reduce(rhs);
        check_consistent(&red)?;
        Ok(extract(&red, self.cols))
    }
}

fn check_consistent(red: &Reduced) -> Result<(), SolveError> {
    let rank = red.pivots.len();
    for b in &red.rhs {
        if b[rank..].iter().any(|x| !x.is_zero()) {
            return Err(SolveError::Inconsistent);
        }
    }
    Ok(())
}

fn extract(red: &Reduced, cols: usize) -> Vec<Vec<Rat>> {
    red.rhs
        .iter()
        .map(|b| {
            let mut x = vec![Rat::zero(); cols];
            for (r, &c) in red.pivots.iter().enumerate() {
                x[c] = b[r].clone();
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{int, rat};

    fn row(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn unique_solution() {
        let s = System::from_rows(vec![row(&[2, 1]), row(&[1, 3]), row(&[3, 4])], 2);
        let x = s.solve_unique(&[row(&[3, 4, 7])]).unwrap();
        assert_eq!(x[0], vec![int(1), int(1)]);
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn inconsistent_and_deficient() {
        let s = System::from_rows(vec![row(&[1, 1]), row(&[2, 2])], 2);
        assert_eq!(s.solve_unique(&[row(&[1, 3])]), Err(SolveError::Inconsistent));
        assert_eq!(s.solve_unique(&[row(&[1, 2])]), Err(SolveError::RankDeficient { rank: 1, unknowns: 2 }));
        let p = s.solve_particular(&[row(&[1, 2])]).unwrap();
        assert_eq!(p[0], vec![int(1), int(0)]);
    }

    #[test]
    fn rational_pivots() {
        let s = System::from_rows(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 4), rat(1, 5)]], 2);
        let x = s.solve_unique(&[vec![rat(5, 6), rat(9, 20)]]).unwrap();
        assert_eq!(x[0], vec![int(1), int(1)]);
    }
}
