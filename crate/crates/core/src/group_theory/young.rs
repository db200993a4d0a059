use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer partition labelling an irreducible representation of `S_N`.
///
/// Serializes as a plain JSON integer array, e.g. `[3,2]`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct YoungDiagram {
    rows: Vec<usize>,
}

impl YoungDiagram {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if rows.is_empty() || rows.contains(&0) || rows.windows(2).any(|w| w[0] < w[1])
        {
            return Err(Error::InvalidDiagram(rows));
        }
        Ok(YoungDiagram { rows })
    }

    /// The one-row diagram `[n]` (trivial representation).
    pub fn row(n: usize) -> Self {
        YoungDiagram { rows: vec![n] }
    }

    /// The one-column diagram `[1^n]` (sign representation).
    pub fn column(n: usize) -> Self {
        YoungDiagram { rows: vec![1; n] }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn size(&self) -> usize {
        self.rows.iter().sum()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Transposed diagram.
    pub fn conjugate(&self) -> YoungDiagram {
        let cols = self.rows[0];
        let rows = (0..cols)
            .map(|c| self.rows.iter().filter(|&&r| r > c).count())
            .collect();
        YoungDiagram { rows }
    }

    /// Cells as `(row, column)` pairs in reading order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (0..len).map(move |c| (r, c)))
    }

    pub fn hook_length(&self, row: usize, col: usize) -> usize {
        let arm = self.rows[row] - col - 1;
        let leg = self.rows[row + 1..].iter().filter(|&&r| r > col).count();
        arm + leg + 1
    }

    /// Number of standard Young tableaux, i.e. the irrep dimension.
    pub fn standard_tableaux_count(&self) -> u64 {
        let n = self.size() as u128;
        let mut num: u128 = (1..=n).product();
        let mut den: u128 = 1;
        for (r, c) in self.cells() {
            den *= self.hook_length(r, c) as u128;
            let g = gcd(num, den);
            num /= g;
            den /= g;
        }
        debug_assert_eq!(den, 1);
        (num / den) as u64
    }

    /// Number of semistandard tableaux with entries in `1..=j`
    /// (dimension of the matching `U(j)` irrep), by the hook-content formula.
    pub fn semistandard_count(&self, j: usize) -> u64 {
        if self.num_rows() > j {
            return 0;
        }
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for (r, c) in self.cells() {
            num *= (j + c - r) as u128;
            den *= self.hook_length(r, c) as u128;
            let g = gcd(num, den);
            num /= g;
            den /= g;
        }
        debug_assert_eq!(den, 1);
        (num / den) as u64
    }

    /// All standard tableaux, each given as the row index that receives
    /// entry `k` for `k = 0..n`. Ordered lexicographically by that list;
    /// this order fixes the Gelfand-Tsetlin basis.
    pub fn standard_tableaux(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        let mut out = Vec::new();
        let mut filled = vec![0usize; self.num_rows()];
        let mut path = Vec::with_capacity(n);
        self.extend_tableaux(&mut filled, &mut path, &mut out);
        out
    }

    fn extend_tableaux(
        &self,
        filled: &mut Vec<usize>,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if path.len() == self.size() {
            out.push(path.clone());
            return;
        }
        for r in 0..self.num_rows() {
            let fits = filled[r] < self.rows[r] && (r == 0 || filled[r - 1] > filled[r]);
            if fits {
                filled[r] += 1;
                path.push(r);
                self.extend_tableaux(filled, path, out);
                path.pop();
                filled[r] -= 1;
            }
        }
    }
}

/// Content (`column - row`) of each entry of a tableau given in row-path form.
pub fn tableau_contents(path: &[usize]) -> Vec<i64> {
    let mut filled: Vec<usize> = Vec::new();
    path.iter()
        .map(|&r| {
            if filled.len() <= r {
                filled.resize(r + 1, 0);
            }
            let c = filled[r];
            filled[r] += 1;
            c as i64 - r as i64
        })
        .collect()
}

/// All partitions of `n` in reverse lexicographic order (`[n]` first).
pub fn partitions(n: usize) -> Vec<YoungDiagram> {
    fn rec(remaining: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<YoungDiagram>) {
        if remaining == 0 {
            out.push(YoungDiagram { rows: cur.clone() });
            return;
        }
        for part in (1..=remaining.min(max)).rev() {
            cur.push(part);
            rec(remaining - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, n, &mut Vec::new(), &mut out);
    }
    out
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl TryFrom<Vec<usize>> for YoungDiagram {
    type Error = Error;
    fn try_from(rows: Vec<usize>) -> Result<Self> {
        YoungDiagram::new(rows)
    }
}

impl From<YoungDiagram> for Vec<usize> {
    fn from(d: YoungDiagram) -> Vec<usize> {
        d.rows
    }
}

// Larger first row sorts first, so `[3] < [2,1] < [1,1,1]`.
impl Ord for YoungDiagram {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.rows.cmp(&self.rows)
    }
}

impl PartialOrd for YoungDiagram {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows)
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rows.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}
