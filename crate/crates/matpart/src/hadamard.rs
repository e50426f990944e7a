//! Sylvester-type Hadamard matrices and the non-monochromatic submatrix
//! check.
//!
//! Only power-of-two orders are supported. Sylvester matrices are kept
//! implicit (an entry is a parity of a bitwise AND), so large orders
//! cost no memory; explicitly given matrices are stored as packed sign
//! bits.

use crate::error::{Error, Result};

/// Largest exponent accepted by [`sylvester`].
pub const SYLVESTER_EXPONENT_CAP: u32 = 20;

#[derive(Clone, Debug)]
enum Entries {
    /// Entry `(i, j)` is `(-1)^popcount(i & j)`; nothing is stored.
    Sylvester,
    /// Row-major packed signs, one bit per entry; a set bit means `-1`.
    Packed { bits: Vec<u64>, words_per_row: usize },
}

/// A square matrix of `+1`/`-1` entries with power-of-two order.
#[derive(Clone, Debug)]
pub struct HadamardMatrix {
    order: usize,
    entries: Entries,
}

impl HadamardMatrix {
    /// Number of rows (and columns).
    pub fn order(&self) -> usize {
        self.order
    }

    /// The entry at row `i`, column `j`, as `+1` or `-1`.
    pub fn entry(&self, i: usize, j: usize) -> i8 {
        assert!(i < self.order && j < self.order, "index within order");
        let negative = match &self.entries {
            Entries::Sylvester => (i & j).count_ones() % 2 == 1,
            Entries::Packed {
                bits,
                words_per_row,
            } => bits[i * words_per_row + j / 64] & (1u64 << (j % 64)) != 0,
        };
        if negative {
            -1
        } else {
            1
        }
    }

    /// Row `i` as packed sign bits; a set bit means `-1`.
    fn packed_row(&self, i: usize) -> Vec<u64> {
        let words = self.order.div_ceil(64).max(1);
        match &self.entries {
            Entries::Packed {
                bits,
                words_per_row,
            } => bits[i * words_per_row..i * words_per_row + words_per_row].to_vec(),
            Entries::Sylvester => {
                let mut row = vec![0u64; words];
                for j in 0..self.order {
                    if (i & j).count_ones() % 2 == 1 {
                        row[j / 64] |= 1u64 << (j % 64);
                    }
                }
                row
            }
        }
    }

    /// A copy with the sign at `(i, j)` flipped.
    pub fn with_entry_flipped(&self, i: usize, j: usize) -> Result<HadamardMatrix> {
        if i >= self.order || j >= self.order {
            return Err(Error::ElementOutOfRange {
                element: i.max(j),
                domain_size: self.order,
            });
        }
        let words_per_row = self.order.div_ceil(64).max(1);
        let mut bits = Vec::with_capacity(self.order * words_per_row);
        for row in 0..self.order {
            bits.extend(self.packed_row(row));
        }
        bits[i * words_per_row + j / 64] ^= 1u64 << (j % 64);
        Ok(HadamardMatrix {
            order: self.order,
            entries: Entries::Packed {
                bits,
                words_per_row,
            },
        })
    }

    /// Builds a matrix from explicit `+1`/`-1` rows.
    ///
    /// Errors unless the matrix is square with power-of-two order and
    /// every entry is `+1` or `-1`.
    pub fn from_signs(rows: &[Vec<i8>]) -> Result<HadamardMatrix> {
        let order = rows.len();
        if order == 0 || !order.is_power_of_two() {
            return Err(Error::UnsupportedInput(format!(
                "order {order} is not a positive power of two"
            )));
        }
        let words_per_row = order.div_ceil(64).max(1);
        let mut bits = vec![0u64; order * words_per_row];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::UnsupportedInput(format!(
                    "row {i} has length {}, expected {order}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    1 => {}
                    -1 => bits[i * words_per_row + j / 64] |= 1u64 << (j % 64),
                    other => {
                        return Err(Error::UnsupportedInput(format!(
                            "entry ({i}, {j}) is {other}, expected +1 or -1"
                        )))
                    }
                }
            }
        }
        Ok(HadamardMatrix {
            order,
            entries: Entries::Packed {
                bits,
                words_per_row,
            },
        })
    }
}

/// The Sylvester matrix of order `2^k`: the base case is the single
/// entry `+1`, and each doubling step tiles `[[M, M], [M, -M]]`.
pub fn sylvester(k: u32) -> Result<HadamardMatrix> {
    if k > SYLVESTER_EXPONENT_CAP {
        return Err(Error::CapExceeded {
            what: format!("Sylvester exponent {k}"),
            limit: SYLVESTER_EXPONENT_CAP as u64,
        });
    }
    Ok(HadamardMatrix {
        order: 1usize << k,
        entries: Entries::Sylvester,
    })
}

/// Exact orthogonality check: the matrix times its transpose equals the
/// order times the identity.
///
/// Two sign rows are orthogonal exactly when they differ in half their
/// positions, so the check reduces to popcounts of XORed packed rows.
pub fn verify_hadamard(m: &HadamardMatrix) -> bool {
    let rows: Vec<Vec<u64>> = (0..m.order()).map(|i| m.packed_row(i)).collect();
    for i in 0..m.order() {
        for j in (i + 1)..m.order() {
            let differ: u32 = rows[i]
                .iter()
                .zip(&rows[j])
                .map(|(a, b)| (a ^ b).count_ones())
                .sum();
            if differ as usize * 2 != m.order() {
                return false;
            }
        }
    }
    true
}

/// Whether every entry of the submatrix selected by `rows` and `cols`
/// has the same sign. An empty selection is vacuously monochromatic.
pub fn submatrix_monochromatic(m: &HadamardMatrix, rows: &[usize], cols: &[usize]) -> Result<bool> {
    for &idx in rows.iter().chain(cols) {
        if idx >= m.order() {
            return Err(Error::ElementOutOfRange {
                element: idx,
                domain_size: m.order(),
            });
        }
    }
    let mut first: Option<i8> = None;
    for &i in rows {
        for &j in cols {
            let v = m.entry(i, j);
            match first {
                None => first = Some(v),
                Some(f) if f != v => return Ok(false),
                Some(_) => {}
            }
        }
    }
    Ok(true)
}
