//! Red/blue parity boards: every 2×2 window holds an even number of red
//! cells. A board is fixed by any one full row plus any one full column.
//!
//! Row 0 is the bottom row and column 0 the left column. The text form lists
//! the top row first, one `R`/`B` character per cell.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_SIDE: usize = 64;
/// Largest `rows + cols − 1` accepted by [`count_valid`].
pub const MAX_FREE_CELLS: usize = 24;
/// Largest `rows · cols` accepted by [`count_valid_brute_force`].
pub const MAX_BRUTE_FORCE_CELLS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    #[serde(rename = "R")]
    Red,
    #[serde(rename = "B")]
    Blue,
}

impl Color {
    pub fn is_red(self) -> bool {
        self == Color::Red
    }

    fn from_red(red: bool) -> Self {
        if red {
            Color::Red
        } else {
            Color::Blue
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'R' => Some(Color::Red),
            'B' => Some(Color::Blue),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Blue => 'B',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Board {
    rows: usize,
    cols: usize,
    cells: Vec<Color>,
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    for (name, v) in [("rows", rows), ("cols", cols)] {
        if v == 0 || v > MAX_SIDE {
            return Err(Error::param(name, format!("{v} outside 1..={MAX_SIDE}")));
        }
    }
    Ok(())
}

impl Board {
    /// `cells` is row-major starting from the bottom row.
    pub fn new(rows: usize, cols: usize, cells: Vec<Color>) -> Result<Self> {
        check_dims(rows, cols)?;
        if cells.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: cells.len(),
            });
        }
        Ok(Self { rows, cols, cells })
    }

    pub fn all_blue(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![Color::Blue; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Color {
        self.cells[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, color: Color) {
        self.cells[row * self.cols + col] = color;
    }

    fn red(&self, row: usize, col: usize) -> bool {
        self.get(row, col).is_red()
    }

    pub fn row(&self, row: usize) -> Vec<Color> {
        self.cells[row * self.cols..(row + 1) * self.cols].to_vec()
    }

    pub fn column(&self, col: usize) -> Vec<Color> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn red_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_red()).count()
    }

    /// Lower-left corners of windows with an odd number of red cells.
    pub fn odd_windows(&self) -> Vec<(usize, usize)> {
        let mut odd = Vec::new();
        for r in 0..self.rows.saturating_sub(1) {
            for c in 0..self.cols.saturating_sub(1) {
                if self.red(r, c) ^ self.red(r + 1, c) ^ self.red(r, c + 1) ^ self.red(r + 1, c + 1)
                {
                    odd.push((r, c));
                }
            }
        }
        odd
    }

    /// Top row first, one line per row, no trailing newline.
    pub fn to_text(&self) -> String {
        (0..self.rows)
            .rev()
            .map(|r| self.row(r).iter().map(|c| c.as_char()).collect::<String>())
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let rows = lines.len();
        let cols = lines.first().map_or(0, |l| l.chars().count());
        check_dims(rows, cols)?;
        let mut cells = vec![Color::Blue; rows * cols];
        for (i, line) in lines.iter().enumerate() {
            let row = rows - 1 - i;
            let colors: Option<Vec<Color>> = line.chars().map(Color::from_char).collect();
            match colors {
                Some(colors) if colors.len() == cols => {
                    cells[row * cols..(row + 1) * cols].copy_from_slice(&colors);
                }
                _ => {
                    return Err(Error::BoardMismatch(format!(
                        "line {}: expected {cols} characters of R/B, got {line:?}",
                        i + 1
                    )))
                }
            }
        }
        Self::new(rows, cols, cells)
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// True iff every 2×2 window is even-red.
pub fn validate(b: &Board) -> bool {
    b.odd_windows().is_empty()
}

/// Number of cells a seed must supply: `rows + cols − 1`.
pub fn free_cells(rows: usize, cols: usize) -> usize {
    rows + cols - 1
}

/// Cells filled at each completion stage. Stage 0 is the seed; cell `(r, c)`
/// with `r, c ≥ 1` is filled at stage `r + c − 1`, once its left, lower and
/// lower-left neighbours are known.
pub type CompletionTrace = Vec<Vec<(usize, usize)>>;

/// The unique valid board with the given bottom row and left column.
pub fn complete_from_seed(bottom_row: &[Color], left_column: &[Color]) -> Result<Board> {
    Ok(complete_with_trace(bottom_row, left_column)?.0)
}

pub fn complete_with_trace(
    bottom_row: &[Color],
    left_column: &[Color],
) -> Result<(Board, CompletionTrace)> {
    let (rows, cols) = (left_column.len(), bottom_row.len());
    check_dims(rows, cols)?;
    if bottom_row[0] != left_column[0] {
        return Err(Error::BoardMismatch(format!(
            "corner cell is {} in the bottom row but {} in the left column",
            bottom_row[0].as_char(),
            left_column[0].as_char()
        )));
    }
    let mut b = Board::all_blue(rows, cols)?;
    let mut trace: CompletionTrace = vec![Vec::new(); rows + cols - 1];
    for (c, &color) in bottom_row.iter().enumerate() {
        b.set(0, c, color);
        trace[0].push((0, c));
    }
    for (r, &color) in left_column.iter().enumerate().skip(1) {
        b.set(r, 0, color);
        trace[0].push((r, 0));
    }
    for (stage, filled) in trace.iter_mut().enumerate().skip(1) {
        for r in 1..rows {
            let Some(c) = (stage + 1).checked_sub(r) else {
                continue;
            };
            if c == 0 || c >= cols {
                continue;
            }
            let red = b.red(r - 1, c) ^ b.red(r, c - 1) ^ b.red(r - 1, c - 1);
            b.set(r, c, Color::from_red(red));
            filled.push((r, c));
        }
    }
    trace.retain(|s| !s.is_empty());
    Ok((b, trace))
}

/// The unique valid board whose row `row.0` equals `row.1` and whose column
/// `col.0` equals `col.1`.
///
/// On a valid board the four corners of any rectangle are even-red, since
/// the rectangle is tiled by 2×2 windows. Taking the rectangle spanned by
/// `(r, c)` and the given row/column intersection fixes every cell, which is
/// what propagating the parity rule outwards through all four quadrants
/// yields.
pub fn reconstruct_from(
    row: (usize, &[Color]),
    col: (usize, &[Color]),
    rows: usize,
    cols: usize,
) -> Result<Board> {
    check_dims(rows, cols)?;
    let ((r0, row_vals), (c0, col_vals)) = (row, col);
    if r0 >= rows || c0 >= cols {
        return Err(Error::param(
            "row/col",
            format!("({r0}, {c0}) outside a {rows}×{cols} board"),
        ));
    }
    if row_vals.len() != cols {
        return Err(Error::DimensionMismatch {
            expected: cols,
            actual: row_vals.len(),
        });
    }
    if col_vals.len() != rows {
        return Err(Error::DimensionMismatch {
            expected: rows,
            actual: col_vals.len(),
        });
    }
    if row_vals[c0] != col_vals[r0] {
        return Err(Error::BoardMismatch(format!(
            "row {r0} and column {c0} disagree at their intersection"
        )));
    }
    let pivot = row_vals[c0].is_red();
    let cells = (0..rows)
        .flat_map(|r| {
            (0..cols)
                .map(move |c| Color::from_red(row_vals[c].is_red() ^ col_vals[r].is_red() ^ pivot))
        })
        .collect();
    Board::new(rows, cols, cells)
}

/// `2^(rows + cols − 1)`.
pub fn count_valid(rows: usize, cols: usize) -> Result<u64> {
    check_dims(rows, cols)?;
    let free = free_cells(rows, cols);
    if free > MAX_FREE_CELLS {
        return Err(Error::TooLarge {
            what: "free cell count",
            max: MAX_FREE_CELLS,
            actual: free,
            hint: "the count is 2^(rows + cols - 1)",
        });
    }
    Ok(1 << free)
}

/// Counts valid boards by checking all `2^(rows·cols)` colorings.
pub fn count_valid_brute_force(rows: usize, cols: usize) -> Result<u64> {
    check_dims(rows, cols)?;
    let cells = rows * cols;
    if cells > MAX_BRUTE_FORCE_CELLS {
        return Err(Error::TooLarge {
            what: "brute-force board size",
            max: MAX_BRUTE_FORCE_CELLS,
            actual: cells,
            hint: "use count_valid",
        });
    }
    let mut count = 0;
    for mask in 0u64..1 << cells {
        let b = Board::new(
            rows,
            cols,
            (0..cells)
                .map(|i| Color::from_red(mask >> i & 1 == 1))
                .collect(),
        )?;
        if validate(&b) {
            count += 1;
        }
    }
    Ok(count)
}
