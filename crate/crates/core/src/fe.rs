//! Fixed-effect absorption and small dense least squares.
//!
//! Designs with categorical groupings are demeaned by alternating
//! projections: every column (response included) is centered within each
//! grouping in turn until the largest absolute group mean in a full sweep
//! falls below 1e-10. The demeaned system is then solved by ordinary least
//! squares via the normal equations, with fixed summation order so a given
//! build produces bit-identical estimates for the same input.

use thiserror::Error;

/// Convergence threshold for the largest absolute group mean in one sweep.
const DEMEAN_TOLERANCE: f64 = 1e-10;
/// Hard cap on alternating-projection sweeps.
const MAX_SWEEPS: u32 = 10_000;
/// A pivot this much smaller than the largest normal-equation diagonal is
/// treated as a collinear column.
const PIVOT_RATIO: f64 = 1e-12;

/// One named regressor column.
#[derive(Clone, Debug)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

impl Column {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Column {
        Column {
            name: name.into(),
            values,
        }
    }
}

/// One categorical grouping to absorb: a group index per row.
#[derive(Clone, Debug)]
pub struct Grouping {
    pub name: String,
    pub groups: Vec<u32>,
    pub levels: usize,
}

impl Grouping {
    /// Build a grouping from arbitrary hashable keys, assigning dense group
    /// indices in first-appearance order.
    pub fn from_keys<K: std::hash::Hash + Eq>(name: impl Into<String>, keys: impl IntoIterator<Item = K>) -> Grouping {
        let mut ids = std::collections::HashMap::new();
        let mut groups = Vec::new();
        for key in keys {
            let next = ids.len() as u32;
            let id = *ids.entry(key).or_insert(next);
            groups.push(id);
        }
        Grouping {
            name: name.into(),
            levels: ids.len(),
            groups,
        }
    }
}

/// A regression design: response, named regressors, groupings to absorb.
#[derive(Clone, Debug)]
pub struct Design {
    pub response: Vec<f64>,
    pub columns: Vec<Column>,
    pub groupings: Vec<Grouping>,
    /// Fit an explicit intercept. Only meaningful without groupings; with
    /// groupings the intercept is absorbed and reconstructed from means.
    pub intercept: bool,
}

/// Errors from design validation and fitting.
#[derive(Debug, Error)]
pub enum FeError {
    #[error("empty design")]
    Empty,
    #[error("column {column} has {found} rows, expected {expected}")]
    RowMismatch {
        column: String,
        found: usize,
        expected: usize,
    },
    #[error("grouping {grouping} references level {index} but declares only {levels}")]
    GroupIndexOutOfRange {
        grouping: String,
        index: u32,
        levels: usize,
    },
    #[error("regressor {column} is collinear with the preceding columns or fixed effects")]
    RankDeficient { column: String },
    #[error("fixed-effect demeaning did not converge within {sweeps} sweeps")]
    NonConvergent { sweeps: u32 },
    #[error("{rows} observations cannot identify {parameters} parameters")]
    InsufficientObservations { rows: usize, parameters: usize },
}

/// A fitted least-squares model.
#[derive(Clone, Debug)]
pub struct Fit {
    /// Coefficients for `Design::columns`, in order.
    pub coefficients: Vec<f64>,
    /// Classical homoskedastic standard errors, same order.
    pub standard_errors: Vec<f64>,
    /// Intercept: explicit when fitted, reconstructed from sample means when
    /// groupings absorbed it.
    pub intercept: f64,
    pub residual_sum_squares: f64,
    /// n minus regressors, intercept, and absorbed levels (levels - 1 per
    /// grouping). Absorbed levels are counted per grouping without
    /// cross-grouping overlap correction, the usual convention.
    pub degrees_of_freedom: u64,
    /// Alternating-projection sweeps used (0 without groupings).
    pub sweeps: u32,
    pub n_rows: usize,
}

fn validate(design: &Design) -> Result<usize, FeError> {
    let n = design.response.len();
    if n == 0 || design.columns.is_empty() {
        return Err(FeError::Empty);
    }
    for column in &design.columns {
        if column.values.len() != n {
            return Err(FeError::RowMismatch {
                column: column.name.clone(),
                found: column.values.len(),
                expected: n,
            });
        }
    }
    for grouping in &design.groupings {
        if grouping.groups.len() != n {
            return Err(FeError::RowMismatch {
                column: grouping.name.clone(),
                found: grouping.groups.len(),
                expected: n,
            });
        }
        if let Some(&bad) = grouping.groups.iter().find(|&&id| id as usize >= grouping.levels) {
            return Err(FeError::GroupIndexOutOfRange {
                grouping: grouping.name.clone(),
                index: bad,
                levels: grouping.levels,
            });
        }
    }
    Ok(n)
}

/// Center every column within each grouping by alternating projections.
/// Returns the demeaned matrix (response last) and the sweep count.
pub(crate) fn absorb(
    matrix: &mut [Vec<f64>],
    groupings: &[Grouping],
) -> Result<u32, FeError> {
    if groupings.is_empty() {
        return Ok(0);
    }
    let mut sums: Vec<Vec<f64>> = groupings
        .iter()
        .map(|g| vec![0.0; g.levels])
        .collect();
    let counts: Vec<Vec<u64>> = groupings
        .iter()
        .map(|g| {
            let mut c = vec![0u64; g.levels];
            for &id in &g.groups {
                c[id as usize] += 1;
            }
            c
        })
        .collect();

    for sweep in 1..=MAX_SWEEPS {
        let mut worst: f64 = 0.0;
        for (grouping, (sum, count)) in groupings.iter().zip(sums.iter_mut().zip(&counts)) {
            for column in matrix.iter_mut() {
                for value in sum.iter_mut() {
                    *value = 0.0;
                }
                for (row, &id) in grouping.groups.iter().enumerate() {
                    sum[id as usize] += column[row];
                }
                for (value, &c) in sum.iter_mut().zip(count) {
                    if c == 0 {
                        *value = 0.0;
                        continue;
                    }
                    *value /= c as f64;
                    worst = worst.max(value.abs());
                }
                for (row, &id) in grouping.groups.iter().enumerate() {
                    column[row] -= sum[id as usize];
                }
            }
        }
        if worst <= DEMEAN_TOLERANCE {
            return Ok(sweep);
        }
    }
    Err(FeError::NonConvergent { sweeps: MAX_SWEEPS })
}

/// Solve the symmetric system by Gauss-Jordan elimination with partial
/// pivoting, returning the inverse. Columns are never permuted, so a failed
/// pivot at position j names column j.
fn invert(mut matrix: Vec<Vec<f64>>, names: &[String]) -> Result<Vec<Vec<f64>>, FeError> {
    let p = matrix.len();
    let scale = matrix
        .iter()
        .enumerate()
        .map(|(j, row)| row[j].abs())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let mut inverse: Vec<Vec<f64>> = (0..p)
        .map(|i| (0..p).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    for col in 0..p {
        let pivot_row = (col..p)
            .max_by(|&a, &b| {
                matrix[a][col]
                    .abs()
                    .partial_cmp(&matrix[b][col].abs())
                    .expect("normal equations contain no NaN")
            })
            .expect("column range is never empty");
        if matrix[pivot_row][col].abs() <= PIVOT_RATIO * scale {
            return Err(FeError::RankDeficient {
                column: names[col].clone(),
            });
        }
        matrix.swap(col, pivot_row);
        inverse.swap(col, pivot_row);
        let pivot = matrix[col][col];
        for j in 0..p {
            matrix[col][j] /= pivot;
            inverse[col][j] /= pivot;
        }
        for row in 0..p {
            if row == col {
                continue;
            }
            let factor = matrix[row][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..p {
                let m = matrix[col][j];
                matrix[row][j] -= factor * m;
                let i = inverse[col][j];
                inverse[row][j] -= factor * i;
            }
        }
    }
    Ok(inverse)
}

/// Fit the design by absorbed-fixed-effect least squares.
pub fn fit(design: &Design) -> Result<Fit, FeError> {
    let n = validate(design)?;
    let with_intercept = design.groupings.is_empty() && design.intercept;

    // Assemble the working matrix: regressors, then the response.
    let mut matrix: Vec<Vec<f64>> = design
        .columns
        .iter()
        .map(|c| c.values.clone())
        .collect();
    matrix.push(design.response.clone());

    let original_means: Vec<f64> = matrix
        .iter()
        .map(|column| column.iter().sum::<f64>() / n as f64)
        .collect();

    let sweeps = absorb(&mut matrix, &design.groupings)?;

    let p = design.columns.len();
    let total = if with_intercept { p + 1 } else { p };
    let mut names: Vec<String> = design.columns.iter().map(|c| c.name.clone()).collect();
    if with_intercept {
        names.push("intercept".to_string());
    }

    let absorbed_levels: u64 = design
        .groupings
        .iter()
        .map(|g| g.levels.saturating_sub(1) as u64)
        .sum();
    // The grand mean is absorbed by any grouping; count it once. Without
    // groupings the explicit intercept takes its place.
    let grand = if design.groupings.is_empty() {
        u64::from(with_intercept)
    } else {
        1
    };
    let parameters = p as u64 + absorbed_levels + grand;
    if (n as u64) <= parameters {
        return Err(FeError::InsufficientObservations {
            rows: n,
            parameters: parameters as usize,
        });
    }
    let df = n as u64 - parameters;

    // Normal equations in fixed order: rows ascending, columns as given.
    let column_at = |j: usize| -> Option<&Vec<f64>> {
        if j < p {
            Some(&matrix[j])
        } else {
            None
        }
    };
    let mut xtx = vec![vec![0.0f64; total]; total];
    let mut xty = vec![0.0f64; total];
    let y = &matrix[p];
    for j in 0..total {
        #[allow(clippy::needless_range_loop)]
        for k in j..total {
            let mut acc = 0.0;
            match (column_at(j), column_at(k)) {
                (Some(a), Some(b)) => {
                    for (left, right) in a.iter().zip(b) {
                        acc += left * right;
                    }
                }
                (Some(a), None) => {
                    for value in a {
                        acc += value;
                    }
                }
                (None, Some(b)) => {
                    for value in b {
                        acc += value;
                    }
                }
                (None, None) => acc = n as f64,
            }
            xtx[j][k] = acc;
            xtx[k][j] = acc;
        }
        let mut acc = 0.0;
        match column_at(j) {
            Some(a) => {
                for (value, response) in a.iter().zip(y) {
                    acc += value * response;
                }
            }
            None => {
                for value in y {
                    acc += value;
                }
            }
        }
        xty[j] = acc;
    }

    let inverse = invert(xtx, &names)?;
    let mut estimates = vec![0.0f64; total];
    for j in 0..total {
        let mut acc = 0.0;
        for k in 0..total {
            acc += inverse[j][k] * xty[k];
        }
        estimates[j] = acc;
    }

    let mut rss = 0.0f64;
    for row in 0..n {
        let mut fitted = 0.0;
        for j in 0..p {
            fitted += estimates[j] * matrix[j][row];
        }
        if with_intercept {
            fitted += estimates[p];
        }
        let r = y[row] - fitted;
        rss += r * r;
    }
    let sigma_sq = rss / df as f64;
    let standard_errors: Vec<f64> = (0..p)
        .map(|j| (sigma_sq * inverse[j][j].max(0.0)).sqrt())
        .collect();

    let intercept = if with_intercept {
        estimates[p]
    } else {
        // Reconstruct from the pre-demeaning sample means.
        let mut acc = original_means[p];
        for j in 0..p {
            acc -= estimates[j] * original_means[j];
        }
        acc
    };

    Ok(Fit {
        coefficients: estimates[..p].to_vec(),
        standard_errors,
        intercept,
        residual_sum_squares: rss,
        degrees_of_freedom: df,
        sweeps,
        n_rows: n,
    })
}
