use crate::error::{Error, Result};

pub const SCORE_NAMES: [&str; 3] = ["predictivity", "stability", "simplicity"];

/// Pearson correlations between predictivity, stability and simplicity.
/// `None` marks an undefined entry (a constant column).
pub type CorrelationMatrix = [[Option<f64>; 3]; 3];

/// Two-pass Pearson correlation; `None` when either column has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn score_correlations(rows: &[[f64; 3]]) -> Result<CorrelationMatrix> {
    if rows.len() < 2 {
        return Err(Error::InsufficientRows(rows.len()));
    }
    let cols: Vec<Vec<f64>> = (0..3).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut m = [[None; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = if i == j {
                pearson(&cols[i], &cols[i]).map(|_| 1.0)
            } else {
                pearson(&cols[i], &cols[j])
            };
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}
