//! Functions of R sampled on a grid: potentials and dipoles, spline
//! interpolation and the two-column CSV format.

use crate::units::fmt12;
use crate::{Error, Result};
use std::path::Path;

/// Values on a strictly increasing R grid (bohr).
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub r: Vec<f64>,
    pub values: Vec<f64>,
    pub label: String,
}

/// Potential in hartree.
pub type PotentialCurve = Curve;
/// Dipole in debye.
pub type DipoleCurve = Curve;

impl Curve {
    pub fn new(r: Vec<f64>, values: Vec<f64>, label: impl Into<String>) -> Result<Curve> {
        let label = label.into();
        if r.len() != values.len() {
            return Err(Error::Invalid(format!("{label}: {} R values but {} data values", r.len(), values.len())));
        }
        if r.len() < 2 {
            return Err(Error::Invalid(format!("{label}: need at least two grid points")));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid(format!("{label}: R grid must be strictly increasing")));
        }
        if r.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("{label}: non-finite value")));
        }
        Ok(Curve { r, values, label })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.r[0]
    }

    pub fn r_max(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    pub fn spline(&self) -> CubicSpline {
        CubicSpline::natural(&self.r, &self.values)
    }

    pub fn same_grid(&self, other: &Curve) -> bool {
        self.r == other.r
    }

    /// Same grid, values mapped pointwise.
    pub fn map(&self, label: impl Into<String>, f: impl Fn(f64, f64) -> f64) -> Curve {
        Curve {
            r: self.r.clone(),
            values: self.r.iter().zip(&self.values).map(|(&r, &v)| f(r, v)).collect(),
            label: label.into(),
        }
    }

    /// `# ...` header lines, a `# unit = <unit>` line, then `R_bohr,value`.
    pub fn to_csv(&self, unit: &str, header: &[String]) -> String {
        let mut s = String::new();
        for h in header {
            for line in h.lines() {
                s.push_str("# ");
                s.push_str(line);
                s.push('\n');
            }
        }
        s.push_str(&format!("# label = {}\n# unit = {unit}\nR_bohr,value\n", self.label));
        for (r, v) in self.r.iter().zip(&self.values) {
            s.push_str(&format!("{},{}\n", fmt12(*r), fmt12(*v)));
        }
        s
    }

    pub fn parse_csv(path: &Path, text: &str) -> Result<Curve> {
        let mut label = path.display().to_string();
        let mut r = Vec::new();
        let mut values = Vec::new();
        let mut header_seen = false;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(c) = t.strip_prefix('#') {
                if let Some(l) = c.trim().strip_prefix("label = ") {
                    label = l.to_string();
                }
                continue;
            }
            if !header_seen {
                if t != "R_bohr,value" {
                    return Err(Error::parse(path, line_no, "expected header 'R_bohr,value'"));
                }
                header_seen = true;
                continue;
            }
            let (a, b) = t
                .split_once(',')
                .ok_or_else(|| Error::parse(path, line_no, "expected two columns"))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(path, line_no, format!("'{s}' is not a number")))
            };
            r.push(num(a)?);
            values.push(num(b)?);
        }
        Curve::new(r, values, label).map_err(|e| Error::parse(path, 0, e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Curve> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Curve::parse_csv(path, &text)
    }
}

/// Natural cubic spline.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(x: &[f64], y: &[f64]) -> CubicSpline {
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal system for interior second derivatives (Thomas algorithm)
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let a = h0 / 6.0;
                let b = (h0 + h1) / 3.0;
                let cc = h1 / 6.0;
                let rhs = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
                let denom = b - a * c[i - 1];
                c[i] = cc / denom;
                d[i] = (rhs - a * d[i - 1]) / denom;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        CubicSpline {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.x[0] && t <= self.x[self.x.len() - 1]
    }

    /// Value inside the grid; the end cubics are continued outside it.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn try_eval(&self, t: f64) -> Option<f64> {
        self.contains(t).then(|| self.eval(t))
    }
}

/// Vertex of the parabola through three points.
pub fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (d2 - d1) / (x[2] - x[0]);
    if a == 0.0 {
        return (x[1], y[1]);
    }
    let b = d1 - a * (x[0] + x[1]);
    let c = y[0] - x[0] * (a * x[0] + b);
    let xv = -b / (2.0 * a);
    (xv, c - b * b / (4.0 * a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_nodes_and_lines() {
        let x: Vec<f64> = (0..8).map(|i| 1.0 + 0.3 * i as f64 * (1.0 + 0.1 * i as f64)).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let s = CubicSpline::natural(&x, &y);
        for t in [1.05, 2.2, 3.7] {
            assert!((s.eval(t) - (2.0 - 0.5 * t)).abs() < 1e-13);
        }
        let y2: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let s2 = CubicSpline::natural(&x, &y2);
        for (a, b) in x.iter().zip(&y2) {
            assert!((s2.eval(*a) - b).abs() < 1e-14);
        }
    }

    #[test]
    fn parabola_vertex_exact() {
        let f = |x: f64| 3.0 * (x - 1.7).powi(2) - 0.4;
        let (xv, yv) = parabola_vertex([1.0, 1.5, 2.5], [f(1.0), f(1.5), f(2.5)]);
        assert!((xv - 1.7).abs() < 1e-13 && (yv + 0.4).abs() < 1e-13);
    }

    #[test]
    fn csv_round_trip() {
        let c = Curve::new(vec![5.0, 5.5, 6.25], vec![-0.01, -0.0125, 1e-7], "X NaK").unwrap();
        let text = c.to_csv("hartree", &["config".into()]);
        let back = Curve::parse_csv(Path::new("c"), &text).unwrap();
        assert_eq!(back.label, "X NaK");
        assert_eq!(back.r, c.r);
        for (a, b) in back.values.iter().zip(&c.values) {
            assert!((a - b).abs() <= 1e-12 * b.abs());
        }
        assert!(Curve::new(vec![1.0, 1.0], vec![0.0, 0.0], "dup").is_err());
    }
}
