//! Text formats: the JSON group-definition file and `a:b:step` parameter grids.
//!
//! A group file looks like
//!
//! ```json
//! {
//!   "name": "cyclic_loxodromic",
//!   "model_dimension": 2,
//!   "chart": "disc",
//!   "generators": [[[1.6667, 0.0], [1.3333, 0.0], [1.3333, 0.0], [1.6667, 0.0]]]
//! }
//! ```
//!
//! Each generator is a row-major 2x2 complex matrix given as four `[re, im]`
//! pairs. In dimension 3 only the `halfspace` chart is accepted.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{ModelDim, MoebiusMap};
use crate::group::GroupPresentation;
use crate::policy::POLICY;
use crate::{Error, Result};

/// Largest number of entries produced by [`parse_s_grid`].
pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Disc,
    Halfspace,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    name: String,
    model_dimension: u32,
    chart: Chart,
    generators: Vec<[[f64; 2]; 4]>,
}

pub fn parse_group(text: &str) -> Result<GroupPresentation> {
    let file: GroupFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let model = match file.model_dimension {
        2 => ModelDim::Two,
        3 => ModelDim::Three,
        n => return Err(Error::Parse(format!("model_dimension must be 2 or 3, got {n}"))),
    };
    if model == ModelDim::Three && file.chart == Chart::Disc {
        return Err(Error::Parse("dimension 3 groups must use the halfspace chart".into()));
    }
    let mut generators = Vec::with_capacity(file.generators.len());
    for (i, raw) in file.generators.iter().enumerate() {
        if raw.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Parse(format!("generator {i} has a non-finite entry")));
        }
        let m = raw.map(|[re, im]| Complex64::new(re, im));
        let det = m[0] * m[3] - m[1] * m[2];
        if (det - 1.0).norm() > POLICY.file_determinant {
            return Err(Error::Parse(format!(
                "generator {i} has determinant {det}, not 1 within {:e}",
                POLICY.file_determinant
            )));
        }
        let map = match file.chart {
            Chart::Disc => MoebiusMap::new(model, m),
            Chart::Halfspace => MoebiusMap::from_halfspace(model, m),
        }
        .map_err(|e| Error::Parse(format!("generator {i}: {e}")))?;
        generators.push(map);
    }
    GroupPresentation::new(file.name, model, generators).map_err(|e| Error::Parse(e.to_string()))
}

/// Serializes `group` in the chart it is stored in (disc for `n = 2`,
/// half-space for `n = 3`).
pub fn write_group(group: &GroupPresentation) -> String {
    let file = GroupFile {
        name: group.name().to_string(),
        model_dimension: group.model().n() as u32,
        chart: match group.model() {
            ModelDim::Two => Chart::Disc,
            ModelDim::Three => Chart::Halfspace,
        },
        generators: group
            .generators()
            .iter()
            .map(|g| g.entries().map(|z| [z.re, z.im]))
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("group files always serialize");
    text.push('\n');
    text
}

/// Parses `a:b:step` into `a, a + step, ...` up to and including `b`.
pub fn parse_s_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(Error::Parse(format!("grid {text:?} is not of the form a:b:step")));
    };
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{s:?} is not a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Parse(format!("{s:?} is not finite")))
        }
    };
    let (a, b, step) = (num(a)?, num(b)?, num(step)?);
    if step <= 0.0 || b < a {
        return Err(Error::Parse(format!("grid needs a <= b and step > 0, got {a}:{b}:{step}")));
    }
    if step < 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
        return Err(Error::Parse(format!("step {step} is below the resolution of {a}:{b}")));
    }
    let span = (b - a) / step;
    if !(span < MAX_GRID_POINTS as f64) {
        return Err(Error::Parse(format!("grid has more than {MAX_GRID_POINTS} points")));
    }
    let count = (span + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| a + i as f64 * step).collect())
}
