use std::io::Write;
use std::path::Path;

use kleinian::group::OrbitSet;
use kleinian::limitset::{BoxDimensionEstimate, LimitSample};
use kleinian::poincare::SeriesEvaluation;
use kleinian::verify::{ProofChainReport, VerificationReport};
use tempfile::NamedTempFile;

/// Nine significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.8e}")
}

pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(header.iter().map(|h| h.as_ref()))
            .expect("writing to memory");
        Table { writer }
    }

    pub fn row(&mut self, fields: Vec<String>) {
        self.writer.write_record(&fields).expect("writing to memory");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("writing to memory")
    }
}

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn coordinate_names(n: usize) -> &'static [&'static str] {
    &["x", "y", "z"][..n]
}

pub fn orbit_table(orbit: &OrbitSet) -> Table {
    let n = orbit.model().n();
    let mut header = vec!["index", "word", "word_length"];
    header.extend(coordinate_names(n));
    header.extend(["origin_distance", "displacement", "radial_gap", "shell"]);
    let mut t = Table::new(&header);
    for (i, g) in orbit.elements.iter().enumerate() {
        let mut row = vec![i.to_string(), g.word.to_string(), g.word_length().to_string()];
        row.extend(g.orbit_point.coords().iter().map(|&x| num(x)));
        row.extend([
            num(g.origin_distance),
            num(g.displacement),
            num(g.radial_gap),
            g.shell_index.map_or(String::new(), |k| k.to_string()),
        ]);
        t.row(row);
    }
    t
}

pub fn series_table(series: &[SeriesEvaluation]) -> Table {
    let mut t = Table::new(&["s", "truncation_word_length", "value", "central_term"]);
    for e in series {
        t.row(vec![
            num(e.s),
            e.truncation_word_length.to_string(),
            num(e.value),
            num(e.central_term),
        ]);
    }
    t
}

pub fn points_table(sample: &LimitSample) -> Table {
    let mut header = vec!["index", "witness"];
    header.extend(coordinate_names(sample.dim().n()));
    let mut t = Table::new(&header);
    let witnesses = sample.witnesses();
    for (i, p) in sample.points().iter().enumerate() {
        let mut row = vec![
            i.to_string(),
            witnesses.get(i).map_or(String::new(), |w| w.to_string()),
        ];
        row.extend(p.coords().iter().map(|&x| num(x)));
        t.row(row);
    }
    t
}

pub fn scales_table(est: &BoxDimensionEstimate) -> Table {
    let mut t = Table::new(&["k", "r", "cell_count", "volume", "local_slope"]);
    for (rec, (_, slope)) in est.records.iter().zip(&est.per_scale_slopes) {
        t.row(vec![
            rec.k.to_string(),
            num(rec.r),
            rec.cell_count.to_string(),
            num(rec.volume),
            num(*slope),
        ]);
    }
    t
}

pub fn report_table(r: &VerificationReport) -> Table {
    let mut t = Table::new(&[
        "group",
        "depth",
        "delta_est",
        "delta_method",
        "delta_window_low",
        "delta_window_high",
        "dim_est",
        "dim_kmin",
        "dim_kmax",
        "min_local_slope",
        "margin",
        "tolerance",
        "pass",
    ]);
    t.row(vec![
        r.group.clone(),
        r.depth.to_string(),
        num(r.exponent.delta_est),
        r.exponent.method.name().to_string(),
        num(r.exponent.fit_window.0),
        num(r.exponent.fit_window.1),
        num(r.dimension.dim_est),
        r.dimension.fit_window.0.to_string(),
        r.dimension.fit_window.1.to_string(),
        num(r.dimension.min_local_slope),
        num(r.margin),
        num(r.tolerance),
        r.pass.to_string(),
    ]);
    t
}

pub fn chain_table(c: &ProofChainReport) -> Table {
    let mut t = Table::new(&[
        "k",
        "elements",
        "lhs",
        "series",
        "mid",
        "rhs",
        "tail",
        "packed_volume",
        "neighborhood_volume",
    ]);
    for r in &c.rows {
        t.row(vec![
            r.k.to_string(),
            r.elements.to_string(),
            num(r.lhs),
            num(r.series),
            num(r.mid),
            num(r.rhs),
            num(r.tail),
            num(r.packed_volume),
            num(r.neighborhood_volume),
        ]);
    }
    t
}
