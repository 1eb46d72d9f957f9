//! Text formats for grids, grid functions and derived results.
//!
//! Every file is CSV with a short preamble. A grid function looks like
//!
//! ```text
//! n,h_t,h_x,t_min,profile-hash
//! 2,0.125,0.125,0.125,9b2f0c41d5e6a711
//! t,x1,weight,value
//! 0.125,0,0.00390625,1.8660
//! ```
//!
//! Maximal results put `operator,algorithm,comparison_factor` lines in
//! front; extended fields carry a per-slice `support_radius` table and one
//! record per strip node.

use std::io::{Read, Write};

use cusp_core::hajlasz::HajlaszWitness;
use cusp_core::maximal::MaximalResult;
use cusp_core::{ExtendedField, Grid, GridFunction};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Bad { line: usize, msg: String },
    #[error("file was written for a different grid: {0}")]
    Mismatch(String),
}

fn bad<T>(line: usize, msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Bad { line, msg: msg.into() })
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn grid_preamble<W: Write>(w: &mut csv::Writer<W>, grid: &Grid, extra: &[(&str, String)]) -> Result<(), FormatError> {
    let mut names = vec!["n", "h_t", "h_x", "t_min", "profile-hash"];
    let mut values = vec![
        grid.dim().to_string(),
        num(grid.h_t()),
        num(grid.h_x()),
        num(grid.t_min()),
        format!("{:016x}", grid.fingerprint()),
    ];
    for (k, v) in extra {
        names.push(k);
        values.push(v.clone());
    }
    w.write_record(&names)?;
    w.write_record(&values)?;
    Ok(())
}

fn coordinate_names(n: usize, tail: &[&str]) -> Vec<String> {
    let mut names = vec!["t".to_string()];
    names.extend((1..n).map(|k| format!("x{k}")));
    names.extend(tail.iter().map(|s| s.to_string()));
    names
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().flexible(true).has_headers(false).from_writer(w)
}

fn node_records<W: Write>(w: &mut csv::Writer<W>, grid: &Grid, values: Option<&[f64]>) -> Result<(), FormatError> {
    let n = grid.dim();
    w.write_record(coordinate_names(n, if values.is_some() { &["weight", "value"] } else { &["weight"] }))?;
    let mut z = vec![0.0; n];
    let mut rec = Vec::with_capacity(n + 2);
    for node in 0..grid.len() {
        grid.point_into(node, &mut z);
        rec.clear();
        rec.extend(z.iter().map(|v| num(*v)));
        rec.push(num(grid.weights()[node]));
        if let Some(v) = values {
            rec.push(num(v[node]));
        }
        w.write_record(&rec)?;
    }
    Ok(())
}

pub fn write_grid<W: Write>(out: W, grid: &Grid) -> Result<(), FormatError> {
    let mut w = writer(out);
    grid_preamble(&mut w, grid, &[])?;
    node_records(&mut w, grid, None)?;
    w.flush()?;
    Ok(())
}

pub fn write_grid_function<W: Write>(out: W, u: &GridFunction<'_>) -> Result<(), FormatError> {
    let mut w = writer(out);
    grid_preamble(&mut w, u.grid(), &[])?;
    node_records(&mut w, u.grid(), Some(u.values()))?;
    w.flush()?;
    Ok(())
}

pub fn write_maximal<W: Write>(out: W, m: &MaximalResult<GridFunction<'_>>) -> Result<(), FormatError> {
    let mut w = writer(out);
    w.write_record(["operator", "algorithm", "comparison_factor"])?;
    w.write_record([m.operator.name().to_string(), m.algorithm.name().to_string(), num(m.comparison_factor)])?;
    grid_preamble(&mut w, m.function.grid(), &[])?;
    node_records(&mut w, m.function.grid(), Some(m.function.values()))?;
    w.flush()?;
    Ok(())
}

/// Strip header, the per-slice support table, then every strip node.
pub fn write_extended<W: Write>(out: W, grid: &Grid, ext: &ExtendedField) -> Result<(), FormatError> {
    let mut w = writer(out);
    let l = ext.strip.lattice();
    grid_preamble(&mut w, grid, &[("half_width", l.half_width().to_string())])?;
    w.write_record(["slice", "t", "support_radius"])?;
    for (s, r) in ext.support_radius.iter().enumerate() {
        w.write_record([s.to_string(), num(l.t(s)), num(*r)])?;
    }
    w.write_record(coordinate_names(l.dim(), &["value"]))?;
    let mut z = vec![0.0; l.dim()];
    for (idx, v) in ext.strip.values().iter().enumerate() {
        l.point(idx, &mut z);
        let mut rec: Vec<String> = z.iter().map(|c| num(*c)).collect();
        rec.push(num(*v));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One-line JSON summary of a witness.
pub fn witness_summary(certified_constant: f64, norm: Option<f64>, pairs: usize, seed: u64) -> String {
    let json_num = |x: f64| if x.is_finite() { serde_json::json!(x) } else { serde_json::json!(x.to_string()) };
    serde_json::json!({
        "certified_constant": json_num(certified_constant),
        "norm": norm.map(json_num),
        "pairs": pairs,
        "seed": seed,
    })
    .to_string()
}

pub fn write_witness<W: Write>(out: W, witness: &HajlaszWitness<'_>) -> Result<(), FormatError> {
    write_grid_function(out, &witness.g)
}

/// Values on a subset of grid nodes (an optimal-gradient cloud): same layout
/// as a grid function, with only the listed nodes and their cloud weights.
pub fn write_cloud_function<W: Write>(
    out: W,
    grid: &Grid,
    nodes: &[u32],
    weights: &[f64],
    values: &[f64],
) -> Result<(), FormatError> {
    let mut w = writer(out);
    grid_preamble(&mut w, grid, &[])?;
    w.write_record(coordinate_names(grid.dim(), &["weight", "value"]))?;
    for ((&node, wt), v) in nodes.iter().zip(weights).zip(values) {
        let mut rec: Vec<String> = grid.point(node as usize).iter().map(|c| num(*c)).collect();
        rec.push(num(*wt));
        rec.push(num(*v));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn read_records<R: Read>(input: R) -> Result<Vec<csv::StringRecord>, FormatError> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    Ok(r.records().collect::<Result<_, _>>()?)
}

fn parse_f64(rec: &csv::StringRecord, i: usize, line: usize) -> Result<f64, FormatError> {
    match rec.get(i).map(str::parse::<f64>) {
        Some(Ok(v)) => Ok(v),
        _ => bad(line, format!("field {} is not a number", i + 1)),
    }
}

fn check_preamble(records: &[csv::StringRecord], at: usize, grid: &Grid) -> Result<(), FormatError> {
    let names = records.get(at).ok_or(FormatError::Bad { line: at + 1, msg: "missing header".into() })?;
    if names.get(0) != Some("n") || names.get(4) != Some("profile-hash") {
        return bad(at + 1, "expected the grid header n,h_t,h_x,t_min,profile-hash");
    }
    let vals = records.get(at + 1).ok_or(FormatError::Bad { line: at + 2, msg: "missing header values".into() })?;
    let n: usize = vals.get(0).and_then(|s| s.parse().ok()).ok_or(FormatError::Bad {
        line: at + 2,
        msg: "bad dimension".into(),
    })?;
    let hash = vals.get(4).and_then(|s| u64::from_str_radix(s, 16).ok());
    let same = n == grid.dim()
        && parse_f64(vals, 1, at + 2)? == grid.h_t()
        && parse_f64(vals, 2, at + 2)? == grid.h_x()
        && parse_f64(vals, 3, at + 2)? == grid.t_min();
    if !same {
        return Err(FormatError::Mismatch("dimension or spacing differ".into()));
    }
    if hash != Some(grid.fingerprint()) {
        return Err(FormatError::Mismatch("profile hash differs".into()));
    }
    Ok(())
}

/// Reads node values written by [`write_grid_function`] (or the value column
/// of a maximal result) back onto `grid`. Every node must appear once.
pub fn read_grid_function<'g, R: Read>(input: R, grid: &'g Grid) -> Result<GridFunction<'g>, FormatError> {
    let records = read_records(input)?;
    let mut at = 0;
    if records.first().and_then(|r| r.get(0)) == Some("operator") {
        at = 2;
    }
    check_preamble(&records, at, grid)?;
    let n = grid.dim();
    let value_col = n + 1;
    let mut values = vec![f64::NAN; grid.len()];
    let mut js = vec![0i32; n - 1];
    for (k, rec) in records.iter().enumerate().skip(at + 3) {
        let line = k + 1;
        if rec.len() != n + 2 {
            return bad(line, format!("expected {} fields, found {}", n + 2, rec.len()));
        }
        let t = parse_f64(rec, 0, line)?;
        let s = ((t - grid.t_min()) / grid.h_t()).round();
        for (i, j) in js.iter_mut().enumerate() {
            *j = (parse_f64(rec, i + 1, line)? / grid.h_x()).round() as i32;
        }
        let node = (s >= 0.0)
            .then(|| grid.node(s as usize, &js))
            .flatten()
            .ok_or(FormatError::Bad { line, msg: "record is not a node of the grid".into() })?;
        if !values[node].is_nan() {
            return bad(line, "node listed twice");
        }
        values[node] = parse_f64(rec, value_col, line)?;
    }
    if let Some(missing) = values.iter().position(|v| v.is_nan()) {
        return Err(FormatError::Mismatch(format!("node {missing} has no record")));
    }
    GridFunction::new(grid, values).map_err(|e| FormatError::Mismatch(e.to_string()))
}
