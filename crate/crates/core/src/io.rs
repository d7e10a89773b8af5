//! File formats: curve CSVs, rate tables and the binary ensemble layout.
//!
//! Floats are written in Rust's shortest round-trip representation, so files
//! are byte-identical across runs and parse back exactly.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::DecayCurve;
use crate::dynamics::{Ensemble, SchemeSpec};
use crate::error::{Error, Result};
use crate::model::DynamicsKind;

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    Ok(BufWriter::new(fs::File::create(path)?))
}

/// Two-column `t,norm` CSV.
pub fn write_norm_curve_csv(path: &Path, curve: &DecayCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["t", "norm"])?;
    for (t, v) in curve.times.iter().zip(&curve.values) {
        w.write_record([t.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Fit results stored next to a curve CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFit {
    pub fitted_rate: Option<f64>,
    pub fitted_prefactor: Option<f64>,
    pub fit_window: (f64, f64),
    pub n_points: usize,
}

impl CurveFit {
    pub fn of(curve: &DecayCurve) -> Self {
        let finite = |x: f64| x.is_finite().then_some(x);
        Self {
            fitted_rate: finite(curve.fitted_rate),
            fitted_prefactor: finite(curve.fitted_prefactor),
            fit_window: curve.fit_window,
            n_points: curve.times.len(),
        }
    }
}

/// `t,value[,stderr]` CSV plus a `<stem>.json` sidecar with the fit.
pub fn write_decay_curve(path: &Path, curve: &DecayCurve) -> Result<PathBuf> {
    let mut w = csv::Writer::from_writer(create(path)?);
    match &curve.stderr {
        Some(se) => {
            w.write_record(["t", "value", "stderr"])?;
            for ((t, v), s) in curve.times.iter().zip(&curve.values).zip(se) {
                w.write_record([t.to_string(), v.to_string(), s.to_string()])?;
            }
        }
        None => {
            w.write_record(["t", "value"])?;
            for (t, v) in curve.times.iter().zip(&curve.values) {
                w.write_record([t.to_string(), v.to_string()])?;
            }
        }
    }
    w.flush()?;
    let sidecar = path.with_extension("json");
    write_json(&sidecar, &CurveFit::of(curve))?;
    Ok(sidecar)
}

/// Read a curve written by [`write_decay_curve`] and refit it on `window`
/// (default: the window stored in the sidecar, else the last half).
pub fn read_decay_curve(path: &Path) -> Result<DecayCurve> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let has_se = headers.len() == 3;
    let (mut t, mut v, mut s) = (Vec::new(), Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::Format(format!("missing column {i}")))?
                .parse::<f64>()
                .map_err(|e| Error::Format(e.to_string()))
        };
        t.push(parse(0)?);
        v.push(parse(1)?);
        if has_se {
            s.push(parse(2)?);
        }
    }
    let sidecar = path.with_extension("json");
    let window = if sidecar.exists() {
        Some(read_json::<CurveFit>(&sidecar)?.fit_window)
    } else {
        None
    };
    DecayCurve::new(t, v, has_se.then_some(s), window)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// One row of the rates table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub param: String,
    pub value: f64,
    pub lambda_lower: f64,
    #[serde(rename = "T_star")]
    pub t_star: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

/// `param,value,lambda_lower,T_star,C` CSV.
pub fn write_rates_csv(path: &Path, rows: &[RateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["param", "value", "lambda_lower", "T_star", "C"])?;
    for r in rows {
        w.write_record([
            r.param.clone(),
            r.value.to_string(),
            r.lambda_lower.to_string(),
            r.t_star.to_string(),
            r.c.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rates_csv(path: &Path) -> Result<Vec<RateRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// JSON header of a binary ensemble file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleHeader {
    pub kind: DynamicsKind,
    pub scheme: SchemeSpec,
    pub h: f64,
    pub n_traj: usize,
    pub times: Vec<f64>,
    pub seed: u64,
    pub n_coords: usize,
    /// File name of the little-endian `f64` payload, relative to the header.
    pub data: String,
}

/// Write `<stem>.bin` (little-endian `f64`, trajectory-major) and the
/// `<stem>.json` header. Returns the header path.
pub fn write_ensemble(dir: &Path, stem: &str, ens: &Ensemble) -> Result<PathBuf> {
    let bin = dir.join(format!("{stem}.bin"));
    let mut w = create(&bin)?;
    for x in &ens.states {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    let header = EnsembleHeader {
        kind: ens.kind,
        scheme: ens.scheme,
        h: ens.scheme.h,
        n_traj: ens.n_traj,
        times: ens.times.clone(),
        seed: ens.master_seed,
        n_coords: ens.n_coords,
        data: format!("{stem}.bin"),
    };
    let json = dir.join(format!("{stem}.json"));
    write_json(&json, &header)?;
    Ok(json)
}

pub fn read_ensemble(header_path: &Path) -> Result<Ensemble> {
    let header: EnsembleHeader = read_json(header_path)?;
    let bin = header_path.parent().unwrap_or(Path::new(".")).join(&header.data);
    let bytes = fs::read(&bin)?;
    let expected = header.n_traj * header.times.len() * header.n_coords;
    if bytes.len() != expected * 8 {
        return Err(Error::Format(format!(
            "{} holds {} bytes, header implies {}",
            bin.display(),
            bytes.len(),
            expected * 8
        )));
    }
    let states = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunks of eight bytes")))
        .collect();
    Ok(Ensemble {
        kind: header.kind,
        scheme: header.scheme,
        n_traj: header.n_traj,
        times: header.times,
        n_coords: header.n_coords,
        master_seed: header.seed,
        states,
    })
}

/// Small-run CSV: `traj,t,y0,y1,...`.
pub fn write_ensemble_csv(path: &Path, ens: &Ensemble) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut head = vec!["traj".to_string(), "t".to_string()];
    head.extend((0..ens.n_coords).map(|i| format!("y{i}")));
    w.write_record(&head)?;
    for j in 0..ens.n_traj {
        for (ti, t) in ens.times.iter().enumerate() {
            let mut rec = vec![j.to_string(), t.to_string()];
            rec.extend(ens.state(j, ti).iter().map(|x| x.to_string()));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}
