//! CSV tables and JSON configuration fragments.
//!
//! Floats are written in shortest round-trip form, so every table re-parses
//! to the exact values that produced it.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::convergence::SweepReport;
use crate::error::{Error, Result};
use crate::limit::LimitSystem;
use crate::profiles::{FourierTerm, SurfaceProfile};
use crate::trajectory::Trajectory;
use crate::viscous::WigglySystem;

/// Profile section of a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// `A sin(2πx)`, given either by `amplitude` or by the slope bound `slope = 2πA`.
    Sinusoid {
        #[serde(default)]
        amplitude: Option<f64>,
        #[serde(default)]
        slope: Option<f64>,
    },
    Fourier {
        terms: Vec<FourierTerm>,
    },
    Flat {},
}

impl ProfileSpec {
    pub fn build(&self) -> Result<SurfaceProfile> {
        match self {
            ProfileSpec::Sinusoid {
                amplitude: Some(a),
                slope: None,
            } => SurfaceProfile::sinusoid(*a),
            ProfileSpec::Sinusoid {
                amplitude: None,
                slope: Some(s),
            } => SurfaceProfile::sinusoid_with_slope(*s),
            ProfileSpec::Sinusoid { .. } => Err(Error::InvalidProfile(
                "sinusoid needs exactly one of `amplitude` or `slope`".into(),
            )),
            ProfileSpec::Fourier { terms } => SurfaceProfile::fourier(terms.clone()),
            ProfileSpec::Flat {} => Ok(SurfaceProfile::flat()),
        }
    }
}

/// One row of a limit trajectory table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub t: f64,
    pub z: f64,
    pub z_tilde_minus: f64,
    pub z_tilde_plus: f64,
    pub dissipation_cum: f64,
    pub energy: f64,
}

/// One row of a viscous trajectory table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViscousRow {
    pub t: f64,
    pub z: f64,
    pub zdot: f64,
    pub xi: f64,
    pub energy: f64,
    pub dissipation_cum: f64,
    pub delta_eps: f64,
}

/// One row of a friction-coefficient table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub model: String,
    /// Swept angle (`θ` or `θ_lim`), empty for a single model.
    pub angle: Option<f64>,
    pub alpha: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
    /// `μ±` from numerical inversion of the contact lift.
    pub mu_plus_oracle: f64,
    pub mu_minus_oracle: f64,
}

/// One row of a `K(ξ)` table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KRow {
    pub xi: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

/// One row of a perceived-profile table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerceivedRow {
    pub z: f64,
    pub p: f64,
    pub w: f64,
    pub w_slope: f64,
}

/// One row of a nap table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NapRow {
    pub theta_lim: f64,
    pub theta_with: f64,
    pub rho_with: f64,
    pub rho_against: f64,
    pub ratio: f64,
    pub tension_with: f64,
    pub tension_against: f64,
    pub compressed_with: bool,
    pub compressed_against: bool,
}

pub fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(|e: csv::Error| Error::Parse(e.to_string())))
        .collect()
}

pub fn limit_rows(system: &LimitSystem, trajectory: &Trajectory) -> Vec<LimitRow> {
    (0..trajectory.len())
        .map(|i| {
            let t = trajectory.times[i];
            let (lo, hi) = system.elastic_strip(t);
            LimitRow {
                t,
                z: trajectory.states[i],
                z_tilde_minus: lo,
                z_tilde_plus: hi,
                dissipation_cum: trajectory.dissipation[i],
                energy: trajectory.energies[i],
            }
        })
        .collect()
}

pub fn viscous_rows(system: &WigglySystem, trajectory: &Trajectory) -> Result<Vec<ViscousRow>> {
    (0..trajectory.len())
        .map(|i| {
            let (t, z) = (trajectory.times[i], trajectory.states[i]);
            Ok(ViscousRow {
                t,
                z,
                zdot: trajectory.velocities[i],
                xi: system.driving_force(t, z)?,
                energy: trajectory.energies[i],
                dissipation_cum: trajectory.dissipation[i],
                delta_eps: system.base().strip_distance(t, z),
            })
        })
        .collect()
}

fn float(x: f64) -> String {
    format!("{x:?}")
}

fn parse_float(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

/// Header `epsilon,sup_error,diss_gap_w1,...,runtime_s,fitted_order`.
pub fn sweep_header(windows: usize) -> Vec<String> {
    let mut h = vec!["epsilon".to_string(), "sup_error".to_string()];
    h.extend((1..=windows).map(|i| format!("diss_gap_w{i}")));
    h.push("runtime_s".into());
    h.push("fitted_order".into());
    h
}

pub fn write_sweep<W: Write>(out: W, report: &SweepReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let windows = report
        .dissipation_gaps
        .first()
        .map_or(report.windows.len(), Vec::len);
    w.write_record(sweep_header(windows))?;
    let order = report.fitted_order.map(float).unwrap_or_default();
    for i in 0..report.len() {
        let mut rec = vec![float(report.epsilons[i]), float(report.sup_errors[i])];
        rec.extend(report.dissipation_gaps[i].iter().map(|&g| float(g)));
        rec.push(float(report.runtimes[i]));
        rec.push(order.clone());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a sweep table. Windows and limit dissipation are not part of the
/// table and come back empty.
pub fn read_sweep<R: Read>(input: R) -> Result<SweepReport> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let n = header.len();
    if n < 4 || header.get(0) != Some("epsilon") || header.get(n - 1) != Some("fitted_order") {
        return Err(Error::Parse("not a sweep table".into()));
    }
    let windows = n - 4;
    if header.iter().collect::<Vec<_>>() != sweep_header(windows) {
        return Err(Error::Parse("unexpected sweep header".into()));
    }
    let mut report = SweepReport {
        epsilons: vec![],
        sup_errors: vec![],
        dissipation_gaps: vec![],
        windows: vec![],
        limit_dissipation: vec![],
        fitted_order: None,
        runtimes: vec![],
    };
    for rec in r.records() {
        let rec = rec?;
        report.epsilons.push(parse_float(&rec[0])?);
        report.sup_errors.push(parse_float(&rec[1])?);
        report.dissipation_gaps.push(
            (2..2 + windows)
                .map(|j| parse_float(&rec[j]))
                .collect::<Result<_>>()?,
        );
        report.runtimes.push(parse_float(&rec[n - 2])?);
        let order = &rec[n - 1];
        report.fitted_order = if order.is_empty() {
            None
        } else {
            Some(parse_float(order)?)
        };
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_spec_variants() {
        let s: ProfileSpec = serde_json::from_str(r#"{"kind":"sinusoid","slope":0.1}"#).unwrap();
        let p = s.build().unwrap();
        assert!((p.derivative_extrema().unwrap().omega_plus - 0.1).abs() < 1e-12);
        let s: ProfileSpec = serde_json::from_str(r#"{"kind":"sinusoid"}"#).unwrap();
        assert!(s.build().is_err());
        assert!(serde_json::from_str::<ProfileSpec>(r#"{"kind":"flat","x":1}"#).is_err());
        let s: ProfileSpec = serde_json::from_str(
            r#"{"kind":"fourier","terms":[{"amplitude":0.01,"harmonic":1},{"amplitude":0.002,"harmonic":3,"phase":0.5}]}"#,
        )
        .unwrap();
        assert_eq!(s.build().unwrap().terms().len(), 2);
    }

    #[test]
    fn rows_round_trip() {
        let rows = vec![
            KRow {
                xi: 0.1,
                k: 1.0 / 3.0,
            },
            KRow {
                xi: -1e-300,
                k: 6.02e23,
            },
        ];
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("xi,K\n"));
        let back: Vec<KRow> = read_rows(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn sweep_round_trip() {
        let report = SweepReport {
            epsilons: vec![0.1, 0.05],
            sup_errors: vec![0.0123456789, 0.006],
            dissipation_gaps: vec![vec![0.01, 0.02], vec![0.005, 1.0 / 7.0]],
            windows: vec![(0.0, 1.0), (1.0, 2.0)],
            limit_dissipation: vec![0.09, 0.1],
            fitted_order: Some(1.0 / 3.0),
            runtimes: vec![0.5, 1.25],
        };
        let mut buf = Vec::new();
        write_sweep(&mut buf, &report).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(
            text.starts_with("epsilon,sup_error,diss_gap_w1,diss_gap_w2,runtime_s,fitted_order\n")
        );
        let back = read_sweep(buf.as_slice()).unwrap();
        assert_eq!(back.epsilons, report.epsilons);
        assert_eq!(back.sup_errors, report.sup_errors);
        assert_eq!(back.dissipation_gaps, report.dissipation_gaps);
        assert_eq!(back.runtimes, report.runtimes);
        assert_eq!(back.fitted_order, report.fitted_order);
    }
}
