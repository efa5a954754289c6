//! CSV series and the TOML metadata sidecar.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which parses
//! back to the identical `f64`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::protocols::EnsembleResult;

pub const TRAJECTORY_COLUMNS: [&str; 18] = [
    "t",
    "x",
    "p",
    "re_c1",
    "im_c1",
    "re_c2",
    "im_c2",
    "re_c3",
    "im_c3",
    "re_c4",
    "im_c4",
    "concurrence",
    "e_cl",
    "e_qm",
    "e_hyb",
    "e_pert",
    "e_total",
    "constraint",
];

pub fn ensemble_columns(with_stderr: bool) -> Vec<String> {
    let mut cols: Vec<String> = ["t", "concurrence", "linear_entropy", "purity"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for i in 1..=4 {
        for j in 1..=4 {
            cols.push(format!("re_rho{i}{j}"));
            cols.push(format!("im_rho{i}{j}"));
        }
    }
    if with_stderr {
        cols.push("rho_stderr".into());
    }
    cols
}

/// What a CSV file holds.
#[derive(Debug, Clone, Copy)]
pub enum Series<'a> {
    Trajectory(&'a Trajectory),
    Ensemble(&'a EnsembleResult),
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trajectory<W: Write>(traj: &Trajectory, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRAJECTORY_COLUMNS)?;
    for s in &traj.samples {
        let o = traj.system.observe(s);
        let mut row = vec![fmt(s.t), fmt(s.x), fmt(s.p)];
        for z in s.q.components() {
            row.push(fmt(z.re));
            row.push(fmt(z.im));
        }
        let e = o.energy;
        for v in [o.concurrence, e.e_cl, e.e_qm, e.e_hyb, e.e_pert, e.e_total, o.constraint] {
            row.push(fmt(v));
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_ensemble<W: Write>(res: &EnsembleResult, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(ensemble_columns(res.rho_stderr.is_some()))?;
    for j in 0..res.len() {
        let mut row = vec![
            fmt(res.times[j]),
            fmt(res.concurrence[j]),
            fmt(res.linear_entropy[j]),
            fmt(res.purity[j]),
        ];
        let rho = res.densities[j].matrix();
        for a in 0..4 {
            for b in 0..4 {
                row.push(fmt(rho[(a, b)].re));
                row.push(fmt(rho[(a, b)].im));
            }
        }
        if let Some(err) = &res.rho_stderr {
            row.push(fmt(err[j]));
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_series(series: Series<'_>, path: &Path) -> Result<()> {
    let empty = match series {
        Series::Trajectory(t) => t.is_empty(),
        Series::Ensemble(e) => e.is_empty(),
    };
    if empty {
        return Err(Error::invalid("series", "empty", "nothing to write"));
    }
    let file = BufWriter::new(File::create(path)?);
    match series {
        Series::Trajectory(t) => write_trajectory(t, file),
        Series::Ensemble(e) => write_ensemble(e, file),
    }
}

/// `run.csv` → `run.meta.toml`.
pub fn metadata_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.toml")
}

/// Writes the resolved config as TOML, preceded by `notes` as comments.
/// The file is itself a valid config that reproduces the run.
pub fn write_metadata(config: &RunConfig, path: &Path, notes: &[String]) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "# hybridq {} run metadata", env!("CARGO_PKG_VERSION"))?;
    writeln!(f, "# amplitudes c are normalized (sum |c|^2 = 1); oscillator variables are sqrt(2)*c")?;
    writeln!(f, "# constraint = 2 * sum |c|^2")?;
    writeln!(f, "# linear_entropy = (4/3) * (1 - tr rho^2), so 1 for the maximally mixed state")?;
    for w in &config.warnings {
        writeln!(f, "# warning: {w}")?;
    }
    for n in notes {
        writeln!(f, "# {n}")?;
    }
    writeln!(f)?;
    f.write_all(config.to_toml_string().as_bytes())?;
    f.flush()?;
    Ok(())
}

/// Header and numeric rows of a file written by this module.
pub fn read_series(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|v| v.parse::<f64>().map_err(|_| Error::invalid("csv field", v, "not a number")))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    const FIG1: &str = r#"
        seed = 3
        [model]
        omega = 0.03
        omega0 = "0.15*omega"
        beta = 0.2
        [initial]
        state = "fig5_state"
        x0 = 0.25
        p0 = 1
        [integration]
        t_max = 0.03
        dt = 0.01
        stride = 1
        [ensemble]
        trajectories = 3
        p_mean = 10
        sigma = 1
        stderr = true
    "#;

    fn config() -> RunConfig {
        RunConfig::from_toml_str(FIG1, &[]).unwrap()
    }

    fn trajectory() -> Trajectory {
        let c = config();
        c.system().integrate(&c.initial_state(), c.controls.t_max, c.controls.dt, c.controls.stride).unwrap()
    }

    #[test]
    fn trajectory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        let traj = trajectory();
        assert_eq!(traj.len(), 4);
        write_series(Series::Trajectory(&traj), &path).unwrap();
        let (header, rows) = read_series(&path).unwrap();
        assert_eq!(header, TRAJECTORY_COLUMNS);
        assert_eq!(rows.len(), 4);
        for (row, s) in rows.iter().zip(&traj.samples) {
            assert_eq!(row[0].to_bits(), s.t.to_bits());
            assert_eq!(row[1].to_bits(), s.x.to_bits());
            assert_eq!(row[2].to_bits(), s.p.to_bits());
            for (k, z) in s.q.components().iter().enumerate() {
                assert_eq!(row[3 + 2 * k].to_bits(), z.re.to_bits());
                assert_eq!(row[4 + 2 * k].to_bits(), z.im.to_bits());
            }
            let e = traj.system.energy(s);
            assert_eq!(row[16], e.e_total);
        }
    }

    #[test]
    fn reruns_are_byte_identical() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_trajectory(&trajectory(), &mut a).unwrap();
        write_trajectory(&trajectory(), &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ensemble_columns_describe_hermitian_matrices() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ens.csv");
        let res = crate::protocols::run_ensemble(&config().ensemble_spec().unwrap()).unwrap();
        write_series(Series::Ensemble(&res), &path).unwrap();
        let (header, rows) = read_series(&path).unwrap();
        assert_eq!(header.len(), 4 + 32 + 1);
        let col = |name: &str| header.iter().position(|h| h == name).unwrap();
        for row in &rows {
            for i in 1..=4 {
                assert_eq!(row[col(&format!("im_rho{i}{i}"))], 0.0);
                for j in 1..=4 {
                    assert_eq!(row[col(&format!("re_rho{i}{j}"))], row[col(&format!("re_rho{j}{i}"))]);
                    assert_eq!(row[col(&format!("im_rho{i}{j}"))], -row[col(&format!("im_rho{j}{i}"))]);
                }
            }
        }
    }

    #[test]
    fn sidecar_reproduces_config() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("run.csv");
        let meta = metadata_path(&csv);
        assert_eq!(meta.file_name().unwrap(), "run.meta.toml");
        let c = config();
        write_metadata(&c, &meta, &["delta_e_qm = 0".into()]).unwrap();
        let again = RunConfig::load(Some(&meta), &[]).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.seed, 3);
    }

    #[test]
    fn unwritable_path() {
        let traj = trajectory();
        let err = write_series(Series::Trajectory(&traj), Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }
}
