//! CSV output.
//!
//! `curves.csv` has one row per `(checkpoint, arm)`:
//! `t,arm,p_hat,ci_lo,ci_hi,cum_share`, sorted by `t` then `arm`, with
//! floats printed to 9 significant digits. `runs.csv` has one row per
//! `(run, checkpoint)`: `run,t,chosen,cumulative_reward,n_0,...,n_{k-1}`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{RunResult, SelectionCurve};

/// Formats like C's `%.{digits}g`.
pub fn format_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn g9(x: f64) -> String {
    format_sig(x, 9)
}

pub fn write_curves_csv(curve: &SelectionCurve, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "t,arm,p_hat,ci_lo,ci_hi,cum_share")?;
    for (c, &t) in curve.checkpoints.iter().enumerate() {
        for arm in 0..curve.arm_count() {
            writeln!(
                w,
                "{t},{arm},{},{},{},{}",
                g9(curve.p_hat[c][arm]),
                g9(curve.ci_lo[c][arm]),
                g9(curve.ci_hi[c][arm]),
                g9(curve.cum_share[c][arm]),
            )?;
        }
    }
    Ok(())
}

/// Writes `curve` to `path` in the `curves.csv` schema.
pub fn emit_csv(curve: &SelectionCurve, path: &Path) -> Result<()> {
    if curve.checkpoints.is_empty() {
        return Err(Error::Precondition("curve has no checkpoints".into()));
    }
    let mut w = BufWriter::new(File::create(path)?);
    write_curves_csv(curve, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_runs_csv(runs: &[RunResult], arms: usize, mut w: impl Write) -> std::io::Result<()> {
    write!(w, "run,t,chosen,cumulative_reward")?;
    for a in 0..arms {
        write!(w, ",n_{a}")?;
    }
    writeln!(w)?;
    for run in runs {
        for s in &run.snapshots {
            write!(w, "{},{},{},{}", run.run_index, s.t, s.chosen, g9(s.cumulative_reward))?;
            for n in &s.counts {
                write!(w, ",{n}")?;
            }
            writeln!(w)?;
        }
    }
    Ok(())
}

pub fn emit_runs_csv(runs: &[RunResult], arms: usize, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_runs_csv(runs, arms, &mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digits() {
        assert_eq!(format_sig(0.0, 9), "0");
        assert_eq!(format_sig(0.5, 9), "0.5");
        assert_eq!(format_sig(1.0, 9), "1");
        assert_eq!(format_sig(1.0 / 3.0, 9), "0.333333333");
        assert_eq!(format_sig(2.0 / 3.0, 9), "0.666666667");
        assert_eq!(format_sig(123456.789012, 9), "123456.789");
        assert_eq!(format_sig(1.5e-7, 9), "1.5e-07");
        assert_eq!(format_sig(-2.5e12, 9), "-2.5e+12");
        assert_eq!(format_sig(0.000123, 9), "0.000123");
        assert_eq!(format_sig(999999999.5, 9), "1e+09");
        assert_eq!(format_sig(-0.75, 9), "-0.75");
    }

    #[test]
    fn one_checkpoint_two_arms() {
        let curve = SelectionCurve {
            label: "x".into(),
            arm_labels: vec!["a".into(), "b".into()],
            checkpoints: vec![10],
            runs: 100,
            p_hat: vec![vec![0.7, 0.3]],
            ci_lo: vec![vec![0.6, 0.2]],
            ci_hi: vec![vec![0.8, 0.4]],
            cum_share: vec![vec![0.65, 0.35]],
        };
        let mut buf = Vec::new();
        write_curves_csv(&curve, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "t,arm,p_hat,ci_lo,ci_hi,cum_share");
        assert_eq!(lines[1], "10,0,0.7,0.6,0.8,0.65");
        assert_eq!(lines[2], "10,1,0.3,0.2,0.4,0.35");
    }
}
