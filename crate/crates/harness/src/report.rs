//! Scenario reports and their on-disk form.
//!
//! A run directory holds `config.echo`, one `series_<name>.csv` per series,
//! `metrics.txt` with flat `key = value` lines and `plot_<name>.gnuplot`
//! scripts. Numbers are written with 15 significant digits so reruns are
//! byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use friedrichs::spectral::ResonancePole;
use friedrichs::Complex64;

use crate::HarnessError;

pub const CSV_HEADER: &str = "grid,re_total,im_total,abs2_total,re_restr,im_restr,abs2_restr,abs2_residual";

/// Total and restricted amplitudes on one grid, with the unexplained rest.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub grid_label: String,
    pub grid: Vec<f64>,
    pub total: Vec<Complex64>,
    pub restricted: Vec<Complex64>,
    /// total − free − restricted.
    pub residual: Vec<Complex64>,
}

impl Series {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn abs2_total(&self) -> Vec<f64> {
        self.total.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn abs2_restricted(&self) -> Vec<f64> {
        self.restricted.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(160 * self.len());
        s.push_str(CSV_HEADER);
        s.push('\n');
        for k in 0..self.len() {
            let (t, r) = (self.total[k], self.restricted[k]);
            let _ = writeln!(
                s,
                "{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e}",
                self.grid[k],
                t.re,
                t.im,
                t.norm_sqr(),
                r.re,
                r.im,
                r.norm_sqr(),
                self.residual[k].norm_sqr()
            );
        }
        s
    }

    /// gnuplot script drawing |total|², |restricted|² and |rest|² from the CSV.
    pub fn gnuplot(&self, log_scale: bool) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "set datafile separator ','");
        let _ = writeln!(s, "set key top right");
        let _ = writeln!(s, "set xlabel '{}'", self.grid_label);
        let _ = writeln!(s, "set ylabel 'probability density'");
        if log_scale {
            let _ = writeln!(s, "set logscale y");
        }
        let _ = writeln!(s, "set terminal pngcairo size 900,600");
        let _ = writeln!(s, "set output 'series_{}.png'", self.name);
        let _ = writeln!(
            s,
            "plot 'series_{0}.csv' every ::1 using 1:4 with lines title 'total', \\\n     'series_{0}.csv' every ::1 using 1:7 with lines dt 2 title 'restricted', \\\n     'series_{0}.csv' every ::1 using 1:8 with lines dt 3 title 'rest'",
            self.name
        );
        s
    }
}

/// Pole data with the independent cross-check.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleRecord {
    pub pole: ResonancePole,
    pub oracle_z: Complex64,
    pub oracle_residue: Complex64,
    /// |N·η′_II(z) − 1| with the library derivative.
    pub residue_identity: f64,
}

impl PoleRecord {
    pub fn decay_rate(&self) -> f64 {
        self.pole.decay_rate()
    }

    pub fn metrics(&self) -> Vec<(String, f64)> {
        let p = &self.pole;
        vec![
            ("pole.re_z".into(), p.z.re),
            ("pole.im_z".into(), p.z.im),
            ("pole.re_n".into(), p.residue.re),
            ("pole.im_n".into(), p.residue.im),
            ("pole.decay_rate".into(), p.decay_rate()),
            ("pole.abs_n_minus_1".into(), (p.residue - 1.0).norm()),
            ("pole.eta_residual".into(), p.eta_residual),
            ("pole.iterations".into(), p.iterations as f64),
            ("pole.oracle_delta_re_z".into(), (p.z.re - self.oracle_z.re).abs()),
            ("pole.oracle_delta_im_z".into(), (p.z.im - self.oracle_z.im).abs()),
            ("pole.oracle_delta_n".into(), (p.residue - self.oracle_residue).norm()),
            ("pole.residue_identity".into(), self.residue_identity),
        ]
    }
}

/// One named pass/fail criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when value < threshold.
    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            passed: value < threshold,
        }
    }

    /// Passes when value > threshold.
    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            passed: value > threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioReport {
    pub scenario: String,
    pub config_echo: String,
    pub pole: PoleRecord,
    pub series: Vec<Series>,
    pub metrics: Vec<(String, f64)>,
    pub checks: Vec<Check>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    pub fn metrics_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario = {}", self.scenario);
        for (k, v) in self.pole.metrics().iter().chain(&self.metrics) {
            let _ = writeln!(s, "{k} = {v:.14e}");
        }
        for c in &self.checks {
            let _ = writeln!(s, "check.{}.value = {:.14e}", c.name, c.value);
            let _ = writeln!(s, "check.{}.threshold = {:.14e}", c.name, c.threshold);
            let _ = writeln!(s, "check.{}.passed = {}", c.name, c.passed);
        }
        let _ = writeln!(s, "passed = {}", self.passed());
        s
    }

    /// Human-readable one-line-per-check summary.
    pub fn summary(&self) -> String {
        let mut s = format!("{} (z = {:.10}, N = {:.10})\n", self.scenario, self.pole.pole.z, self.pole.pole.residue);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "  {:<4} {:<34} {:>12.4e}  (limit {:.3e})",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.value,
                c.threshold
            );
        }
        s
    }

    pub fn write_to(&self, dir: &Path) -> Result<(), HarnessError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("config.echo"), &self.config_echo)?;
        for s in &self.series {
            fs::write(dir.join(format!("series_{}.csv", s.name)), s.to_csv())?;
            let log = self.scenario == "survival";
            fs::write(dir.join(format!("plot_{}.gnuplot", s.name)), s.gnuplot(log))?;
        }
        fs::write(dir.join("metrics.txt"), self.metrics_text())?;
        Ok(())
    }
}

/// Columns of a series file: grid, total, restricted, |rest|².
pub type SeriesColumns = (Vec<f64>, Vec<Complex64>, Vec<Complex64>, Vec<f64>);

/// Parses `series_*.csv` back into its columns.
pub fn read_series_csv(text: &str) -> Result<SeriesColumns, HarnessError> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(HarnessError::Config("series csv: unexpected header".into()));
    }
    let (mut g, mut t, mut r, mut rest) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let v: Vec<f64> = line
            .split(',')
            .map(|x| x.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| HarnessError::Config(format!("series csv line {}: {e}", i + 2)))?;
        if v.len() != 8 {
            return Err(HarnessError::Config(format!("series csv line {}: expected 8 columns", i + 2)));
        }
        g.push(v[0]);
        t.push(Complex64::new(v[1], v[2]));
        r.push(Complex64::new(v[4], v[5]));
        rest.push(v[7]);
    }
    Ok((g, t, r, rest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_keeps_fifteen_digits() {
        let s = Series {
            name: "x".into(),
            grid_label: "t".into(),
            grid: vec![0.1, 2.0 / 3.0],
            total: vec![Complex64::new(1.0 / 3.0, -1e-20), Complex64::new(0.0, 0.0)],
            restricted: vec![Complex64::new(2.0, 0.5), Complex64::new(-1.0, 1.0 / 7.0)],
            residual: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        };
        let (g, t, r, rest) = read_series_csv(&s.to_csv()).unwrap();
        assert_eq!(g.len(), 2);
        assert!((g[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((t[0].re - 1.0 / 3.0).abs() < 1e-15);
        assert!((r[1].im - 1.0 / 7.0).abs() < 1e-15);
        assert_eq!(rest, vec![0.0, 1.0]);
    }

    #[test]
    fn checks_compare_strictly() {
        assert!(Check::below("a", 0.5, 1.0).passed);
        assert!(!Check::below("a", 1.0, 1.0).passed);
        assert!(Check::above("b", 11.0, 10.0).passed);
        assert!(!Check::above("b", f64::NAN, 10.0).passed);
    }
}
