//! Stability maps over the `(E1, Hv2)` plane of the static particular case.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::static_margin;
use crate::error::{Error, Result};
use crate::spectral::{classify_point, PsiGrid, Tolerances, Verdict, DEFAULT_PSI_STEP};
use crate::state::EquilibriumState;

pub const SCHEMA: &str = "pv-scan/1";

/// Closed interval sampled at `count` equispaced points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Range {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Range { min, max, count }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * (i as f64) / ((n - 1) as f64)
                }
            })
            .collect()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidSpec(format!("{name} bounds must be finite")));
        }
        if self.min > self.max {
            return Err(Error::InvalidSpec(format!("{name} has min > max")));
        }
        if self.count < 2 {
            return Err(Error::InvalidSpec(format!(
                "{name} needs at least 2 points, got {}",
                self.count
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    #[serde(rename = "H3")]
    pub h3: f64,
    pub epsilon: f64,
    pub e1_range: Range,
    pub h2_range: Range,
    pub psi_step: f64,
    pub tolerances: Tolerances,
}

impl Default for ScanSpec {
    fn default() -> Self {
        ScanSpec {
            h3: 1.0,
            epsilon: 1e-6,
            e1_range: Range::new(0.0, 2.0, 100),
            h2_range: Range::new(0.0, 2.0, 100),
            psi_step: DEFAULT_PSI_STEP,
            tolerances: Tolerances::default(),
        }
    }
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.h3.is_finite() && self.h3 > 0.0) {
            return Err(Error::InvalidSpec(format!("H3 must be positive, got {}", self.h3)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        self.e1_range.validate("e1_range")?;
        self.h2_range.validate("h2_range")?;
        PsiGrid::new(self.psi_step)?;
        self.tolerances.validate()
    }

    pub fn state_at(&self, e1: f64, h2: f64) -> EquilibriumState {
        EquilibriumState::pcase(e1, h2, self.h3, 0.0, self.epsilon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
    pub verdict: Verdict,
    pub label: Option<u8>,
    pub max_growth_rate: f64,
}

/// Verdicts on a rectangular grid, row-major with `E1` varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    pub schema: String,
    pub spec: ScanSpec,
    pub e1_values: Vec<f64>,
    pub h2_values: Vec<f64>,
    pub cells: Vec<Cell>,
}

impl RegionGrid {
    pub fn cell(&self, i_e1: usize, j_h2: usize) -> &Cell {
        &self.cells[j_h2 * self.e1_values.len() + i_e1]
    }

    pub fn is_labeled(&self) -> bool {
        self.cells.iter().all(|c| c.label.is_some())
    }

    pub fn count_label(&self, label: u8) -> usize {
        self.cells.iter().filter(|c| c.label == Some(label)).count()
    }
}

pub fn scan_plane(spec: &ScanSpec) -> Result<RegionGrid> {
    spec.validate()?;
    let grid = PsiGrid::new(spec.psi_step)?;
    let e1_values = spec.e1_range.values();
    let h2_values = spec.h2_range.values();
    let n = e1_values.len();
    let cells = (0..n * h2_values.len())
        .into_par_iter()
        .map(|idx| {
            let (e1, h2) = (e1_values[idx % n], h2_values[idx / n]);
            let verdict = classify_point(&spec.state_at(e1, h2), &grid, &spec.tolerances)?;
            Ok(Cell {
                e1,
                h2,
                max_growth_rate: verdict.growth_rate(),
                verdict,
                label: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionGrid {
        schema: SCHEMA.to_string(),
        spec: *spec,
        e1_values,
        h2_values,
        cells,
    })
}

/// Runs [`scan_plane`] on a dedicated pool of `threads` workers (`None`: rayon default).
pub fn scan_plane_with_threads(spec: &ScanSpec, threads: Option<usize>) -> Result<RegionGrid> {
    match threads {
        None => scan_plane(spec),
        Some(0) => Err(Error::InvalidSpec("thread count must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidSpec(e.to_string()))?
            .install(|| scan_plane(spec)),
    }
}

/// 1: sufficient instability `E1^2 > Hv2^2`; 3: sufficient stability; 2/4: the rest, split by verdict.
pub fn region_label(e1: f64, h2: f64, h3: f64, unstable: bool) -> u8 {
    if e1 * e1 > h2 * h2 {
        1
    } else if static_margin(e1, h2, h3) > 0.0 {
        3
    } else if unstable {
        4
    } else {
        2
    }
}

pub fn label_regions(mut grid: RegionGrid) -> Result<RegionGrid> {
    let h3 = grid.spec.h3;
    for cell in &mut grid.cells {
        let unstable = cell.verdict.is_unstable();
        let label = region_label(cell.e1, cell.h2, h3, unstable);
        if label == 1 && !unstable {
            return Err(Error::ConsistencyViolation {
                e1: cell.e1,
                h2: cell.h2,
                reason: "sufficient instability holds but no growing mode was found".into(),
            });
        }
        if label == 3 && unstable {
            return Err(Error::ConsistencyViolation {
                e1: cell.e1,
                h2: cell.h2,
                reason: "sufficient stability holds but a growing mode was found".into(),
            });
        }
        cell.label = Some(label);
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
    Plotscript,
}

impl ExportFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(ExportFormat::Csv),
            "json" => Some(ExportFormat::Json),
            "gp" | "gnuplot" | "plt" => Some(ExportFormat::Plotscript),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(ExportFormat::Csv),
            "json" => Some(ExportFormat::Json),
            "plotscript" | "gnuplot" => Some(ExportFormat::Plotscript),
            _ => None,
        }
    }
}

/// Float formatting with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const CSV_HEADER: &str = "E1,H2,verdict,label,max_growth_rate";

const REGION_COLORS: [(u8, &str, &str); 4] = [
    (1, "#b2182b", "sufficient instability"),
    (2, "#92c5de", "no growing mode found"),
    (3, "#2166ac", "sufficient stability"),
    (4, "#f4a582", "unstable, found numerically"),
];

pub fn export_grid(grid: &RegionGrid, format: ExportFormat) -> Result<String> {
    if !grid.is_labeled() {
        return Err(Error::InvalidSpec("grid must be labeled before export".into()));
    }
    Ok(match format {
        ExportFormat::Csv => {
            let mut s = String::with_capacity(64 * (grid.cells.len() + 1));
            s.push_str(CSV_HEADER);
            s.push('\n');
            for c in &grid.cells {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    fmt_f64(c.e1),
                    fmt_f64(c.h2),
                    c.verdict.name(),
                    c.label.unwrap_or(0),
                    fmt_f64(c.max_growth_rate)
                );
            }
            s
        }
        ExportFormat::Json => {
            let mut s = crate::jsonfmt::to_string(grid, true);
            s.push('\n');
            s
        }
        ExportFormat::Plotscript => plotscript(grid),
    })
}

fn plotscript(grid: &RegionGrid) -> String {
    let spec = &grid.spec;
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script: stability regions in the (E1, Hv2) plane");
    let _ = writeln!(
        s,
        "# H3 = {}, epsilon = {}, psi step = {}, grid {}x{}",
        fmt_f64(spec.h3),
        fmt_f64(spec.epsilon),
        fmt_f64(spec.psi_step),
        spec.e1_range.count,
        spec.h2_range.count
    );
    let _ = writeln!(s, "set xlabel 'E1'");
    let _ = writeln!(s, "set ylabel 'Hv2'");
    let _ = writeln!(s, "set xrange [{}:{}]", fmt_f64(spec.e1_range.min), fmt_f64(spec.e1_range.max));
    let _ = writeln!(s, "set yrange [{}:{}]", fmt_f64(spec.h2_range.min), fmt_f64(spec.h2_range.max));
    let _ = writeln!(s, "set cbrange [0.5:4.5]");
    let palette: Vec<String> = REGION_COLORS
        .iter()
        .flat_map(|(k, col, _)| {
            [
                format!("{} '{col}'", *k as f64 - 0.5),
                format!("{} '{col}'", *k as f64 + 0.5),
            ]
        })
        .collect();
    let _ = writeln!(s, "set palette defined ({})", palette.join(", "));
    let tics: Vec<String> = REGION_COLORS
        .iter()
        .map(|(k, _, _)| format!("'{k}' {k}"))
        .collect();
    let _ = writeln!(s, "set cbtics ({})", tics.join(", "));
    for (k, _, desc) in REGION_COLORS {
        let _ = writeln!(s, "# region {k}: {desc}");
    }
    let _ = writeln!(s, "$regions << EOD");
    for c in &grid.cells {
        let _ = writeln!(s, "{} {} {}", fmt_f64(c.e1), fmt_f64(c.h2), c.label.unwrap_or(0));
    }
    let _ = writeln!(s, "EOD");
    let _ = writeln!(s, "plot $regions using 1:2:3 with image notitle");
    s
}

/// Write `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(h3: f64) -> ScanSpec {
        ScanSpec {
            h3,
            e1_range: Range::new(0.0, 1.0, 3),
            h2_range: Range::new(0.1, 1.0, 3),
            ..ScanSpec::default()
        }
    }

    #[test]
    fn corners_of_small_grid() {
        let g = label_regions(scan_plane(&small(1.0)).unwrap()).unwrap();
        // E1 = 1, Hv2 = 0.1
        assert!(g.cell(2, 0).verdict.is_unstable());
        assert_eq!(g.cell(2, 0).label, Some(1));
        // E1 = 0, Hv2 = 1
        assert_eq!(g.cell(0, 2).verdict, Verdict::SufficientlyStable);
        assert_eq!(g.cell(0, 2).label, Some(3));
    }

    #[test]
    fn labels_follow_rules() {
        assert_eq!(region_label(0.8, 0.5, 1.0, true), 1);
        assert_eq!(region_label(0.4, 1.0, 1.0, false), 3);
        assert_eq!(region_label(1.2, 1.5, 1.0, true), 4);
        assert_eq!(region_label(1.2, 1.5, 1.0, false), 2);
    }

    #[test]
    fn inconsistent_grid_is_rejected() {
        let mut g = scan_plane(&small(1.0)).unwrap();
        let idx = 2; // E1 = 1, Hv2 = 0.1
        g.cells[idx].verdict = Verdict::NoGrowingMode;
        assert!(matches!(label_regions(g), Err(Error::ConsistencyViolation { .. })));
    }

    #[test]
    fn spec_validation() {
        let mut s = small(1.0);
        s.e1_range.count = 1;
        assert!(matches!(scan_plane(&s), Err(Error::InvalidSpec(_))));
        let mut s = small(1.0);
        s.h3 = 0.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn exports() {
        let spec = ScanSpec {
            e1_range: Range::new(0.2, 1.0, 2),
            h2_range: Range::new(0.5, 1.0, 2),
            ..ScanSpec::default()
        };
        let g = label_regions(scan_plane(&spec).unwrap()).unwrap();
        let csv = export_grid(&g, ExportFormat::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(!csv.contains('\r'));
        assert!(lines[1].starts_with("2.0000000000000001e-1,5.0000000000000000e-1,"));

        let json = export_grid(&g, ExportFormat::Json).unwrap();
        let back: RegionGrid = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        assert!(json.contains("\"schema\": \"pv-scan/1\""));
        assert!(json.contains("2.0000000000000001e-1"));

        let gp = export_grid(&g, ExportFormat::Plotscript).unwrap();
        assert_eq!(gp.matches("# region ").count(), 4);

        let unlabeled = scan_plane(&spec).unwrap();
        assert!(export_grid(&unlabeled, ExportFormat::Csv).is_err());
    }

    #[test]
    fn mirrored_points_agree() {
        let grid = PsiGrid::default();
        let tol = Tolerances::default();
        for &(e1, h2) in &[(0.7, 0.9), (1.2, 1.5), (0.3, 0.35), (1.0, 1.6)] {
            let base = classify_point(&small(0.5).state_at(e1, h2), &grid, &tol).unwrap();
            for (se, sh) in [(-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
                let m = classify_point(&small(0.5).state_at(se * e1, sh * h2), &grid, &tol).unwrap();
                assert_eq!(m.name(), base.name(), "({e1}, {h2}) mirrored by ({se}, {sh})");
            }
        }
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
