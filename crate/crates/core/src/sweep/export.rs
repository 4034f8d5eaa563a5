//! Text serializations of sweep grids and isoconditioning loci.

use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{IsoLoci, SweepGrid};

/// Fixed-point rendering with `digits` significant digits.
pub fn format_sig(value: f64, digits: usize) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    let digits = digits.max(1);
    let decimals_for = |v: f64| {
        if v == 0.0 {
            digits - 1
        } else {
            let exponent = v.abs().log10().floor() as i64;
            (digits as i64 - 1 - exponent).max(0) as usize
        }
    };
    let mut decimals = decimals_for(value);
    let mut text = format!("{value:.decimals$}");
    // Rounding may carry into a new leading digit (9.9999996 -> 10.00000).
    let rounded: f64 = text.parse().unwrap_or(value);
    if rounded != 0.0 && decimals_for(rounded) < decimals {
        decimals = decimals_for(rounded);
        text = format!("{value:.decimals$}");
    }
    if text.starts_with('-') && text[1..].chars().all(|c| c == '0' || c == '.') {
        text.remove(0);
    }
    text
}

/// `value` rounded to `digits` significant digits.
pub fn round_sig(value: f64, digits: usize) -> f64 {
    format_sig(value, digits).parse().unwrap_or(value)
}

impl SweepGrid {
    /// CSV with header `x_mm,y_mm,reachable,index,best_theta_rad`, one row per node,
    /// row-major with `y` outer. Unreachable nodes leave the last two fields empty.
    pub fn to_csv(&self, digits: usize) -> String {
        let spec = &self.spec;
        let mut out = String::from("x_mm,y_mm,reachable,index,best_theta_rad\n");
        for iy in 0..spec.ny {
            for ix in 0..spec.nx {
                let x = format_sig(spec.x_at(ix), digits);
                let y = format_sig(spec.y_at(iy), digits);
                match self.node(ix, iy) {
                    Some(n) => writeln!(
                        out,
                        "{x},{y},1,{},{}",
                        format_sig(n.index, digits),
                        format_sig(n.theta, digits)
                    ),
                    None => writeln!(out, "{x},{y},0,,"),
                }
                .expect("writing to a String cannot fail");
            }
        }
        out
    }

    /// JSON document with the spec and per-row arrays (`null` where unreachable).
    pub fn to_json(&self, digits: usize) -> Value {
        let spec = &self.spec;
        let r = |v: f64| round_sig(v, digits);
        let rows = |f: &dyn Fn(usize, usize) -> Value| -> Vec<Value> {
            (0..spec.ny)
                .map(|iy| Value::Array((0..spec.nx).map(|ix| f(ix, iy)).collect()))
                .collect()
        };
        json!({
            "spec": spec,
            "x_mm": (0..spec.nx).map(|i| r(spec.x_at(i))).collect::<Vec<_>>(),
            "y_mm": (0..spec.ny).map(|i| r(spec.y_at(i))).collect::<Vec<_>>(),
            "reachable": rows(&|ix, iy| json!(self.node(ix, iy).is_some())),
            "index": rows(&|ix, iy| json!(self.node(ix, iy).map(|n| r(n.index)))),
            "best_theta_rad": rows(&|ix, iy| json!(self.node(ix, iy).map(|n| r(n.theta)))),
        })
    }

    /// Gnuplot `splot` data: `x y index best_theta` per node, one block per grid row,
    /// `NaN` where unreachable.
    pub fn to_gnuplot(&self, digits: usize) -> String {
        let spec = &self.spec;
        let mut out = String::from("# x_mm y_mm index best_theta_rad\n");
        for iy in 0..spec.ny {
            if iy > 0 {
                out.push('\n');
            }
            for ix in 0..spec.nx {
                let (index, theta) = match self.node(ix, iy) {
                    Some(n) => (format_sig(n.index, digits), format_sig(n.theta, digits)),
                    None => ("NaN".to_string(), "NaN".to_string()),
                };
                writeln!(
                    out,
                    "{} {} {index} {theta}",
                    format_sig(spec.x_at(ix), digits),
                    format_sig(spec.y_at(iy), digits)
                )
                .expect("infallible");
            }
        }
        out
    }
}

impl IsoLoci {
    /// `{"levels": [...], "polylines": [[[[x, y], ...], ...], ...]}` with one polyline
    /// list per level.
    pub fn to_json(&self, digits: usize) -> Value {
        let polylines: Vec<Vec<Vec<[f64; 2]>>> = self
            .polylines
            .iter()
            .map(|lines| {
                lines
                    .iter()
                    .map(|l| {
                        l.points
                            .iter()
                            .map(|p| [round_sig(p[0], digits), round_sig(p[1], digits)])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        json!({ "levels": self.levels, "polylines": polylines })
    }

    /// Gnuplot data: one `index` block per level (separated by two blank lines), one
    /// blank-line-separated block per polyline.
    pub fn to_gnuplot(&self, digits: usize) -> String {
        let mut out = String::new();
        for (k, (level, lines)) in self.levels.iter().zip(&self.polylines).enumerate() {
            if k > 0 {
                out.push_str("\n\n");
            }
            writeln!(out, "# level {}", format_sig(*level, digits)).expect("infallible");
            for (j, line) in lines.iter().enumerate() {
                if j > 0 {
                    out.push('\n');
                }
                for p in &line.points {
                    writeln!(out, "{} {}", format_sig(p[0], digits), format_sig(p[1], digits)).expect("infallible");
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WorkingMode;
    use crate::sweep::{MatrixKind, NodeOptimum, Polyline, SweepSpec};

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(-173.20508075688772, 6), "-173.205");
        assert_eq!(format_sig(141.4213562373095, 6), "141.421");
        assert_eq!(format_sig(0.35412345, 3), "0.354");
        assert_eq!(format_sig(0.0, 6), "0.00000");
        assert_eq!(format_sig(-1e-12, 3), "-0.00000000000100");
        assert_eq!(format_sig(9.9999996, 6), "10.0000");
        assert_eq!(format_sig(1234567.0, 6), "1234567");
        assert_eq!(format_sig(-0.0000001, 2), "-0.00000010");
        assert_eq!(round_sig(0.70912, 3), 0.709);
    }

    fn tiny_grid() -> SweepGrid {
        let spec = SweepSpec {
            nx: 2,
            ny: 2,
            x_range: (-1.0, 1.0),
            y_range: (0.0, 2.0),
            ..SweepSpec::new(MatrixKind::KBar, WorkingMode::ALL_PLUS, 100.0)
        };
        let nodes = vec![
            Some(NodeOptimum {
                index: 0.5,
                theta: 0.25,
            }),
            None,
            Some(NodeOptimum {
                index: 0.125,
                theta: 1.5,
            }),
            Some(NodeOptimum { index: 1.0, theta: 0.0 }),
        ];
        SweepGrid::from_nodes(spec, nodes).unwrap()
    }

    #[test]
    fn csv_layout() {
        let csv = tiny_grid().to_csv(3);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x_mm,y_mm,reachable,index,best_theta_rad");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1], "-1.00,0.00,1,0.500,0.250");
        assert_eq!(lines[2], "1.00,0.00,0,,");
        assert_eq!(lines[3], "-1.00,2.00,1,0.125,1.50");
    }

    #[test]
    fn json_layout() {
        let doc = tiny_grid().to_json(6);
        assert_eq!(doc["spec"]["matrix_kind"], "K_bar");
        assert_eq!(doc["spec"]["mode"], "+++");
        assert_eq!(doc["index"][0][1], Value::Null);
        assert_eq!(doc["index"][1][1], 1.0);
        assert_eq!(doc["reachable"][0], json!([true, false]));
    }

    #[test]
    fn grid_gnuplot_rows() {
        let text = tiny_grid().to_gnuplot(3);
        assert_eq!(
            text,
            "# x_mm y_mm index best_theta_rad\n-1.00 0.00 0.500 0.250\n1.00 0.00 NaN NaN\n\n-1.00 2.00 0.125 1.50\n1.00 2.00 1.00 0.00\n"
        );
    }

    #[test]
    fn gnuplot_blocks() {
        let loci = IsoLoci {
            levels: vec![0.2, 0.4],
            polylines: vec![
                vec![
                    Polyline {
                        points: vec![[0.0, 0.0], [1.0, 0.0]],
                        closed: false,
                    },
                    Polyline {
                        points: vec![[2.0, 2.0], [3.0, 2.0]],
                        closed: false,
                    },
                ],
                vec![],
            ],
        };
        let text = loci.to_gnuplot(3);
        assert_eq!(
            text,
            "# level 0.200\n0.00 0.00\n1.00 0.00\n\n2.00 2.00\n3.00 2.00\n\n\n# level 0.400\n"
        );
        let doc = loci.to_json(3);
        assert_eq!(doc["polylines"][0][1], json!([[2.0, 2.0], [3.0, 2.0]]));
    }
}
