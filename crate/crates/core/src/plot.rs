//! Minimal SVG line charts of `p_e`, `p_g` and `z` from a catline CSV.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Columns needed to draw a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub x_name: String,
    pub x: Vec<f64>,
    pub p_e: Vec<f64>,
    pub p_g: Vec<f64>,
    pub z: Vec<f64>,
}

/// Reads a catline CSV: `#` header lines, one column row, then data rows.
/// The first column is the x axis.
pub fn read_series(text: &str) -> Result<Series> {
    let mut rows = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    let (_, header) = rows.next().ok_or_else(|| Error::Csv("no column header".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| {
        cols.iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::Csv(format!("missing column `{name}`")))
    };
    let (ie, ig, iz) = (find("p_e")?, find("p_g")?, find("z")?);
    let x_name = cols[0].to_string();
    if x_name != "t" && x_name != "k" {
        return Err(Error::Csv(format!("first column must be `t` or `k`, got `{x_name}`")));
    }
    let mut s = Series {
        x_name,
        x: Vec::new(),
        p_e: Vec::new(),
        p_g: Vec::new(),
        z: Vec::new(),
    };
    for (lineno, row) in rows {
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::Csv(format!(
                "line {}: expected {} fields, found {}",
                lineno + 1,
                cols.len(),
                fields.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|_| Error::Csv(format!("line {}: `{}` is not a number", lineno + 1, fields[i])))
        };
        s.x.push(num(0)?);
        s.p_e.push(num(ie)?);
        s.p_g.push(num(ig)?);
        s.z.push(num(iz)?);
    }
    if s.x.is_empty() {
        return Err(Error::Csv("no data rows".into()));
    }
    Ok(s)
}

const W: f64 = 720.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;

/// Self-contained SVG with one polyline per observable on a fixed
/// `[-1, 1]` y axis.
pub fn render_svg(s: &Series) -> String {
    let x0 = s.x.first().copied().unwrap_or(0.0);
    let x1 = s.x.last().copied().unwrap_or(1.0);
    let span = if x1 > x0 { x1 - x0 } else { 1.0 };
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / span * pw;
    let py = |y: f64| TOP + (1.0 - (y.clamp(-1.05, 1.05) + 1.0) / 2.0) * ph;
    let x_label = if s.x_name == "k" {
        "collision index k"
    } else {
        "time (units of 1/Ω)"
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for y in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let yy = py(y);
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{y}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            yy + 4.0
        );
    }
    for i in 0..=4 {
        let x = x0 + span * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(x),
            TOP + ph + 16.0,
            tick(x)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
        LEFT + pw / 2.0,
        H - 10.0
    );

    let curves = [("P_e", &s.p_e, "#1f77b4"), ("P_g", &s.p_g, "#d62728"), ("Z", &s.z, "#2ca02c")];
    for (i, (name, ys, color)) in curves.iter().enumerate() {
        let mut pts = String::new();
        for (x, y) in s.x.iter().zip(ys.iter()) {
            let _ = write!(pts, "{:.2},{:.2} ", px(*x), py(*y));
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.trim_end()
        );
        let ly = TOP + 20.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 15.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{name}</text>"#,
            lx + 25.0,
            lx + 32.0,
            ly + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}

fn tick(x: f64) -> String {
    if x != 0.0 && (x.abs() >= 1e5 || x.abs() < 1e-2) {
        format!("{x:.2e}")
    } else if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x:.2}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_draws_three_curves() {
        let csv = "# head\nt,p_e,p_g,z,trace_err,min_eig\n0,1,0,1,0,0\n10,0.5,0.5,0,0,0\n";
        let s = read_series(csv).unwrap();
        assert_eq!(s.x, vec![0.0, 10.0]);
        let svg = render_svg(&s);
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.contains("time"));
    }

    #[test]
    fn collision_axis_label() {
        let csv = "k,reservoir_index,p_e,p_g,z\n1,0,0.5,0.5,0\n2,0,0.6,0.4,0.2\n";
        let svg = render_svg(&read_series(csv).unwrap());
        assert!(svg.contains("collision index k"));
    }

    #[test]
    fn malformed_inputs() {
        assert!(read_series("# only header\nt,p_e,p_g,z\n").is_err());
        assert!(read_series("").is_err());
        assert!(read_series("t,p_e,z\n1,2,3\n").is_err());
        assert!(read_series("t,p_e,p_g,z\n1,2,x,3\n").is_err());
        assert!(read_series("t,p_e,p_g,z\n1,2,3\n").is_err());
    }
}
