//! Minimal self-contained SVG emitters: line/scatter plots with optional
//! log axes, and a cell heatmap for the sign chart.

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 0.01 && a < 10000.0 {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
    pub dashed: bool,
}

pub struct LinePlot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series<'a>>,
}

const W: f64 = 760.0;
const H: f64 = 520.0;
const ML: f64 = 78.0;
const MR: f64 = 24.0;
const MT: f64 = 46.0;
const MB: f64 = 62.0;

impl LinePlot<'_> {
    pub fn render(&self) -> String {
        let tx = |v: f64| if self.log_x { v.log10() } else { v };
        let ty = |v: f64| if self.log_y { v.log10() } else { v };

        let mut xmin = f64::INFINITY;
        let mut xmax = f64::NEG_INFINITY;
        let mut ymin = f64::INFINITY;
        let mut ymax = f64::NEG_INFINITY;
        for s in &self.series {
            for (&x, &y) in s.xs.iter().zip(s.ys) {
                if self.log_x && x <= 0.0 || self.log_y && y <= 0.0 {
                    continue;
                }
                let (u, v) = (tx(x), ty(y));
                if u.is_finite() && v.is_finite() {
                    xmin = xmin.min(u);
                    xmax = xmax.max(u);
                    ymin = ymin.min(v);
                    ymax = ymax.max(v);
                }
            }
        }
        if !xmin.is_finite() {
            xmin = 0.0;
            xmax = 1.0;
        }
        if !ymin.is_finite() {
            ymin = 0.0;
            ymax = 1.0;
        }
        if (xmax - xmin).abs() < 1e-300 {
            xmax = xmin + 1.0;
        }
        if (ymax - ymin).abs() < 1e-300 {
            ymax = ymin + 1.0;
        }
        let pad_y = 0.05 * (ymax - ymin);
        ymin -= pad_y;
        ymax += pad_y;

        let px = |u: f64| ML + (u - xmin) / (xmax - xmin) * (W - ML - MR);
        let py = |v: f64| H - MB - (v - ymin) / (ymax - ymin) * (H - MT - MB);

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
        ));
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        out.push_str(&format!(
            "<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
            W / 2.0,
            self.title
        ));

        // axes box and ticks
        out.push_str(&format!(
            "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
            W - ML - MR,
            H - MT - MB
        ));
        for i in 0..=5 {
            let u = xmin + (xmax - xmin) * i as f64 / 5.0;
            let x = px(u);
            let label = if self.log_x { format!("1e{}", fmt_tick(u)) } else { fmt_tick(u) };
            out.push_str(&format!(
                "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#ccc\"/>\n",
                MT,
                H - MB
            ));
            out.push_str(&format!(
                "<text x=\"{x}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">{label}</text>\n",
                H - MB + 16.0
            ));
            let v = ymin + (ymax - ymin) * i as f64 / 5.0;
            let y = py(v);
            let label = if self.log_y { format!("1e{}", fmt_tick(v)) } else { fmt_tick(v) };
            out.push_str(&format!(
                "<line x1=\"{ML}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#ccc\"/>\n",
                W - MR
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">{label}</text>\n",
                ML - 6.0,
                y + 4.0
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
            (ML + W - MR) / 2.0,
            H - 16.0,
            self.x_label
        ));
        out.push_str(&format!(
            "<text x=\"20\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 20 {})\">{}</text>\n",
            (MT + H - MB) / 2.0,
            (MT + H - MB) / 2.0,
            self.y_label
        ));

        for (si, s) in self.series.iter().enumerate() {
            let mut path = String::new();
            let mut pen_up = true;
            for (&x, &y) in s.xs.iter().zip(s.ys) {
                if self.log_x && x <= 0.0 || self.log_y && y <= 0.0 {
                    pen_up = true;
                    continue;
                }
                let (u, v) = (px(tx(x)), py(ty(y)));
                if !u.is_finite() || !v.is_finite() {
                    pen_up = true;
                    continue;
                }
                path.push_str(&format!("{}{u:.2} {v:.2} ", if pen_up { "M" } else { "L" }));
                pen_up = false;
            }
            let dash = if s.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
            out.push_str(&format!(
                "<path d=\"{path}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\"{dash}/>\n",
                s.color
            ));
            let ly = MT + 18.0 + 18.0 * si as f64;
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{}\" stroke-width=\"2\"{dash}/>\n",
                ML + 12.0,
                ML + 40.0,
                s.color
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"12\" font-family=\"sans-serif\">{}</text>\n",
                ML + 46.0,
                ly + 4.0,
                s.label
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Three-color cell map for sign fields, with markers on the real axis.
pub fn sign_heatmap(
    title: &str,
    xs: &[f64],
    ys: &[f64],
    sign: &[i8],
    markers: &[(f64, &str)],
) -> String {
    let nx = xs.len();
    let ny = ys.len();
    let (x0, x1) = (xs[0], xs[nx - 1]);
    let (y0, y1) = (ys[0], ys[ny - 1]);
    let px = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let py = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);
    let cw = (W - ML - MR) / nx as f64 + 0.5;
    let ch = (H - MT - MB) / ny as f64 + 0.5;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\" font-family=\"sans-serif\">{title}</text>\n",
        W / 2.0
    ));
    for (iy, &y) in ys.iter().enumerate() {
        for (ix, &x) in xs.iter().enumerate() {
            let s = sign[iy * nx + ix];
            let color = match s {
                1 => "#f6c4d0",
                -1 => "#ffffff",
                _ => "#555555",
            };
            if s != -1 {
                out.push_str(&format!(
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{cw:.2}\" height=\"{ch:.2}\" fill=\"{color}\"/>\n",
                    px(x) - 0.5 * cw,
                    py(y) - 0.5 * ch
                ));
            }
        }
    }
    // real axis
    out.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\" stroke-width=\"1\"/>\n",
        py(0.0),
        W - MR,
        py(0.0)
    ));
    for (x, label) in markers {
        out.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#1a55a0\"/>\n",
            px(*x),
            py(0.0)
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">{label}</text>\n",
            px(*x),
            py(0.0) + 20.0
        ));
    }
    out.push_str(&format!(
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        W - ML - MR,
        H - MT - MB
    ));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_valid_svg_skeleton() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys = [1.0, 0.5, 0.25, 0.125];
        let plot = LinePlot {
            title: "decay",
            x_label: "t",
            y_label: "|q|",
            log_x: true,
            log_y: true,
            series: vec![Series { label: "q", color: "#a02020", xs: &xs, ys: &ys, dashed: false }],
        };
        let svg = plot.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("decay"));
    }

    #[test]
    fn heatmap_contains_markers() {
        let xs = vec![-1.0, 0.0, 1.0];
        let ys = vec![-1.0, 0.0, 1.0];
        let sign = vec![1i8, -1, 0, 1, 0, -1, 0, 1, -1];
        let svg = sign_heatmap("signs", &xs, &ys, &sign, &[(0.0, "z2")]);
        assert!(svg.contains("z2"));
        assert!(svg.contains("</svg>"));
    }
}
