use std::fmt::Write as _;

use super::fit::RateFit;
use super::sweep::SweepOutcome;

/// First line of every sweep CSV.
pub const SWEEP_CSV_VERSION: &str = "# alphaflow sweep csv v1";

pub const SWEEP_CSV_HEADER: &str =
    "model,value,alpha,cutoff_k2,lambda_m1,mode_count,error,error_sq,bound_sq,ratio,fit_x,error_time,monitor_pass,temporal_pass";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn float(x: f64) -> String {
    format!("{x:.17e}")
}

/// One row per sweep point, floats at full precision.
pub fn sweep_csv(out: &SweepOutcome) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{SWEEP_CSV_VERSION} kind={} form={:?}",
        out.kind.name(),
        out.form
    );
    s.push_str(SWEEP_CSV_HEADER);
    s.push('\n');
    for c in &out.curves {
        for p in &c.points {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                p.model,
                float(p.value),
                float(p.alpha),
                opt(p.cutoff_k2),
                opt(p.lambda_m1.map(float)),
                opt(p.mode_count),
                float(p.error),
                float(p.error * p.error),
                float(p.bound_sq),
                float(p.ratio),
                float(p.fit_x),
                float(p.error_time),
                p.bounds.pass,
                p.temporal.is_none_or(|r| r.pass),
            );
        }
    }
    s
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Axes {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Axes {
    fn px(&self, x: f64) -> f64 {
        PAD + (x.log10() - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y.log10() - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }
}

fn fit_line(s: &mut String, ax: &Axes, fit: &RateFit, color: &str) {
    let xs: Vec<f64> = fit.points.iter().map(|p| p.0).collect();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(0.0, f64::max);
    let y = |x: f64| fit.prefactor * x.powf(fit.order);
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
        ax.px(lo),
        ax.py(y(lo)),
        ax.px(hi),
        ax.py(y(hi))
    );
}

/// Log-log scatter of the measured errors with fitted lines and the
/// theorem bound (dashed), or `None` when nothing is positive.
pub fn sweep_svg(out: &SweepOutcome) -> Option<String> {
    let squared = out.kind == super::SweepKind::Combined;
    let mut pts = Vec::new();
    for c in &out.curves {
        for p in &c.points {
            let e = if squared { p.error * p.error } else { p.error };
            let b = if squared {
                p.bound_sq
            } else {
                p.bound_sq.sqrt()
            };
            pts.push((p.fit_x, e));
            pts.push((p.fit_x, b));
        }
    }
    let good: Vec<(f64, f64)> = pts
        .into_iter()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0 && p.1.is_finite())
        .collect();
    if good.is_empty() {
        return None;
    }
    let lx: Vec<f64> = good.iter().map(|p| p.0.log10()).collect();
    let ly: Vec<f64> = good.iter().map(|p| p.1.log10()).collect();
    let span = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let m = 0.05 * (hi - lo).max(1.0);
        (lo - m, hi + m)
    };
    let (x0, x1) = span(&lx);
    let (y0, y1) = span(&ly);
    let ax = Axes { x0, x1, y0, y1 };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let ylabel = if squared { "squared error" } else { "error" };
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{} sweep: x = {:?}</text>"#,
        W / 2.0,
        PAD / 2.0,
        out.kind.name(),
        out.form
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">log10 {ylabel}</text>"#,
        H / 2.0,
        H / 2.0
    );
    for d in (x0.ceil() as i32)..=(x1.floor() as i32) {
        let x = ax.px(10f64.powi(d));
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{d}</text>"#,
            H - PAD + 16.0
        );
    }
    for d in (y0.ceil() as i32)..=(y1.floor() as i32) {
        let y = ax.py(10f64.powi(d));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y:.2}" text-anchor="end">1e{d}</text>"#,
            PAD - 4.0
        );
    }
    for (i, c) in out.curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut bound = String::new();
        for p in &c.points {
            let e = if squared { p.error * p.error } else { p.error };
            let b = if squared {
                p.bound_sq
            } else {
                p.bound_sq.sqrt()
            };
            if e > 0.0 {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#,
                    ax.px(p.fit_x),
                    ax.py(e)
                );
            }
            if b > 0.0 && b.is_finite() {
                let _ = write!(bound, "{:.2},{:.2} ", ax.px(p.fit_x), ax.py(b));
            }
        }
        if !bound.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-dasharray="5,4"/>"#,
                bound.trim_end()
            );
        }
        if let Some(f) = &c.fit {
            fit_line(&mut s, &ax, f, color);
        }
        let order = c
            .fit
            .as_ref()
            .map_or("n/a".to_string(), |f| format!("{:.3}", f.order));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{} p = {order}</text>"#,
            PAD + 8.0,
            PAD + 16.0 * (i + 1) as f64,
            c.model
        );
    }
    s.push_str("</svg>\n");
    Some(s)
}
