//! SVG rendering of a configuration on the unit circle.
//!
//! Squares mark the `p` charges, diamonds the `q` charges and circles the unit
//! charges. Output is byte-for-byte deterministic for identical input.

use std::fmt::Write;

use crate::schema::Params;

/// Fixed-precision coordinate with negative zero folded to zero.
fn coord(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// Screen position of angle `t` (SVG's y axis points down).
fn position(t: f64) -> (String, String) {
    (coord(t.cos()), coord(-t.sin()))
}

fn marker_size(params: &Params) -> f64 {
    (0.3 / (params.m * params.n).max(1) as f64).clamp(0.018, 0.06)
}

/// Render the configuration; `phi` and `psi` are the `p` and `q` charge angles.
pub fn render(params: &Params, phi: &[f64], psi: &[f64], theta: &[f64]) -> String {
    let size = marker_size(params);
    let stroke = coord(size / 6.0);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"600\" height=\"600\" viewBox=\"-1.2 -1.2 2.4 2.4\">\n",
    );
    out.push_str("<rect class=\"background\" x=\"-1.2\" y=\"-1.2\" width=\"2.4\" height=\"2.4\" fill=\"white\"/>\n");
    out.push_str("<circle class=\"unit-circle\" cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#555555\" stroke-width=\"0.006\"/>\n");

    let side = coord(size * 1.7);
    for &t in phi {
        let (x, y) = (t.cos(), -t.sin());
        let _ = writeln!(
            out,
            "<rect class=\"p-charge\" x=\"{}\" y=\"{}\" width=\"{side}\" height=\"{side}\" fill=\"#1f77b4\" stroke=\"black\" stroke-width=\"{stroke}\"/>",
            coord(x - size * 0.85),
            coord(y - size * 0.85),
        );
    }
    let reach = size * 1.2;
    for &t in psi {
        let (x, y) = (t.cos(), -t.sin());
        let _ = writeln!(
            out,
            "<polygon class=\"q-charge\" points=\"{},{} {},{} {},{} {},{}\" fill=\"#d62728\" stroke=\"black\" stroke-width=\"{stroke}\"/>",
            coord(x),
            coord(y - reach),
            coord(x + reach),
            coord(y),
            coord(x),
            coord(y + reach),
            coord(x - reach),
            coord(y),
        );
    }
    for &t in theta {
        let (x, y) = position(t);
        let _ = writeln!(
            out,
            "<circle class=\"unit-charge\" cx=\"{x}\" cy=\"{y}\" r=\"{}\" fill=\"white\" stroke=\"black\" stroke-width=\"{stroke}\"/>",
            coord(size * 0.8),
        );
    }
    let Params { n, m, p, q } = *params;
    let _ = writeln!(
        out,
        "<text class=\"legend\" x=\"-1.15\" y=\"-1.08\" font-family=\"sans-serif\" font-size=\"0.07\">n = {n}, m = {m}, p = {p}, q = {q}</text>"
    );
    out.push_str(
        "<text class=\"legend\" x=\"-1.15\" y=\"1.15\" font-family=\"sans-serif\" font-size=\"0.055\">squares: charge p, diamonds: charge q, circles: unit charges</text>\n",
    );
    out.push_str("</svg>\n");
    out
}
