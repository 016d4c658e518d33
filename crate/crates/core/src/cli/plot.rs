use std::fmt::Write;

use crate::datamodel::Category;
use crate::metrics::RocCurve;

const SIZE: f64 = 400.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 9] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf",
];

/// ROC curves as a standalone SVG document, FPR on x and TPR on y.
pub fn roc_svg(curves: &[(Category, RocCurve)]) -> String {
    let total = SIZE + 2.0 * MARGIN;
    let px = |fpr: f64| MARGIN + fpr * SIZE;
    let py = |tpr: f64| MARGIN + (1.0 - tpr) * SIZE;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    let _ = writeln!(s, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="white" stroke="black"/>"#);
    let _ = writeln!(
        s,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#bbbbbb" stroke-dasharray="4 4"/>"##,
        px(0.0),
        py(0.0),
        px(1.0),
        py(1.0)
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">FPR</text>"#, MARGIN + SIZE / 2.0, total - 10.0);
    let _ = writeln!(
        s,
        r#"<text x="12" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 12 {})">TPR</text>"#,
        MARGIN + SIZE / 2.0,
        MARGIN + SIZE / 2.0
    );
    for (i, (category, curve)) in curves.iter().enumerate() {
        let color = COLORS[category.index() % COLORS.len()];
        let points: Vec<String> = curve
            .points()
            .iter()
            .map(|p| format!("{:.2},{:.2}", px(p.fpr), py(p.tpr)))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, points.join(" "));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{category}</text>"#,
            px(1.0) - 40.0,
            py(0.0) - 10.0 - 13.0 * (curves.len() - 1 - i) as f64
        );
    }
    s.push_str("</svg>\n");
    s
}
