//! CSV, SVG and manifest writers.

use crate::cantor::CantorTree;
use crate::error::Result;
use crate::flow::OrbitTrace;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

pub fn trace_csv(trace: &OrbitTrace) -> String {
    let mut s = String::from("t,systole,short_length,short_area_fraction\n");
    for i in 0..trace.times.len() {
        let (a, b) = match &trace.short_cylinders[i] {
            Some(c) => (c.length.to_string(), c.area_fraction.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(s, "{},{},{a},{b}", trace.times[i], trace.systoles[i]).unwrap();
    }
    s
}

/// `log10(systole)` against time for each trace, with a line at `eps`.
pub fn systole_svg(traces: &[(String, &OrbitTrace)], eps: f64) -> String {
    let (w, h, pad) = (800.0, 400.0, 50.0);
    let t_max = traces.iter().filter_map(|t| t.1.times.last().copied()).fold(1e-9, f64::max);
    let vals = traces.iter().flat_map(|t| t.1.systoles.iter().map(|v| v.log10()));
    let (mut lo, mut hi) = vals.fold((eps.log10(), eps.log10()), |(a, b), v| (a.min(v), b.max(v)));
    lo -= 0.1;
    hi += 0.1;
    let x = |t: f64| pad + (w - 2.0 * pad) * t / t_max;
    let y = |v: f64| h - pad - (h - 2.0 * pad) * (v - lo) / (hi - lo);
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<line x1="{pad}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, h - pad, w - pad, h - pad).unwrap();
    writeln!(s, r#"<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{}" stroke="black"/>"#, h - pad).unwrap();
    let ye = y(eps.log10());
    writeln!(s, r#"<line x1="{pad}" y1="{ye:.2}" x2="{}" y2="{ye:.2}" stroke="gray" stroke-dasharray="4 4"/>"#, w - pad).unwrap();
    writeln!(s, r#"<text x="{}" y="{:.2}" font-size="12">eps</text>"#, w - pad + 4.0, ye + 4.0).unwrap();
    writeln!(s, r#"<text x="{}" y="{}" font-size="12">t</text>"#, w / 2.0, h - 15.0).unwrap();
    writeln!(s, r#"<text x="10" y="{}" font-size="12">log10 systole</text>"#, pad - 15.0).unwrap();
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#ff7f0e"];
    for (i, (name, tr)) in traces.iter().enumerate() {
        let pts: Vec<String> = tr
            .times
            .iter()
            .zip(&tr.systoles)
            .map(|(&t, &v)| format!("{:.2},{:.2}", x(t), y(v.log10())))
            .collect();
        let c = colors[i % colors.len()];
        writeln!(s, r#"<polyline fill="none" stroke="{c}" stroke-width="1" points="{}"/>"#, pts.join(" ")).unwrap();
        writeln!(s, r#"<text x="{}" y="{}" font-size="11" fill="{c}">{name}</text>"#, pad + 10.0, pad + 14.0 * i as f64).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

/// Nested interval diagram: each row is one depth and every child is drawn
/// inside its parent's span, magnified so that the parent fills it.
pub fn tree_svg(tree: &CantorTree) -> String {
    let depth = tree.max_depth();
    let (w, row) = (900.0, 40.0);
    let h = row * (depth as f64 + 1.0) + 20.0;
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    // (node, left, right) in pixels
    let mut stack: Vec<(usize, f64, f64)> = vec![(tree.root, 10.0, w - 10.0)];
    while let Some((id, l, r)) = stack.pop() {
        let n = tree.node(id);
        let y = 10.0 + row * n.depth as f64;
        writeln!(
            s,
            r##"<rect x="{l:.3}" y="{y}" width="{:.3}" height="{}" fill="#9ecae1" stroke="#08519c" stroke-width="0.5"><title>node {} |beta| = {:.6e}</title></rect>"##,
            (r - l).max(0.5),
            row * 0.5,
            n.id,
            n.cylinder.length
        )
        .unwrap();
        let mid = 0.5 * (l + r);
        let half = 0.5 * (r - l);
        for &c in &n.children {
            let ch = tree.node(c);
            let cm = mid + half * ch.offset / n.interval.radius;
            let ch_half = (half * ch.interval.radius / n.interval.radius).max(0.25);
            // magnify so that children stay visible
            let zoom = (half / (n.children.len() as f64 * 2.0 * ch_half)).max(1.0);
            stack.push((c, cm - ch_half * zoom, cm + ch_half * zoom));
        }
    }
    s.push_str("</svg>\n");
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub crate_version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub files: Vec<ManifestEntry>,
}

/// Collects output files and their hashes.
pub struct OutputDir {
    dir: std::path::PathBuf,
    pub entries: Vec<ManifestEntry>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(OutputDir { dir: dir.to_path_buf(), entries: Vec::new() })
    }

    pub fn write(&mut self, name: &str, data: &[u8]) -> Result<()> {
        std::fs::write(self.dir.join(name), data)?;
        self.entries.push(ManifestEntry { file: name.to_string(), sha256: sha256_hex(data), bytes: data.len() });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    pub fn finish(self, config_json: &str, seed: u64) -> Result<Manifest> {
        let m = Manifest {
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: sha256_hex(config_json.as_bytes()),
            seed,
            files: self.entries,
        };
        let mut s = serde_json::to_string_pretty(&m)?;
        s.push('\n');
        std::fs::write(self.dir.join("manifest.json"), s)?;
        Ok(m)
    }
}
