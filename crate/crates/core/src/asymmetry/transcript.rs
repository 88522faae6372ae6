use std::fmt::Write;

use super::PipelineRun;
use crate::geometry::Mat3;
use crate::jet::MatrixJet;
use crate::projection::ProjectionRun;

fn mat3(out: &mut String, name: &str, m: &Mat3) {
    let _ = writeln!(out, "{name}:");
    for (r, row) in m.iter().enumerate() {
        for (c, j) in row.iter().enumerate() {
            let _ = writeln!(out, "  [{}{}] {j}", r + 1, c + 1);
        }
    }
}

fn mat2(out: &mut String, name: &str, m: &MatrixJet) {
    let _ = writeln!(out, "{name}:");
    for r in 0..2 {
        for c in 0..2 {
            let _ = writeln!(out, "  [{}{}] {}", r + 1, c + 1, m.entry(r, c));
        }
    }
}

fn records(run: &ProjectionRun, k: u32) -> Option<&crate::projection::IterationRecord> {
    run.records.iter().find(|r| r.k == k)
}

/// Plain-text dump of every intermediate jet, in the order the proof prints them:
/// metric, inverse, density, norm, framing, Pauli matrices, projections, then
/// R, S, T, X for each iteration and sign, then the traces.
pub fn transcript(label: &str, run: &PipelineRun) -> String {
    let g = &run.geometry;
    let sd = &run.spectral;
    let mut out = String::new();
    let _ = writeln!(out, "# {label}");
    let _ = writeln!(out, "data: {}", g.data.label());
    let _ = writeln!(out, "budget: {}", g.budget);
    let _ = writeln!(out, "framing: {}", g.convention.name());
    mat3(&mut out, "g", &g.g);
    mat3(&mut out, "g_inv", &g.g_inv);
    let _ = writeln!(out, "rho: {}", g.rho);
    let _ = writeln!(out, "norm: {}", sd.h);
    mat3(&mut out, "framing e~_j^a", &g.framing);
    for (a, s) in g.pauli.iter().enumerate() {
        mat2(&mut out, &format!("sigma~^{}", a + 1), s);
    }
    mat2(&mut out, "W_prin", &sd.dirac.prin);
    mat2(&mut out, "W_0", &sd.dirac.zero);
    mat2(&mut out, "P(+)", &sd.p_plus);
    mat2(&mut out, "P(-)", &sd.p_minus);
    let depth = run.plus.records.len() as u32;
    for k in 1..=depth {
        let (Some(p), Some(m)) = (records(&run.plus, k), records(&run.minus, k)) else {
            continue;
        };
        let _ = writeln!(out, "## iteration {k}");
        for (sign, rec) in [("+", p), ("-", m)] {
            for (name, mj) in [("R", &rec.r), ("S", &rec.s), ("T", &rec.t), ("X", &rec.x)] {
                mat2(&mut out, &format!("{name}{sign},{k}"), mj);
            }
        }
    }
    let _ = writeln!(out, "## traces");
    for (order, j) in run.a_orders().iter().rev() {
        let _ = writeln!(out, "a~{order}: {j}");
        let _ = writeln!(out, "a~{order}(0,xi0): {}", j.eval_origin());
    }
    out
}
