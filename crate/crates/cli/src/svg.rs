//! Deterministic chord diagrams: the unit circle with labeled marked points,
//! chords for the gaps (red for gaps of q, blue for gaps of p) and
//! highlighted arcs for the partition sides.



use pingpong_core::circle::{Arc, ArcSet, CirclePoint};
use pingpong_core::model::Structure;
use pingpong_core::pingpong::model_partition_arcsets;

use crate::run::RunError;
use crate::scenario::Scenario;

const SIZE: f64 = 480.0;
const R: f64 = 200.0;

fn angle_of(p: &CirclePoint, linear: bool) -> f64 {
    match p {
        CirclePoint::Infinity => std::f64::consts::PI,
        CirclePoint::Finite(s) => {
            let x: f64 = s.to_decimal(9).parse().unwrap_or(0.0);
            if linear {
                2.0 * std::f64::consts::PI * x
            } else {
                2.0 * x.atan()
            }
        }
    }
}

fn on_circle(theta: f64) -> (f64, f64) {
    // counterclockwise on screen: SVG y grows downward, so negate
    (SIZE / 2.0 + R * theta.cos(), SIZE / 2.0 - R * theta.sin())
}

fn all_in_unit(points: &[&CirclePoint]) -> bool {
    points.iter().all(|p| match p {
        CirclePoint::Infinity => false,
        CirclePoint::Finite(s) => {
            let x: f64 = s.to_decimal(9).parse().unwrap_or(2.0);
            (0.0..1.0).contains(&x)
        }
    })
}

fn chord(arc: &Arc, linear: bool, color: &str, out: &mut String) {
    let a = angle_of(&arc.lo, linear);
    let b = angle_of(&arc.hi, linear);
    let (x1, y1) = on_circle(a);
    let (x2, y2) = on_circle(b);
    out.push_str(&format!(
        "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>\n"
    ));
}

fn highlight(arcset: &ArcSet, linear: bool, color: &str, out: &mut String) {
    for arc in arcset.arcs() {
        let mut a = angle_of(&arc.lo, linear);
        let mut b = angle_of(&arc.hi, linear);
        while b <= a {
            b += 2.0 * std::f64::consts::PI;
        }
        let (x1, y1) = on_circle(a);
        let (x2, y2) = on_circle(b);
        let large = if b - a > std::f64::consts::PI { 1 } else { 0 };
        // sweep 0: counterclockwise in math coordinates (y flipped)
        out.push_str(&format!(
            "  <path d=\"M {x1:.2} {y1:.2} A {R} {R} 0 {large} 0 {x2:.2} {y2:.2}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"8\" stroke-opacity=\"0.45\"/>\n"
        ));
        let _ = (&mut a, &mut b);
    }
}

/// Renders the scenario's gap/partition data. Model scenarios draw the seed
/// gaps of both stabilizers and the partition; unlinked-data scenarios draw
/// the given gap lists.
pub fn chord_diagram(scenario: &Scenario) -> Result<String, RunError> {
    let mut body = String::new();
    let mut labels: Vec<(String, CirclePoint)> = Vec::new();
    let mut blue_chords: Vec<Arc> = Vec::new();
    let mut red_chords: Vec<Arc> = Vec::new();
    let mut highlights: Vec<(ArcSet, &str)> = Vec::new();
    let mut probe_points: Vec<CirclePoint> = Vec::new();

    if let Some(model) = &scenario.model {
        for (m, pt) in &model.marks {
            labels.push((m.name().to_string(), pt.clone()));
            probe_points.push(pt.clone());
        }
        for side in [pingpong_core::model::Side::R, pingpong_core::model::Side::L] {
            if let Some(gs) = model.gap_system(Structure::H, side) {
                // gaps of p: blue
                blue_chords.extend(gs.seeds.iter().map(|s| s.arc.clone()));
            }
            if let Some(gs) = model.gap_system(Structure::K, side) {
                red_chords.extend(gs.seeds.iter().map(|s| s.arc.clone()));
            }
        }
        let (u_h, u_k) = model_partition_arcsets(model).map_err(RunError)?;
        highlights.push((u_h, "#6666ee"));
        highlights.push((u_k, "#ee6666"));
    } else if let Some(u) = &scenario.unlinked {
        for (name, pt) in [
            ("p", &u.data.p),
            ("qbar", &u.data.qbar),
            ("q", &u.data.q),
            ("pbar", &u.data.pbar),
        ] {
            labels.push((name.to_string(), pt.clone()));
            probe_points.push(pt.clone());
        }
        blue_chords.extend(u.data.right_gaps_p.iter().cloned());
        blue_chords.extend(u.data.left_gaps_p.iter().cloned());
        red_chords.extend(u.data.right_gaps_q.iter().cloned());
        red_chords.extend(u.data.left_gaps_q.iter().cloned());
    }

    for arc in blue_chords.iter().chain(red_chords.iter()) {
        probe_points.push(arc.lo.clone());
        probe_points.push(arc.hi.clone());
    }
    let linear = all_in_unit(&probe_points.iter().collect::<Vec<_>>());

    for (set, color) in &highlights {
        highlight(set, linear, color, &mut body);
    }
    body.push_str(&format!(
        "  <circle cx=\"{c}\" cy=\"{c}\" r=\"{R}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        c = SIZE / 2.0
    ));
    for arc in &blue_chords {
        chord(arc, linear, "#2222cc", &mut body);
    }
    for arc in &red_chords {
        chord(arc, linear, "#cc2222", &mut body);
    }
    for (name, pt) in &labels {
        let theta = angle_of(pt, linear);
        let (x, y) = on_circle(theta);
        let (lx, ly) = (
            SIZE / 2.0 + (R + 18.0) * theta.cos(),
            SIZE / 2.0 - (R + 18.0) * theta.sin(),
        );
        body.push_str(&format!(
            "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3.5\" fill=\"black\"/>\n  <text x=\"{lx:.2}\" y=\"{ly:.2}\" font-size=\"15\" text-anchor=\"middle\" dominant-baseline=\"middle\">{name}</text>\n"
        ));
    }


    Ok(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">\n{body}</svg>\n",
        s = SIZE
    ))
}
