//! Top-down SVG schematics of a scene as seen by one of the three cameras.
//!
//! Cameras are planar rotations of the plane about its origin: the left camera
//! turns the scene by -30 degrees, the right one by +30 degrees (counter-
//! clockwise positive). Only visible objects are drawn. The output depends on
//! nothing but the scene and the view.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::sampler::View;
use crate::scene::{Color, Material, ObjectState, SceneGraph, Shape};

/// Pixels per plane unit.
const SCALE: f64 = 10.0;

pub fn view_angle_degrees(view: View) -> f64 {
    match view {
        View::Left => -30.0,
        View::Center => 0.0,
        View::Right => 30.0,
    }
}

pub fn fill_color(c: Color) -> &'static str {
    match c {
        Color::Gray => "#575757",
        Color::Red => "#ad2323",
        Color::Blue => "#2a4bd7",
        Color::Green => "#1d6914",
        Color::Brown => "#814a19",
        Color::Purple => "#8126c0",
        Color::Cyan => "#29d0d0",
        Color::Yellow => "#ffee33",
    }
}

struct Frame {
    cos: f64,
    sin: f64,
    half: f64,
}

impl Frame {
    /// Plane coordinates to canvas pixels (canvas y grows downwards).
    fn project(&self, x: f64, y: f64) -> (f64, f64) {
        let rx = x * self.cos - y * self.sin;
        let ry = x * self.sin + y * self.cos;
        ((rx + self.half) * SCALE, (self.half - ry) * SCALE)
    }

    fn polygon(&self, points: impl Iterator<Item = (f64, f64)>) -> String {
        let mut s = String::new();
        for (i, (x, y)) in points.enumerate() {
            let (px, py) = self.project(x, y);
            if i > 0 {
                s.push(' ');
            }
            write!(s, "{px:.2},{py:.2}").unwrap();
        }
        s
    }
}

fn outline(frame: &Frame, o: &ObjectState, r: f64, style: &str, fill: &str) -> String {
    let (cx, cy) = (o.position.x as f64, o.position.y as f64);
    match o.shape {
        Shape::Sphere => {
            let (px, py) = frame.project(cx, cy);
            format!(r#"<circle cx="{px:.2}" cy="{py:.2}" r="{:.2}" fill="{fill}" {style}/>"#, r * SCALE)
        }
        Shape::Cube => {
            // square inscribed in the collision disc
            let corners = (0..4).map(|k| {
                let a = PI / 4.0 + k as f64 * PI / 2.0;
                (cx + r * a.cos(), cy + r * a.sin())
            });
            format!(r#"<polygon points="{}" fill="{fill}" {style}/>"#, frame.polygon(corners))
        }
        Shape::Cylinder => {
            let corners = (0..6).map(|k| {
                let a = k as f64 * PI / 3.0;
                (cx + r * a.cos(), cy + r * a.sin())
            });
            format!(r#"<polygon points="{}" fill="{fill}" {style}/>"#, frame.polygon(corners))
        }
    }
}

pub fn render_schematic(scene: &SceneGraph, view: View) -> String {
    let cfg = scene.config();
    let angle = view_angle_degrees(view).to_radians();
    let vb = cfg.visible_bound as f64;
    // a square rotated by 30 degrees spans vb * (cos 30 + sin 30) < 1.5 vb
    let frame = Frame { cos: angle.cos(), sin: angle.sin(), half: 1.5 * vb };
    let size = 2.0 * frame.half * SCALE;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0}" height="{size:.0}" viewBox="0 0 {size:.0} {size:.0}" data-view="{}">"#,
        view.token()
    )
    .unwrap();
    writeln!(svg, r##"<rect x="0" y="0" width="{size:.0}" height="{size:.0}" fill="#ffffff"/>"##).unwrap();
    let area = [(-vb, -vb), (vb, -vb), (vb, vb), (-vb, vb)];
    writeln!(
        svg,
        r##"<polygon class="visible-area" points="{}" fill="#f4f4f0" stroke="#999999" stroke-width="1"/>"##,
        frame.polygon(area.into_iter())
    )
    .unwrap();

    for o in scene.objects().iter().filter(|o| o.is_visible(cfg)) {
        let r = cfg.radius(o.size);
        let fill = fill_color(o.color);
        writeln!(
            svg,
            r#"<g class="object" data-id="{}" data-size="{}" data-color="{}" data-shape="{}" data-material="{}">"#,
            o.id, o.size, o.color, o.shape, o.material
        )
        .unwrap();
        match o.material {
            Material::Rubber => {
                writeln!(svg, "{}", outline(&frame, o, r, r##"stroke="#222222" stroke-width="2""##, fill)).unwrap()
            }
            Material::Metal => writeln!(
                svg,
                "{}",
                outline(&frame, o, r, r##"stroke="#222222" stroke-width="2" stroke-dasharray="6,4""##, fill)
            )
            .unwrap(),
            Material::Glass => {
                writeln!(svg, "{}", outline(&frame, o, r, r##"stroke="#222222" stroke-width="2""##, fill)).unwrap();
                writeln!(svg, "{}", outline(&frame, o, r * 0.75, r##"stroke="#222222" stroke-width="1""##, "none"))
                    .unwrap();
            }
        }
        let (px, py) = frame.project(o.position.x as f64, o.position.y as f64);
        let text = if o.color == Color::Yellow || o.color == Color::Cyan { "#000000" } else { "#ffffff" };
        writeln!(
            svg,
            r#"<text x="{px:.2}" y="{py:.2}" font-family="sans-serif" font-size="14" text-anchor="middle" dominant-baseline="central" fill="{text}">{}</text>"#,
            o.id
        )
        .unwrap();
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{PlaneConfig, Position, Size};

    fn scene() -> SceneGraph {
        let mk = |id, shape, material, x, y| ObjectState {
            id,
            size: Size::Medium,
            color: Color::Red,
            shape,
            material,
            position: Position::new(x, y),
        };
        SceneGraph::new(
            vec![
                mk(0, Shape::Cube, Material::Rubber, 10, 0),
                mk(1, Shape::Sphere, Material::Metal, -10, -10),
                mk(2, Shape::Cylinder, Material::Glass, 0, 12),
                mk(3, Shape::Cube, Material::Rubber, 35, 0),
            ],
            PlaneConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn draws_only_visible_objects() {
        let svg = render_schematic(&scene(), View::Center);
        assert_eq!(svg.matches(r#"class="object""#).count(), 3);
        assert!(!svg.contains(r#"data-id="3""#));
        assert!(svg.contains("<circle"));
        assert!(svg.contains("stroke-dasharray"));
        assert_eq!(svg.matches("<polygon").count(), 1 + 1 + 2);
    }

    #[test]
    fn deterministic_and_view_dependent() {
        let s = scene();
        let views: Vec<String> = View::ALL.iter().map(|v| render_schematic(&s, *v)).collect();
        assert_eq!(views[0], render_schematic(&s, View::Left));
        assert_ne!(views[0], views[1]);
        assert_ne!(views[1], views[2]);
    }

    #[test]
    fn right_view_rotates_counterclockwise() {
        // object 0 sits on +x; rotated by +30 degrees it moves up the canvas
        let f = Frame { cos: (30f64).to_radians().cos(), sin: (30f64).to_radians().sin(), half: 30.0 };
        let (px, py) = f.project(10.0, 0.0);
        assert!((px - (30.0 + 10.0 * 3f64.sqrt() / 2.0) * SCALE).abs() < 1e-9);
        assert!((py - 25.0 * SCALE).abs() < 1e-9);
    }
}
