use ppife::ife_basis::{build_bilinear_ife_basis, build_linear_ife_basis, LocalIfeBasis};
use ppife::interface_geom::{line_partition, CutElementGeometry};
use ppife::{Point, Side};
use rand::Rng;

use super::{GAUSS10_W, GAUSS10_X};

/// A randomly placed, sized and shaped element with a random straight cut
/// through two distinct edges.
pub fn random_cut<R: Rng>(rng: &mut R, rectangle: bool) -> CutElementGeometry {
    let origin = Point::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
    let (hx, hy) = (rng.random_range(0.01..1.0), rng.random_range(0.01..1.0));
    let vertices: Vec<Point> = if rectangle {
        vec![origin, origin + Point::new(hx, 0.0), origin + Point::new(hx, hy), origin + Point::new(0.0, hy)]
    } else {
        let apex = Point::new(rng.random_range(-0.5..1.5) * hx, hy);
        vec![origin, origin + Point::new(hx, 0.0), origin + apex]
    };
    let nv = vertices.len();
    let k1 = rng.random_range(0..nv);
    let mut k2 = rng.random_range(0..nv - 1);
    if k2 >= k1 {
        k2 += 1;
    }
    let on_edge = |k: usize, t: f64| vertices[k].lerp(vertices[(k + 1) % nv], t);
    let (d, e) = (on_edge(k1, rng.random_range(0.01..0.99)), on_edge(k2, rng.random_range(0.01..0.99)));
    let (lo, hi) = (k1.min(k2), k1.max(k2));
    let inner = if rng.random_bool(0.5) { Side::Minus } else { Side::Plus };
    let sides: Vec<Side> = (0..nv).map(|i| if i > lo && i <= hi { inner } else { inner.opposite() }).collect();
    line_partition(0, &vertices, &sides, (k1, d), (k2, e)).expect("valid random cut")
}

pub fn build(geom: &CutElementGeometry, beta_minus: f64, beta_plus: f64) -> LocalIfeBasis {
    if geom.vertices.len() == 4 {
        build_bilinear_ife_basis(geom, beta_minus, beta_plus).unwrap()
    } else {
        build_linear_ife_basis(geom, beta_minus, beta_plus).unwrap()
    }
}

/// Largest violations of the defining properties of an IFE basis:
/// `[nodal, continuity at D and E, flux, partition of unity]`. The flux
/// residual is scaled by `max(beta) / diameter`.
pub fn property_violations<R: Rng>(b: &LocalIfeBasis, rng: &mut R) -> [f64; 4] {
    let g = &b.geometry;
    let nv = g.vertices.len();
    let mut v = [0.0_f64; 4];
    for i in 0..nv {
        for (j, (&a, &s)) in g.vertices.iter().zip(&g.vertex_sides).enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            v[0] = v[0].max((b.eval(i, a, s).0 - want).abs());
        }
        for p in [g.d, g.e] {
            v[1] = v[1].max((b.eval(i, p, Side::Minus).0 - b.eval(i, p, Side::Plus).0).abs());
        }
        let unit = b.beta_minus.max(b.beta_plus) / g.diameter();
        let flux = if nv == 3 {
            b.flux_jump(i, g.d)
        } else {
            let mut s = 0.0;
            for (x, w) in GAUSS10_X.iter().zip(GAUSS10_W) {
                s += 0.5 * w * b.flux_jump(i, g.d.lerp(g.e, 0.5 * (x + 1.0)));
            }
            s
        };
        v[2] = v[2].max(flux.abs() / unit);
    }
    for _ in 0..20 {
        let mut w: Vec<f64> = (0..nv).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let p = g.vertices.iter().zip(&w).fold(Point::default(), |acc, (&q, &t)| acc + q * t);
        let side = g.line_side(p);
        let sum: f64 = (0..nv).map(|i| b.eval(i, p, side).0).sum();
        v[3] = v[3].max((sum - 1.0).abs());
    }
    v
}
