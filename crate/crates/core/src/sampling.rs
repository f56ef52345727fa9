//! Seeded sampling of interior points and complex directions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::scalar::C64;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the Euclidean ball of radius `radius` in C^n.
pub fn in_ball<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<C64> {
    loop {
        let v: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() < 1.0 {
            return v.chunks(2).map(|c| C64::new(radius * c[0], radius * c[1])).collect();
        }
    }
}

/// Unit vector of C^n, uniform on the sphere.
pub fn direction<R: Rng>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let v = in_ball(rng, n, 1.0);
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Point with `|z| = radius` exactly, uniform in angle.
pub fn on_circle<R: Rng>(rng: &mut R, radius: f64) -> C64 {
    C64::from_polar(radius, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Interior point whose coordinates (or preimage coordinates, for
/// pushforwards) stay within `frac` of the outer scale, and away from inner
/// boundaries by the same relative margin. Rejection sampling in the
/// circumscribing box with at most `10^5` draws.
pub fn interior_point<R: Rng>(rng: &mut R, d: &DomainSpec, frac: f64) -> Result<Vec<C64>> {
    if !(frac > 0.0 && frac < 1.0) {
        return Err(Error::InvalidArgument(format!("sampling fraction {frac} not in (0, 1)")));
    }
    match d {
        DomainSpec::Disc | DomainSpec::Ball { .. } => Ok(in_ball(rng, d.dim(), frac)),
        DomainSpec::Polydisc { n } => Ok((0..*n).flat_map(|_| in_ball(rng, 1, frac)).collect()),
        DomainSpec::Annulus { r } => {
            // |z| in [r + (1 - frac)(1 - r)/2, frac]; empty ranges collapse to the mid-circle
            let lo = r + 0.5 * (1.0 - frac) * (1.0 - r);
            let hi = frac.max(lo);
            let m = rng.gen_range(lo..=hi);
            Ok(vec![on_circle(rng, m)])
        }
        DomainSpec::PuncturedDisc => {
            let m = rng.gen_range((1.0 - frac) * 0.5..frac.max(0.5));
            Ok(vec![on_circle(rng, m)])
        }
        DomainSpec::Product { factors } => {
            let mut out = Vec::with_capacity(d.dim());
            for f in factors {
                out.extend(interior_point(rng, f, frac)?);
            }
            Ok(out)
        }
        DomainSpec::Pushforward { map, base } => {
            for _ in 0..100_000 {
                let pre = interior_point(rng, base, frac)?;
                if let Ok(img) = map.forward(&pre, false) {
                    if d.contains(&img)? {
                        return Ok(img);
                    }
                }
            }
            Err(Error::InvalidArgument("no interior sample found".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let a: Vec<_> = (0..5).map(|_| in_ball(&mut rng(7), 2, 0.7)).collect();
        let mut r1 = rng(11);
        let mut r2 = rng(11);
        assert_eq!(direction(&mut r1, 3), direction(&mut r2, 3));
        assert_eq!(a[0], a[1]);
    }

    #[test]
    fn samples_are_inside() {
        let mut r = rng(3);
        for d in [
            DomainSpec::Disc,
            DomainSpec::ball(3),
            DomainSpec::polydisc(2),
            DomainSpec::Annulus { r: 0.5 },
            DomainSpec::PuncturedDisc,
            DomainSpec::hartogs_triangle(),
        ] {
            for _ in 0..50 {
                let z = interior_point(&mut r, &d, 0.7).unwrap();
                assert!(d.contains(&z).unwrap(), "{d:?} {z:?}");
            }
        }
    }

    #[test]
    fn directions_are_unit() {
        let mut r = rng(5);
        for _ in 0..20 {
            let x = direction(&mut r, 2);
            let n: f64 = x.iter().map(|c| c.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-14);
        }
    }
}
