//! Cell layout, user placement and bearing/sector geometry.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::antenna::SectorConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point2D { x, y }
    }

    pub fn from_polar(radius: f64, angle_rad: f64) -> Self {
        Point2D {
            x: radius * angle_rad.cos(),
            y: radius * angle_rad.sin(),
        }
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Bearing from `self` towards `other`, in `[0, 2π)`.
    pub fn bearing_to(&self, other: &Point2D) -> f64 {
        wrap_angle((other.y - self.y).atan2(other.x - self.x))
    }

    pub fn offset(&self, dx: f64, dy: f64) -> Point2D {
        Point2D::new(self.x + dx, self.y + dy)
    }
}

/// Wraps any finite angle into `[0, 2π)`.
pub fn wrap_angle(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: Point2D,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Point2D, radius: f64) -> Self {
        Disc { center, radius }
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        self.center.distance(p) <= self.radius
    }
}

/// Co-channel reuse ratio `Q = D/R = sqrt(3N)` for cluster size `N`.
pub fn reuse_ratio(cluster_size: u32) -> Result<f64> {
    if cluster_size == 0 {
        return Err(Error::invalid("cluster_size", "must be at least 1"));
    }
    Ok((3.0 * cluster_size as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutConfig {
    pub macro_radius: f64,
    pub femto_radius: f64,
    pub n_femto: usize,
    /// Minimum distance between any two femto BS sites.
    pub min_separation: f64,
    pub cluster_size: u32,
    /// Rejection-sampling attempts allowed per femto site.
    pub max_attempts: usize,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            macro_radius: 1000.0,
            femto_radius: 125.0 * 1.732,
            n_femto: 24,
            min_separation: 100.0,
            cluster_size: 7,
            max_attempts: 10_000,
        }
    }
}

impl LayoutConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.macro_radius.is_finite() && self.macro_radius > 0.0) {
            return Err(Error::invalid("macro_radius", "must be positive"));
        }
        if !(self.femto_radius.is_finite() && self.femto_radius > 0.0) {
            return Err(Error::invalid("femto_radius", "must be positive"));
        }
        if self.femto_radius >= self.macro_radius {
            return Err(Error::invalid(
                "femto_radius",
                "must be smaller than macro_radius",
            ));
        }
        if !(self.min_separation.is_finite() && self.min_separation >= 0.0) {
            return Err(Error::invalid("min_separation", "must be nonnegative"));
        }
        if self.cluster_size == 0 {
            return Err(Error::invalid("cluster_size", "must be at least 1"));
        }
        if self.max_attempts == 0 {
            return Err(Error::invalid("max_attempts", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkLayout {
    pub macro_center: Point2D,
    pub macro_radius: f64,
    pub femto_sites: Vec<Point2D>,
    pub femto_radius: f64,
    pub cochannel_centers: Vec<Point2D>,
    pub cluster_size: u32,
    pub seed: u64,
}

impl NetworkLayout {
    pub fn macro_disc(&self) -> Disc {
        Disc::new(self.macro_center, self.macro_radius)
    }

    pub fn femto_disc(&self, index: usize) -> Disc {
        Disc::new(self.femto_sites[index], self.femto_radius)
    }

    /// Keeps only the first `n` femto sites. Sites are placed sequentially, so
    /// this equals the layout built with `n_femto = n` and the same seed.
    pub fn truncated(&self, n: usize) -> NetworkLayout {
        let mut layout = self.clone();
        layout.femto_sites.truncate(n);
        layout
    }
}

/// Builds the macrocell layout: femto sites by seeded rejection sampling inside
/// the macro disc, plus the six first-tier co-channel macro centers.
///
/// Sites are drawn one at a time from a single stream, so the first `k` sites
/// do not depend on how many sites were requested in total.
pub fn build_layout(config: &LayoutConfig, seed: u64) -> Result<NetworkLayout> {
    config.validate()?;
    let macro_center = Point2D::ORIGIN;
    let q = reuse_ratio(config.cluster_size)?;
    let reuse_distance = q * config.macro_radius;
    let cochannel_centers = (0..6)
        .map(|k| Point2D::from_polar(reuse_distance, k as f64 * PI / 3.0))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut femto_sites: Vec<Point2D> = Vec::with_capacity(config.n_femto);
    let macro_disc = Disc::new(macro_center, config.macro_radius);
    for placed in 0..config.n_femto {
        let mut attempts = 0;
        let site = loop {
            if attempts == config.max_attempts {
                return Err(Error::InfeasibleLayout {
                    placed,
                    requested: config.n_femto,
                    min_separation_m: config.min_separation,
                    attempts,
                });
            }
            attempts += 1;
            let candidate = sample_in_disc(&mut rng, &macro_disc);
            // strictly inside the macro disc
            if candidate.distance(&macro_center) >= config.macro_radius {
                continue;
            }
            if femto_sites
                .iter()
                .all(|s| s.distance(&candidate) >= config.min_separation)
            {
                break candidate;
            }
        };
        femto_sites.push(site);
    }

    Ok(NetworkLayout {
        macro_center,
        macro_radius: config.macro_radius,
        femto_sites,
        femto_radius: config.femto_radius,
        cochannel_centers,
        cluster_size: config.cluster_size,
        seed,
    })
}

/// Uniform point in a disc (radius drawn as `R * sqrt(U)`).
pub fn sample_in_disc<R: Rng + ?Sized>(rng: &mut R, disc: &Disc) -> Point2D {
    let r = disc.radius * rng.random::<f64>().sqrt();
    let theta = rng.random::<f64>() * TAU;
    disc.center.offset(r * theta.cos(), r * theta.sin())
}

/// Drops `n` users uniformly over `region` from a stream seeded by `seed`.
pub fn drop_users(n: usize, region: &Disc, seed: u64) -> Vec<Point2D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| sample_in_disc(&mut rng, region)).collect()
}

/// Sector of `bs` that serves `user`. Sector `k` covers bearings
/// `[alignment + k·w, alignment + (k+1)·w)` with `w = 2π / n_sectors`.
pub fn sector_index(bs: &Point2D, user: &Point2D, sectors: &SectorConfig) -> Result<usize> {
    if bs.distance(user) == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(sectors.sector_of_angle(bs.bearing_to(user)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use crate::antenna::SectorMode;
    use proptest::prelude::*;

    #[test]
    fn reuse_ratio_examples() {
        assert!((reuse_ratio(1).unwrap() - 1.7321).abs() < 1e-4);
        assert!((reuse_ratio(7).unwrap() - 4.5826).abs() < 1e-4);
        assert_eq!(reuse_ratio(3).unwrap(), 3.0);
        assert!(reuse_ratio(0).is_err());
    }

    proptest! {
        #[test]
        fn reuse_ratio_squares_to_3n(n in 1u32..100_000) {
            let q = reuse_ratio(n).unwrap();
            let target = 3.0 * n as f64;
            prop_assert!(((q * q) - target).abs() / target <= 1e-12);
        }
    }

    #[test]
    fn empty_layout_still_has_cochannel_tier() {
        let cfg = LayoutConfig {
            n_femto: 0,
            ..Default::default()
        };
        let layout = build_layout(&cfg, 3).unwrap();
        assert!(layout.femto_sites.is_empty());
        assert_eq!(layout.cochannel_centers.len(), 6);
    }

    #[test]
    fn default_layout_invariants() {
        let cfg = LayoutConfig::default();
        let layout = build_layout(&cfg, 1).unwrap();
        assert_eq!(layout.femto_sites.len(), 24);
        let d = (21f64).sqrt() * 1000.0;
        for c in &layout.cochannel_centers {
            let rel = (c.distance(&layout.macro_center) - d).abs() / d;
            assert!(rel < 1e-9);
        }
        for (i, a) in layout.femto_sites.iter().enumerate() {
            assert!(a.distance(&layout.macro_center) < 1000.0);
            for b in &layout.femto_sites[i + 1..] {
                assert!(a.distance(b) >= 100.0);
            }
        }
        assert_eq!(layout, build_layout(&cfg, 1).unwrap());
        assert_ne!(layout.femto_sites, build_layout(&cfg, 2).unwrap().femto_sites);
    }

    #[test]
    fn layout_prefix_property() {
        let full = build_layout(&LayoutConfig::default(), 9).unwrap();
        let cfg = LayoutConfig {
            n_femto: 7,
            ..Default::default()
        };
        let small = build_layout(&cfg, 9).unwrap();
        assert_eq!(small, full.truncated(7));
    }

    #[test]
    fn infeasible_separation_is_reported() {
        let cfg = LayoutConfig {
            n_femto: 24,
            min_separation: 900.0,
            max_attempts: 200,
            ..Default::default()
        };
        match build_layout(&cfg, 1) {
            Err(Error::InfeasibleLayout { requested, .. }) => assert_eq!(requested, 24),
            other => panic!("expected infeasible layout, got {other:?}"),
        }
    }

    #[test]
    fn invalid_radii_rejected() {
        let cfg = LayoutConfig {
            femto_radius: 2000.0,
            ..Default::default()
        };
        assert!(build_layout(&cfg, 1).is_err());
    }

    #[test]
    fn drop_users_examples() {
        let disc = Disc::new(Point2D::ORIGIN, 1000.0);
        assert!(drop_users(0, &disc, 1).is_empty());
        let users = drop_users(100_000, &disc, 5);
        assert!(users.iter().all(|p| disc.contains(p)));
        let mean_r = users.iter().map(|p| p.distance(&disc.center)).sum::<f64>() / users.len() as f64;
        let expected = 2.0 * 1000.0 / 3.0;
        assert!((mean_r - expected).abs() / expected < 0.01, "mean radius {mean_r}");
    }

    #[test]
    fn drop_users_radial_quantiles() {
        let disc = Disc::new(Point2D::new(50.0, -20.0), 1000.0);
        let mut radii: Vec<f64> = drop_users(100_000, &disc, 11)
            .iter()
            .map(|p| p.distance(&disc.center))
            .collect();
        radii.sort_by(f64::total_cmp);
        for q in [0.1, 0.5, 0.9] {
            let empirical = radii[(q * radii.len() as f64) as usize];
            // CDF (r/R)^2 = q  =>  r = R sqrt(q)
            let analytic = 1000.0 * f64::sqrt(q);
            assert!((empirical - analytic).abs() / analytic < 0.01, "q={q}");
        }
    }

    #[test]
    fn sector_index_examples() {
        let bs = Point2D::ORIGIN;
        let omni = SectorConfig::new(SectorMode::Omni);
        assert_eq!(sector_index(&bs, &Point2D::new(-3.0, 4.0), &omni).unwrap(), 0);

        let quad = SectorConfig::new(SectorMode::Deg90);
        assert_eq!(sector_index(&bs, &Point2D::new(10.0, 0.0), &quad).unwrap(), 0);
        assert_eq!(sector_index(&bs, &Point2D::new(0.0, 10.0), &quad).unwrap(), 1);

        let tri = SectorConfig::new(SectorMode::Deg120);
        let boundary = Point2D::from_polar(100.0, 2.0 * PI / 3.0);
        assert_eq!(sector_index(&bs, &boundary, &tri).unwrap(), 1);

        assert_eq!(sector_index(&bs, &bs, &tri), Err(Error::CoincidentPoints));
    }

    #[test]
    fn sector_occupancy_is_balanced() {
        let bs = Point2D::ORIGIN;
        let n = 60_000usize;
        for mode in [SectorMode::Deg120, SectorMode::Deg90] {
            let cfg = SectorConfig::new(mode);
            let k = cfg.n_sectors();
            let mut counts = vec![0usize; k];
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            for _ in 0..n {
                let user = Point2D::from_polar(10.0, rng.random::<f64>() * TAU);
                counts[sector_index(&bs, &user, &cfg).unwrap()] += 1;
            }
            let p = 1.0 / k as f64;
            let sd = (n as f64 * p * (1.0 - p)).sqrt();
            for c in counts {
                assert!((c as f64 - n as f64 * p).abs() < 3.0 * sd);
            }
        }
    }

    proptest! {
        #[test]
        fn sector_index_is_total(angle in -20.0f64..20.0, align in -4.0f64..4.0) {
            for mode in [SectorMode::Omni, SectorMode::Deg120, SectorMode::Deg90] {
                let cfg = SectorConfig { alignment_rad: align, ..SectorConfig::new(mode) };
                let user = Point2D::from_polar(5.0, angle);
                let idx = sector_index(&Point2D::ORIGIN, &user, &cfg).unwrap();
                prop_assert!(idx < cfg.n_sectors());
            }
        }
    }
}
