//! Planar geometry of the dual-zone exclusion regions.
//!
//! A transceiver pair excludes the union of a disk around its transmitter
//! (physical carrier sensing) and a disk around its receiver (RTS/CTS virtual
//! sensing). Everything downstream needs three things from this module: the
//! single-pair area `V_o`, the two-pair union area `V(r, β, θ)`, and the
//! S1/S2/S3 membership tests that decide where the two-point retention kernel
//! vanishes.
//!
//! Union areas are computed exactly by walking the uncovered boundary arcs of
//! every disk and applying Green's theorem, which is robust for any overlap
//! pattern of a handful of disks.

use std::f64::consts::{PI, TAU};

use arrayvec::ArrayVec;

use crate::error::{domain, Result};
use crate::params::NetworkParams;
use crate::process::{ProcessType, ThinningRule};

/// Maximum number of disks accepted by [`union_area`].
pub const MAX_UNION_DISKS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Point at distance `r` from the origin in direction `angle`.
    pub fn polar(r: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: r * c, y: r * s }
    }

    /// Translate by `r` in direction `angle`.
    pub fn offset(self, r: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            x: self.x + r * c,
            y: self.y + r * s,
        }
    }

    #[inline]
    pub fn dist2(self, other: Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(self, other: Point2) -> f64 {
        self.dist2(other).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point2,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(domain(format!("disk radius must be >= 0, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    /// Closed-disk membership: boundary points count as inside.
    #[inline]
    pub fn contains(&self, p: Point2) -> bool {
        self.center.dist2(p) <= self.radius * self.radius
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

/// Area of the intersection of two disks with radii `r1`, `r2` whose centres are `sep` apart.
pub fn lens_area(r1: f64, r2: f64, sep: f64) -> Result<f64> {
    for (v, name) in [(r1, "r1"), (r2, "r2"), (sep, "sep")] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(domain(format!("lens_area: {name} must be >= 0, got {v}")));
        }
    }
    if sep >= r1 + r2 {
        return Ok(0.0);
    }
    let small = r1.min(r2);
    if sep <= (r1 - r2).abs() {
        return Ok(PI * small * small);
    }
    let c1 = ((sep * sep + r1 * r1 - r2 * r2) / (2.0 * sep * r1)).clamp(-1.0, 1.0);
    let c2 = ((sep * sep + r2 * r2 - r1 * r1) / (2.0 * sep * r2)).clamp(-1.0, 1.0);
    let kite = (-sep + r1 + r2) * (sep + r1 - r2) * (sep - r1 + r2) * (sep + r1 + r2);
    let area = r1 * r1 * c1.acos() + r2 * r2 * c2.acos() - 0.5 * kite.max(0.0).sqrt();
    Ok(area.clamp(0.0, PI * small * small))
}

/// Shape of one pair's exclusion region: a transmitter-centred disk and a
/// receiver-centred disk at link distance `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusionShape {
    pub tx_radius: f64,
    pub rx_radius: f64,
    pub d: f64,
}

impl ExclusionShape {
    /// Dual-zone region `B_tx(R_cs) ∪ B_rx(R_tx)`. When `R_tx > R_cs` the
    /// transmitter-centred virtual disk of radius `R_tx` dominates the
    /// carrier-sense disk, so the effective transmitter radius is the larger one.
    pub fn dual_zone(params: &NetworkParams) -> Self {
        Self {
            tx_radius: params.r_cs.max(params.r_tx),
            rx_radius: params.r_tx,
            d: params.d,
        }
    }

    /// Carrier-sense-only region `B_tx(R_cs)` of the Matérn baselines.
    pub fn carrier_sense_only(params: &NetworkParams) -> Self {
        Self {
            tx_radius: params.r_cs,
            rx_radius: 0.0,
            d: params.d,
        }
    }

    /// Largest distance from the transmitter to any point of the region.
    pub fn reach(&self) -> f64 {
        if self.rx_radius > 0.0 {
            self.tx_radius.max(self.d + self.rx_radius)
        } else {
            self.tx_radius
        }
    }

    /// Area `V_o` of the single-pair region.
    pub fn area(&self) -> f64 {
        let (big, small, d) = (self.tx_radius, self.rx_radius, self.d);
        if small <= 0.0 {
            return PI * big * big;
        }
        if d + small <= big {
            return PI * big * big;
        }
        if d + big <= small {
            return PI * small * small;
        }
        if d >= big + small {
            return PI * (big * big + small * small);
        }
        // (π − ξ1) R_cs² + (π − ξ2) R_tx² + d R_cs sin ξ1
        let xi1 = ((d * d + big * big - small * small) / (2.0 * d * big))
            .clamp(-1.0, 1.0)
            .acos();
        let xi2 = ((d * d + small * small - big * big) / (2.0 * d * small))
            .clamp(-1.0, 1.0)
            .acos();
        (PI - xi1) * big * big + (PI - xi2) * small * small + d * big * xi1.sin()
    }

    pub fn receiver(&self, tx: Point2, orientation: f64) -> Point2 {
        tx.offset(self.d, orientation)
    }

    /// The two disks of a pair with transmitter `tx` and receiver orientation `orientation`.
    pub fn disks(&self, tx: Point2, orientation: f64) -> [Disk; 2] {
        [
            Disk {
                center: tx,
                radius: self.tx_radius,
            },
            Disk {
                center: self.receiver(tx, orientation),
                radius: self.rx_radius,
            },
        ]
    }

    /// Whether `p` lies in the region of the pair `(tx, rx)`.
    #[inline]
    pub fn contains(&self, tx: Point2, rx: Point2, p: Point2) -> bool {
        tx.dist2(p) <= self.tx_radius * self.tx_radius
            || (self.rx_radius > 0.0 && rx.dist2(p) <= self.rx_radius * self.rx_radius)
    }

    /// S1/S2/S3 membership of a relative configuration.
    pub fn membership(&self, config: &PairConfiguration) -> Membership {
        let r = config.r;
        let d = self.d;
        let r2 = r * r;
        let rho2 = self.rx_radius * self.rx_radius;
        let base = r2 + d * d;
        let two_rd = 2.0 * r * d;
        let (s2, s3) = if self.rx_radius > 0.0 {
            (
                base - two_rd * config.beta.cos() <= rho2,
                base + two_rd * (config.beta - config.theta).cos() <= rho2,
            )
        } else {
            (false, false)
        };
        Membership {
            s1: r2 <= self.tx_radius * self.tx_radius,
            s2,
            s3,
        }
    }

    /// Union area `V(r, β, θ)` of the regions of a pair at the origin with
    /// orientation 0 and a pair in relative configuration `config`.
    pub fn combined_area(&self, config: &PairConfiguration) -> f64 {
        let [a, b] = self.disks(Point2::ORIGIN, 0.0);
        let [c, e] = self.disks(config.second_tx(), config.theta);
        union_area(&[a, b, c, e])
    }
}

/// Relative geometry of two transceiver pairs. The first pair has its
/// transmitter at the origin and its receiver at `(d, 0)`; the second has its
/// transmitter at `(r cos β, r sin β)` and receiver orientation `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairConfiguration {
    pub r: f64,
    pub beta: f64,
    pub theta: f64,
}

impl PairConfiguration {
    /// Angles are reduced to `[0, 2π)`; `r` must be non-negative.
    pub fn new(r: f64, beta: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(domain(format!("pair separation must be >= 0, got {r}")));
        }
        if !(beta.is_finite() && theta.is_finite()) {
            return Err(domain("pair angles must be finite"));
        }
        Ok(Self {
            r,
            beta: beta.rem_euclid(TAU),
            theta: theta.rem_euclid(TAU),
        })
    }

    pub fn second_tx(&self) -> Point2 {
        Point2::polar(self.r, self.beta)
    }
}

/// Which of the sets S1 (mutual carrier sense), S2 (second transmitter in the
/// first receiver's virtual disk) and S3 (first transmitter in the second
/// receiver's virtual disk) contain a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Membership {
    pub s1: bool,
    pub s2: bool,
    pub s3: bool,
}

impl Membership {
    pub fn class(self, rule: ThinningRule) -> RegionClass {
        match rule {
            ThinningRule::Void => {
                if self.s1 || self.s2 || self.s3 {
                    RegionClass::Suppressed
                } else {
                    RegionClass::Survives
                }
            }
            ThinningRule::EarliestMark => {
                if self.s1 || (self.s2 && self.s3) {
                    RegionClass::Suppressed
                } else if !self.s2 && !self.s3 {
                    RegionClass::DoubleSurvival
                } else {
                    RegionClass::SingleSurvival
                }
            }
        }
    }
}

/// Classification of a two-pair configuration.
///
/// Type I rules use `Suppressed`/`Survives`; Type II rules use
/// `Suppressed`/`DoubleSurvival`/`SingleSurvival`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionClass {
    /// At least one of the two pairs is necessarily removed.
    Suppressed,
    /// Neither transmitter lies in the other's region (Type I).
    Survives,
    /// Neither transmitter lies in the other's region (Type II): both orders of marks can retain both.
    DoubleSurvival,
    /// Exactly one transmitter lies in the other's virtual region (Type II).
    SingleSurvival,
}

/// Area of the dual-zone region of a single pair.
pub fn exclusion_area_vo(params: &NetworkParams) -> Result<f64> {
    check_lengths(params)?;
    Ok(ExclusionShape::dual_zone(params).area())
}

/// Disks making up a pair's dual-zone region: the carrier-sense disk, the
/// receiver's virtual disk and, when `R_tx > R_cs`, the transmitter's virtual disk.
pub fn pair_disks(tx: Point2, orientation: f64, params: &NetworkParams) -> Vec<Disk> {
    let rx = tx.offset(params.d, orientation);
    let mut out = vec![
        Disk {
            center: tx,
            radius: params.r_cs,
        },
        Disk {
            center: rx,
            radius: params.r_tx,
        },
    ];
    if params.r_tx > params.r_cs {
        out.push(Disk {
            center: tx,
            radius: params.r_tx,
        });
    }
    out
}

/// Dual-zone union area `V(r, β, θ)` of two pairs.
pub fn combined_area_v(config: &PairConfiguration, params: &NetworkParams) -> Result<f64> {
    check_lengths(params)?;
    Ok(ExclusionShape::dual_zone(params).combined_area(config))
}

/// Classify a configuration under the exclusion rule of `process`.
pub fn classify(
    config: &PairConfiguration,
    params: &NetworkParams,
    process: ProcessType,
) -> RegionClass {
    process
        .exclusion(params)
        .membership(config)
        .class(process.rule())
}

fn check_lengths(params: &NetworkParams) -> Result<()> {
    for (v, name) in [
        (params.r_cs, "R_cs"),
        (params.r_tx, "R_tx"),
        (params.d, "d"),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(domain(format!("{name} must be >= 0, got {v}")));
        }
    }
    Ok(())
}

type Arcs = ArrayVec<(f64, f64), { 2 * MAX_UNION_DISKS }>;

/// Exact area of a union of disks.
///
/// Each disk contributes the arcs of its boundary not covered by any other
/// disk; the area follows from `½∮(x dy − y dx)` along those arcs.
///
/// # Panics
///
/// If more than [`MAX_UNION_DISKS`] disks are given.
pub fn union_area(disks: &[Disk]) -> f64 {
    assert!(
        disks.len() <= MAX_UNION_DISKS,
        "union_area supports at most {MAX_UNION_DISKS} disks"
    );
    let mut kept: ArrayVec<Disk, MAX_UNION_DISKS> = ArrayVec::new();
    'outer: for (i, di) in disks.iter().enumerate() {
        if di.radius <= 0.0 {
            continue;
        }
        for (j, dj) in disks.iter().enumerate() {
            if i == j || dj.radius <= 0.0 {
                continue;
            }
            let sep = di.center.dist(dj.center);
            let identical = sep == 0.0 && di.radius == dj.radius;
            if identical {
                // keep the first of a run of duplicates
                if j < i {
                    continue 'outer;
                }
            } else if sep + di.radius <= dj.radius {
                continue 'outer;
            }
        }
        kept.push(*di);
    }
    if kept.is_empty() {
        return 0.0;
    }
    if kept.len() == 1 {
        return kept[0].area();
    }

    // Work relative to the first centre to limit cancellation in the boundary integral.
    let origin = kept[0].center;
    for k in kept.iter_mut() {
        k.center = Point2::new(k.center.x - origin.x, k.center.y - origin.y);
    }

    let mut total = 0.0;
    for (i, di) in kept.iter().enumerate() {
        let mut covered = Arcs::new();
        for (j, dj) in kept.iter().enumerate() {
            if i == j {
                continue;
            }
            let dx = dj.center.x - di.center.x;
            let dy = dj.center.y - di.center.y;
            let sep = (dx * dx + dy * dy).sqrt();
            if sep >= di.radius + dj.radius {
                continue;
            }
            let cos_half = (sep * sep + di.radius * di.radius - dj.radius * dj.radius)
                / (2.0 * sep * di.radius);
            let half = cos_half.clamp(-1.0, 1.0).acos();
            let mid = dy.atan2(dx);
            let start = (mid - half).rem_euclid(TAU);
            let end = start + 2.0 * half;
            if end > TAU {
                covered.push((start, TAU));
                covered.push((0.0, end - TAU));
            } else {
                covered.push((start, end));
            }
        }
        covered.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

        let mut cursor = 0.0;
        for &(s, e) in covered.iter() {
            if s > cursor {
                total += arc_term(di, cursor, s);
            }
            cursor = f64::max(cursor, e);
        }
        if cursor < TAU {
            total += arc_term(di, cursor, TAU);
        }
    }
    total
}

#[inline]
fn arc_term(disk: &Disk, a: f64, b: f64) -> f64 {
    let r = disk.radius;
    let (sb, cb) = b.sin_cos();
    let (sa, ca) = a.sin_cos();
    0.5 * (r * r * (b - a) + disk.center.x * r * (sb - sa) - disk.center.y * r * (cb - ca))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::NetworkParams;

    fn table() -> NetworkParams {
        NetworkParams::baseline()
    }

    #[test]
    fn lens_edge_cases() {
        assert_eq!(lens_area(1.0, 1.0, 2.0).unwrap(), 0.0);
        assert!((lens_area(2.0, 1.0, 0.5).unwrap() - PI).abs() < 1e-15);
        assert!(lens_area(-1.0, 1.0, 0.5).is_err());
        assert!(lens_area(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn lens_is_continuous_at_regime_changes() {
        let (r1, r2) = (3.0, 1.25);
        let eps = 1e-9;
        let outer = lens_area(r1, r2, r1 + r2 - eps).unwrap();
        assert!(outer < 1e-9, "{outer}");
        let inner = lens_area(r1, r2, r1 - r2 + eps).unwrap();
        assert!((inner - PI * r2 * r2).abs() < 1e-6, "{inner}");
    }

    #[test]
    fn vo_regimes() {
        let nested = table().with_radii(120.0, 20.0, 80.0);
        assert!((exclusion_area_vo(&nested).unwrap() - PI * 120.0 * 120.0).abs() < 1e-9);
        let disjoint = table().with_radii(120.0, 100.0, 250.0);
        let want = PI * (120.0f64.powi(2) + 100.0f64.powi(2));
        assert!((exclusion_area_vo(&disjoint).unwrap() - want).abs() < 1e-9);
        let vo = exclusion_area_vo(&table()).unwrap();
        assert!((vo - 5.612e4).abs() < 5.0, "{vo}");
    }

    #[test]
    fn vo_matches_lens_composition() {
        let p = table();
        let vo = exclusion_area_vo(&p).unwrap();
        let lens = lens_area(p.r_cs, p.r_tx, p.d).unwrap();
        let via_lens = PI * (p.r_cs * p.r_cs + p.r_tx * p.r_tx) - lens;
        assert!(((vo - via_lens) / vo).abs() < 1e-12);
    }

    #[test]
    fn pair_disks_layout() {
        let p = table();
        let disks = pair_disks(Point2::ORIGIN, 0.0, &p);
        assert_eq!(disks.len(), 2);
        assert_eq!(disks[0].center, Point2::ORIGIN);
        assert_eq!(disks[0].radius, 120.0);
        assert!((disks[1].center.x - 80.0).abs() < 1e-12 && disks[1].center.y.abs() < 1e-12);
        assert_eq!(disks[1].radius, 100.0);

        let zero_link = p.with_radii(120.0, 100.0, 0.0);
        let disks = pair_disks(Point2::ORIGIN, PI / 2.0, &zero_link);
        assert!(disks[1].center.dist(Point2::ORIGIN) < 1e-12);

        let disks = pair_disks(Point2::new(5.0, 5.0), PI, &p);
        assert!((disks[1].center.x - (5.0 - 80.0)).abs() < 1e-12);
        assert!((disks[1].center.y - 5.0).abs() < 1e-12);

        let wide = p.with_radii(80.0, 100.0, 50.0);
        let disks = pair_disks(Point2::ORIGIN, 0.0, &wide);
        assert_eq!(disks.len(), 3);
        assert_eq!(disks[2].radius, 100.0);
        assert_eq!(disks[2].center, Point2::ORIGIN);
    }

    #[test]
    fn union_basics() {
        let unit = Disk::new(Point2::ORIGIN, 1.0).unwrap();
        assert!((union_area(&[unit]) - PI).abs() < 1e-15);
        assert!((union_area(&[unit, unit]) - PI).abs() < 1e-15);
        assert_eq!(union_area(&[]), 0.0);
        let far = Disk::new(Point2::new(10.0, 0.0), 2.0).unwrap();
        assert!((union_area(&[unit, far]) - 5.0 * PI).abs() < 1e-12);
        let zero = Disk::new(Point2::new(3.0, 0.0), 0.0).unwrap();
        assert!((union_area(&[unit, zero]) - PI).abs() < 1e-15);
    }

    #[test]
    fn union_of_two_matches_lens_formula() {
        for &(r1, r2, sep) in &[
            (1.0, 1.0, 1.0),
            (3.0, 1.0, 2.5),
            (120.0, 100.0, 80.0),
            (5.0, 4.0, 0.3),
        ] {
            let a = Disk::new(Point2::new(-2.0, 7.0), r1).unwrap();
            let b = Disk::new(Point2::new(-2.0 + sep * 0.6, 7.0 + sep * 0.8), r2).unwrap();
            let want = PI * (r1 * r1 + r2 * r2) - lens_area(r1, r2, sep).unwrap();
            let got = union_area(&[a, b]);
            assert!(
                ((got - want) / want).abs() < 1e-9,
                "{r1} {r2} {sep}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn combined_area_limits() {
        let p = table();
        let shape = ExclusionShape::dual_zone(&p);
        let vo = shape.area();
        let same = PairConfiguration::new(0.0, 0.0, 0.0).unwrap();
        assert!(((combined_area_v(&same, &p).unwrap() - vo) / vo).abs() < 1e-12);
        let far = PairConfiguration::new(100.0 * p.r_cs, 0.7, 2.0).unwrap();
        let v = combined_area_v(&far, &p).unwrap();
        assert!(((v - 2.0 * vo) / (2.0 * vo)).abs() < 1e-12);
    }

    #[test]
    fn classify_examples() {
        let p = table();
        for pt in [ProcessType::TypeI, ProcessType::TypeII] {
            let inside = PairConfiguration::new(0.5 * p.r_cs, 1.3, 4.0).unwrap();
            assert_eq!(classify(&inside, &p, pt), RegionClass::Suppressed);
            let at_rx = PairConfiguration::new(p.d, 0.0, 2.2).unwrap();
            assert_eq!(classify(&at_rx, &p, pt), RegionClass::Suppressed);
        }
    }

    #[test]
    fn classify_matches_point_in_disk_tests() {
        // r = 130, β = 0, θ = π with the baseline radii.
        let p = table();
        let cfg = PairConfiguration::new(130.0, 0.0, PI).unwrap();
        let shape = ExclusionShape::dual_zone(&p);
        let [a_tx, a_rx] = shape.disks(Point2::ORIGIN, 0.0);
        let [b_tx, b_rx] = shape.disks(cfg.second_tx(), cfg.theta);
        let b_in_a = a_tx.contains(b_tx.center) || a_rx.contains(b_tx.center);
        let a_in_b = b_tx.contains(a_tx.center) || b_rx.contains(a_tx.center);
        // tx B at (130,0) is 50 m from rx A; rx B at (50,0) is 50 m from tx A.
        assert!(b_in_a && a_in_b);
        assert_eq!(
            classify(&cfg, &p, ProcessType::TypeI),
            RegionClass::Suppressed
        );
        assert_eq!(
            classify(&cfg, &p, ProcessType::TypeII),
            RegionClass::Suppressed
        );
        // Matérn ignores the virtual disks: 130 > R_cs.
        assert_eq!(
            classify(&cfg, &p, ProcessType::MaternI),
            RegionClass::Survives
        );
        assert_eq!(
            classify(&cfg, &p, ProcessType::MaternII),
            RegionClass::DoubleSurvival
        );
    }

    #[test]
    fn single_survival_class() {
        // B's transmitter in A's virtual disk, A's transmitter outside B's region.
        let p = table();
        let cfg = PairConfiguration::new(150.0, 0.0, 0.0).unwrap();
        let m = ExclusionShape::dual_zone(&p).membership(&cfg);
        assert_eq!(
            m,
            Membership {
                s1: false,
                s2: true,
                s3: false
            }
        );
        assert_eq!(
            classify(&cfg, &p, ProcessType::TypeII),
            RegionClass::SingleSurvival
        );
        assert_eq!(
            classify(&cfg, &p, ProcessType::TypeI),
            RegionClass::Suppressed
        );
    }

    #[test]
    fn pair_configuration_reduces_angles() {
        let c = PairConfiguration::new(1.0, -0.5, 7.0).unwrap();
        assert!((c.beta - (TAU - 0.5)).abs() < 1e-15);
        assert!((c.theta - (7.0 - TAU)).abs() < 1e-15);
        assert!(PairConfiguration::new(-1.0, 0.0, 0.0).is_err());
    }
}
