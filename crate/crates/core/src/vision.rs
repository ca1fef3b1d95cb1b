//! Nine-grid Gaussian-cluster colour extraction and the synthetic aging
//! frame generator used for desk-scale validation.
//!
//! Each frame yields one calibrated observation: the mean colour of the
//! algae (test) region and of the photographed green control label, both
//! sampled with the same nine-grid scheme. The control normalizes lighting:
//! scale-invariant measures (cosine, Pearson, Tanimoto) downstream are
//! nearly blind to a global gain change, while scale-variant measures
//! (Euclidean and friends) are not. With 8-bit quantization and additive
//! sensor noise the gain blindness is approximate: channels resting at a
//! rail (the pure-green control has two) pick up a one-sided clamp bias
//! that does not scale with gain, so the measured spread across a wide
//! gain span is around 1.5e-3 even after 20-seed averaging; the 1e-6
//! ideal holds only for unquantized, unclamped colors.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::similarity::Rgb;

#[derive(Debug, Error)]
pub enum VisionError {
    #[error("image {width}x{height} too small for nine-grid sampling (need 3x3)")]
    ImageTooSmall { width: u32, height: u32 },
    #[error("control region {0:?} extends outside the image")]
    ControlRegionOutOfBounds(Rect),
    #[error("test region {0:?} extends outside the image")]
    TestRegionOutOfBounds(Rect),
    #[error("invalid sampling spec: {0}")]
    InvalidSpec(String),
    #[error("image decode/encode: {0}")]
    Codec(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// 8-bit RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRaster {
    pub width: u32,
    pub height: u32,
    /// `3 * width * height` bytes, RGB interleaved.
    pub pixels: Vec<u8>,
}

impl ImageRaster {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> ImageRaster {
        assert!(width > 0 && height > 0, "raster must be non-empty");
        assert_eq!(
            pixels.len(),
            (width * height * 3) as usize,
            "pixel buffer must hold width*height RGB triples"
        );
        ImageRaster {
            width,
            height,
            pixels,
        }
    }

    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> ImageRaster {
        let mut pixels = Vec::with_capacity((width * height * 3) as usize);
        for _ in 0..width * height {
            pixels.extend_from_slice(&rgb);
        }
        ImageRaster::new(width, height, pixels)
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y * self.width + x) * 3) as usize;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = ((y * self.width + x) * 3) as usize;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn crop(&self, rect: Rect) -> Option<ImageRaster> {
        if rect.x + rect.width > self.width
            || rect.y + rect.height > self.height
            || rect.width == 0
            || rect.height == 0
        {
            return None;
        }
        let mut pixels = Vec::with_capacity((rect.width * rect.height * 3) as usize);
        for y in rect.y..rect.y + rect.height {
            let start = ((y * self.width + rect.x) * 3) as usize;
            let end = start + (rect.width * 3) as usize;
            pixels.extend_from_slice(&self.pixels[start..end]);
        }
        Some(ImageRaster::new(rect.width, rect.height, pixels))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
}

/// Gaussian-cluster sampling parameters.
///
/// `covariance` style scalar: each axis gets `cluster_variance` px^2,
/// no cross-correlation. Weights must satisfy `w0 + 8*w1 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SamplingSpecRaw")]
pub struct SamplingSpec {
    pub cluster_size: usize,
    pub cluster_variance: f64,
    pub center_weight: f64,
    pub outer_weight: f64,
    pub rng_seed: u64,
}

#[derive(Deserialize)]
struct SamplingSpecRaw {
    cluster_size: usize,
    cluster_variance: f64,
    center_weight: f64,
    outer_weight: f64,
    rng_seed: u64,
}

impl TryFrom<SamplingSpecRaw> for SamplingSpec {
    type Error = VisionError;

    fn try_from(raw: SamplingSpecRaw) -> Result<Self, Self::Error> {
        SamplingSpec::new(
            raw.cluster_size,
            raw.cluster_variance,
            raw.center_weight,
            raw.outer_weight,
            raw.rng_seed,
        )
    }
}

impl SamplingSpec {
    pub fn new(
        cluster_size: usize,
        cluster_variance: f64,
        center_weight: f64,
        outer_weight: f64,
        rng_seed: u64,
    ) -> Result<SamplingSpec, VisionError> {
        if cluster_size == 0 {
            return Err(VisionError::InvalidSpec("cluster_size must be >= 1".into()));
        }
        if cluster_variance.is_nan() || cluster_variance < 0.0 {
            return Err(VisionError::InvalidSpec(
                "cluster_variance must be >= 0".into(),
            ));
        }
        let sum = center_weight + 8.0 * outer_weight;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(VisionError::InvalidSpec(format!(
                "weights must satisfy w0 + 8*w1 = 1, got {sum}"
            )));
        }
        Ok(SamplingSpec {
            cluster_size,
            cluster_variance,
            center_weight,
            outer_weight,
            rng_seed,
        })
    }

    pub fn with_seed(self, rng_seed: u64) -> SamplingSpec {
        SamplingSpec { rng_seed, ..self }
    }
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec::new(100, 80.0, 0.2, 0.1, 0).expect("default spec is valid")
    }
}

/// One calibrated frame measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColorObservation {
    pub day: f64,
    pub test_rgb: Rgb,
    pub control_rgb: Rgb,
}

/// Centers of the 3x3 partition, row-major; index 4 is the image center.
pub fn grid_points(width: u32, height: u32) -> Result<[(u32, u32); 9], VisionError> {
    if width < 3 || height < 3 {
        return Err(VisionError::ImageTooSmall { width, height });
    }
    let xs = [width / 6, width / 2, 5 * width / 6];
    let ys = [height / 6, height / 2, 5 * height / 6];
    let mut out = [(0, 0); 9];
    for (j, &y) in ys.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            out[j * 3 + i] = (x, y);
        }
    }
    Ok(out)
}

fn cluster_rng(spec: &SamplingSpec, center: (u32, u32)) -> ChaCha8Rng {
    // Independent stream per (seed, center) so grid positions do not share
    // draw sequences.
    let mix = (center.0 as u64)
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add((center.1 as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f));
    ChaCha8Rng::seed_from_u64(spec.rng_seed ^ mix)
}

/// Mean RGB of `cluster_size` Gaussian draws around `center`. Out-of-bounds
/// draws are resampled rather than clamped, avoiding edge-colour bias.
pub fn sample_cluster(image: &ImageRaster, center: (u32, u32), spec: &SamplingSpec) -> Rgb {
    assert!(
        center.0 < image.width && center.1 < image.height,
        "cluster center out of bounds"
    );
    let sigma = spec.cluster_variance.sqrt();
    let normal = Normal::new(0.0, sigma).expect("finite non-negative sigma");
    let mut rng = cluster_rng(spec, center);
    let mut sum = [0.0_f64; 3];
    for _ in 0..spec.cluster_size {
        let (x, y) = loop {
            let dx: f64 = normal.sample(&mut rng);
            let dy: f64 = normal.sample(&mut rng);
            let x = (center.0 as f64 + dx).round();
            let y = (center.1 as f64 + dy).round();
            if x >= 0.0 && y >= 0.0 && (x as u32) < image.width && (y as u32) < image.height {
                break (x as u32, y as u32);
            }
        };
        let px = image.get(x, y);
        for (acc, &channel) in sum.iter_mut().zip(px.iter()) {
            *acc += channel as f64;
        }
    }
    sum.map(|s| s / spec.cluster_size as f64)
}

/// Position-weighted nine-grid colour.
///
/// Computed as `center + w1 * sum(outer - center)`, which equals the
/// weighted sum under the `w0 + 8*w1 = 1` invariant but returns a uniform
/// image's colour exactly, with no float residue from the weight sum.
pub fn nine_grid_color(image: &ImageRaster, spec: &SamplingSpec) -> Result<Rgb, VisionError> {
    let grid = grid_points(image.width, image.height)?;
    let center = sample_cluster(image, grid[4], spec);
    let mut deviation = [0.0_f64; 3];
    for (i, &point) in grid.iter().enumerate() {
        if i == 4 {
            continue;
        }
        let m = sample_cluster(image, point, spec);
        for c in 0..3 {
            deviation[c] += m[c] - center[c];
        }
    }
    let mut out = [0.0_f64; 3];
    for c in 0..3 {
        out[c] = (center[c] + spec.outer_weight * deviation[c]).clamp(0.0, 255.0);
    }
    Ok(out)
}

/// Test (algae) and control (green label) rectangles within a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameRegions {
    pub test: Rect,
    pub control: Rect,
}

/// Sample both regions of one frame. Each region is cropped and sampled as
/// its own sub-image, so cluster draws never bleed across the region edge.
pub fn extract_observation(
    image: &ImageRaster,
    regions: &FrameRegions,
    day: f64,
    spec: &SamplingSpec,
) -> Result<ColorObservation, VisionError> {
    assert!(day >= 0.0, "day must be non-negative");
    let test = image
        .crop(regions.test)
        .ok_or(VisionError::TestRegionOutOfBounds(regions.test))?;
    let control = image
        .crop(regions.control)
        .ok_or(VisionError::ControlRegionOutOfBounds(regions.control))?;
    Ok(ColorObservation {
        day,
        test_rgb: nine_grid_color(&test, spec)?,
        control_rgb: nine_grid_color(&control, spec)?,
    })
}

pub const FRESH_COLOR: Rgb = [0.0, 255.0, 0.0];
pub const AGED_COLOR: Rgb = [200.0, 30.0, 30.0];

/// Noise-free algae colour at `day` under `lighting_gain`: the gain-scaled
/// green-to-red lerp.
pub fn synthetic_algae_color(day: f64, total_days: f64, lighting_gain: f64) -> Rgb {
    assert!(total_days > 0.0, "total_days must be positive");
    let t = (day / total_days).clamp(0.0, 1.0);
    let mut out = [0.0; 3];
    for c in 0..3 {
        out[c] = lighting_gain * ((1.0 - t) * FRESH_COLOR[c] + t * AGED_COLOR[c]);
    }
    out
}

pub fn synthetic_control_color(lighting_gain: f64) -> Rgb {
    FRESH_COLOR.map(|c| lighting_gain * c)
}

pub const SYNTHETIC_WIDTH: u32 = 300;
pub const SYNTHETIC_HEIGHT: u32 = 200;
const SYNTHETIC_SPLIT: u32 = 200;
pub const SYNTHETIC_NOISE_SIGMA: f64 = 3.0;

/// Region layout of synthetic frames: algae on the left two thirds, control
/// label on the right, with a margin off the zone boundary.
pub fn synthetic_regions() -> FrameRegions {
    FrameRegions {
        test: Rect {
            x: 8,
            y: 8,
            width: SYNTHETIC_SPLIT - 16,
            height: SYNTHETIC_HEIGHT - 16,
        },
        control: Rect {
            x: SYNTHETIC_SPLIT + 8,
            y: 8,
            width: SYNTHETIC_WIDTH - SYNTHETIC_SPLIT - 16,
            height: SYNTHETIC_HEIGHT - 16,
        },
    }
}

/// A synthetic capture: gain-scaled aging colour on the algae side, the
/// gain-scaled pure-green label on the control side, per-pixel Gaussian
/// noise (sigma 3) on both, clamped and quantized to 8 bits.
pub fn generate_synthetic_frame(
    day: f64,
    total_days: f64,
    lighting_gain: f64,
    seed: u64,
) -> ImageRaster {
    assert!(
        (0.0..=total_days).contains(&day),
        "day must lie in [0, total_days]"
    );
    assert!(
        lighting_gain > 0.0 && lighting_gain <= 1.5,
        "gain must lie in (0, 1.5]"
    );
    let algae = synthetic_algae_color(day, total_days, lighting_gain);
    let control = synthetic_control_color(lighting_gain);
    let noise = Normal::new(0.0, SYNTHETIC_NOISE_SIGMA).expect("valid sigma");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pixels = Vec::with_capacity((SYNTHETIC_WIDTH * SYNTHETIC_HEIGHT * 3) as usize);
    for _ in 0..SYNTHETIC_HEIGHT {
        for x in 0..SYNTHETIC_WIDTH {
            let base = if x < SYNTHETIC_SPLIT { algae } else { control };
            for channel in base {
                let v = channel + noise.sample(&mut rng);
                pixels.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    ImageRaster::new(SYNTHETIC_WIDTH, SYNTHETIC_HEIGHT, pixels)
}

/// Generate and sample a whole aging study: `n_days` days (0-based, so the
/// lerp spans day 0 to day n_days-1), `frames_per_day` frames each, cycling
/// through `gains`. Frame seeds derive from `base_seed` by enumeration, the
/// sampler seed from the frame seed.
pub fn synthetic_aging_study(
    n_days: usize,
    frames_per_day: usize,
    gains: &[f64],
    base_seed: u64,
    spec: &SamplingSpec,
) -> Result<Vec<ColorObservation>, VisionError> {
    assert!(n_days >= 2, "need at least two days for a curve");
    assert!(!gains.is_empty(), "need at least one gain");
    let total_days = (n_days - 1) as f64;
    let regions = synthetic_regions();
    let mut out = Vec::with_capacity(n_days * frames_per_day);
    for day in 0..n_days {
        for frame in 0..frames_per_day {
            let idx = (day * frames_per_day + frame) as u64;
            let gain = gains[(day * frames_per_day + frame) % gains.len()];
            let image =
                generate_synthetic_frame(day as f64, total_days, gain, base_seed.wrapping_add(idx));
            let frame_spec = spec.with_seed(spec.rng_seed ^ base_seed.wrapping_add(idx));
            out.push(extract_observation(&image, &regions, day as f64, &frame_spec)?);
        }
    }
    Ok(out)
}

pub fn load_png(path: &Path) -> Result<ImageRaster, VisionError> {
    let img = image::open(path)
        .map_err(|e| VisionError::Codec(e.to_string()))?
        .to_rgb8();
    let (width, height) = img.dimensions();
    Ok(ImageRaster::new(width, height, img.into_raw()))
}

pub fn save_png(image: &ImageRaster, path: &Path) -> Result<(), VisionError> {
    let buf: image::RgbImage =
        image::ImageBuffer::from_raw(image.width, image.height, image.pixels.clone())
            .expect("raster buffer matches dimensions");
    buf.save(path).map_err(|e| VisionError::Codec(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::{measure, MeasureKind};

    #[test]
    fn grid_point_arithmetic() {
        let g = grid_points(6, 6).unwrap();
        let xs: Vec<u32> = g.iter().map(|p| p.0).collect();
        assert_eq!(xs, vec![1, 3, 5, 1, 3, 5, 1, 3, 5]);
        let ys: Vec<u32> = g.iter().map(|p| p.1).collect();
        assert_eq!(ys, vec![1, 1, 1, 3, 3, 3, 5, 5, 5]);

        let g = grid_points(2667, 2000).unwrap();
        assert_eq!(g[4], (1333, 1000));
        let xs: std::collections::BTreeSet<u32> = g.iter().map(|p| p.0).collect();
        assert_eq!(xs, std::collections::BTreeSet::from([444, 1333, 2222]));
        let ys: std::collections::BTreeSet<u32> = g.iter().map(|p| p.1).collect();
        assert_eq!(ys, std::collections::BTreeSet::from([333, 1000, 1666]));

        assert!(matches!(
            grid_points(2, 2),
            Err(VisionError::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn uniform_image_sampled_exactly() {
        let img = ImageRaster::filled(60, 40, [0, 255, 0]);
        for seed in [0u64, 7, 123456] {
            let spec = SamplingSpec::default().with_seed(seed);
            let m = sample_cluster(&img, (30, 20), &spec);
            assert_eq!(m, [0.0, 255.0, 0.0]);
            let nine = nine_grid_color(&img, &spec).unwrap();
            assert_eq!(nine, [0.0, 255.0, 0.0]);
        }
    }

    #[test]
    fn zero_variance_hits_center_pixel() {
        let mut img = ImageRaster::filled(9, 9, [10, 20, 30]);
        img.set(4, 4, [200, 100, 50]);
        let spec = SamplingSpec::new(100, 0.0, 0.2, 0.1, 5).unwrap();
        assert_eq!(sample_cluster(&img, (4, 4), &spec), [200.0, 100.0, 50.0]);
    }

    #[test]
    fn boundary_cluster_mean_within_binomial_bound() {
        let mut img = ImageRaster::filled(100, 100, [0, 0, 0]);
        for y in 0..100 {
            for x in 50..100 {
                img.set(x, y, [255, 255, 255]);
            }
        }
        let spec = SamplingSpec::default().with_seed(42);
        let m = sample_cluster(&img, (50, 50), &spec);
        // Rounding sends draws in [49.5, 50.5) to the white side, so white
        // probability is about one half; 3-sigma binomial bound on the mean
        // of 100 draws.
        let bound = 3.0 * 255.0 * (0.25_f64 / spec.cluster_size as f64).sqrt();
        for c in m {
            assert!((c - 127.5).abs() <= bound, "channel {c} vs bound {bound}");
        }
    }

    #[test]
    fn nine_grid_weights_center_against_ring() {
        let mut img = ImageRaster::filled(60, 60, [0, 255, 0]);
        img.set(30, 30, [0, 0, 0]);
        let spec = SamplingSpec::new(100, 0.0, 0.2, 0.1, 1).unwrap();
        let nine = nine_grid_color(&img, &spec).unwrap();
        assert_eq!(nine[0], 0.0);
        assert!((nine[1] - 204.0).abs() < 1e-9);
        assert_eq!(nine[2], 0.0);
    }

    #[test]
    fn nine_grid_deterministic_per_seed() {
        let img = generate_synthetic_frame(10.0, 29.0, 1.0, 77);
        let spec = SamplingSpec::default().with_seed(99);
        let a = nine_grid_color(&img, &spec).unwrap();
        let b = nine_grid_color(&img, &spec).unwrap();
        assert_eq!(a, b);
        let other = nine_grid_color(&img, &spec.with_seed(100)).unwrap();
        assert_ne!(a, other, "distinct seeds should move noisy samples");
    }

    #[test]
    fn observation_carries_exact_uniform_regions() {
        let regions = synthetic_regions();
        let mut img = ImageRaster::filled(SYNTHETIC_WIDTH, SYNTHETIC_HEIGHT, [0, 0, 0]);
        for y in 0..SYNTHETIC_HEIGHT {
            for x in 0..SYNTHETIC_WIDTH {
                let rgb = if x < 200 { [20, 200, 30] } else { [10, 240, 12] };
                img.set(x, y, rgb);
            }
        }
        let obs = extract_observation(&img, &regions, 12.5, &SamplingSpec::default()).unwrap();
        assert_eq!(obs.day, 12.5);
        assert_eq!(obs.test_rgb, [20.0, 200.0, 30.0]);
        assert_eq!(obs.control_rgb, [10.0, 240.0, 12.0]);
    }

    #[test]
    fn out_of_bounds_regions_rejected() {
        let img = ImageRaster::filled(100, 100, [0, 255, 0]);
        let bad_control = FrameRegions {
            test: Rect {
                x: 0,
                y: 0,
                width: 50,
                height: 50,
            },
            control: Rect {
                x: 80,
                y: 80,
                width: 50,
                height: 50,
            },
        };
        assert!(matches!(
            extract_observation(&img, &bad_control, 0.0, &SamplingSpec::default()),
            Err(VisionError::ControlRegionOutOfBounds(_))
        ));
    }

    #[test]
    fn synthetic_endpoints() {
        let spec = SamplingSpec::default().with_seed(3);
        let regions = synthetic_regions();
        let fresh = generate_synthetic_frame(0.0, 29.0, 1.0, 8);
        let obs = extract_observation(&fresh, &regions, 0.0, &spec).unwrap();
        assert!(obs.test_rgb[1] > 250.0 && obs.test_rgb[0] < 5.0);

        let aged = generate_synthetic_frame(29.0, 29.0, 1.0, 8);
        let obs = extract_observation(&aged, &regions, 29.0, &spec).unwrap();
        for (got, want) in obs.test_rgb.iter().zip(AGED_COLOR.iter()) {
            assert!((got - want).abs() < 2.0, "{got} vs {want}");
        }
    }

    #[test]
    fn shared_gain_scales_both_regions() {
        let spec = SamplingSpec::default().with_seed(4);
        let regions = synthetic_regions();
        let day = 15.0;
        for gain in [0.6, 1.0, 1.4] {
            let img = generate_synthetic_frame(day, 29.0, gain, 21);
            let obs = extract_observation(&img, &regions, day, &spec).unwrap();
            // Rendered pixels clamp at the rails (gain 1.4 saturates the
            // control green at 255); channels at a rail carry a one-sided
            // noise bias of sigma/sqrt(2*pi) ~ 1.2, inside the 2.0 band.
            let expect_test = synthetic_algae_color(day, 29.0, gain).map(|v| v.clamp(0.0, 255.0));
            let expect_ctrl = synthetic_control_color(gain).map(|v| v.clamp(0.0, 255.0));
            for c in 0..3 {
                assert!((obs.test_rgb[c] - expect_test[c]).abs() < 2.0);
                assert!((obs.control_rgb[c] - expect_ctrl[c]).abs() < 2.0);
            }
        }
    }

    #[test]
    fn scale_invariant_measures_nearly_blind_to_gain() {
        // Gains stay at or below 0.95: the pure-green control saturates at
        // 255 above gain 1, which breaks the scaling premise outright (the
        // magnitude-sensitive Tanimoto then drifts by ~3e-2). Within the
        // unsaturated regime the zero-valued control channels still render
        // with a one-sided clamp bias (~1.2 counts) that does not scale
        // with gain, so even after 20-seed averaging the scale-invariant
        // measures drift by around 1.5e-3; the ceiling is 5e-3 and the 1e-6
        // ideal holds only for unquantized, unclamped colors.
        let day = 20.0;
        let regions = synthetic_regions();
        let spec = SamplingSpec::default();
        let averaged = |gain: f64| -> ColorObservation {
            let mut test = [0.0; 3];
            let mut ctrl = [0.0; 3];
            let n = 20;
            for seed in 0..n {
                let img = generate_synthetic_frame(day, 29.0, gain, seed);
                let obs = extract_observation(
                    &img,
                    &regions,
                    day,
                    &spec.with_seed(seed.wrapping_mul(31)),
                )
                .unwrap();
                for c in 0..3 {
                    test[c] += obs.test_rgb[c];
                    ctrl[c] += obs.control_rgb[c];
                }
            }
            ColorObservation {
                day,
                test_rgb: test.map(|v| v / 20.0),
                control_rgb: ctrl.map(|v| v / 20.0),
            }
        };
        let lo = averaged(0.7);
        let hi = averaged(0.95);
        for kind in [
            MeasureKind::Cosine,
            MeasureKind::Pearson,
            MeasureKind::Tanimoto,
        ] {
            let a = measure(&lo.test_rgb, &lo.control_rgb, kind).unwrap();
            let b = measure(&hi.test_rgb, &hi.control_rgb, kind).unwrap();
            assert!(
                (a - b).abs() < 5e-3,
                "{kind:?} drifted {} across gains",
                (a - b).abs()
            );
        }
        // Scale-variant contrast: Euclidean moves by orders of magnitude more.
        let a = measure(&lo.test_rgb, &lo.control_rgb, MeasureKind::Euclidean).unwrap();
        let b = measure(&hi.test_rgb, &hi.control_rgb, MeasureKind::Euclidean).unwrap();
        assert!((a - b).abs() > 1.0);
    }

    #[test]
    fn study_produces_negative_monotone_differences() {
        let spec = SamplingSpec::default();
        let obs = synthetic_aging_study(10, 2, &[0.9, 1.1], 5, &spec).unwrap();
        assert_eq!(obs.len(), 20);
        for o in &obs {
            for c in 0..3 {
                assert!((0.0..=255.0).contains(&o.test_rgb[c]));
                assert!((0.0..=255.0).contains(&o.control_rgb[c]));
            }
        }
    }

    #[test]
    fn png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("frame.png");
        let img = generate_synthetic_frame(7.0, 29.0, 1.0, 11);
        save_png(&img, &path).unwrap();
        let back = load_png(&path).unwrap();
        assert_eq!(img, back);
    }
}
