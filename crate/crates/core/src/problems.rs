//! Benchmark energy constructors.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::energy::{BinaryEnergy, EnergyBuilder, Labeling};
use crate::error::{Error, Result};

/// Row-major grayscale image, intensities nominally in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width.checked_mul(height) != Some(pixels.len()) {
            return Err(Error::ImageSize { width, height, len: pixels.len() });
        }
        Ok(GrayImage { width, height, pixels })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// A labeling as a 0/1 image of the given width.
    pub fn from_labeling(s: &Labeling, width: usize) -> Result<Self> {
        if width == 0 || !s.len().is_multiple_of(width) {
            return Err(Error::ImageSize { width, height: 0, len: s.len() });
        }
        GrayImage::new(width, s.len() / width, (0..s.len()).map(|p| s.value(p)).collect())
    }
}

/// Indices of the 3×3 window around `(x, y)`, clipped at the border.
fn window(width: usize, height: usize, x: usize, y: usize) -> impl Iterator<Item = usize> {
    let ys = y.saturating_sub(1)..=(y + 1).min(height - 1);
    ys.flat_map(move |wy| {
        let xs = x.saturating_sub(1)..=(x + 1).min(width - 1);
        xs.map(move |wx| wy * width + wx)
    })
}

/// Binary deconvolution energy `Σ_p (I_p - (1/9)·Σ_{q∈N_p} s_q)²` with a
/// 3×3 window clipped at the border and the divisor fixed at 9.
///
/// Expanding the square with `s² = s`: each window member `q` of `p` gets
/// unary `1/81 - 2·I_p/9`, each unordered pair of window members gets
/// `2/81`, and `I_p²` goes to the constant. All pairwise terms are
/// positive.
pub fn build_deconvolution_energy(img: &GrayImage) -> Result<BinaryEnergy> {
    if img.is_empty() {
        return Err(Error::EmptyImage);
    }
    let (w, h) = (img.width, img.height);
    let mut builder = EnergyBuilder::new(w * h);
    for y in 0..h {
        for x in 0..w {
            let intensity = img.get(x, y);
            builder.add_constant(intensity * intensity);
            let members: Vec<usize> = window(w, h, x, y).collect();
            for (k, &q) in members.iter().enumerate() {
                builder.add_unary(q, 1.0 / 81.0 - 2.0 * intensity / 9.0)?;
                for &r in &members[k + 1..] {
                    builder.add_pairwise(q, r, 2.0 / 81.0)?;
                }
            }
        }
    }
    builder.build()
}

/// Uniform 3×3 blur of a binary image, same border convention as
/// [`build_deconvolution_energy`].
pub fn blur3x3(truth: &Labeling, width: usize, height: usize) -> Result<GrayImage> {
    if width.checked_mul(height) != Some(truth.len()) {
        return Err(Error::ImageSize { width, height, len: truth.len() });
    }
    let pixels = (0..height)
        .flat_map(|y| (0..width).map(move |x| (x, y)))
        .map(|(x, y)| window(width, height, x, y).filter(|&q| truth.get(q)).count() as f64 / 9.0)
        .collect();
    GrayImage::new(width, height, pixels)
}

/// Ground-truth shapes for synthetic deconvolution instances. Coordinates
/// are in pixels; pixel `(x, y)` is inside a disk when its centre
/// `(x, y)` lies within `radius` of `(cx, cy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Empty,
    Full,
    Disk {
        cx: f64,
        cy: f64,
        radius: f64,
    },
    /// Half-open `[x0, x1) × [y0, y1)`.
    Rect {
        x0: usize,
        y0: usize,
        x1: usize,
        y1: usize,
    },
}

impl Shape {
    /// Disk centred in the image with radius a third of the shorter side.
    pub fn centered_disk(width: usize, height: usize) -> Shape {
        Shape::Disk {
            cx: (width as f64 - 1.0) / 2.0,
            cy: (height as f64 - 1.0) / 2.0,
            radius: width.min(height) as f64 / 3.0,
        }
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        match *self {
            Shape::Empty => false,
            Shape::Full => true,
            Shape::Disk { cx, cy, radius } => {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                dx * dx + dy * dy <= radius * radius
            }
            Shape::Rect { x0, y0, x1, y1 } => (x0..x1).contains(&x) && (y0..y1).contains(&y),
        }
    }

    pub fn rasterize(&self, width: usize, height: usize) -> Labeling {
        Labeling::from_bools((0..height).flat_map(|y| (0..width).map(move |x| self.contains(x, y))).collect())
    }
}

/// Observed image and binary ground truth for a deconvolution benchmark:
/// the rasterized shape blurred by a uniform 3×3 filter plus Gaussian
/// noise of standard deviation `sigma`, deterministic in `seed`.
pub fn synthesize_deconv_instance(
    width: usize,
    height: usize,
    shape: Shape,
    sigma: f64,
    seed: u64,
) -> Result<(GrayImage, Labeling)> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage);
    }
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::Parameter { name: "sigma", reason: "must be finite and nonnegative" });
    }
    let truth = shape.rasterize(width, height);
    let mut observed = blur3x3(&truth, width, height)?;
    if sigma > 0.0 {
        let noise = Normal::new(0.0, sigma)
            .map_err(|_| Error::Parameter { name: "sigma", reason: "invalid standard deviation" })?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in observed.pixels.iter_mut() {
            *v += noise.sample(&mut rng);
        }
    }
    Ok((observed, truth))
}

/// Appearance and pairwise parameters for segmentation with attraction and
/// repulsion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepulsionParams {
    pub mu_fg: f64,
    pub mu_bg: f64,
    pub sigma_app: f64,
    pub lambda_reg: f64,
    /// Intensity difference below which neighbours attract.
    pub c: f64,
}

impl Default for RepulsionParams {
    fn default() -> Self {
        RepulsionParams { mu_fg: 0.4, mu_bg: 0.6, sigma_app: 0.2, lambda_reg: 100.0, c: 0.06 }
    }
}

impl RepulsionParams {
    pub fn validate(&self) -> Result<()> {
        if self.sigma_app.is_nan() || self.sigma_app <= 0.0 {
            return Err(Error::Parameter { name: "sigma_app", reason: "must be positive" });
        }
        if self.lambda_reg.is_nan() || self.lambda_reg < 0.0 {
            return Err(Error::Parameter { name: "lambda_reg", reason: "must be nonnegative" });
        }
        if ![self.mu_fg, self.mu_bg, self.sigma_app, self.lambda_reg, self.c].iter().all(|v| v.is_finite()) {
            return Err(Error::Parameter { name: "repulsion", reason: "parameters must be finite" });
        }
        Ok(())
    }
}

/// Forward half of the 16-neighbourhood as `(dx, dy)`: the 8-connected
/// offsets plus the knight moves. Each unordered neighbour pair appears
/// exactly once when these are applied from every pixel.
pub const NEIGHBOURHOOD_16: [(isize, isize); 8] = [(1, 0), (-1, 1), (0, 1), (1, 1), (-2, 1), (2, 1), (-1, 2), (1, 2)];

/// Pairwise weight `ω(p,q) = (c - |I_p - I_q|) / dist(p,q)`; positive
/// attracts, negative repels.
pub fn pair_weight(ip: f64, iq: f64, dist: f64, c: f64) -> f64 {
    (-(ip - iq).abs() + c) / dist
}

/// Segmentation energy with Gaussian appearance terms and Potts
/// interactions `λ_reg·ω(p,q)·|s_p - s_q|` over the 16-neighbourhood.
///
/// Unary: `(I_p - μ_fg)²/(2σ²) - (I_p - μ_bg)²/(2σ²)`. The Potts term
/// `v·|s_p - s_q|` is expanded as `v·s_p + v·s_q - 2v·s_p·s_q`, so
/// attraction (`v > 0`) is submodular and repulsion (`v < 0`) is not.
pub fn build_repulsion_energy(img: &GrayImage, params: &RepulsionParams) -> Result<BinaryEnergy> {
    params.validate()?;
    let (w, h) = (img.width, img.height);
    let mut builder = EnergyBuilder::new(w * h);
    let two_var = 2.0 * params.sigma_app * params.sigma_app;
    for (p, &ip) in img.pixels.iter().enumerate() {
        let fg = (ip - params.mu_fg) * (ip - params.mu_fg) / two_var;
        let bg = (ip - params.mu_bg) * (ip - params.mu_bg) / two_var;
        builder.add_unary(p, fg - bg)?;
    }
    for y in 0..h {
        for x in 0..w {
            let p = y * w + x;
            for &(dx, dy) in &NEIGHBOURHOOD_16 {
                let (qx, qy) = (x as isize + dx, y as isize + dy);
                if qx < 0 || qx >= w as isize || qy >= h as isize {
                    continue;
                }
                let q = qy as usize * w + qx as usize;
                let dist = libm::sqrt((dx * dx + dy * dy) as f64);
                let v = params.lambda_reg * pair_weight(img.pixels[p], img.pixels[q], dist, params.c);
                if v == 0.0 {
                    continue;
                }
                builder.add_unary(p, v)?;
                builder.add_unary(q, v)?;
                builder.add_pairwise(p, q, -2.0 * v)?;
            }
        }
    }
    builder.build()
}

/// Seeded random energy: unaries uniform in `[-magnitude, magnitude)`, each
/// pair present with probability `pair_density`, coefficient magnitude
/// uniform in `[0, magnitude)` and positive with probability
/// `sup_fraction`.
pub fn random_energy(
    n: usize,
    pair_density: f64,
    sup_fraction: f64,
    magnitude: f64,
    seed: u64,
) -> Result<BinaryEnergy> {
    if n == 0 {
        return Err(Error::Parameter { name: "n", reason: "must be at least 1" });
    }
    if !(0.0..=1.0).contains(&pair_density) {
        return Err(Error::Parameter { name: "pair_density", reason: "must lie in [0, 1]" });
    }
    if !(0.0..=1.0).contains(&sup_fraction) {
        return Err(Error::Parameter { name: "sup_fraction", reason: "must lie in [0, 1]" });
    }
    if !magnitude.is_finite() || magnitude <= 0.0 {
        return Err(Error::Parameter { name: "magnitude", reason: "must be positive and finite" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unary: Vec<f64> = (0..n).map(|_| rng.random_range(-magnitude..magnitude)).collect();
    let mut pairs = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            if rng.random::<f64>() < pair_density {
                let size = rng.random::<f64>() * magnitude;
                let positive = rng.random::<f64>() < sup_fraction;
                pairs.push(crate::energy::Pair::new(p, q, if positive { size } else { -size }));
            }
        }
    }
    BinaryEnergy::new(unary, pairs, 0.0)
}

/// Ground-truth helper: how many pixels of `a` and `b` disagree, as a
/// fraction.
pub fn error_rate(a: &Labeling, b: &Labeling) -> Result<f64> {
    let diff = crate::energy::hamming(a, b)?;
    Ok(if a.is_empty() { 0.0 } else { diff as f64 / a.len() as f64 })
}

/// 16-neighbourhood pair count for a `width × height` grid (test helper).
pub fn neighbourhood_pairs(width: usize, height: usize) -> usize {
    let mut count = 0;
    for y in 0..height as isize {
        for x in 0..width as isize {
            count += NEIGHBOURHOOD_16
                .iter()
                .filter(|(dx, dy)| {
                    let (qx, qy) = (x + dx, y + dy);
                    qx >= 0 && qx < width as isize && qy < height as isize
                })
                .count();
        }
    }
    count
}
